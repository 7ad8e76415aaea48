//! Cell decompositions, classification and shortest curves for planar
//! semi-algebraic sets whose boundaries are rotated polynomial graphs.

pub mod geom;
pub mod cells;
pub mod features;
pub mod poly;
pub mod regions;
pub mod geodesic;
pub mod oracle;
pub mod interaction;
pub mod scene;
pub mod render;
pub mod cli;

pub use geom::{Point, Rect};
pub use poly::{graph_intersections, isolate_real_roots, HalfPlane, Interval, Intersections, Polynomial, RotatedGraph};
