//! Regions bounded by arcs of rotated graphs: intersections of closed
//! half-planes, their validation, classification of basic sets, arrangements of
//! region boundaries and cell decompositions of finite unions.

mod classify;
mod intersect;
mod union;

pub use classify::{
    arrange_boundaries, classify_basic_set, union_membership, ArrangedFace, Classification, Membership, OpenCurve, PlaneArrangement,
};
pub use intersect::{
    decompose_closed, intersect_halfplanes, split_region_by_graph, validate_decomposition, PropertyCheck, SharedVertex,
    TypeIDecomposition, ValidationReport,
};
pub use union::union_cell_decomposition;

use crate::cells::arrangement::{Arrangement, ArrFace, VERTEX_TOL};
use crate::cells::piece::inside_loops;
use crate::cells::{CellError, Piece};
use crate::geom::{self, Point, Rect};
use crate::poly::{PolyError, RotatedGraph};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("graph coincides with a side of the region")]
    OverlapSide,
    #[error("two inputs define the same set")]
    DuplicateSet,
    #[error("invalid window")]
    InvalidWindow,
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// One side of a region boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Side {
    /// Directed so that the region lies on its left.
    pub piece: Piece,
    /// Index of the input that contributed this side; `None` for window edges.
    pub source: Option<usize>,
    /// Carrier graph oriented so that the region is where its membership is
    /// non-negative; `None` for window edges.
    pub graph: Option<RotatedGraph>,
}

impl Side {
    pub fn is_window(&self) -> bool {
        self.source.is_none()
    }
}

/// A connected region whose boundary consists of arcs of graphs and window edges.
/// The first loop runs counter-clockwise; further loops (if any) are holes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeIRegion {
    pub loops: Vec<Vec<Side>>,
    pub closed: bool,
    pub interior_point: Point,
}

impl TypeIRegion {
    pub fn sides(&self) -> impl Iterator<Item = &Side> + Clone {
        self.loops.iter().flatten()
    }

    fn pieces(&self) -> impl Iterator<Item = &Piece> + Clone {
        self.sides().map(|s| &s.piece)
    }

    /// Junctions between consecutive sides.
    pub fn vertices(&self) -> Vec<Point> {
        self.sides().map(|s| s.piece.start()).collect()
    }

    pub fn area(&self) -> f64 {
        0.5 * self.pieces().map(|p| p.area_term()).sum::<f64>()
    }

    pub fn bbox(&self) -> Rect {
        self.pieces().fold(Rect::around(&[self.interior_point]), |r, p| r.union(&p.bbox()))
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.pieces().map(|s| s.distance(p).0).fold(f64::INFINITY, f64::min)
    }

    /// Point membership; boundary points (within `tol`) belong to closed regions only.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.contains_as(p, tol, self.closed)
    }

    /// Membership in the closure (`closed`) or the interior of the region.
    pub fn contains_as(&self, p: Point, tol: f64, closed: bool) -> bool {
        let b = self.bbox();
        if !b.contains(p, tol) {
            return false;
        }
        if self.boundary_distance(p) <= tol {
            return closed;
        }
        inside_loops(self.pieces(), p, 0.0).unwrap_or(false)
    }

    /// Rectangle region covering a window, with window sides only.
    pub fn window(w: &Rect, closed: bool) -> TypeIRegion {
        let c = w.corners();
        let sides = (0..4).map(|i| Side { piece: Piece::segment(c[i], c[(i + 1) % 4]), source: None, graph: None }).collect();
        TypeIRegion {
            loops: vec![sides],
            closed,
            interior_point: [0.5 * (w.xmin + w.xmax), 0.5 * (w.ymin + w.ymax)],
        }
    }

    pub fn with_closed(mut self, closed: bool) -> TypeIRegion {
        self.closed = closed;
        self
    }
}

/// The arc of `g` over the parameter range that covers `window`, slightly padded.
pub(crate) fn graph_piece(g: &RotatedGraph, window: &Rect) -> Piece {
    let us: Vec<f64> = window.corners().iter().map(|&c| g.to_local(c).0).collect();
    let lo = us.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = us.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pad = 1e-3 * (hi - lo).max(1.0);
    Piece::arc(g.clone(), lo - pad, hi + pad)
}

/// Whether consecutive boundary pieces can be fused into one side.
fn mergeable(a: &Piece, b: &Piece) -> bool {
    match (a, b) {
        (Piece::Segment { a: p, b: q }, Piece::Segment { a: r, b: s }) => {
            let d1 = geom::normalize(geom::sub(*q, *p));
            let d2 = geom::normalize(geom::sub(*s, *r));
            geom::dist(*q, *r) <= VERTEX_TOL && geom::cross(d1, d2).abs() < 1e-12 && geom::dot(d1, d2) > 0.0
        }
        (Piece::Arc { graph: g1, to, .. }, Piece::Arc { graph: g2, from, .. }) => {
            g1 == g2 && (to - from).abs() <= 1e-9 * (1.0 + to.abs())
        }
        _ => false,
    }
}

fn fuse(a: &Piece, b: &Piece) -> Piece {
    match (a, b) {
        (Piece::Segment { a: p, .. }, Piece::Segment { b: s, .. }) => Piece::segment(*p, *s),
        (Piece::Arc { graph, from, .. }, Piece::Arc { to, .. }) => Piece::arc(graph.clone(), *from, *to),
        _ => unreachable!(),
    }
}

/// Orients `graph` so that the point just left of the middle of `piece` has
/// non-negative membership.
fn oriented(graph: &RotatedGraph, piece: &Piece) -> RotatedGraph {
    let t = piece.tangent_at(0.5);
    let m = piece.midpoint();
    let d = 1e-6 * (1.0 + geom::norm(m));
    let probe = geom::add(m, [-t[1] * d, t[0] * d]);
    if graph.membership(probe) >= 0.0 {
        graph.clone()
    } else {
        graph.flipped()
    }
}

/// Converts a face of an arrangement into a region. `source` maps an input piece
/// index to its source label (`None` for window edges); consecutive edges with the
/// same label on the same carrier are fused.
pub(crate) fn region_from_face(
    arr: &Arrangement,
    face: &ArrFace,
    source: &dyn Fn(usize) -> Option<usize>,
    closed: bool,
) -> TypeIRegion {
    let mut loops = Vec::new();
    for lp in std::iter::once(&face.outer).chain(face.holes.iter()) {
        let raw: Vec<(Piece, Option<usize>)> = lp
            .iter()
            .map(|&(e, fwd)| {
                let ed = &arr.edges[e];
                (if fwd { ed.piece.clone() } else { ed.piece.reversed() }, source(ed.src))
            })
            .collect();
        let n = raw.len();
        // rotate so that the loop starts where two sides cannot be fused
        let start = (0..n)
            .find(|&i| {
                let prev = &raw[(i + n - 1) % n];
                let cur = &raw[i];
                !(prev.1 == cur.1 && mergeable(&prev.0, &cur.0))
            })
            .unwrap_or(0);
        let mut sides: Vec<Side> = Vec::new();
        for k in 0..n {
            let (p, src) = &raw[(start + k) % n];
            if let Some(last) = sides.last_mut() {
                if last.source == *src && mergeable(&last.piece, p) {
                    last.piece = fuse(&last.piece, p);
                    continue;
                }
            }
            sides.push(Side { piece: p.clone(), source: *src, graph: None });
        }
        for s in sides.iter_mut() {
            if s.source.is_some() {
                let (g, _, _) = s.piece.as_graph();
                s.graph = Some(oriented(&g, &s.piece));
            }
        }
        loops.push(sides);
    }
    TypeIRegion { loops, closed, interior_point: face.interior_point }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_region_membership() {
        let r = TypeIRegion::window(&Rect::new(0.0, 2.0, 0.0, 1.0), true);
        assert!(r.contains([1.0, 0.5], 1e-9));
        assert!(r.contains([0.0, 0.5], 1e-9));
        assert!(!r.with_closed(false).contains([0.0, 0.5], 1e-9));
        let r = TypeIRegion::window(&Rect::new(0.0, 2.0, 0.0, 1.0), true);
        assert!((r.area() - 2.0).abs() < 1e-12);
        assert_eq!(r.vertices().len(), 4);
    }
}
