//! Shortest curves: tangent apexes and zigzag tangent curves under a convex-up
//! graph, the triangle-completion identity, and geodesics below a graph or inside
//! a region bounded by graphs.

mod below;
mod region;
mod snap;
mod zigzag;

pub use below::geodesic_below_graph;
pub use region::geodesic_in_region;
pub use zigzag::{refine_zigzag, tangent_apex, triangle_completion_gap, zigzagify, TriangleGap, ZigzagCurve};

use crate::cells::Piece;
use crate::features::{classify_arc, critical_profile, ArcClass, FeatureError};
use crate::geom::{self, Point};
use crate::poly::{Interval, PolyError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesicError {
    #[error("tangent lines are parallel")]
    ParallelTangents,
    #[error("vertex ({}, {}) lies above the graph", at[0], at[1])]
    NotBelowGraph { at: Point },
    #[error("the graph is not convex upward and increasing on the interval")]
    NotConvexIncreasing,
    #[error("point ({}, {}) lies outside the region", at[0], at[1])]
    OutsideRegion { at: Point },
    #[error("the endpoints lie in different components")]
    Disconnected,
    #[error("tangency conditions did not converge")]
    NoConvergence,
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Length convergence.
    pub eps_len: f64,
    /// Root, tangency and membership slack.
    pub eps_geom: f64,
    pub max_refine: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eps_len: 1e-9, eps_geom: 1e-9, max_refine: 10_000 }
    }
}

/// A continuous chain of segments and graph arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseCurve {
    pub pieces: Vec<Piece>,
}

impl PiecewiseCurve {
    pub fn new(pieces: Vec<Piece>) -> Self {
        PiecewiseCurve { pieces }
    }

    pub fn polyline(pts: &[Point]) -> Self {
        PiecewiseCurve { pieces: pts.windows(2).map(|w| Piece::segment(w[0], w[1])).collect() }
    }

    pub fn length(&self) -> f64 {
        self.pieces.iter().map(Piece::length).sum()
    }

    pub fn start(&self) -> Option<Point> {
        self.pieces.first().map(Piece::start)
    }

    pub fn end(&self) -> Option<Point> {
        self.pieces.last().map(Piece::end)
    }

    pub fn reversed(&self) -> Self {
        PiecewiseCurve { pieces: self.pieces.iter().rev().map(Piece::reversed).collect() }
    }

    /// Largest gap between the end of one piece and the start of the next.
    pub fn continuity_gap(&self) -> f64 {
        self.pieces.windows(2).map(|w| geom::dist(w[0].end(), w[1].start())).fold(0.0, f64::max)
    }

    /// True when no two consecutive pieces are both segments or both arcs.
    pub fn alternates(&self) -> bool {
        self.pieces.windows(2).all(|w| w[0].is_segment() != w[1].is_segment())
    }

    /// Largest sine of the angle between the directions of consecutive pieces at
    /// their junction.
    pub fn tangency_residual(&self) -> f64 {
        self.pieces
            .windows(2)
            .map(|w| geom::cross(w[0].tangent_at(1.0), w[1].tangent_at(0.0)).abs())
            .fold(0.0, f64::max)
    }

    /// True when every arc is convex upward in its own frame (checked on each
    /// monotone sub-arc).
    pub fn arcs_convex_up(&self) -> Result<bool, GeodesicError> {
        for p in &self.pieces {
            if let Piece::Arc { graph, from, to } = p {
                if !convex_up_on(&graph.poly, from.min(*to), from.max(*to))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Points at arc-length spacing at most `step`, always including the piece ends.
    pub fn sample(&self, step: f64) -> Vec<Point> {
        let mut out = Vec::new();
        for p in &self.pieces {
            let n = ((p.length() / step).ceil() as usize).max(1);
            let start = if out.is_empty() { 0 } else { 1 };
            for k in start..=n {
                out.push(p.point_at(k as f64 / n as f64));
            }
        }
        out
    }
}

/// Whether `f` is convex upward on `[lo, hi]`: every sub-interval between critical
/// points classifies as convex-up increasing or decreasing.
pub fn convex_up_on(f: &crate::poly::Polynomial, lo: f64, hi: f64) -> Result<bool, GeodesicError> {
    if hi - lo <= 0.0 {
        return Ok(true);
    }
    let prof = critical_profile(f, Interval::new(lo, hi), 1e-12)?;
    let mut knots = vec![lo];
    knots.extend(prof.split_points(1e-12).into_iter().filter(|&x| x > lo && x < hi));
    knots.push(hi);
    for w in knots.windows(2) {
        if w[1] - w[0] <= 1e-12 {
            continue;
        }
        match classify_arc(f, Interval::new(w[0], w[1]), 1e-12)? {
            ArcClass::ConvexUpIncreasing | ArcClass::ConvexUpDecreasing => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}
