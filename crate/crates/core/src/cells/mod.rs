//! Cell complexes: brick patterns below a graph, stacked decompositions of open
//! half-planes and open curves, and overlays of complexes on a common window.

pub mod arrangement;
mod build;
mod complex;
pub mod piece;

pub use build::{
    brick_decomposition, halfplane_pieces, open_curve_breaks, open_curve_decomposition, open_halfplane_decomposition,
    overlay, rotated_halfplane_decomposition, MASK_TOL, STACK_RESOLUTION,
};
pub use complex::{Cell, CellComplex, CellCounts, CellGeometry, CellId, GeneralizedPolygon, Locator};
pub use piece::Piece;

use crate::features::FeatureError;
use crate::poly::PolyError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CellError {
    #[error("window does not meet the set")]
    EmptyWindow,
    #[error("invalid window")]
    InvalidWindow,
    #[error("spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("complexes have different windows")]
    WindowMismatch,
    #[error("open curve interval is empty")]
    DegenerateInterval,
    #[error("decomposition would exceed the cell budget")]
    TooManyCells,
    #[error("topology error: {0}")]
    Topology(String),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Shape of the parameter domain of an open polynomial curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum CurveKind {
    /// The whole graph.
    Whole,
    /// Abscissae greater than the given value.
    RightOf(f64),
    /// Abscissae less than the given value.
    LeftOf(f64),
    /// Abscissae strictly between the two values.
    Bounded(f64, f64),
}

impl CurveKind {
    pub fn domain(&self) -> (f64, f64) {
        match *self {
            CurveKind::Whole => (f64::NEG_INFINITY, f64::INFINITY),
            CurveKind::RightOf(a) => (a, f64::INFINITY),
            CurveKind::LeftOf(a) => (f64::NEG_INFINITY, a),
            CurveKind::Bounded(a, b) => (a, b),
        }
    }

    pub fn contains(&self, u: f64) -> bool {
        let (a, b) = self.domain();
        u > a && u < b
    }
}
