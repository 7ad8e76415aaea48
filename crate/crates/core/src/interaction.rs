//! How often a curve enters the cells of a complex. A visit is a maximal stretch
//! of the curve inside one cell; touching a 1-cell at a single point is one visit.

use crate::cells::{CellComplex, CellId, Locator, Piece};
use crate::geodesic::PiecewiseCurve;
use crate::geom::Point;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Visits per cell after which the count is reported as unbounded.
pub const INTERACTION_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InteractionError {
    #[error("curve leaves the complex at ({}, {})", at[0], at[1])]
    CurveEscapesComplex { at: Point },
    #[error("step must be positive")]
    InvalidStep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionReport {
    pub per_cell: BTreeMap<CellId, usize>,
    pub max0: usize,
    pub max1: usize,
    pub max2: usize,
    /// False when some cell reached the cap.
    pub finite: bool,
}

/// Limits on visits to 0-, 1- and 2-cells; `b2 = None` only asks for finiteness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub b0: usize,
    pub b1: usize,
    pub b2: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub pass: bool,
    /// Cells over their bound, with dimension and count.
    pub witnesses: Vec<(CellId, u8, usize)>,
}

struct Walker<'a> {
    loc: Locator<'a>,
    tol: f64,
    seq: Vec<CellId>,
}

impl Walker<'_> {
    fn locate(&self, p: Point) -> Result<CellId, InteractionError> {
        self.loc.locate(p, self.tol).ok_or(InteractionError::CurveEscapesComplex { at: p })
    }

    fn push(&mut self, c: CellId) {
        if self.seq.last() != Some(&c) {
            self.seq.push(c);
        }
    }

    /// Records the cells met strictly between two samples in different cells,
    /// by bisection down to a quarter of the location tolerance.
    fn bisect(&mut self, piece: &Piece, len: f64, t0: f64, c0: CellId, t1: f64, c1: CellId) -> Result<(), InteractionError> {
        if c0 == c1 || (t1 - t0) * len <= 0.25 * self.tol {
            return Ok(());
        }
        let tm = 0.5 * (t0 + t1);
        let cm = self.locate(piece.point_at(tm))?;
        self.bisect(piece, len, t0, c0, tm, cm)?;
        self.push(cm);
        self.bisect(piece, len, tm, cm, t1, c1)
    }
}

/// Counts the visits of `curve` to each cell of `complex`, sampling at arc-length
/// spacing `step` and bisecting wherever consecutive samples lie in different cells.
pub fn count_interactions(curve: &PiecewiseCurve, complex: &CellComplex, step: f64) -> Result<InteractionReport, InteractionError> {
    if !(step > 0.0) {
        return Err(InteractionError::InvalidStep);
    }
    let tol = 1e-9 * (1.0 + complex.window.diameter());
    let mut w = Walker { loc: complex.locator(), tol, seq: Vec::new() };
    for piece in &curve.pieces {
        let len = piece.length();
        let n = ((len / step).ceil() as usize).max(1);
        let mut t_prev = 0.0;
        let mut c_prev = w.locate(piece.point_at(0.0))?;
        w.push(c_prev);
        for k in 1..=n {
            let t = k as f64 / n as f64;
            let c = w.locate(piece.point_at(t))?;
            w.bisect(piece, len, t_prev, c_prev, t, c)?;
            w.push(c);
            t_prev = t;
            c_prev = c;
        }
    }
    let mut per_cell: BTreeMap<CellId, usize> = BTreeMap::new();
    let mut finite = true;
    for &c in &w.seq {
        let e = per_cell.entry(c).or_insert(0);
        if *e < INTERACTION_CAP {
            *e += 1;
        }
        if *e >= INTERACTION_CAP {
            finite = false;
        }
    }
    let max_dim = |d: u8| per_cell.iter().filter(|(c, _)| complex.cells[**c].dim == d).map(|(_, n)| *n).max().unwrap_or(0);
    Ok(InteractionReport { max0: max_dim(0), max1: max_dim(1), max2: max_dim(2), per_cell, finite })
}

pub fn check_bounds(report: &InteractionReport, complex: &CellComplex, bounds: Bounds) -> BoundCheck {
    let mut witnesses = Vec::new();
    for (&c, &n) in &report.per_cell {
        let dim = complex.cells[c].dim;
        let limit = match dim {
            0 => Some(bounds.b0),
            1 => Some(bounds.b1),
            _ => bounds.b2,
        };
        let over = match limit {
            Some(b) => n > b,
            None => n >= INTERACTION_CAP,
        };
        if over {
            witnesses.push((c, dim, n));
        }
    }
    BoundCheck { pass: witnesses.is_empty() && (bounds.b2.is_some() || report.finite), witnesses }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::{brick_decomposition, CellGeometry};
    use crate::geodesic::{geodesic_below_graph, Tolerances};
    use crate::geom::{self, Rect};
    use crate::poly::Polynomial;
    use proptest::prelude::*;

    fn flat() -> CellComplex {
        brick_decomposition(&Polynomial::zero(), Rect::new(-2.0, 2.0, -2.0, 2.0), 1.0).unwrap()
    }

    /// A horizontal edge with a face directly above it, away from the window.
    fn inner_edge(c: &CellComplex) -> (CellId, Point, Point) {
        let loc = c.locator();
        for e in c.cells_of_dim(1) {
            if let CellGeometry::Edge { piece } = &e.geometry {
                let (a, b) = (piece.start(), piece.end());
                let (a, b) = if a[0] < b[0] { (a, b) } else { (b, a) };
                let mid = geom::lerp(a, b, 0.5);
                let above = [mid[0], mid[1] + 0.1];
                if (a[1] - b[1]).abs() < 1e-12
                    && a[1] < -0.5
                    && c.window.contains(above, -0.2)
                    && c.window.contains(a, -0.2)
                    && c.window.contains(b, -0.2)
                    && loc.locate(above, 1e-9).map(|f| c.cells[f].dim) == Some(2)
                {
                    return (e.id, a, b);
                }
            }
        }
        panic!("no interior horizontal edge");
    }

    #[test]
    fn segment_inside_one_face() {
        let c = flat();
        let (_, a, b) = inner_edge(&c);
        let y = a[1] + 0.1;
        let curve = PiecewiseCurve::polyline(&[[a[0] + 0.1 * (b[0] - a[0]), y], [a[0] + 0.9 * (b[0] - a[0]), y]]);
        let r = count_interactions(&curve, &c, 0.05).unwrap();
        assert_eq!(r.per_cell.len(), 1);
        assert_eq!((r.max0, r.max1, r.max2), (0, 0, 1));
        assert!(check_bounds(&r, &c, Bounds { b0: 1, b1: 1, b2: Some(1) }).pass);
    }

    #[test]
    fn along_edge_and_back() {
        let c = flat();
        let (e, a, b) = inner_edge(&c);
        let at = |s: f64| [a[0] + s * (b[0] - a[0]), a[1]];
        let curve = PiecewiseCurve::polyline(&[at(0.2), at(0.5), [at(0.65)[0], a[1] + 0.2], at(0.8)]);
        let r = count_interactions(&curve, &c, 0.01).unwrap();
        assert_eq!(r.per_cell[&e], 2);
        assert!(r.finite);
        let rev = count_interactions(&curve.reversed(), &c, 0.01).unwrap();
        assert_eq!(rev.per_cell, r.per_cell);
    }

    #[test]
    fn back_and_forth_fails() {
        let c = flat();
        let (e, a, b) = inner_edge(&c);
        let x = |s: f64| a[0] + s * (b[0] - a[0]);
        let pts: Vec<Point> = (0..8).map(|k| [x(0.1 + 0.1 * k as f64), a[1] + if k % 2 == 0 { 0.1 } else { -0.1 }]).collect();
        let r = count_interactions(&PiecewiseCurve::polyline(&pts), &c, 0.01).unwrap();
        assert_eq!(r.per_cell[&e], 7);
        let chk = check_bounds(&r, &c, Bounds { b0: 1, b1: 2, b2: None });
        assert!(!chk.pass);
        assert!(chk.witnesses.iter().any(|w| w.0 == e && w.2 == 7));
    }

    #[test]
    fn geodesic_below_parabola_bounds() {
        let f = Polynomial::new(vec![0.0, 0.0, 1.0]);
        let c = brick_decomposition(&f, Rect::new(-1.5, 1.5, -1.5, 1.5), 0.25).unwrap();
        for (a, b) in [([-1.0, 0.5], [1.0, 0.5]), ([-1.0, 1.0], [1.0, 1.0]), ([-1.2, -0.7], [0.9, 0.3])] {
            let g = geodesic_below_graph(&f, a, b, Tolerances::default()).unwrap();
            let r = count_interactions(&g, &c, 1e-3).unwrap();
            let chk = check_bounds(&r, &c, Bounds { b0: 1, b1: 2, b2: None });
            assert!(chk.pass, "{:?}", chk.witnesses);
        }
    }

    #[test]
    fn escaping_curve() {
        let c = flat();
        let curve = PiecewiseCurve::polyline(&[[0.0, -1.0], [0.0, 3.0]]);
        assert!(matches!(count_interactions(&curve, &c, 0.1), Err(InteractionError::CurveEscapesComplex { .. })));
        assert_eq!(count_interactions(&curve, &c, 0.0), Err(InteractionError::InvalidStep));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn reversal_invariant(pts in proptest::collection::vec((-1.9f64..1.9, -1.9f64..-0.05), 2..6)) {
            let c = flat();
            let pts: Vec<Point> = pts.into_iter().map(|(x, y)| [x, y]).collect();
            let curve = PiecewiseCurve::polyline(&pts);
            let r = count_interactions(&curve, &c, 0.02).unwrap();
            let rev = count_interactions(&curve.reversed(), &c, 0.02).unwrap();
            prop_assert_eq!(r.per_cell, rev.per_cell);
        }
    }
}
