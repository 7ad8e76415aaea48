use super::classify::OpenCurve;
use super::{RegionError, TypeIRegion};
use crate::cells::arrangement::{build, BuildOptions, InputPiece, VERTEX_TOL};
use crate::cells::{halfplane_pieces, open_curve_breaks, CellComplex, Piece, MASK_TOL};
use crate::geom::{self, Point, Rect};
use crate::poly::{Interval, RotatedGraph};

fn curve_input(c: &OpenCurve, window: &Rect) -> Result<Vec<InputPiece>, RegionError> {
    let us: Vec<f64> = window.corners().iter().map(|&p| c.graph.to_local(p).0).collect();
    let lo = us.iter().cloned().fold(f64::INFINITY, f64::min) - 1e-6;
    let hi = us.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1e-6;
    let (xs, a, b, open_lo, open_hi) = open_curve_breaks(c.kind, Interval::new(lo, hi))?;
    if a >= b {
        return Ok(Vec::new());
    }
    let mut knots = vec![a];
    knots.extend(xs.iter().cloned().filter(|&x| x > a && x < b));
    knots.push(b);
    let n = knots.len() - 1;
    Ok((0..n)
        .map(|i| InputPiece {
            piece: Piece::arc(c.graph.clone(), knots[i], knots[i + 1]),
            open_start: i == 0 && open_lo,
            open_end: i == n - 1 && open_hi,
        })
        .collect())
}

fn on_curve(c: &OpenCurve, p: Point) -> bool {
    let u = c.graph.param_of(p);
    c.kind.contains(u) && geom::dist(c.graph.point_at(u), p) <= 1e-9
}

/// Cell decomposition of `points ∪ curves ∪ regions` inside `window`.
///
/// Region interiors get the brick or stacked pattern of each of their side graphs;
/// curve pieces inside a region are absorbed by it, and the points where a curve
/// meets a region boundary or another curve become 0-cells.
pub fn union_cell_decomposition(
    points: &[Point],
    curves: &[OpenCurve],
    regions: &[TypeIRegion],
    window: Rect,
    spacing: f64,
) -> Result<CellComplex, RegionError> {
    if !window.is_valid() {
        return Err(RegionError::InvalidWindow);
    }
    let in_regions = |p: Point| regions.iter().any(|r| r.contains(p, MASK_TOL));
    let mut region_input: Vec<InputPiece> = Vec::new();
    let mut patterns: Vec<(RotatedGraph, bool)> = Vec::new();
    for r in regions {
        for s in r.sides() {
            region_input.push(s.piece.clone().into());
            if let Some(g) = &s.graph {
                let open = !r.closed;
                let seen = patterns.iter().any(|(h, o)| *o == open && h.same_curve(g) && h.membership(r.interior_point) > 0.0);
                if !seen {
                    patterns.push((g.clone(), open));
                }
            }
        }
    }
    // curve pieces outside the regions, cut where they meet region boundaries
    let mut curve_input: Vec<InputPiece> = Vec::new();
    for c in curves {
        curve_input.extend(self::curve_input(c, &window)?);
    }
    let mut kept_curves: Vec<InputPiece> = Vec::new();
    if !curve_input.is_empty() {
        let n = curve_input.len();
        let mut all = curve_input;
        all.extend(region_input.iter().cloned());
        let arr = build(window, all, points, BuildOptions { frame: true, faces: false })?;
        for e in &arr.edges {
            if e.src >= n || in_regions(e.piece.midpoint()) {
                continue;
            }
            kept_curves.push(InputPiece {
                piece: e.piece.clone(),
                open_start: !arr.vertex_closed[e.v[0]],
                open_end: !arr.vertex_closed[e.v[1]],
            });
        }
    }
    let mut input = kept_curves;
    input.extend(region_input);
    for (g, open) in &patterns {
        input.extend(halfplane_pieces(g, &window, spacing, *open)?.into_iter().map(InputPiece::from));
    }
    let arr = build(window, input, points, BuildOptions { frame: true, faces: true })?;
    let keep = |p: Point, _dim: u8| {
        in_regions(p) || curves.iter().any(|c| on_curve(c, p)) || points.iter().any(|q| geom::dist(*q, p) <= VERTEX_TOL)
    };
    Ok(CellComplex::from_arrangement(&arr, &keep))
}
