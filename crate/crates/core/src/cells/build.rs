use super::arrangement::{build, BuildOptions, InputPiece, VERTEX_TOL};
use super::complex::{Cell, CellComplex, CellGeometry};
use super::piece::Piece;
use super::{CellError, CurveKind};
use crate::features::critical_profile;
use crate::geom::{Point, Rect};
use crate::poly::{isolate_real_roots, HalfPlane, Interval, Polynomial, RotatedGraph};

/// Smallest offset used when stacking translated copies toward an open boundary.
pub const STACK_RESOLUTION: f64 = 1e-4;
/// Membership slack used when deciding whether a representative point lies in a set.
pub const MASK_TOL: f64 = 1e-9;

fn max_on(f: &Polynomial, lo: f64, hi: f64) -> f64 {
    let mut m = f.eval(lo).max(f.eval(hi));
    let d = f.derivative();
    if !d.is_zero() {
        if let Ok(rs) = isolate_real_roots(&d, Interval::new(lo, hi), 1e-12) {
            for r in rs {
                m = m.max(f.eval(r.x));
            }
        }
    }
    m
}

/// Brick pattern pieces for the half-plane below `graph`, generated in the graph's
/// own frame over the frame-aligned box that covers `window`. When `open` is set the
/// cells touching the graph are subdivided by copies of the graph shifted down by
/// `spacing / 2^n`.
pub fn halfplane_pieces(graph: &RotatedGraph, window: &Rect, spacing: f64, open: bool) -> Result<Vec<Piece>, CellError> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(CellError::InvalidSpacing(spacing));
    }
    let local: Vec<Point> = window.corners().iter().map(|&c| {
        let (u, v) = graph.to_local(c);
        [u, v]
    }).collect();
    let lw = Rect::around(&local);
    let (x0, x1, y0, y1) = (lw.xmin, lw.xmax, lw.ymin, lw.ymax);
    let f = &graph.poly;
    let seg = |a: Point, b: Point| Piece::segment(graph.to_world(a[0], a[1]), graph.to_world(b[0], b[1]));
    let shifted = |c: f64, lo: f64, hi: f64| {
        Piece::arc(RotatedGraph::new(f.sub(&Polynomial::constant(c)), graph.theta), lo, hi)
    };
    let mut out = Vec::new();
    let mut abscissae: Vec<f64> = Vec::new();
    let k0 = (x0 / spacing).ceil() as i64;
    let k1 = (x1 / spacing).floor() as i64;
    if k1 - k0 > 100_000 {
        return Err(CellError::TooManyCells);
    }
    for k in k0..=k1 {
        abscissae.push(k as f64 * spacing);
    }
    let stack: Vec<f64> = (1..)
        .map(|n| spacing / 2f64.powi(n))
        .take_while(|&d| d >= STACK_RESOLUTION)
        .collect();
    if f.degree() <= 1 {
        // translated copies of the line and vertical rays at grid abscissae
        out.push(shifted(0.0, x0, x1));
        let mut j = 1;
        while max_on(f, x0, x1) - j as f64 * spacing > y0 {
            if j > 100_000 {
                return Err(CellError::TooManyCells);
            }
            out.push(shifted(j as f64 * spacing, x0, x1));
            j += 1;
        }
        if open {
            for &d in &stack {
                out.push(shifted(d, x0, x1));
            }
        }
        for &a in &abscissae {
            let top = f.eval(a).min(y1);
            if top > y0 {
                out.push(seg([a, top], [a, y0]));
            }
        }
        return Ok(out);
    }
    let prof = critical_profile(f, Interval::new(x0, x1), 1e-12)?;
    abscissae.extend(prof.split_points(1e-12).into_iter().filter(|&x| x > x0 && x < x1));
    abscissae.push(x0);
    abscissae.push(x1);
    abscissae.sort_by(f64::total_cmp);
    abscissae.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    for &a in &abscissae {
        let top = f.eval(a).min(y1);
        if top > y0 {
            out.push(seg([a, top], [a, y0]));
        }
    }
    for w in abscissae.windows(2) {
        let (a, b) = (w[0], w[1]);
        out.push(shifted(0.0, a, b));
        let m = f.eval(a).min(f.eval(b));
        let mut k = ((m - y1) / spacing).ceil().max(1.0) as i64;
        loop {
            let y = m - k as f64 * spacing;
            if y <= y0 {
                break;
            }
            if y < y1 {
                out.push(seg([a, y], [b, y]));
            }
            k += 1;
            if k > 1_000_000 {
                return Err(CellError::TooManyCells);
            }
        }
        if open {
            for &d in &stack {
                out.push(shifted(d, a, b));
            }
        }
    }
    Ok(out)
}

fn check_brick_input(f: &Polynomial, window: &Rect, spacing: f64) -> Result<(), CellError> {
    if !window.is_valid() {
        return Err(CellError::InvalidWindow);
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(CellError::InvalidSpacing(spacing));
    }
    if !f.is_finite() {
        return Err(CellError::InvalidWindow);
    }
    if max_on(f, window.xmin, window.xmax) <= window.ymin {
        return Err(CellError::EmptyWindow);
    }
    Ok(())
}

fn halfplane_complex(hp: &HalfPlane, window: Rect, spacing: f64) -> Result<CellComplex, CellError> {
    let pieces = halfplane_pieces(&hp.graph, &window, spacing, hp.strict)?;
    let arr = build(window, pieces.into_iter().map(InputPiece::from).collect(), &[], BuildOptions { frame: true, faces: true })?;
    Ok(CellComplex::from_arrangement(&arr, &|p, _| hp.contains(p, MASK_TOL)))
}

/// Brick pattern decomposition of `{y <= f(x)}` within `window`.
pub fn brick_decomposition(f: &Polynomial, window: Rect, spacing: f64) -> Result<CellComplex, CellError> {
    check_brick_input(f, &window, spacing)?;
    halfplane_complex(&HalfPlane::closed(f.clone(), 0.0), window, spacing)
}

/// Decomposition of the open set `{y < f(x)}` within `window`.
pub fn open_halfplane_decomposition(f: &Polynomial, window: Rect, spacing: f64) -> Result<CellComplex, CellError> {
    check_brick_input(f, &window, spacing)?;
    halfplane_complex(&HalfPlane::open(f.clone(), 0.0), window, spacing)
}

/// Decomposition of (any) half-plane, closed or open, in an arbitrary frame.
pub fn rotated_halfplane_decomposition(hp: &HalfPlane, window: Rect, spacing: f64) -> Result<CellComplex, CellError> {
    if !window.is_valid() {
        return Err(CellError::InvalidWindow);
    }
    halfplane_complex(hp, window, spacing)
}

/// Abscissae of the 0-cells of an open polynomial curve, clipped to `window`, together
/// with the abscissa range actually covered and flags telling whether each end of
/// that range is an open end of the curve.
pub fn open_curve_breaks(kind: CurveKind, window: Interval) -> Result<(Vec<f64>, f64, f64, bool, bool), CellError> {
    let (dlo, dhi) = kind.domain();
    if dhi <= dlo {
        return Err(CellError::DegenerateInterval);
    }
    if !(window.lo < window.hi) || !window.lo.is_finite() || !window.hi.is_finite() {
        return Err(CellError::InvalidWindow);
    }
    let lo = dlo.max(window.lo);
    let hi = dhi.min(window.hi);
    if lo >= hi {
        return Ok((Vec::new(), lo, hi, false, false));
    }
    let open_lo = dlo.is_finite() && dlo >= window.lo;
    let open_hi = dhi.is_finite() && dhi <= window.hi;
    let mut xs: Vec<f64> = Vec::new();
    let stack = |n0: i32| (n0..).map(|n| 2f64.powi(-n)).take_while(|d| *d >= STACK_RESOLUTION).collect::<Vec<_>>();
    let count = |a: f64, b: f64| -> Result<(), CellError> {
        if b - a > 1e6 {
            Err(CellError::TooManyCells)
        } else {
            Ok(())
        }
    };
    match kind {
        CurveKind::Whole => {
            count(lo, hi)?;
            let mut n = lo.ceil();
            while n <= hi {
                xs.push(n);
                n += 1.0;
            }
        }
        CurveKind::RightOf(x0) => {
            count(lo, hi)?;
            xs.extend(stack(1).into_iter().map(|d| x0 + d));
            let mut m = 1.0;
            while x0 + m <= hi {
                xs.push(x0 + m);
                m += 1.0;
            }
        }
        CurveKind::LeftOf(x0) => {
            count(lo, hi)?;
            xs.extend(stack(1).into_iter().map(|d| x0 - d));
            let mut m = 1.0;
            while x0 - m >= lo {
                xs.push(x0 - m);
                m += 1.0;
            }
        }
        CurveKind::Bounded(x0, x1) => {
            let half = 0.5 * (x1 - x0);
            let mut n0 = 1;
            while 2f64.powi(-n0) >= half {
                n0 += 1;
            }
            let first = 2f64.powi(-n0);
            for d in stack(n0) {
                xs.push(x0 + d);
                xs.push(x1 - d);
            }
            count(x0, x1)?;
            let mut m = 1.0;
            while x0 + m <= x1 - first - 1e-12 {
                xs.push(x0 + m);
                m += 1.0;
            }
            if xs.is_empty() {
                xs.push(x0 + half);
            }
        }
    }
    if !open_lo {
        xs.push(lo);
    }
    if !open_hi {
        xs.push(hi);
    }
    xs.retain(|&x| x >= lo && x <= hi && !(open_lo && x <= lo) && !(open_hi && x >= hi));
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    Ok((xs, lo, hi, open_lo, open_hi))
}

/// 1-dimensional decomposition of an open polynomial curve; `window` bounds the
/// curve's local abscissa.
pub fn open_curve_decomposition(g: &RotatedGraph, kind: CurveKind, window: Interval) -> Result<CellComplex, CellError> {
    let (xs, lo, hi, open_lo, open_hi) = open_curve_breaks(kind, window)?;
    let frame = Piece::arc(g.clone(), window.lo, window.hi).bbox();
    let mut cells: Vec<Cell> = Vec::new();
    if lo >= hi {
        return Ok(CellComplex { window: frame, cells });
    }
    for &x in &xs {
        cells.push(Cell { id: cells.len(), dim: 0, geometry: CellGeometry::Point { at: g.point_at(x) }, boundary: Vec::new() });
    }
    let push_edge = |cells: &mut Vec<Cell>, a: f64, b: f64, boundary: Vec<usize>| {
        let id = cells.len();
        cells.push(Cell { id, dim: 1, geometry: CellGeometry::Edge { piece: Piece::arc(g.clone(), a, b) }, boundary });
    };
    if xs.is_empty() {
        push_edge(&mut cells, lo, hi, Vec::new());
        return Ok(CellComplex { window: frame, cells });
    }
    if open_lo {
        push_edge(&mut cells, lo, xs[0], vec![0]);
    }
    for i in 0..xs.len() - 1 {
        push_edge(&mut cells, xs[i], xs[i + 1], vec![i, i + 1]);
    }
    if open_hi {
        let last = xs.len() - 1;
        push_edge(&mut cells, xs[last], hi, vec![last]);
    }
    Ok(CellComplex { window: frame, cells })
}

/// Common refinement of two complexes over the same window, restricted to `mask`
/// and to the union of the two underlying sets.
pub fn overlay(a: &CellComplex, b: &CellComplex, mask: &dyn Fn(Point) -> bool) -> Result<CellComplex, CellError> {
    if a.window != b.window {
        return Err(CellError::WindowMismatch);
    }
    let pieces: Vec<InputPiece> = a.edge_pieces().into_iter().chain(b.edge_pieces()).map(InputPiece::from).collect();
    let mut points = a.points();
    points.extend(b.points());
    let arr = build(a.window, pieces, &points, BuildOptions { frame: true, faces: true })?;
    let (la, lb) = (a.locator(), b.locator());
    let tol = VERTEX_TOL * 0.01;
    Ok(CellComplex::from_arrangement(&arr, &|p, _| {
        mask(p) && (la.locate(p, tol).is_some() || lb.locate(p, tol).is_some())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    fn p(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    fn sample_partition(c: &CellComplex, inside: &dyn Fn(Point) -> bool, n: usize) {
        let loc = c.locator();
        let w = c.window;
        let mut state = 12345u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..n {
            let q = [w.xmin + w.width() * rnd(), w.ymin + w.height() * rnd()];
            let hits = loc.cells_containing(q, 1e-9);
            if inside(q) {
                assert_eq!(hits.len(), 1, "point {q:?} in {hits:?}");
            } else {
                assert!(hits.is_empty(), "outside point {q:?} in {hits:?}");
            }
        }
    }

    #[test]
    fn brick_of_parabola_counts() {
        let c = brick_decomposition(&p(&[0.0, 0.0, 1.0]), Rect::new(-1.0, 1.0, -2.5, 1.5), 1.0).unwrap();
        assert!(c.validate().is_empty(), "{:?}", c.validate());
        let n = c.counts();
        // graph vertices 3, two rungs of 3 vertices, three on the bottom edge
        assert_eq!((n.points, n.faces), (12, 6));
        assert_eq!(n.points as i64 - n.edges as i64 + n.faces as i64, 1, "{n:?}");
        let f = p(&[0.0, 0.0, 1.0]);
        sample_partition(&c, &|q| q[1] < f.eval(q[0]) - 1e-6, 2000);
    }

    #[test]
    fn flat_grid() {
        let c = brick_decomposition(&p(&[0.0]), Rect::new(0.0, 3.0, -2.0, 0.0), 1.0).unwrap();
        let n = c.counts();
        assert_eq!(n.faces, 6);
        for cell in c.cells_of_dim(2) {
            let CellGeometry::Face { polygon } = &cell.geometry else { unreachable!() };
            assert!((polygon.area() - 1.0).abs() < 1e-12);
        }
        assert!(c.validate().is_empty());
    }

    #[test]
    fn window_above_graph_is_empty() {
        assert_eq!(brick_decomposition(&p(&[0.0, 0.0, 1.0]), Rect::new(-1.0, 1.0, 2.0, 3.0), 1.0), Err(CellError::EmptyWindow));
        assert!(brick_decomposition(&p(&[0.0]), Rect::new(0.0, 1.0, -1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn open_halfplane_avoids_graph() {
        let f = p(&[0.0]);
        let c = open_halfplane_decomposition(&f, Rect::new(0.0, 1.0, -1.0, 0.0), 1.0).unwrap();
        for cell in &c.cells {
            match &cell.geometry {
                CellGeometry::Point { at } => assert!(at[1] < 0.0),
                CellGeometry::Edge { piece } => assert!(piece.midpoint()[1] < 0.0),
                CellGeometry::Face { .. } => {}
            }
        }
        // horizontal edges at -1/2, -1/4, ... down to the resolution
        let ys: Vec<f64> = c
            .cells_of_dim(1)
            .filter_map(|e| match &e.geometry {
                CellGeometry::Edge { piece } if (piece.start()[1] - piece.end()[1]).abs() < 1e-12 => Some(piece.start()[1]),
                _ => None,
            })
            .collect();
        assert!(ys.iter().any(|y| (y + 0.5).abs() < 1e-12));
        assert!(ys.iter().any(|y| (y + 1.0 / 8192.0).abs() < 1e-12));
        sample_partition(&c, &|q| q[1] < -1e-6, 1000);
        let c = open_halfplane_decomposition(&p(&[0.0, 0.0, 1.0]), Rect::new(-1.0, 1.0, -2.0, 1.5), 1.0).unwrap();
        assert!(c.validate().is_empty());
        let f = p(&[0.0, 0.0, 1.0]);
        sample_partition(&c, &|q| q[1] < f.eval(q[0]) - 1e-6, 1000);
    }

    #[test]
    fn open_curve_cells() {
        let g = RotatedGraph::plain(p(&[0.0, 1.0]));
        let c = open_curve_decomposition(&g, CurveKind::Whole, Interval::new(-2.0, 2.0)).unwrap();
        assert_eq!((c.counts().points, c.counts().edges), (5, 4));
        let c = open_curve_decomposition(&g, CurveKind::RightOf(0.0), Interval::new(0.0, 2.0)).unwrap();
        let xs: Vec<f64> = c.points().iter().map(|q| q[0]).collect();
        assert!(xs.contains(&1.0) && xs.contains(&2.0) && xs.contains(&0.5) && xs.contains(&0.25));
        assert!(!xs.iter().any(|&x| x <= 0.0));
        let c = open_curve_decomposition(&g, CurveKind::Bounded(0.0, 1.0), Interval::new(-1.0, 2.0)).unwrap();
        let xs: Vec<f64> = c.points().iter().map(|q| q[0]).collect();
        assert!(xs.contains(&0.25) && xs.contains(&0.75) && !xs.contains(&0.5));
        assert_eq!(c.counts().edges, c.counts().points + 1);
        assert_eq!(
            open_curve_decomposition(&g, CurveKind::Bounded(1.0, 1.0), Interval::new(0.0, 2.0)),
            Err(CellError::DegenerateInterval)
        );
    }

    #[test]
    fn offset_grids_overlay() {
        let w = Rect::new(0.0, 2.0, 0.0, 2.0);
        let grid = |off: f64| {
            let mut pcs = Vec::new();
            for k in 0..3 {
                let t = k as f64 + off;
                pcs.push(InputPiece::from(Piece::segment([t, -1.0], [t, 3.0])));
                pcs.push(InputPiece::from(Piece::segment([-1.0, t], [3.0, t])));
            }
            let arr = build(w, pcs, &[], BuildOptions { frame: true, faces: true }).unwrap();
            CellComplex::from_arrangement(&arr, &|_, _| true)
        };
        let (a, b) = (grid(0.0), grid(0.5));
        let o = overlay(&a, &b, &|_| true).unwrap();
        let n = o.counts();
        assert_eq!((n.points, n.faces), (25, 16));
        for cell in o.cells_of_dim(2) {
            let CellGeometry::Face { polygon } = &cell.geometry else { unreachable!() };
            assert!((polygon.area() - 0.25).abs() < 1e-12);
        }
        let again = overlay(&o, &o, &|_| true).unwrap();
        assert_eq!(again.counts(), o.counts());
    }

    #[test]
    fn overlay_is_idempotent_on_bricks() {
        let c = brick_decomposition(&p(&[0.0, 0.0, 1.0]), Rect::new(-1.0, 1.0, -2.5, 1.5), 1.0).unwrap();
        let o = overlay(&c, &c, &|_| true).unwrap();
        assert_eq!(o.counts(), c.counts());
        assert_eq!(overlay(&c, &brick_decomposition(&p(&[0.0, 0.0, 1.0]), Rect::new(-1.0, 1.0, -2.0, 1.5), 1.0).unwrap(), &|_| true),
            Err(CellError::WindowMismatch));
    }

    #[test]
    fn overlay_with_line_stays_on_graphs() {
        let w = Rect::new(-1.0, 2.0, -2.0, 2.0);
        let f = p(&[0.0, 0.0, 1.0]);
        let g = p(&[3.0, -1.0]);
        let a = brick_decomposition(&f, w, 1.0).unwrap();
        let b = brick_decomposition(&g, w, 1.0).unwrap();
        let o = overlay(&a, &b, &|q| q[1] <= f.eval(q[0]) + 1e-9 && q[1] <= g.eval(q[0]) + 1e-9).unwrap();
        assert!(o.validate().is_empty());
        for e in o.cells_of_dim(1) {
            let CellGeometry::Edge { piece } = &e.geometry else { unreachable!() };
            let m = piece.midpoint();
            let on_graph = (m[1] - f.eval(m[0])).abs() < 1e-9 || (m[1] - g.eval(m[0])).abs() < 1e-9;
            let linear = match piece {
                Piece::Segment { .. } => true,
                Piece::Arc { graph, .. } => graph.poly.degree() <= 1,
            };
            assert!(linear || on_graph);
        }
    }
}
