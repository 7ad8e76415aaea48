use super::snap::{assemble, snap_contacts, Contact};
use super::{GeodesicError, PiecewiseCurve, Tolerances};
use crate::cells::Piece;
use crate::geom::{self, Point};
use crate::poly::{isolate_real_roots, Interval, Polynomial, RotatedGraph};

const SAMPLES: usize = 4096;

/// Smallest value of `h` on `[a, b]`.
pub(crate) fn poly_min(h: &Polynomial, a: f64, b: f64) -> f64 {
    let mut m = h.eval(a).min(h.eval(b));
    let d = h.derivative();
    if !d.is_zero() {
        if let Ok(roots) = isolate_real_roots(&d, Interval::new(a, b), 1e-14) {
            for r in roots {
                m = m.min(h.eval(r.x.clamp(a, b)));
            }
        }
    }
    m
}

/// Lower convex hull of points sorted by abscissa, as indices.
pub(crate) fn lower_hull(pts: &[Point]) -> Vec<usize> {
    let mut h: Vec<usize> = Vec::with_capacity(pts.len());
    for i in 0..pts.len() {
        while h.len() >= 2 {
            let (o, a) = (pts[h[h.len() - 2]], pts[h[h.len() - 1]]);
            if geom::cross(geom::sub(a, o), geom::sub(pts[i], o)) <= 0.0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(i);
    }
    h
}

/// Shortest curve from `a` to `b` in `{y <= f(x)}`.
///
/// The curve is the greatest convex minorant of the obstacle over `[a.x, b.x]`:
/// straight where it leaves the graph and following the graph where it touches it.
/// The contact stretches are found on a dense sample and then moved onto the exact
/// tangency points.
pub fn geodesic_below_graph(f: &Polynomial, a: Point, b: Point, tol: Tolerances) -> Result<PiecewiseCurve, GeodesicError> {
    for p in [a, b] {
        if p[1] - f.eval(p[0]) > tol.eps_geom * (1.0 + f.eval_scale(p[0])) {
            return Err(GeodesicError::OutsideRegion { at: p });
        }
    }
    if a[0] > b[0] {
        return geodesic_below_graph(f, b, a, tol).map(|c| c.reversed());
    }
    let straight = PiecewiseCurve::new(vec![Piece::segment(a, b)]);
    if f.degree() <= 1 || b[0] - a[0] <= 0.0 {
        return Ok(straight);
    }
    let slope = (b[1] - a[1]) / (b[0] - a[0]);
    let chord = Polynomial::new(vec![a[1] - slope * a[0], slope]);
    if poly_min(&f.sub(&chord), a[0], b[0]) >= -tol.eps_geom * (1.0 + f.eval_scale(a[0]).max(f.eval_scale(b[0]))) {
        return Ok(straight);
    }

    let n = SAMPLES;
    let h = (b[0] - a[0]) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| if i == n { b[0] } else { a[0] + h * i as f64 }).collect();
    let mut pts: Vec<Point> = xs.iter().map(|&x| [x, f.eval(x)]).collect();
    let on = |p: Point| (p[1] - f.eval(p[0])).abs() <= tol.eps_geom * (1.0 + f.eval_scale(p[0]));
    let on_graph: Vec<bool> = (0..=n).map(|i| if i == 0 { on(a) } else if i == n { on(b) } else { true }).collect();
    pts[0] = a;
    pts[n] = b;
    let hull = lower_hull(&pts);

    // maximal runs of graph samples on the hull
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for &i in &hull {
        if !on_graph[i] {
            continue;
        }
        match runs.last_mut() {
            Some(r) if i - r.1 <= 3 => r.1 = i,
            _ => runs.push((i, i)),
        }
    }
    let g = RotatedGraph::plain(f.clone());
    let mut contacts = Vec::new();
    if runs.first().is_none_or(|r| r.0 != 0) {
        contacts.push(Contact::Fixed(a));
    }
    for &(i, j) in &runs {
        contacts.push(Contact::Arc { g: g.clone(), lo: xs[i], hi: xs[j], pin_lo: i == 0, pin_hi: j == n, spacing: h });
    }
    if runs.last().is_none_or(|r| r.1 != n) {
        contacts.push(Contact::Fixed(b));
    }
    snap_contacts(&mut contacts);
    Ok(PiecewiseCurve::new(assemble(&contacts)))
}
