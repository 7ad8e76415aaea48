//! Newton-type solvers for the tangency conditions that pin down a taut curve.

use crate::cells::Piece;
use crate::geom::{self, Point};
use crate::poly::{isolate_real_roots, Interval, Polynomial, RotatedGraph};

/// Abscissa `t` on `g` whose tangent line passes through `p`, nearest to `guess`
/// among the roots inside `bracket`.
pub(crate) fn point_tangent(g: &RotatedGraph, p: Point, guess: f64, bracket: (f64, f64)) -> Option<f64> {
    let (pu, pv) = g.to_local(p);
    let f = &g.poly;
    let d = f.derivative();
    // f(t) + f'(t) (pu - t) - pv
    let q = f.add(&d.mul(&Polynomial::new(vec![pu, -1.0]))).sub(&Polynomial::constant(pv));
    if q.is_zero() {
        return Some(guess);
    }
    let (lo, hi) = (bracket.0.min(bracket.1), bracket.0.max(bracket.1));
    let mut best: Option<f64> = None;
    for widen in [0.0, 1.0, 4.0] {
        let pad = widen * (hi - lo).max(1e-6);
        if let Ok(roots) = isolate_real_roots(&q, Interval::new(lo - pad, hi + pad), 1e-14) {
            for r in roots {
                if best.is_none_or(|b| (r.x - guess).abs() < (b - guess).abs()) {
                    best = Some(r.x);
                }
            }
        }
        if best.is_some() {
            break;
        }
    }
    best
}

fn bitangent_residual(g1: &RotatedGraph, t1: f64, g2: &RotatedGraph, t2: f64) -> [f64; 2] {
    let x1 = g1.point_at(t1);
    let x2 = g2.point_at(t2);
    let d = geom::sub(x2, x1);
    let tan = |g: &RotatedGraph, t: f64| g.dir_to_world(1.0, g.poly.derivative().eval(t));
    [geom::cross(tan(g1, t1), d), geom::cross(tan(g2, t2), d)]
}

/// Abscissae `(t1, t2)` on `g1`, `g2` whose common tangent line touches both, found
/// by damped Newton from the given guesses.
pub(crate) fn bitangent(g1: &RotatedGraph, t1: f64, g2: &RotatedGraph, t2: f64) -> Option<(f64, f64)> {
    let (mut a, mut b) = (t1, t2);
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    let mut r = bitangent_residual(g1, a, g2, b);
    for _ in 0..100 {
        let ha = 1e-7 * (1.0 + a.abs());
        let hb = 1e-7 * (1.0 + b.abs());
        let ra = bitangent_residual(g1, a + ha, g2, b);
        let ra2 = bitangent_residual(g1, a - ha, g2, b);
        let rb = bitangent_residual(g1, a, g2, b + hb);
        let rb2 = bitangent_residual(g1, a, g2, b - hb);
        let j = [
            [(ra[0] - ra2[0]) / (2.0 * ha), (rb[0] - rb2[0]) / (2.0 * hb)],
            [(ra[1] - ra2[1]) / (2.0 * ha), (rb[1] - rb2[1]) / (2.0 * hb)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let da = (r[0] * j[1][1] - r[1] * j[0][1]) / det;
        let db = (j[0][0] * r[1] - j[1][0] * r[0]) / det;
        let mut step = 1.0;
        let mut accepted = false;
        while step > 1e-6 {
            let (na, nb) = (a - step * da, b - step * db);
            let nr = bitangent_residual(g1, na, g2, nb);
            if norm(nr) < norm(r) || norm(nr) < 1e-15 {
                a = na;
                b = nb;
                r = nr;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted || (step * da).abs().max((step * db).abs()) < 1e-15 * (1.0 + a.abs() + b.abs()) {
            break;
        }
    }
    let scale = 1.0 + geom::dist(g1.point_at(a), g2.point_at(b));
    (norm(r) <= 1e-9 * scale).then_some((a, b))
}

/// A place where a taut curve touches an obstacle: a fixed corner or endpoint, or a
/// stretch of a graph entered at `lo` and left at `hi` (local abscissae).
#[derive(Debug, Clone)]
pub(crate) enum Contact {
    Fixed(Point),
    Arc { g: RotatedGraph, lo: f64, hi: f64, pin_lo: bool, pin_hi: bool, spacing: f64 },
}

fn bracket(t: f64, h: f64) -> (f64, f64) {
    let w = (4.0 * h).max(1e-6 * (1.0 + t.abs()));
    (t - w, t + w)
}

/// Moves the entry and exit abscissae of every arc contact onto the exact tangency
/// points with the neighbouring contacts. Arcs whose solved ends cross over become
/// fixed points.
pub(crate) fn snap_contacts(contacts: &mut [Contact]) {
    let n = contacts.len();
    let dirs: Vec<f64> = contacts
        .iter()
        .map(|c| match c {
            Contact::Arc { lo, hi, .. } if hi != lo => (hi - lo).signum(),
            Contact::Arc { .. } => 0.0,
            Contact::Fixed(_) => 0.0,
        })
        .collect();
    for i in 0..n.saturating_sub(1) {
        let (left, right) = contacts.split_at_mut(i + 1);
        match (&mut left[i], &mut right[0]) {
            (Contact::Fixed(p), Contact::Arc { g, lo, pin_lo: false, spacing, .. }) => {
                if let Some(t) = point_tangent(g, *p, *lo, bracket(*lo, *spacing)) {
                    *lo = t;
                }
            }
            (Contact::Arc { g, hi, pin_hi: false, spacing, .. }, Contact::Fixed(p)) => {
                if let Some(t) = point_tangent(g, *p, *hi, bracket(*hi, *spacing)) {
                    *hi = t;
                }
            }
            (
                Contact::Arc { g: g1, hi, pin_hi: false, spacing: h1, .. },
                Contact::Arc { g: g2, lo, pin_lo: false, spacing: h2, .. },
            ) => {
                if let Some((a, b)) = bitangent(g1, *hi, g2, *lo) {
                    if (a - *hi).abs() <= 8.0 * *h1 + 1e-9 && (b - *lo).abs() <= 8.0 * *h2 + 1e-9 {
                        *hi = a;
                        *lo = b;
                    }
                }
            }
            _ => {}
        }
    }
    for (c, dir) in contacts.iter_mut().zip(dirs) {
        if let Contact::Arc { g, lo, hi, .. } = c {
            let d = *hi - *lo;
            let tiny = d.abs() <= 1e-9 * (1.0 + lo.abs());
            if tiny || (dir != 0.0 && d.signum() != dir) {
                *c = Contact::Fixed(g.point_at(0.5 * (*lo + *hi)));
            }
        }
    }
}

/// Joins the contacts by straight segments. Consecutive collinear segments are fused.
pub(crate) fn assemble(contacts: &[Contact]) -> Vec<Piece> {
    let mut pieces: Vec<Piece> = Vec::new();
    let mut cur: Option<Point> = None;
    let push_segment = |pieces: &mut Vec<Piece>, a: Point, b: Point| {
        if geom::dist(a, b) <= 1e-14 * (1.0 + geom::norm(a)) {
            return;
        }
        if let Some(Piece::Segment { a: p, b: q }) = pieces.last() {
            let d1 = geom::normalize(geom::sub(*q, *p));
            let d2 = geom::normalize(geom::sub(b, a));
            if geom::cross(d1, d2).abs() < 1e-9 && geom::dot(d1, d2) > 0.0 {
                let p = *p;
                pieces.pop();
                pieces.push(Piece::segment(p, b));
                return;
            }
        }
        pieces.push(Piece::segment(a, b));
    };
    for c in contacts {
        match c {
            Contact::Fixed(p) => {
                if let Some(a) = cur {
                    push_segment(&mut pieces, a, *p);
                }
                cur = Some(*p);
            }
            Contact::Arc { g, lo, hi, .. } => {
                let s = g.point_at(*lo);
                if let Some(a) = cur {
                    push_segment(&mut pieces, a, s);
                }
                pieces.push(Piece::arc(g.clone(), *lo, *hi));
                cur = Some(g.point_at(*hi));
            }
        }
    }
    if pieces.is_empty() {
        if let Some(a) = cur {
            pieces.push(Piece::segment(a, a));
        }
    }
    pieces
}
