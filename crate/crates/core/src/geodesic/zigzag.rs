use super::{convex_up_on, GeodesicError, Tolerances};
use crate::features::{classify_arc, ArcClass};
use crate::geom::{self, Point};
use crate::poly::{Interval, Polynomial};
use serde::{Deserialize, Serialize};

/// Intersection of the tangent lines of `f` at `a` and `b`.
pub fn tangent_apex(f: &Polynomial, a: f64, b: f64, eps: f64) -> Result<Point, GeodesicError> {
    let d = f.derivative();
    let (sa, sb) = (d.eval(a), d.eval(b));
    if (sa - sb).abs() <= eps * (1.0 + sa.abs().max(sb.abs())) {
        return Err(GeodesicError::ParallelTangents);
    }
    let x = (f.eval(b) - f.eval(a) + sa * a - sb * b) / (sa - sb);
    Ok([x, f.eval(a) + sa * (x - a)])
}

/// A polyline `start, apex, tangent point, apex, ..., apex, end` whose apexes are
/// the meeting points of the tangents at the neighbouring graph points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZigzagCurve {
    pub start: Point,
    pub end: Point,
    pub tangent_points: Vec<Point>,
    pub apexes: Vec<Point>,
}

impl ZigzagCurve {
    /// Zigzag touching `f` at the given increasing abscissae (the first and last
    /// are the endpoints). Where the tangents are parallel the apex is the chord midpoint.
    pub fn from_abscissae(f: &Polynomial, s: &[f64]) -> ZigzagCurve {
        let pt = |x: f64| [x, f.eval(x)];
        let start = pt(s[0]);
        let end = pt(*s.last().unwrap());
        if s.len() < 2 || s[0] == s[s.len() - 1] {
            return ZigzagCurve { start, end: start, tangent_points: Vec::new(), apexes: Vec::new() };
        }
        let apexes = s
            .windows(2)
            .map(|w| tangent_apex(f, w[0], w[1], 1e-12).unwrap_or_else(|_| geom::lerp(pt(w[0]), pt(w[1]), 0.5)))
            .collect();
        ZigzagCurve { start, end, tangent_points: s[1..s.len() - 1].iter().map(|&x| pt(x)).collect(), apexes }
    }

    pub fn abscissae(&self) -> Vec<f64> {
        if self.apexes.is_empty() {
            return vec![self.start[0]];
        }
        let mut v = vec![self.start[0]];
        v.extend(self.tangent_points.iter().map(|p| p[0]));
        v.push(self.end[0]);
        v
    }

    pub fn vertices(&self) -> Vec<Point> {
        let mut v = vec![self.start];
        if self.apexes.is_empty() {
            return v;
        }
        for (k, a) in self.apexes.iter().enumerate() {
            v.push(*a);
            v.push(if k < self.tangent_points.len() { self.tangent_points[k] } else { self.end });
        }
        v
    }

    pub fn length(&self) -> f64 {
        self.vertices().windows(2).map(|w| geom::dist(w[0], w[1])).sum()
    }
}

/// Adds the tangent point at the middle abscissa of every pair of neighbouring
/// tangent points.
pub fn refine_zigzag(z: &ZigzagCurve, f: &Polynomial) -> ZigzagCurve {
    let s = z.abscissae();
    if s.len() < 2 {
        return z.clone();
    }
    let mut t = Vec::with_capacity(2 * s.len() - 1);
    for w in s.windows(2) {
        t.push(w[0]);
        t.push(0.5 * (w[0] + w[1]));
    }
    t.push(*s.last().unwrap());
    ZigzagCurve::from_abscissae(f, &t)
}

#[cfg(test)]
fn polyline_length(p: &[Point]) -> f64 {
    p.windows(2).map(|w| geom::dist(w[0], w[1])).sum()
}

/// Replaces a polyline below a convex-up arc of `f`, running from the graph point
/// over `arc.lo` to the one over `arc.hi`, by a zigzag with no more vertices. The
/// tangent points are placed to minimise the zigzag length.
pub fn zigzagify(poly_curve: &[Point], f: &Polynomial, arc: Interval, tol: Tolerances) -> Result<ZigzagCurve, GeodesicError> {
    for &p in poly_curve {
        if p[1] > f.eval(p[0]) + tol.eps_geom * (1.0 + f.eval_scale(p[0])) {
            return Err(GeodesicError::NotBelowGraph { at: p });
        }
    }
    if !convex_up_on(f, arc.lo, arc.hi)? {
        return Err(GeodesicError::NotConvexIncreasing);
    }
    let (a, b) = (arc.lo, arc.hi);
    let inner = poly_curve.len().saturating_sub(2);
    let k = inner.saturating_sub(1) / 2;
    let mut s: Vec<f64> = (0..=k + 1).map(|i| a + (b - a) * i as f64 / (k + 1) as f64).collect();
    let total = |s: &[f64]| ZigzagCurve::from_abscissae(f, s).length();
    // coordinate descent with golden-section line searches
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut best = total(&s);
    for _ in 0..tol.max_refine.min(500) {
        for j in 1..=k {
            let (mut lo, mut hi) = (s[j - 1], s[j + 1]);
            let eval = |x: f64| {
                let mut t = s.clone();
                t[j] = x;
                total(&t)
            };
            let mut x1 = hi - phi * (hi - lo);
            let mut x2 = lo + phi * (hi - lo);
            let (mut f1, mut f2) = (eval(x1), eval(x2));
            while hi - lo > 1e-13 * (1.0 + hi.abs()) {
                if f1 < f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    f1 = eval(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    f2 = eval(x2);
                }
            }
            let x = 0.5 * (lo + hi);
            if eval(x) < total(&s) {
                s[j] = x;
            }
        }
        let now = total(&s);
        let done = best - now <= tol.eps_len * 1e-3;
        best = now;
        if done {
            break;
        }
    }
    Ok(ZigzagCurve::from_abscissae(f, &s))
}

/// Lengths of the inscribed polyline, the zigzag and the triangle-completed curve
/// over a partition, and the check of their difference against the sum of
/// `g(s_j) - g(secant slope)` with `g(m) = m + sqrt(1 + m^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleGap {
    pub inscribed: f64,
    pub zigzag: f64,
    pub triangles: f64,
    pub g_sum: f64,
    pub identity_residual: f64,
}

pub fn triangle_completion_gap(f: &Polynomial, q: &[f64]) -> Result<TriangleGap, GeodesicError> {
    if q.len() < 2 || q.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GeodesicError::NotConvexIncreasing);
    }
    let (x1, x2) = (q[0], q[q.len() - 1]);
    match classify_arc(f, Interval::new(x1, x2), 1e-12) {
        Ok(ArcClass::ConvexUpIncreasing) | Ok(ArcClass::Linear) => {}
        _ => return Err(GeodesicError::NotConvexIncreasing),
    }
    let d = f.derivative();
    let g = |m: f64| m + (1.0 + m * m).sqrt();
    let mut t = TriangleGap { inscribed: 0.0, zigzag: 0.0, triangles: 0.0, g_sum: 0.0, identity_residual: 0.0 };
    for w in q.windows(2) {
        let (s0, s1) = (w[0], w[1]);
        let h = s1 - s0;
        let (p0, p1) = ([s0, f.eval(s0)], [s1, f.eval(s1)]);
        let chord = geom::dist(p0, p1);
        t.inscribed += chord;
        t.zigzag += match tangent_apex(f, s0, s1, 1e-12) {
            Ok(c) => geom::dist(p0, c) + geom::dist(c, p1),
            Err(_) => chord,
        };
        let slope = d.eval(s1);
        t.triangles += (f.eval(s0) - f.eval(s1) - slope * (s0 - s1)) + h * (1.0 + slope * slope).sqrt();
        let secant = (f.eval(s1) - f.eval(s0)) / h;
        t.g_sum += h * (g(slope) - g(secant));
    }
    t.identity_residual = ((t.triangles - t.inscribed) - t.g_sum).abs();
    Ok(t)
}
