//! Univariate polynomials, rotated polynomial graphs and real root isolation.
//!
//! A rotated graph is the graph `v = f(u)` drawn in a frame turned by `theta`
//! counter-clockwise, so that `u = cos(theta) x + sin(theta) y` and
//! `v = -sin(theta) x + cos(theta) y`.  Its membership value at a world point is
//! `f(u) - v`; the closed half-plane is where that value is non-negative.

use crate::geom::{self, Point};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Coefficients below this fraction of the largest input coefficient count as zero
/// when deciding that two graphs coincide.
pub const OVERLAP_REL_TOL: f64 = 1e-12;

/// Relative size under which a local extremum value counts as touching zero.
const TOUCH_REL_TOL: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("invalid window [{0}, {1}]")]
    InvalidWindow(f64, f64),
    #[error("non-finite coefficient")]
    NonFinite,
}

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn check(&self) -> Result<(), PolyError> {
        if !self.lo.is_finite() || !self.hi.is_finite() || self.lo > self.hi {
            Err(PolyError::InvalidWindow(self.lo, self.hi))
        } else {
            Ok(())
        }
    }
}

/// Real polynomial with coefficients stored from the constant term upwards.
/// The empty coefficient list is the zero polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Polynomial::new(vec![0.0, 1.0])
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `sum |c_k| |x|^k`, the magnitude scale of an evaluation at `x`.
    pub fn eval_scale(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Polynomial {
        let mut c = vec![0.0];
        c.extend(self.coeffs.iter().enumerate().map(|(k, &a)| a / (k + 1) as f64));
        Polynomial::new(c)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| self.coeffs.get(i).copied().unwrap_or(0.0) + other.coeffs.get(i).copied().unwrap_or(0.0))
            .collect();
        Polynomial::new(c)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }

    /// `self(q(x))`.
    pub fn compose(&self, q: &Polynomial) -> Polynomial {
        self.coeffs.iter().rev().fold(Polynomial::zero(), |acc, &c| acc.mul(q).add(&Polynomial::constant(c)))
    }

    /// `self(-x)`.
    pub fn reflect(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs.iter().enumerate().map(|(k, &c)| if k % 2 == 1 { -c } else { c }).collect(),
        )
    }

    /// `self(x - h)`.
    pub fn shift(&self, h: f64) -> Polynomial {
        self.compose(&Polynomial::new(vec![-h, 1.0]))
    }

    /// Length of the graph over `[a, b]` by adaptive Simpson quadrature of `sqrt(1 + f'^2)`.
    pub fn arc_length(&self, a: f64, b: f64) -> f64 {
        let d = self.derivative();
        let g = |x: f64| {
            let s = d.eval(x);
            (1.0 + s * s).sqrt()
        };
        let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
        if hi == lo {
            return 0.0;
        }
        // split at a fixed number of panels so that steep high-degree arcs converge quickly
        let panels = 16;
        let h = (hi - lo) / panels as f64;
        let mut total = 0.0;
        for k in 0..panels {
            let x0 = lo + h * k as f64;
            let x1 = if k + 1 == panels { hi } else { x0 + h };
            let (f0, f1, fm) = (g(x0), g(x1), g(0.5 * (x0 + x1)));
            let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
            total += simpson(&g, x0, x1, f0, fm, f1, whole, 1e-13, 50);
        }
        sign * total
    }

    /// Drops trailing coefficients whose size is below `rel` times the largest one.
    pub fn trimmed(&self, rel: f64) -> Polynomial {
        let m = self.max_abs_coeff();
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|v| v.abs() <= rel * m) {
            c.pop();
        }
        Polynomial::new(c)
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson(g: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm), g(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        left + right + delta / 15.0
    } else {
        simpson(g, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + simpson(g, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
}

/// A real root reported by [`isolate_real_roots`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub x: f64,
    /// Set when the root coincides with a zero of the derivative or when nearby
    /// roots were merged.
    pub multiple: bool,
}

/// Sorted real roots of `p` in `window`; roots closer than `tol` are merged and flagged.
pub fn isolate_real_roots(p: &Polynomial, window: Interval, tol: f64) -> Result<Vec<Root>, PolyError> {
    if !p.is_finite() {
        return Err(PolyError::NonFinite);
    }
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    window.check()?;
    Ok(merge_roots(roots_in(p, window.lo, window.hi, tol), tol))
}

/// All real roots of `p`, using the Cauchy bound as the window.
pub fn all_real_roots(p: &Polynomial, tol: f64) -> Result<Vec<Root>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let b = cauchy_bound(p);
    isolate_real_roots(p, Interval::new(-b, b), tol)
}

/// Every real root of a non-zero polynomial lies within this radius of the origin.
pub fn cauchy_bound(p: &Polynomial) -> f64 {
    let c = p.coeffs();
    let lead = c[c.len() - 1].abs();
    1.0 + c[..c.len() - 1].iter().fold(0.0f64, |m, a| m.max(a.abs() / lead))
}

fn roots_in(p: &Polynomial, lo: f64, hi: f64, tol: f64) -> Vec<Root> {
    let c = p.coeffs();
    match c.len() {
        0 | 1 => return Vec::new(),
        2 => {
            let x = -c[0] / c[1];
            return if x >= lo && x <= hi { vec![Root { x, multiple: false }] } else { Vec::new() };
        }
        _ => {}
    }
    let crit: Vec<f64> = roots_in(&p.derivative(), lo, hi, tol).into_iter().map(|r| r.x).collect();
    let near_crit = |x: f64| crit.iter().any(|c| (c - x).abs() <= tol);
    let mut breaks = vec![lo];
    breaks.extend(crit.iter().copied().filter(|&x| x > lo && x < hi));
    breaks.push(hi);
    breaks.dedup();
    let vals: Vec<f64> = breaks.iter().map(|&x| p.eval(x)).collect();
    let is_zero: Vec<bool> = breaks
        .iter()
        .zip(&vals)
        .map(|(&x, &v)| v == 0.0 || v.abs() <= TOUCH_REL_TOL * p.eval_scale(x))
        .collect();
    let mut out = Vec::new();
    for i in 0..breaks.len() {
        if is_zero[i] {
            out.push(Root { x: breaks[i], multiple: near_crit(breaks[i]) });
        }
        if i + 1 < breaks.len() && !is_zero[i] && !is_zero[i + 1] && (vals[i] < 0.0) != (vals[i + 1] < 0.0) {
            let x = bisect(p, breaks[i], breaks[i + 1], vals[i]);
            out.push(Root { x, multiple: near_crit(x) });
        }
    }
    out
}

/// Bisection on a bracket with a sign change, followed by one guarded Newton step.
fn bisect(p: &Polynomial, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let neg_a = fa < 0.0;
    for _ in 0..2000 {
        let m = 0.5 * (a + b);
        if b - a <= 2.0 * f64::EPSILON * (1.0 + m.abs()) || m <= a || m >= b {
            break;
        }
        let fm = p.eval(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == neg_a {
            a = m;
        } else {
            b = m;
        }
    }
    let m = 0.5 * (a + b);
    let d = p.derivative().eval(m);
    if d != 0.0 {
        let n = m - p.eval(m) / d;
        if n >= a && n <= b && p.eval(n).abs() <= p.eval(m).abs() {
            return n;
        }
    }
    m
}

fn merge_roots(mut roots: Vec<Root>, tol: f64) -> Vec<Root> {
    roots.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut out: Vec<(Root, usize, f64)> = Vec::new();
    for r in roots {
        if let Some((last, n, sum)) = out.last_mut() {
            if r.x - last.x <= tol {
                *sum += r.x;
                *n += 1;
                last.multiple = true;
                continue;
            }
        }
        out.push((r, 1, r.x));
    }
    out.into_iter()
        .map(|(mut r, n, sum)| {
            if n > 1 {
                r.x = sum / n as f64;
            }
            r
        })
        .collect()
}

/// `(cos t, sin t)` with values within rounding of 0 or 1 snapped, so that axis
/// aligned frames compose without spurious tiny coefficients.
pub fn cos_sin(theta: f64) -> (f64, f64) {
    let snap = |v: f64| {
        if v.abs() < 1e-15 {
            0.0
        } else if (v.abs() - 1.0).abs() < 1e-15 {
            v.signum()
        } else {
            v
        }
    };
    (snap(theta.cos()), snap(theta.sin()))
}

/// Reduces an angle to `[0, 2 pi)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t >= 2.0 * PI {
        0.0
    } else {
        t
    }
}

/// The graph of `poly` in a frame rotated by `theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotatedGraph {
    pub poly: Polynomial,
    pub theta: f64,
}

impl RotatedGraph {
    pub fn new(poly: Polynomial, theta: f64) -> Self {
        RotatedGraph { poly, theta }
    }

    /// Unrotated graph `y = f(x)`.
    pub fn plain(poly: Polynomial) -> Self {
        RotatedGraph { poly, theta: 0.0 }
    }

    /// The line through `a` with direction `b - a`, as a constant graph in the frame
    /// whose `u` axis points from `a` to `b`.
    pub fn line_through(a: Point, b: Point) -> Self {
        let theta = normalize_angle((b[1] - a[1]).atan2(b[0] - a[0]));
        let (c, s) = cos_sin(theta);
        let v0 = -s * a[0] + c * a[1];
        RotatedGraph { poly: Polynomial::constant(v0), theta }
    }

    pub fn to_local(&self, p: Point) -> (f64, f64) {
        let (c, s) = cos_sin(self.theta);
        (c * p[0] + s * p[1], -s * p[0] + c * p[1])
    }

    pub fn to_world(&self, u: f64, v: f64) -> Point {
        let (c, s) = cos_sin(self.theta);
        [c * u - s * v, s * u + c * v]
    }

    /// World direction of the local vector `(du, dv)`.
    pub fn dir_to_world(&self, du: f64, dv: f64) -> Point {
        self.to_world(du, dv)
    }

    pub fn point_at(&self, u: f64) -> Point {
        self.to_world(u, self.poly.eval(u))
    }

    /// Unit tangent in the direction of increasing `u`.
    pub fn tangent_at(&self, u: f64) -> Point {
        geom::normalize(self.dir_to_world(1.0, self.poly.derivative().eval(u)))
    }

    /// Local abscissa of the projection of `p` onto the `u` axis.
    pub fn param_of(&self, p: Point) -> f64 {
        self.to_local(p).0
    }

    pub fn membership(&self, p: Point) -> f64 {
        let (u, v) = self.to_local(p);
        self.poly.eval(u) - v
    }

    /// The same point set described in the frame turned by a further half turn;
    /// membership changes sign.
    pub fn flipped(&self) -> RotatedGraph {
        RotatedGraph { poly: self.poly.reflect().scale(-1.0), theta: normalize_angle(self.theta + PI) }
    }

    /// World coordinates `(x(u), y(u))` of the graph as polynomials in `u`.
    pub fn world_polys(&self) -> (Polynomial, Polynomial) {
        let (c, s) = cos_sin(self.theta);
        let u = Polynomial::x();
        (u.scale(c).sub(&self.poly.scale(s)), u.scale(s).add(&self.poly.scale(c)))
    }

    /// Membership value of `other` along this graph, as a polynomial in this graph's `u`.
    /// Also returns the coefficient scale used to decide that it vanishes identically.
    pub fn membership_along(&self, other: &RotatedGraph) -> (Polynomial, f64) {
        let (c, s) = cos_sin(other.theta - self.theta);
        let u = Polynomial::x();
        let f = &self.poly;
        let uu = u.scale(c).add(&f.scale(s));
        let vv = u.scale(-s).add(&f.scale(c));
        let lhs = other.poly.compose(&uu);
        let scale = lhs.max_abs_coeff().max(vv.max_abs_coeff()).max(f.max_abs_coeff()).max(other.poly.max_abs_coeff());
        (lhs.sub(&vv), scale)
    }

    /// True when both graphs describe the same point set.
    pub fn same_curve(&self, other: &RotatedGraph) -> bool {
        let (m, scale) = self.membership_along(other);
        m.coeffs().iter().all(|c| c.abs() <= OVERLAP_REL_TOL * scale.max(f64::MIN_POSITIVE))
    }
}

/// A point where two graphs meet, with its abscissa on the first graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub u: f64,
    pub point: Point,
    pub multiple: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Intersections {
    Points(Vec<Crossing>),
    /// The graphs coincide on an interval (hence everywhere).
    OverlapPartial,
}

/// Points where `a` meets `b`, for `a`-abscissae within `window`.
pub fn graph_intersections(
    a: &RotatedGraph,
    b: &RotatedGraph,
    window: Interval,
    tol: f64,
) -> Result<Intersections, PolyError> {
    if !a.poly.is_finite() || !b.poly.is_finite() {
        return Err(PolyError::NonFinite);
    }
    window.check()?;
    let (m, scale) = a.membership_along(b);
    if m.coeffs().iter().all(|c| c.abs() <= OVERLAP_REL_TOL * scale.max(f64::MIN_POSITIVE)) {
        return Ok(Intersections::OverlapPartial);
    }
    let m = m.trimmed(1e-15);
    let roots = isolate_real_roots(&m, window, tol)?;
    Ok(Intersections::Points(
        roots
            .into_iter()
            .map(|r| {
                let u = if r.multiple { r.x } else { polish_crossing(a, b, r.x, window) };
                Crossing { u, point: a.point_at(u), multiple: r.multiple }
            })
            .collect(),
    ))
}

/// Newton on `a(u) = b(v)` directly. The composed membership polynomial loses
/// digits to cancellation far from the origin; the pair of original graphs does not.
fn polish_crossing(a: &RotatedGraph, b: &RotatedGraph, u0: f64, window: Interval) -> f64 {
    let (da, db) = (a.poly.derivative(), b.poly.derivative());
    let gap = |u: f64, v: f64| geom::sub(a.point_at(u), b.point_at(v));
    let (mut u, mut v) = (u0, b.param_of(a.point_at(u0)));
    let mut r = geom::norm(gap(u, v));
    for _ in 0..8 {
        if r == 0.0 {
            break;
        }
        let ta = a.dir_to_world(1.0, da.eval(u));
        let tb = b.dir_to_world(1.0, db.eval(v));
        let det = geom::cross(ta, tb);
        if det.abs() <= 1e-12 * geom::norm(ta) * geom::norm(tb) {
            break;
        }
        // solve ta du - tb dv = -gap
        let g = gap(u, v);
        let du = geom::cross(tb, g) / det;
        let dv = geom::cross(ta, g) / det;
        let (nu, nv) = (u + du, v + dv);
        let nr = geom::norm(gap(nu, nv));
        if !(nr < r) || nu < window.lo || nu > window.hi {
            break;
        }
        (u, v, r) = (nu, nv, nr);
    }
    u
}

/// A half-plane `membership >= 0` (or `> 0` when strict) bounded by a rotated graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfPlane {
    pub graph: RotatedGraph,
    #[serde(default)]
    pub strict: bool,
}

impl HalfPlane {
    pub fn new(graph: RotatedGraph, strict: bool) -> Self {
        HalfPlane { graph, strict }
    }

    pub fn closed(poly: Polynomial, theta: f64) -> Self {
        HalfPlane { graph: RotatedGraph::new(poly, theta), strict: false }
    }

    pub fn open(poly: Polynomial, theta: f64) -> Self {
        HalfPlane { graph: RotatedGraph::new(poly, theta), strict: true }
    }

    pub fn membership(&self, p: Point) -> f64 {
        self.graph.membership(p)
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        let m = self.membership(p);
        if self.strict {
            m > tol
        } else {
            m >= -tol
        }
    }

    pub fn same_set(&self, other: &HalfPlane) -> bool {
        self.strict == other.strict
            && self.graph.same_curve(&other.graph)
            && {
                // same side: a point just inside one is inside the other
                let p = self.graph.to_world(0.0, self.graph.poly.eval(0.0) - 1.0);
                other.membership(p) > 0.0
            }
    }
}
