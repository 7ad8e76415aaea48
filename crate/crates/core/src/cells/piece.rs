//! Directed straight segments and graph arcs, the 1-dimensional building blocks of
//! every complex and curve.

use crate::geom::{self, Point, Rect};
use crate::poly::{graph_intersections, isolate_real_roots, Interval, Intersections, Polynomial, RotatedGraph};
use serde::{Deserialize, Serialize};

const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Piece {
    Segment { a: Point, b: Point },
    /// The part of `graph` between local abscissae `from` and `to`, travelled from `from`.
    Arc { graph: RotatedGraph, from: f64, to: f64 },
}

/// Result of intersecting two pieces; parameters are normalized to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum PieceHits {
    Points(Vec<(f64, f64)>),
    /// Both pieces lie on the same line or graph.
    Overlap,
}

/// Outcome of casting a ray against a piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayHits {
    Count(usize),
    /// The ray grazes a vertex or is tangent; try another direction.
    Degenerate,
}

impl Piece {
    pub fn segment(a: Point, b: Point) -> Piece {
        Piece::Segment { a, b }
    }

    pub fn arc(graph: RotatedGraph, from: f64, to: f64) -> Piece {
        Piece::Arc { graph, from, to }
    }

    /// Abscissa on the arc for the normalized parameter `t`.
    fn u_at(from: f64, to: f64, t: f64) -> f64 {
        if t == 1.0 {
            to
        } else {
            from + (to - from) * t
        }
    }

    pub fn point_at(&self, t: f64) -> Point {
        match self {
            Piece::Segment { a, b } => {
                if t == 1.0 {
                    *b
                } else {
                    geom::lerp(*a, *b, t)
                }
            }
            Piece::Arc { graph, from, to } => graph.point_at(Self::u_at(*from, *to, t)),
        }
    }

    pub fn start(&self) -> Point {
        self.point_at(0.0)
    }

    pub fn end(&self) -> Point {
        self.point_at(1.0)
    }

    pub fn midpoint(&self) -> Point {
        self.point_at(0.5)
    }

    /// Unit tangent in the direction of travel.
    pub fn tangent_at(&self, t: f64) -> Point {
        match self {
            Piece::Segment { a, b } => geom::normalize(geom::sub(*b, *a)),
            Piece::Arc { graph, from, to } => {
                let d = graph.tangent_at(Self::u_at(*from, *to, t));
                if to >= from {
                    d
                } else {
                    geom::scale(d, -1.0)
                }
            }
        }
    }

    pub fn reversed(&self) -> Piece {
        match self {
            Piece::Segment { a, b } => Piece::Segment { a: *b, b: *a },
            Piece::Arc { graph, from, to } => Piece::Arc { graph: graph.clone(), from: *to, to: *from },
        }
    }

    /// The sub-piece between normalized parameters `t0` and `t1`.
    pub fn sub(&self, t0: f64, t1: f64) -> Piece {
        match self {
            Piece::Segment { .. } => Piece::Segment { a: self.point_at(t0), b: self.point_at(t1) },
            Piece::Arc { graph, from, to } => {
                Piece::Arc { graph: graph.clone(), from: Self::u_at(*from, *to, t0), to: Self::u_at(*from, *to, t1) }
            }
        }
    }

    pub fn is_segment(&self) -> bool {
        matches!(self, Piece::Segment { .. })
    }

    pub fn length(&self) -> f64 {
        match self {
            Piece::Segment { a, b } => geom::dist(*a, *b),
            Piece::Arc { graph, from, to } => graph.poly.arc_length(*from, *to).abs(),
        }
    }

    /// Underlying graph and the local abscissae of the two ends.
    pub fn as_graph(&self) -> (RotatedGraph, f64, f64) {
        match self {
            Piece::Segment { a, b } => {
                let g = RotatedGraph::line_through(*a, *b);
                let (ua, ub) = (g.param_of(*a), g.param_of(*b));
                (g, ua, ub)
            }
            Piece::Arc { graph, from, to } => (graph.clone(), *from, *to),
        }
    }

    /// Normalized parameter of the projection of `p` onto the carrier of the piece.
    pub fn param_of(&self, p: Point) -> f64 {
        match self {
            Piece::Segment { a, b } => {
                let d = geom::sub(*b, *a);
                let l2 = geom::dot(d, d);
                if l2 == 0.0 {
                    0.0
                } else {
                    geom::dot(geom::sub(p, *a), d) / l2
                }
            }
            Piece::Arc { graph, from, to } => {
                if to == from {
                    0.0
                } else {
                    (graph.param_of(p) - from) / (to - from)
                }
            }
        }
    }

    /// Exact axis-aligned bounding box.
    pub fn bbox(&self) -> Rect {
        match self {
            Piece::Segment { a, b } => Rect::around(&[*a, *b]),
            Piece::Arc { graph, from, to } => {
                let (lo, hi) = (from.min(*to), from.max(*to));
                let (xp, yp) = graph.world_polys();
                let mut pts = vec![graph.point_at(lo), graph.point_at(hi)];
                for q in [&xp, &yp] {
                    let d = q.derivative();
                    if d.is_zero() || lo == hi {
                        continue;
                    }
                    if let Ok(rs) = isolate_real_roots(&d, Interval::new(lo, hi), ROOT_TOL) {
                        pts.extend(rs.iter().map(|r| graph.point_at(r.x)));
                    }
                }
                Rect::around(&pts)
            }
        }
    }

    /// Distance from `p` to the piece and the normalized parameter of the closest point.
    pub fn distance(&self, p: Point) -> (f64, f64) {
        match self {
            Piece::Segment { a, b } => geom::segment_distance(p, *a, *b),
            Piece::Arc { graph, from, to } => {
                let (lo, hi) = (from.min(*to), from.max(*to));
                let mut best = (geom::dist(p, graph.point_at(lo)), lo);
                let d_hi = geom::dist(p, graph.point_at(hi));
                if d_hi < best.0 {
                    best = (d_hi, hi);
                }
                if hi > lo {
                    let (xp, yp) = graph.world_polys();
                    let dx = xp.sub(&Polynomial::constant(p[0]));
                    let dy = yp.sub(&Polynomial::constant(p[1]));
                    let crit = dx.mul(&xp.derivative()).add(&dy.mul(&yp.derivative()));
                    if !crit.is_zero() {
                        if let Ok(rs) = isolate_real_roots(&crit, Interval::new(lo, hi), ROOT_TOL) {
                            for r in rs {
                                let d = geom::dist(p, graph.point_at(r.x));
                                if d < best.0 {
                                    best = (d, r.x);
                                }
                            }
                        }
                    }
                }
                let t = if to == from { 0.0 } else { (best.1 - from) / (to - from) };
                (best.0, t)
            }
        }
    }

    /// Twice the signed area swept with respect to the origin, `int x dy - y dx`.
    pub fn area_term(&self) -> f64 {
        match self {
            Piece::Segment { a, b } => geom::cross(*a, *b),
            Piece::Arc { graph, from, to } => {
                let (xp, yp) = graph.world_polys();
                let integrand = xp.mul(&yp.derivative()).sub(&yp.mul(&xp.derivative()));
                let prim = integrand.integral();
                prim.eval(*to) - prim.eval(*from)
            }
        }
    }

    /// Number of transversal crossings of the open ray from `p` in direction `d`.
    pub fn ray_hits(&self, p: Point, d: Point, tol: f64) -> RayHits {
        match self {
            Piece::Segment { a, b } => {
                let e = geom::sub(*b, *a);
                let den = geom::cross(d, e);
                let w = geom::sub(*a, p);
                if den.abs() <= 1e-15 * geom::norm(e) {
                    // parallel: degenerate only if collinear with the ray ahead
                    if geom::cross(d, w).abs() <= tol && (geom::dot(w, d) > 0.0 || geom::dot(geom::sub(*b, p), d) > 0.0) {
                        return RayHits::Degenerate;
                    }
                    return RayHits::Count(0);
                }
                let s = geom::cross(w, e) / den; // along the ray
                let t = geom::cross(w, d) / den; // along the segment
                let tt = tol / geom::norm(e).max(1e-300);
                if t < -tt || t > 1.0 + tt || s < -tol {
                    return RayHits::Count(0);
                }
                if t.abs() <= tt || (1.0 - t).abs() <= tt || s.abs() <= tol {
                    return RayHits::Degenerate;
                }
                RayHits::Count(1)
            }
            Piece::Arc { graph, from, to } => {
                let (lo, hi) = (from.min(*to), from.max(*to));
                let (xp, yp) = graph.world_polys();
                let g = yp
                    .sub(&Polynomial::constant(p[1]))
                    .scale(d[0])
                    .sub(&xp.sub(&Polynomial::constant(p[0])).scale(d[1]));
                if g.is_zero() {
                    return RayHits::Degenerate;
                }
                let Ok(rs) = isolate_real_roots(&g, Interval::new(lo - tol, hi + tol), ROOT_TOL) else {
                    return RayHits::Degenerate;
                };
                let mut n = 0;
                for r in rs {
                    let q = graph.point_at(r.x);
                    let s = geom::dot(geom::sub(q, p), d);
                    if s < -tol {
                        continue;
                    }
                    if r.multiple || (r.x - lo).abs() <= tol || (r.x - hi).abs() <= tol || s.abs() <= tol {
                        return RayHits::Degenerate;
                    }
                    n += 1;
                }
                RayHits::Count(n)
            }
        }
    }
}

/// Intersections of two pieces, including touching at endpoints, within `tol`.
pub fn intersect_pieces(p: &Piece, q: &Piece, tol: f64) -> PieceHits {
    if let (Piece::Segment { a, b }, Piece::Segment { a: c, b: d }) = (p, q) {
        return segment_hits(*a, *b, *c, *d, tol);
    }
    // parametrize the arc (or the first piece if both are arcs)
    let (arc, other, swapped) = if p.is_segment() { (q, p, true) } else { (p, q, false) };
    let (ga, ua, ub) = arc.as_graph();
    let (gb, _, _) = other.as_graph();
    let (lo, hi) = (ua.min(ub), ua.max(ub));
    let du = tol.max(1e-12 * (1.0 + lo.abs().max(hi.abs())));
    let hits = match graph_intersections(&ga, &gb, Interval::new(lo - du, hi + du), ROOT_TOL) {
        Ok(Intersections::OverlapPartial) => return PieceHits::Overlap,
        Ok(Intersections::Points(v)) => v,
        Err(_) => return PieceHits::Points(Vec::new()),
    };
    let len_o = other.length().max(1e-300);
    let mut out = Vec::new();
    for h in hits {
        let ta = arc.param_of(h.point);
        let tb = other.param_of(h.point);
        let tol_b = match other {
            Piece::Segment { .. } => tol / len_o,
            Piece::Arc { from, to, .. } => du / (to - from).abs().max(1e-300),
        };
        if tb < -tol_b || tb > 1.0 + tol_b {
            continue;
        }
        // the matched point must really lie on the other piece
        if geom::dist(other.point_at(tb.clamp(0.0, 1.0)), h.point) > 10.0 * tol {
            continue;
        }
        let (ta, tb) = (ta.clamp(0.0, 1.0), tb.clamp(0.0, 1.0));
        out.push(if swapped { (tb, ta) } else { (ta, tb) });
    }
    PieceHits::Points(out)
}

fn segment_hits(a: Point, b: Point, c: Point, d: Point, tol: f64) -> PieceHits {
    let e = geom::sub(b, a);
    let f = geom::sub(d, c);
    let (le, lf) = (geom::norm(e), geom::norm(f));
    if le == 0.0 || lf == 0.0 {
        return PieceHits::Points(Vec::new());
    }
    let den = geom::cross(e, f);
    let w = geom::sub(c, a);
    if den.abs() <= 1e-14 * le * lf {
        if (geom::cross(e, w) / le).abs() <= tol {
            return PieceHits::Overlap;
        }
        return PieceHits::Points(Vec::new());
    }
    let t = geom::cross(w, f) / den;
    let s = geom::cross(w, e) / den;
    let (te, tf) = (tol / le, tol / lf);
    if t < -te || t > 1.0 + te || s < -tf || s > 1.0 + tf {
        return PieceHits::Points(Vec::new());
    }
    PieceHits::Points(vec![(t.clamp(0.0, 1.0), s.clamp(0.0, 1.0))])
}

/// Parity test for a point against closed loops of pieces. `None` when every
/// probe direction was degenerate.
pub fn inside_loops<'a>(loops: impl Iterator<Item = &'a Piece> + Clone, p: Point, tol: f64) -> Option<bool> {
    for k in 0..7 {
        let ang = 0.4142135623 + 0.7712345 * k as f64 + 0.1 * (k * k) as f64;
        let d = [ang.cos(), ang.sin()];
        let mut total = 0;
        let mut bad = false;
        for pc in loops.clone() {
            match pc.ray_hits(p, d, tol) {
                RayHits::Count(n) => total += n,
                RayHits::Degenerate => {
                    bad = true;
                    break;
                }
            }
        }
        if !bad {
            return Some(total % 2 == 1);
        }
    }
    None
}
