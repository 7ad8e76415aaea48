use super::below::poly_min;
use super::snap::{assemble, snap_contacts, Contact};
use super::{GeodesicError, PiecewiseCurve, Tolerances};
use crate::cells::Piece;
use crate::geom::{self, Point, Rect};
use crate::poly::RotatedGraph;
use crate::regions::TypeIRegion;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Samples per convex-up boundary side.
const SIDE_SAMPLES: usize = 160;

struct Constraint {
    g: RotatedGraph,
    slack: f64,
}

#[derive(Clone, Copy)]
enum Node {
    End(Point),
    Corner(Point),
    Sample { side: usize, k: usize, u: f64, at: Point },
}

impl Node {
    fn at(&self) -> Point {
        match *self {
            Node::End(p) | Node::Corner(p) => p,
            Node::Sample { at, .. } => at,
        }
    }
}

fn visible(p: Point, q: Point, cons: &[Constraint], bbox: &Rect, eps: f64) -> bool {
    if !bbox.contains(p, eps) || !bbox.contains(q, eps) {
        return false;
    }
    if geom::dist(p, q) == 0.0 {
        return true;
    }
    // cheap rejection on a few points before the exact minimum
    for c in cons {
        for k in 1..8 {
            if c.g.membership(geom::lerp(p, q, k as f64 / 8.0)) < -c.slack {
                return false;
            }
        }
    }
    let line = RotatedGraph::line_through(p, q);
    let (u0, u1) = (line.param_of(p), line.param_of(q));
    cons.iter().all(|c| {
        let (m, _) = line.membership_along(&c.g);
        poly_min(&m, u0.min(u1), u0.max(u1)) >= -c.slack
    })
}

#[derive(PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0)
    }
}

/// Shortest curve from `a` to `b` inside the closure of `t`.
///
/// A shortest path in the visibility graph of the endpoints, the region corners
/// and dense samples of the sides that bulge into the region is grouped into
/// stretches along those sides; the stretches are then moved onto the exact
/// tangency points.
pub fn geodesic_in_region(t: &TypeIRegion, a: Point, b: Point, tol: Tolerances) -> Result<PiecewiseCurve, GeodesicError> {
    let scale = 1.0 + geom::norm(a).max(geom::norm(b));
    let eps = tol.eps_geom * scale;
    for p in [a, b] {
        if !t.contains_as(p, eps, true) {
            return Err(GeodesicError::OutsideRegion { at: p });
        }
    }
    let bbox = t.bbox();
    let sides: Vec<_> = t.sides().collect();
    let exact: Vec<Constraint> = sides.iter().filter_map(|s| s.graph.clone()).map(|g| Constraint { g, slack: eps }).collect();
    if visible(a, b, &exact, &bbox, eps) {
        return Ok(PiecewiseCurve::new(vec![Piece::segment(a, b)]));
    }

    let mut nodes = vec![Node::End(a), Node::End(b)];
    nodes.extend(t.vertices().into_iter().map(Node::Corner));
    let mut cons = Vec::new();
    let mut spacing = vec![0.0; sides.len()];
    for (i, s) in sides.iter().enumerate() {
        let Some(g) = &s.graph else { continue };
        let (u0, u1) = (g.param_of(s.piece.start()), g.param_of(s.piece.end()));
        let d2 = g.poly.derivative().derivative();
        let h = (u1 - u0) / SIDE_SAMPLES as f64;
        let mut curv: f64 = 0.0;
        for k in 1..SIDE_SAMPLES {
            let u = u0 + h * k as f64;
            let c = d2.eval(u);
            if c > 0.0 {
                curv = curv.max(c);
                nodes.push(Node::Sample { side: i, k, u, at: g.point_at(u) });
            }
        }
        spacing[i] = h.abs();
        cons.push(Constraint { g: g.clone(), slack: eps + 0.25 * curv * h * h });
    }

    // Dijkstra with edges checked on demand
    let n = nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[0] = 0.0;
    heap.push(Item(0.0, 0));
    while let Some(Item(d, i)) = heap.pop() {
        if done[i] {
            continue;
        }
        done[i] = true;
        if i == 1 {
            break;
        }
        let p = nodes[i].at();
        for j in 0..n {
            if done[j] {
                continue;
            }
            let q = nodes[j].at();
            let nd = d + geom::dist(p, q);
            if nd < dist[j] && visible(p, q, &cons, &bbox, eps) {
                dist[j] = nd;
                prev[j] = i;
                heap.push(Item(nd, j));
            }
        }
    }
    if !dist[1].is_finite() {
        return Err(GeodesicError::Disconnected);
    }
    let mut path = vec![1];
    while *path.last().unwrap() != 0 {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();

    // group runs of neighbouring samples on one side into contact arcs
    let mut contacts: Vec<Contact> = Vec::new();
    let mut last_run: Option<(usize, usize)> = None;
    for &i in &path {
        match nodes[i] {
            Node::End(p) | Node::Corner(p) => {
                contacts.push(Contact::Fixed(p));
                last_run = None;
            }
            Node::Sample { side, k, u, .. } => {
                let g = sides[side].graph.clone().unwrap();
                if let (Some((s, kk)), Some(Contact::Arc { hi, .. })) = (last_run, contacts.last_mut()) {
                    if s == side && k.abs_diff(kk) <= 3 {
                        *hi = u;
                        last_run = Some((side, k));
                        continue;
                    }
                }
                contacts.push(Contact::Arc { g, lo: u, hi: u, pin_lo: false, pin_hi: false, spacing: spacing[side] });
                last_run = Some((side, k));
            }
        }
    }
    pin_touching_ends(&mut contacts, eps);
    snap_contacts(&mut contacts);
    Ok(PiecewiseCurve::new(assemble(&contacts)))
}

/// A fixed point lying on the graph of a neighbouring arc contact, within a few
/// samples of its near end, becomes that end.
fn pin_touching_ends(contacts: &mut Vec<Contact>, eps: f64) {
    let mut i = 0;
    while i < contacts.len() {
        let mut absorbed = false;
        if let Contact::Fixed(p) = contacts[i] {
            if i + 1 < contacts.len() {
                if let Contact::Arc { g, lo, pin_lo, spacing, .. } = &mut contacts[i + 1] {
                    let u = g.param_of(p);
                    if g.membership(p).abs() <= eps && (u - *lo).abs() <= 3.0 * *spacing + eps {
                        *lo = u;
                        *pin_lo = true;
                        absorbed = true;
                    }
                }
            }
            if !absorbed && i > 0 {
                if let Contact::Arc { g, hi, pin_hi, spacing, .. } = &mut contacts[i - 1] {
                    let u = g.param_of(p);
                    if g.membership(p).abs() <= eps && (u - *hi).abs() <= 3.0 * *spacing + eps {
                        *hi = u;
                        *pin_hi = true;
                        absorbed = true;
                    }
                }
            }
        }
        if absorbed {
            contacts.remove(i);
        } else {
            i += 1;
        }
    }
}
