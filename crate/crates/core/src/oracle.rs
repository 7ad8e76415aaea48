//! Brute-force references: shortest polygonal paths on a grid and Gauss-Legendre
//! arc length. Nothing here uses the analytic geodesic or tangency machinery.

use crate::geom::{self, Point, Rect};
use crate::poly::{Interval, Polynomial};
use crate::regions::TypeIRegion;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

/// Interior checkpoints tested on every grid edge.
const CHECKPOINTS: usize = 8;
/// Factor in the a-priori gap `c * diameter / grid_n`.
pub const RESOLUTION_FACTOR: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("no path at this resolution")]
    Unreachable,
    #[error("endpoint ({}, {}) is outside the region", at[0], at[1])]
    EndpointOutside { at: Point },
    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// Grid cells per axis; the grid has `grid_n + 1` samples per axis so that
    /// doubling it keeps every old sample.
    pub grid_n: usize,
    /// Largest hop, in grid cells along each axis.
    pub neighbor_radius: usize,
    pub tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { grid_n: 256, neighbor_radius: 6, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OraclePath {
    pub vertices: Vec<Point>,
    pub length: f64,
    /// Conservative bound on how much `length` may exceed the true infimum.
    pub resolution_bound: f64,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
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

/// Shortest polyline from `a` to `b` through grid samples of `window` inside the
/// region given by `inside`, found by A* over hops of at most `neighbor_radius`
/// cells along primitive directions. A hop is allowed when its interior
/// checkpoints are inside.
pub fn polygonal_shortest_path(
    inside: &dyn Fn(Point) -> bool,
    a: Point,
    b: Point,
    window: Rect,
    cfg: OracleConfig,
) -> Result<OraclePath, OracleError> {
    if cfg.grid_n < 32 || cfg.neighbor_radius < 2 || !window.is_valid() {
        return Err(OracleError::InvalidConfig(format!("grid_n {} radius {}", cfg.grid_n, cfg.neighbor_radius)));
    }
    for p in [a, b] {
        if !inside(p) {
            return Err(OracleError::EndpointOutside { at: p });
        }
    }
    let n = cfg.grid_n;
    let side = n + 1;
    let (hx, hy) = (window.width() / n as f64, window.height() / n as f64);
    let grid = |i: usize| [window.xmin + hx * (i % side) as f64, window.ymin + hy * (i / side) as f64];
    let seg_ok = |p: Point, q: Point| (1..=CHECKPOINTS).all(|k| inside(geom::lerp(p, q, k as f64 / (CHECKPOINTS + 1) as f64)));
    let r = cfg.neighbor_radius as i64;
    let offsets: Vec<(i64, i64)> = (-r..=r)
        .flat_map(|dx| (-r..=r).map(move |dy| (dx, dy)))
        .filter(|&(dx, dy)| (dx, dy) != (0, 0) && gcd(dx.unsigned_abs() as usize, dy.unsigned_abs() as usize) == 1)
        .collect();

    let m = side * side;
    let (ia, ib) = (m, m + 1);
    let total = m + 2;
    let pos = |i: usize| if i == ia { a } else if i == ib { b } else { grid(i) };
    let mut ok: Vec<Option<bool>> = vec![None; m];
    let mut node_ok = |i: usize| *ok[i].get_or_insert_with(|| inside(grid(i)));
    // grid samples within the hop radius of the free endpoints
    let near = |p: Point| -> Vec<usize> {
        let ci = ((p[0] - window.xmin) / hx).round() as i64;
        let cj = ((p[1] - window.ymin) / hy).round() as i64;
        let mut v = Vec::new();
        for dj in -r..=r {
            for di in -r..=r {
                let (i, j) = (ci + di, cj + dj);
                if i >= 0 && j >= 0 && (i as usize) < side && (j as usize) < side {
                    v.push(j as usize * side + i as usize);
                }
            }
        }
        v
    };
    let near_b = near(b);
    let reach_b = r as f64 * hx.hypot(hy);

    let mut dist = vec![f64::INFINITY; total];
    let mut prev = vec![usize::MAX; total];
    let mut done = vec![false; total];
    let mut heap = BinaryHeap::new();
    dist[ia] = 0.0;
    heap.push(Item(geom::dist(a, b), ia));
    while let Some(Item(_, i)) = heap.pop() {
        if done[i] {
            continue;
        }
        done[i] = true;
        if i == ib {
            break;
        }
        let p = pos(i);
        let mut relax = |j: usize, dist: &mut Vec<f64>, heap: &mut BinaryHeap<Item>| {
            if done[j] {
                return;
            }
            let q = pos(j);
            let nd = dist[i] + geom::dist(p, q);
            if nd < dist[j] && seg_ok(p, q) {
                dist[j] = nd;
                prev[j] = i;
                heap.push(Item(nd + geom::dist(q, b), j));
            }
        };
        let mut cand: Vec<usize> = Vec::new();
        if i == ia {
            cand.extend(near(a));
        } else {
            let (ci, cj) = ((i % side) as i64, (i / side) as i64);
            for &(dx, dy) in &offsets {
                let (x, y) = (ci + dx, cj + dy);
                if x >= 0 && y >= 0 && (x as usize) < side && (y as usize) < side {
                    cand.push(y as usize * side + x as usize);
                }
            }
        }
        for j in cand {
            if node_ok(j) {
                relax(j, &mut dist, &mut heap);
            }
        }
        if geom::dist(p, b) <= reach_b && (i == ia || near_b.contains(&i)) {
            relax(ib, &mut dist, &mut heap);
        }
    }
    if !dist[ib].is_finite() {
        return Err(OracleError::Unreachable);
    }
    let mut path = vec![ib];
    while *path.last().unwrap() != ia {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();
    Ok(OraclePath {
        vertices: path.into_iter().map(pos).collect(),
        length: dist[ib],
        resolution_bound: RESOLUTION_FACTOR * window.diameter() / n as f64,
    })
}

/// Membership in the closure of a region: every side graph non-negative within
/// `tol`, and inside the region's bounding box.
pub fn region_predicate(t: &TypeIRegion, tol: f64) -> impl Fn(Point) -> bool + '_ {
    let bbox = t.bbox();
    move |p| bbox.contains(p, tol) && t.sides().filter_map(|s| s.graph.as_ref()).all(|g| g.membership(p) >= -tol)
}

// 10-point Gauss-Legendre rule on [-1, 1]
const GL_X: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_W: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

fn gauss(h: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    r * GL_X.iter().zip(GL_W).map(|(&x, w)| w * (h(c - r * x) + h(c + r * x))).sum::<f64>()
}

fn adaptive(h: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (gauss(h, a, m), gauss(h, m, b));
    if depth == 0 || (l + r - whole).abs() <= tol {
        l + r
    } else {
        adaptive(h, a, m, l, 0.5 * tol, depth - 1) + adaptive(h, m, b, r, 0.5 * tol, depth - 1)
    }
}

/// Length of the graph of `f` over `iv` by adaptive Gauss-Legendre quadrature of
/// `sqrt(1 + f'^2)`.
pub fn arc_length_quadrature(f: &Polynomial, iv: Interval, tol: f64) -> f64 {
    let d = f.derivative();
    let h = |x: f64| {
        let s = d.eval(x);
        (1.0 + s * s).sqrt()
    };
    if iv.hi <= iv.lo {
        return 0.0;
    }
    adaptive(&h, iv.lo, iv.hi, gauss(&h, iv.lo, iv.hi), tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn below_sq(p: Point) -> bool {
        p[0] * p[0] - p[1] >= -1e-12
    }

    #[test]
    fn quadrature_examples() {
        assert!((arc_length_quadrature(&Polynomial::zero(), Interval::new(0.0, 1.0), 1e-12) - 1.0).abs() < 1e-14);
        assert!((arc_length_quadrature(&Polynomial::x(), Interval::new(0.0, 1.0), 1e-12) - 2f64.sqrt()).abs() < 1e-14);
        let l = arc_length_quadrature(&Polynomial::new(vec![0.0, 0.0, 1.0]), Interval::new(-1.0, 1.0), 1e-12);
        let closed = |x: f64| 0.5 * x * (1.0 + 4.0 * x * x).sqrt() + 0.25 * (2.0 * x).asinh();
        assert!((l - (closed(1.0) - closed(-1.0))).abs() < 1e-11);
        assert!((l - 2.957886).abs() < 1e-6);
    }

    #[test]
    fn inscribed_polylines_increase() {
        let f = Polynomial::new(vec![0.0, 0.0, 1.0]);
        let arc = arc_length_quadrature(&f, Interval::new(-1.0, 1.0), 1e-13);
        let mut prev = 0.0;
        for k in 1..10 {
            let n = 1usize << k;
            let pts: Vec<Point> = (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).map(|x| [x, f.eval(x)]).collect();
            let l: f64 = pts.windows(2).map(|w| geom::dist(w[0], w[1])).sum();
            assert!(l > prev && l <= arc + 1e-12);
            prev = l;
        }
        assert!(arc - prev < 1e-5);
    }

    #[test]
    fn convex_region_length() {
        let w = Rect::new(-1.0, 5.0, -1.0, 5.0);
        let p = polygonal_shortest_path(&|_| true, [0.0, 0.0], [3.0, 4.0], w, OracleConfig::default()).unwrap();
        assert!(p.length >= 5.0 - 1e-12 && p.length <= 5.0 + p.resolution_bound, "{}", p.length);
        assert_eq!(p.vertices.first(), Some(&[0.0, 0.0]));
        assert_eq!(p.vertices.last(), Some(&[3.0, 4.0]));
    }

    #[test]
    fn below_parabola() {
        let w = Rect::new(-1.5, 1.5, -1.5, 1.5);
        let cfg = OracleConfig { grid_n: 512, ..Default::default() };
        let p = polygonal_shortest_path(&below_sq, [-1.0, 0.5], [1.0, 0.5], w, cfg).unwrap();
        assert!((p.length - 2.2568).abs() <= p.resolution_bound, "{}", p.length);
        for v in &p.vertices {
            assert!(below_sq(*v));
        }
    }

    #[test]
    fn finer_grid_never_longer() {
        let w = Rect::new(-1.5, 1.5, -1.5, 1.5);
        let mut prev = f64::INFINITY;
        for n in [64, 128, 256] {
            let cfg = OracleConfig { grid_n: n, ..Default::default() };
            let p = polygonal_shortest_path(&below_sq, [-1.0, 0.5], [1.0, 0.5], w, cfg).unwrap();
            assert!(p.length <= prev + 1e-12, "{n}: {} > {prev}", p.length);
            prev = p.length;
        }
    }

    #[test]
    fn disconnected_and_bad_input() {
        let w = Rect::new(-2.0, 2.0, -2.0, 2.0);
        let two = |p: Point| p[0].abs() >= 0.5;
        let cfg = OracleConfig { grid_n: 64, ..Default::default() };
        assert_eq!(polygonal_shortest_path(&two, [-1.0, 0.0], [1.0, 0.0], w, cfg), Err(OracleError::Unreachable));
        assert!(matches!(polygonal_shortest_path(&two, [0.0, 0.0], [1.0, 0.0], w, cfg), Err(OracleError::EndpointOutside { .. })));
        let bad = OracleConfig { grid_n: 8, ..cfg };
        assert!(matches!(polygonal_shortest_path(&two, [-1.0, 0.0], [1.0, 0.0], w, bad), Err(OracleError::InvalidConfig(_))));
    }
}
