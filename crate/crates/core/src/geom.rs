//! Small planar helpers shared by every module.

use serde::{Deserialize, Serialize};

/// A point or vector in the plane, `[x, y]`.
pub type Point = [f64; 2];

pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s]
}

pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

pub fn lerp(a: Point, b: Point, t: f64) -> Point {
    [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]
}

pub fn normalize(a: Point) -> Point {
    let n = norm(a);
    if n == 0.0 {
        a
    } else {
        [a[0] / n, a[1] / n]
    }
}

/// Axis-aligned rectangle `[xmin, xmax] x [ymin, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Self {
        Rect { xmin, xmax, ymin, ymax }
    }

    pub fn is_valid(&self) -> bool {
        [self.xmin, self.xmax, self.ymin, self.ymax].iter().all(|v| v.is_finite())
            && self.xmin < self.xmax
            && self.ymin < self.ymax
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p[0] >= self.xmin - tol && p[0] <= self.xmax + tol && p[1] >= self.ymin - tol && p[1] <= self.ymax + tol
    }

    /// Corners in counter-clockwise order starting at the lower left.
    pub fn corners(&self) -> [Point; 4] {
        [
            [self.xmin, self.ymin],
            [self.xmax, self.ymin],
            [self.xmax, self.ymax],
            [self.xmin, self.ymax],
        ]
    }

    pub fn expanded(&self, d: f64) -> Rect {
        Rect::new(self.xmin - d, self.xmax + d, self.ymin - d, self.ymax + d)
    }

    pub fn intersects(&self, other: &Rect, tol: f64) -> bool {
        self.xmin <= other.xmax + tol
            && other.xmin <= self.xmax + tol
            && self.ymin <= other.ymax + tol
            && other.ymin <= self.ymax + tol
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect::new(
            self.xmin.min(other.xmin),
            self.xmax.max(other.xmax),
            self.ymin.min(other.ymin),
            self.ymax.max(other.ymax),
        )
    }

    pub fn around(points: &[Point]) -> Rect {
        let mut r = Rect::new(f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            r.xmin = r.xmin.min(p[0]);
            r.xmax = r.xmax.max(p[0]);
            r.ymin = r.ymin.min(p[1]);
            r.ymax = r.ymax.max(p[1]);
        }
        r
    }
}

/// Signed area of a closed polyline (positive when counter-clockwise).
pub fn polygon_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        s += cross(pts[i], pts[(i + 1) % n]);
    }
    0.5 * s
}

/// Distance from `p` to the segment `a`-`b` and the clamped parameter of the foot.
pub fn segment_distance(p: Point, a: Point, b: Point) -> (f64, f64) {
    let d = sub(b, a);
    let len2 = dot(d, d);
    let t = if len2 == 0.0 { 0.0 } else { (dot(sub(p, a), d) / len2).clamp(0.0, 1.0) };
    (dist(p, lerp(a, b, t)), t)
}
