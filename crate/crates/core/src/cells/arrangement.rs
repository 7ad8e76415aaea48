//! Planar arrangement of pieces clipped to a window: splits pieces at their
//! mutual intersections, merges nearby vertices and extracts faces by walking
//! half-edges.

use super::piece::{inside_loops, intersect_pieces, Piece, PieceHits};
use super::CellError;
use crate::geom::{self, Point, Rect};
use std::collections::HashMap;

/// Two vertices closer than this are the same vertex.
pub const VERTEX_TOL: f64 = 1e-7;
/// Tolerance for accepting an intersection near the end of a piece.
const HIT_TOL: f64 = 1e-9;

/// A piece to insert, optionally with ends that do not belong to the set.
#[derive(Debug, Clone)]
pub struct InputPiece {
    pub piece: Piece,
    pub open_start: bool,
    pub open_end: bool,
}

impl From<Piece> for InputPiece {
    fn from(piece: Piece) -> Self {
        InputPiece { piece, open_start: false, open_end: false }
    }
}

#[derive(Debug, Clone)]
pub struct ArrEdge {
    /// Directed from `v[0]` to `v[1]`.
    pub piece: Piece,
    pub v: [usize; 2],
    /// Index of the input piece this edge came from; frame edges follow the inputs.
    pub src: usize,
}

#[derive(Debug, Clone)]
pub struct ArrFace {
    /// Counter-clockwise outer loop as `(edge, forward)` pairs.
    pub outer: Vec<(usize, bool)>,
    /// Clockwise inner loops.
    pub holes: Vec<Vec<(usize, bool)>>,
    pub area: f64,
    pub interior_point: Point,
}

#[derive(Debug, Clone)]
pub struct Arrangement {
    pub window: Rect,
    pub vertices: Vec<Point>,
    /// False for vertices that only exist as open ends of pieces.
    pub vertex_closed: Vec<bool>,
    pub edges: Vec<ArrEdge>,
    pub faces: Vec<ArrFace>,
}

impl Arrangement {
    pub fn loop_pieces(&self, lp: &[(usize, bool)]) -> Vec<Piece> {
        lp.iter()
            .map(|&(e, fwd)| if fwd { self.edges[e].piece.clone() } else { self.edges[e].piece.reversed() })
            .collect()
    }
}

pub struct BuildOptions {
    /// Insert the window frame as edges.
    pub frame: bool,
    /// Extract faces.
    pub faces: bool,
}

struct VertexIndex {
    pts: Vec<Point>,
    grid: HashMap<(i64, i64), Vec<usize>>,
}

impl VertexIndex {
    fn key(p: Point) -> (i64, i64) {
        ((p[0] / VERTEX_TOL).floor() as i64, (p[1] / VERTEX_TOL).floor() as i64)
    }

    fn find_or_insert(&mut self, p: Point) -> usize {
        let (kx, ky) = Self::key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.grid.get(&(kx + dx, ky + dy)) {
                    for &i in ids {
                        if geom::dist(self.pts[i], p) <= VERTEX_TOL {
                            return i;
                        }
                    }
                }
            }
        }
        self.pts.push(p);
        let i = self.pts.len() - 1;
        self.grid.entry((kx, ky)).or_default().push(i);
        i
    }
}

pub fn frame_pieces(w: &Rect) -> Vec<Piece> {
    let c = w.corners();
    (0..4).map(|i| Piece::segment(c[i], c[(i + 1) % 4])).collect()
}

pub fn build(window: Rect, input: Vec<InputPiece>, points: &[Point], opts: BuildOptions) -> Result<Arrangement, CellError> {
    if !window.is_valid() {
        return Err(CellError::InvalidWindow);
    }
    let mut pieces = input;
    let frame = frame_pieces(&window);
    let n_input = pieces.len();
    if opts.frame {
        pieces.extend(frame.iter().cloned().map(InputPiece::from));
    }
    let bboxes: Vec<Rect> = pieces.iter().map(|p| p.piece.bbox()).collect();
    let mut splits: Vec<Vec<f64>> = vec![vec![0.0, 1.0]; pieces.len()];

    // clip against the window
    let inner = window.expanded(-HIT_TOL);
    for i in 0..n_input {
        let b = &bboxes[i];
        if b.xmin > inner.xmin && b.xmax < inner.xmax && b.ymin > inner.ymin && b.ymax < inner.ymax {
            continue;
        }
        for fp in &frame {
            if let PieceHits::Points(h) = intersect_pieces(&pieces[i].piece, fp, HIT_TOL) {
                splits[i].extend(h.iter().map(|x| x.0));
            }
        }
    }
    // mutual intersections
    for i in 0..pieces.len() {
        for j in (i + 1)..pieces.len() {
            if !bboxes[i].intersects(&bboxes[j], VERTEX_TOL) {
                continue;
            }
            match intersect_pieces(&pieces[i].piece, &pieces[j].piece, HIT_TOL) {
                PieceHits::Points(h) => {
                    for (ti, tj) in h {
                        splits[i].push(ti);
                        splits[j].push(tj);
                    }
                }
                PieceHits::Overlap => {
                    for (a, b) in [(i, j), (j, i)] {
                        for end in [pieces[b].piece.start(), pieces[b].piece.end()] {
                            let (d, t) = pieces[a].piece.distance(end);
                            if d <= VERTEX_TOL {
                                splits[a].push(t);
                            }
                        }
                    }
                }
            }
        }
    }
    // isolated points lying on pieces
    for &q in points {
        for (i, p) in pieces.iter().enumerate() {
            if bboxes[i].contains(q, VERTEX_TOL) {
                let (d, t) = p.piece.distance(q);
                if d <= VERTEX_TOL {
                    splits[i].push(t);
                }
            }
        }
    }

    let mut vx = VertexIndex { pts: Vec::new(), grid: HashMap::new() };
    let mut closed: Vec<bool> = Vec::new();
    let mark = |vx: &mut VertexIndex, closed: &mut Vec<bool>, p: Point, is_closed: bool| -> usize {
        let id = vx.find_or_insert(p);
        if closed.len() <= id {
            closed.resize(id + 1, false);
        }
        closed[id] |= is_closed;
        id
    };
    let mut edges: Vec<ArrEdge> = Vec::new();
    let mut seen: HashMap<(usize, usize), Vec<Point>> = HashMap::new();
    for (i, ip) in pieces.iter().enumerate() {
        if geom::dist(ip.piece.start(), ip.piece.end()) <= VERTEX_TOL && ip.piece.length() <= VERTEX_TOL {
            continue;
        }
        let s = &mut splits[i];
        s.sort_by(f64::total_cmp);
        let pts: Vec<Point> = s.iter().map(|&t| ip.piece.point_at(t)).collect();
        let mut kept_t = vec![s[0]];
        let mut kept_p = vec![pts[0]];
        for k in 1..s.len() {
            if geom::dist(pts[k], *kept_p.last().unwrap()) > VERTEX_TOL {
                kept_t.push(s[k]);
                kept_p.push(pts[k]);
            } else if k == s.len() - 1 {
                // keep the exact end
                *kept_t.last_mut().unwrap() = s[k];
                *kept_p.last_mut().unwrap() = pts[k];
            }
        }
        let n = kept_t.len();
        for k in 0..n.saturating_sub(1) {
            let sub = ip.piece.sub(kept_t[k], kept_t[k + 1]);
            let mid = sub.midpoint();
            if !window.contains(mid, HIT_TOL) {
                continue;
            }
            let open_a = k == 0 && ip.open_start;
            let open_b = k + 2 == n && ip.open_end;
            let va = mark(&mut vx, &mut closed, kept_p[k], !open_a);
            let vb = mark(&mut vx, &mut closed, kept_p[k + 1], !open_b);
            if va == vb {
                continue;
            }
            let key = (va.min(vb), va.max(vb));
            let mids = seen.entry(key).or_default();
            if mids.iter().any(|m| geom::dist(*m, mid) <= 10.0 * VERTEX_TOL) {
                continue;
            }
            mids.push(mid);
            edges.push(ArrEdge { piece: sub, v: [va, vb], src: i });
        }
    }
    for &q in points {
        if window.contains(q, HIT_TOL) {
            mark(&mut vx, &mut closed, q, true);
        }
    }
    let vertices = vx.pts;
    closed.resize(vertices.len(), false);
    let mut arr = Arrangement { window, vertices, vertex_closed: closed, edges, faces: Vec::new() };
    if opts.faces {
        arr.faces = extract_faces(&arr)?;
    }
    Ok(arr)
}

/// Direction key of a half-edge leaving its start vertex: tangent angle, then a
/// curvature-sensitive tie breaker.
fn direction_key(p: &Piece) -> (f64, f64) {
    let t = p.tangent_at(0.0);
    let ang = t[1].atan2(t[0]);
    let q = p.point_at(1e-3);
    let c = geom::sub(q, p.start());
    let turn = geom::cross(t, c).atan2(geom::dot(t, c));
    (ang, turn)
}

fn extract_faces(arr: &Arrangement) -> Result<Vec<ArrFace>, CellError> {
    let ne = arr.edges.len();
    let half = |h: usize| -> Piece {
        let e = &arr.edges[h / 2];
        if h.is_multiple_of(2) {
            e.piece.clone()
        } else {
            e.piece.reversed()
        }
    };
    let origin = |h: usize| -> usize {
        let e = &arr.edges[h / 2];
        if h.is_multiple_of(2) {
            e.v[0]
        } else {
            e.v[1]
        }
    };
    let mut out_of: Vec<Vec<(usize, (f64, f64))>> = vec![Vec::new(); arr.vertices.len()];
    for h in 0..2 * ne {
        out_of[origin(h)].push((h, direction_key(&half(h))));
    }
    for list in out_of.iter_mut() {
        list.sort_by(|a, b| {
            if (a.1 .0 - b.1 .0).abs() > 1e-9 {
                a.1 .0.total_cmp(&b.1 .0)
            } else {
                a.1 .1.total_cmp(&b.1 .1)
            }
        });
    }
    let mut pos = vec![0usize; 2 * ne];
    for list in &out_of {
        for (k, (h, _)) in list.iter().enumerate() {
            pos[*h] = k;
        }
    }
    let next = |h: usize| -> usize {
        let twin = h ^ 1;
        let v = origin(twin);
        let list = &out_of[v];
        let k = pos[twin];
        list[(k + list.len() - 1) % list.len()].0
    };
    let mut visited = vec![false; 2 * ne];
    let mut cycles: Vec<(Vec<usize>, f64)> = Vec::new();
    for h0 in 0..2 * ne {
        if visited[h0] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut h = h0;
        let mut area = 0.0;
        while !visited[h] {
            visited[h] = true;
            cyc.push(h);
            area += half(h).area_term();
            h = next(h);
            if cyc.len() > 4 * ne + 4 {
                return Err(CellError::Topology("half-edge walk did not close".into()));
            }
        }
        if h != h0 {
            return Err(CellError::Topology("half-edge walk closed on a different edge".into()));
        }
        cycles.push((cyc, 0.5 * area));
    }
    let to_loop = |c: &[usize]| -> Vec<(usize, bool)> { c.iter().map(|&h| (h / 2, h % 2 == 0)).collect() };
    let mut faces: Vec<ArrFace> = Vec::new();
    let mut holes: Vec<&Vec<usize>> = Vec::new();
    for (cyc, area) in &cycles {
        if *area > 0.0 {
            let lp = to_loop(cyc);
            let pieces = arr.loop_pieces(&lp);
            faces.push(ArrFace { outer: lp, holes: Vec::new(), area: *area, interior_point: pieces[0].midpoint() });
        } else {
            holes.push(cyc);
        }
    }
    // attach every negative cycle to the smallest face around it; the rest bound the unbounded face
    let outer_pieces: Vec<Vec<Piece>> = faces.iter().map(|f| arr.loop_pieces(&f.outer)).collect();
    let mut order: Vec<usize> = (0..faces.len()).collect();
    order.sort_by(|&a, &b| faces[a].area.total_cmp(&faces[b].area));
    for cyc in holes {
        let lp = to_loop(cyc);
        let ps = arr.loop_pieces(&lp);
        let probe = offset_left(&ps[0], 1e-6);
        let own: Vec<usize> = cyc.iter().map(|h| h / 2).collect();
        for &fi in &order {
            if faces[fi].outer.iter().all(|(e, _)| own.contains(e)) {
                continue;
            }
            if inside_loops(outer_pieces[fi].iter(), probe, 1e-12) == Some(true) {
                faces[fi].holes.push(lp.clone());
                break;
            }
        }
    }
    for f in faces.iter_mut() {
        let mut all = arr.loop_pieces(&f.outer);
        for h in &f.holes {
            all.extend(arr.loop_pieces(h));
        }
        f.interior_point = interior_point(&all).ok_or_else(|| CellError::Topology("no interior point found".into()))?;
    }
    Ok(faces)
}

/// Point at distance `d` to the left of the midpoint of `p`.
fn offset_left(p: &Piece, d: f64) -> Point {
    let t = p.tangent_at(0.5);
    geom::add(p.midpoint(), [-t[1] * d, t[0] * d])
}

/// A point strictly inside the region bounded by `loops`, whose first loop runs
/// counter-clockwise.
pub fn interior_point(loops: &[Piece]) -> Option<Point> {
    for frac in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7] {
        for p in loops {
            let d = frac * p.length().max(1e-3);
            let q = offset_left(p, d);
            if inside_loops(loops.iter(), q, 1e-13) != Some(true) {
                continue;
            }
            let clear = loops.iter().all(|o| {
                let b = o.bbox();
                !b.contains(q, 0.5 * d) || o.distance(q).0 > 0.25 * d
            });
            if clear {
                return Some(q);
            }
        }
    }
    None
}
