use super::{graph_piece, region_from_face, RegionError, Side, TypeIRegion};
use crate::cells::arrangement::{build, BuildOptions, InputPiece, VERTEX_TOL};
use crate::cells::piece::{intersect_pieces, PieceHits};
use crate::cells::{halfplane_pieces, CellComplex, MASK_TOL};
use crate::geom::{self, Point, Rect};
use crate::poly::{HalfPlane, RotatedGraph};
use serde::{Deserialize, Serialize};

/// Faces thinner than this are numerical slivers and are dropped.
const MIN_AREA: f64 = 1e-12;

/// A vertex where two regions of a decomposition meet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedVertex {
    pub at: Point,
    pub regions: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeIDecomposition {
    pub regions: Vec<TypeIRegion>,
    pub shared_vertices: Vec<SharedVertex>,
}

impl TypeIDecomposition {
    pub fn new(regions: Vec<TypeIRegion>) -> Self {
        let shared_vertices = contacts(&regions)
            .into_iter()
            .flat_map(|(i, j, pts)| pts.into_iter().map(move |at| SharedVertex { at, regions: (i, j) }))
            .collect();
        TypeIDecomposition { regions, shared_vertices }
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.regions.iter().any(|r| r.contains(p, tol))
    }
}

/// Points where the boundaries of two regions touch at a vertex of either one.
fn contacts(regions: &[TypeIRegion]) -> Vec<(usize, usize, Vec<Point>)> {
    let mut out = Vec::new();
    for i in 0..regions.len() {
        for j in (i + 1)..regions.len() {
            let (a, b) = (&regions[i], &regions[j]);
            if !a.bbox().intersects(&b.bbox(), VERTEX_TOL) {
                continue;
            }
            let mut pts: Vec<Point> = Vec::new();
            let cand = a.vertices().into_iter().filter(|&v| b.boundary_distance(v) <= VERTEX_TOL);
            let cand2 = b.vertices().into_iter().filter(|&v| a.boundary_distance(v) <= VERTEX_TOL);
            for v in cand.chain(cand2) {
                if pts.iter().all(|&q| geom::dist(q, v) > VERTEX_TOL) {
                    pts.push(v);
                }
            }
            if !pts.is_empty() {
                out.push((i, j, pts));
            }
        }
    }
    out
}

fn check_overlap(t: &TypeIRegion, g: &RotatedGraph, window: &Rect) -> Result<crate::cells::Piece, RegionError> {
    let gp = graph_piece(g, window);
    for s in t.sides() {
        if let PieceHits::Overlap = intersect_pieces(&s.piece, &gp, 1e-9) {
            return Err(RegionError::OverlapSide);
        }
    }
    Ok(gp)
}

/// Splits `t` along `g`; each part is tagged with whether it lies on the
/// non-negative side of `g`. New sides on `g` get the source label `label`.
fn split_labeled(t: &TypeIRegion, g: &RotatedGraph, label: usize, window: &Rect) -> Result<Vec<(TypeIRegion, bool)>, RegionError> {
    let gp = check_overlap(t, g, window)?;
    let sides: Vec<&Side> = t.sides().collect();
    if !t.bbox().intersects(&gp.bbox(), VERTEX_TOL) {
        let keep = g.membership(t.interior_point) >= 0.0;
        return Ok(vec![(t.clone(), keep)]);
    }
    let mut input: Vec<InputPiece> = sides.iter().map(|s| InputPiece::from(s.piece.clone())).collect();
    input.push(gp.into());
    let n = sides.len();
    let arr = build(*window, input, &[], BuildOptions { frame: false, faces: true })?;
    let source = |src: usize| if src < n { sides[src].source } else { Some(label) };
    let mut out = Vec::new();
    for f in &arr.faces {
        if f.area <= MIN_AREA || !t.contains(f.interior_point, 0.0) || t.boundary_distance(f.interior_point) <= VERTEX_TOL {
            continue;
        }
        let r = region_from_face(&arr, f, &source, t.closed);
        let side = g.membership(r.interior_point) >= 0.0;
        out.push((r, side));
    }
    Ok(out)
}

/// Splits a region along a graph into the regions on either side of it, each
/// tagged `true` when it lies where the membership of `g` is non-negative.
pub fn split_region_by_graph(t: &TypeIRegion, g: &RotatedGraph, window: &Rect) -> Result<Vec<(TypeIRegion, bool)>, RegionError> {
    let label = t.sides().filter_map(|s| s.source).max().map_or(0, |m| m + 1);
    split_labeled(t, g, label, window)
}

/// Decomposes the intersection of half-planes (clipped to `window`) into regions,
/// cutting by one half-plane at a time. Side sources index into `hs`.
pub fn intersect_halfplanes(hs: &[HalfPlane], window: &Rect) -> Result<TypeIDecomposition, RegionError> {
    if !window.is_valid() {
        return Err(RegionError::InvalidWindow);
    }
    let closed = hs.iter().all(|h| !h.strict);
    let mut regions = vec![TypeIRegion::window(window, closed)];
    for (k, h) in hs.iter().enumerate() {
        if hs[..k].iter().any(|o| o.same_set(h) || (o.graph.same_curve(&h.graph) && o.strict == h.strict)) {
            continue;
        }
        let mut next = Vec::new();
        for r in &regions {
            match split_labeled(r, &h.graph, k, window) {
                Ok(parts) => next.extend(parts.into_iter().filter(|p| p.1).map(|p| p.0)),
                Err(RegionError::OverlapSide) => {
                    if h.graph.membership(r.interior_point) >= 0.0 {
                        next.push(r.clone());
                    }
                }
                Err(e) => return Err(e),
            }
        }
        regions = next;
        if regions.is_empty() {
            break;
        }
    }
    Ok(TypeIDecomposition::new(regions))
}

/// Cell decomposition of the closed set cut out by `hs`: the overlay of the brick
/// patterns of every half-plane, masked to the intersection.
pub fn decompose_closed(hs: &[HalfPlane], window: Rect, spacing: f64) -> Result<CellComplex, RegionError> {
    let mut pieces = Vec::new();
    for h in hs {
        pieces.extend(halfplane_pieces(&h.graph, &window, spacing, h.strict)?.into_iter().map(InputPiece::from));
    }
    let arr = build(window, pieces, &[], BuildOptions { frame: true, faces: true }).map_err(RegionError::from)?;
    Ok(CellComplex::from_arrangement(&arr, &|p, _| hs.iter().all(|h| h.contains(p, MASK_TOL))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub property: u8,
    pub pass: bool,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<PropertyCheck>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Checks the four structural properties of a decomposition:
/// 1. every non-window side lies on its recorded graph;
/// 2. adjacent non-window sides lie on different graphs;
/// 3. two regions share no side and at most one vertex;
/// 4. no vertex is shared by three or more regions.
pub fn validate_decomposition(d: &TypeIDecomposition) -> ValidationReport {
    let mut w: [Vec<String>; 4] = Default::default();
    for (ri, r) in d.regions.iter().enumerate() {
        for (li, lp) in r.loops.iter().enumerate() {
            for (si, s) in lp.iter().enumerate() {
                match &s.graph {
                    Some(g) => {
                        for k in 0..=8 {
                            let p = s.piece.point_at(k as f64 / 8.0);
                            let (u, _) = g.to_local(p);
                            let m = g.membership(p);
                            if m.abs() > VERTEX_TOL * (1.0 + g.poly.eval_scale(u)) {
                                w[0].push(format!("region {ri} loop {li} side {si}: membership {m:e} at {p:?}"));
                                break;
                            }
                        }
                    }
                    None if s.source.is_some() => w[0].push(format!("region {ri} loop {li} side {si}: missing graph")),
                    None => {}
                }
            }
            for si in 0..lp.len() {
                let (a, b) = (&lp[si], &lp[(si + 1) % lp.len()]);
                if lp.len() < 2 {
                    break;
                }
                if let (Some(ga), Some(gb)) = (&a.graph, &b.graph) {
                    if ga.same_curve(gb) {
                        w[1].push(format!("region {ri} loop {li}: sides {si} and {} share a graph at {:?}", (si + 1) % lp.len(), b.piece.start()));
                    }
                }
            }
        }
    }
    for i in 0..d.regions.len() {
        for j in (i + 1)..d.regions.len() {
            let (a, b) = (&d.regions[i], &d.regions[j]);
            if !a.bbox().intersects(&b.bbox(), VERTEX_TOL) {
                continue;
            }
            for s in a.sides() {
                let shared = [0.25, 0.5, 0.75].iter().all(|&t| b.boundary_distance(s.piece.point_at(t)) <= VERTEX_TOL);
                if shared {
                    w[2].push(format!("regions {i} and {j} share the side {:?} -> {:?}", s.piece.start(), s.piece.end()));
                }
            }
        }
    }
    let mut fan: Vec<(Point, Vec<usize>)> = Vec::new();
    for (i, j, pts) in contacts(&d.regions) {
        if pts.len() > 1 {
            w[2].push(format!("regions {i} and {j} meet at {} vertices: {pts:?}", pts.len()));
        }
        for p in pts {
            match fan.iter_mut().find(|(q, _)| geom::dist(*q, p) <= VERTEX_TOL) {
                Some((_, ids)) => {
                    for k in [i, j] {
                        if !ids.contains(&k) {
                            ids.push(k);
                        }
                    }
                }
                None => fan.push((p, vec![i, j])),
            }
        }
    }
    for (p, ids) in fan {
        if ids.len() >= 3 {
            w[3].push(format!("vertex {p:?} lies on regions {ids:?}"));
        }
    }
    ValidationReport {
        checks: w
            .into_iter()
            .enumerate()
            .map(|(k, witnesses)| PropertyCheck { property: k as u8 + 1, pass: witnesses.is_empty(), witnesses })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::Piece;
    use crate::poly::Polynomial;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn p(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    fn square() -> Rect {
        Rect::new(-1.0, 1.0, -1.0, 1.0)
    }

    /// Counts connected components of a sampled grid of the window minus a
    /// neighbourhood of `g`, restricted to `inside`.
    fn flood_components(w: &Rect, n: usize, keep: &dyn Fn(Point) -> bool) -> usize {
        let at = |i: usize, j: usize| [w.xmin + (i as f64 + 0.5) * w.width() / n as f64, w.ymin + (j as f64 + 0.5) * w.height() / n as f64];
        let mut seen = vec![false; n * n];
        let mut comps = 0;
        for s in 0..n * n {
            if seen[s] || !keep(at(s % n, s / n)) {
                continue;
            }
            comps += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(c) = stack.pop() {
                let (i, j) = ((c % n) as i64, (c / n) as i64);
                for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let (a, b) = (i + di, j + dj);
                    if a < 0 || b < 0 || a >= n as i64 || b >= n as i64 {
                        continue;
                    }
                    let k = b as usize * n + a as usize;
                    if !seen[k] && keep(at(a as usize, b as usize)) {
                        seen[k] = true;
                        stack.push(k);
                    }
                }
            }
        }
        comps
    }

    #[test]
    fn line_cuts_square_in_two() {
        let t = TypeIRegion::window(&square(), true);
        let parts = split_region_by_graph(&t, &RotatedGraph::plain(Polynomial::zero()), &square()).unwrap();
        assert_eq!(parts.len(), 2);
        for (r, _) in &parts {
            assert!(r.sides().any(|s| s.source.is_some()));
            assert!((r.area() - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn parabola_cuts_bottom_edge_twice() {
        let g = RotatedGraph::plain(p(&[-0.5, 0.0, 1.0]));
        let w = Rect::new(-1.0, 1.0, -0.25, 1.0);
        let t = TypeIRegion::window(&w, true);
        let parts = split_region_by_graph(&t, &g, &w).unwrap();
        let expected = flood_components(&w, 200, &|q| g.membership(q).abs() > 0.02);
        assert_eq!(expected, 3);
        assert_eq!(parts.len(), expected);
        let area: f64 = parts.iter().map(|r| r.0.area()).sum();
        assert!((area - w.width() * w.height()).abs() < 1e-9);
    }

    #[test]
    fn graph_outside_leaves_region_alone() {
        let t = TypeIRegion::window(&square(), true);
        let w = Rect::new(-3.0, 3.0, -3.0, 3.0);
        let parts = split_region_by_graph(&t, &RotatedGraph::plain(p(&[2.0])), &w).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].0, t);
        assert!(parts[0].1);
    }

    #[test]
    fn overlapping_side_is_reported() {
        let t = TypeIRegion::window(&square(), true);
        let r = split_region_by_graph(&t, &RotatedGraph::plain(p(&[-1.0])), &Rect::new(-2.0, 2.0, -2.0, 2.0));
        assert_eq!(r, Err(RegionError::OverlapSide));
    }

    fn worked_scene() -> Vec<HalfPlane> {
        vec![
            HalfPlane::closed(p(&[2.0, 0.0, -1.0]), FRAC_PI_4),
            HalfPlane::closed(p(&[1.0]), 3.0 * std::f64::consts::FRAC_PI_2),
            HalfPlane::closed(p(&[1.0, 0.0]), std::f64::consts::PI),
        ]
    }

    #[test]
    fn worked_three_sided_region() {
        let hs = worked_scene();
        assert!(hs[1].membership([0.0, 0.0]) > 0.0 && hs[2].membership([0.0, 0.0]) > 0.0);
        let d = intersect_halfplanes(&hs, &Rect::new(-3.0, 3.0, -3.0, 3.0)).unwrap();
        assert_eq!(d.regions.len(), 1);
        let r = &d.regions[0];
        assert_eq!(r.loops.len(), 1);
        assert_eq!(r.loops[0].len(), 3);
        let vs = r.vertices();
        assert_eq!(vs.len(), 3);
        for e in [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0]] {
            assert!(vs.iter().any(|v| geom::dist(*v, e) < 1e-6), "{vs:?}");
        }
        assert!(validate_decomposition(&d).pass());
    }

    #[test]
    fn empty_and_single() {
        let w = Rect::new(-2.0, 2.0, -2.0, 2.0);
        let below = HalfPlane::closed(p(&[-1.0, 0.0, 1.0]), 0.0);
        let above = HalfPlane::new(RotatedGraph::plain(p(&[1.0, 0.0, 1.0])).flipped(), false);
        let d = intersect_halfplanes(&[below.clone(), above], &w).unwrap();
        assert!(d.is_empty());
        assert!(validate_decomposition(&d).pass());
        let d = intersect_halfplanes(&[below], &w).unwrap();
        assert_eq!(d.regions.len(), 1);
        assert_eq!(d.regions[0].sides().filter(|s| s.source.is_some()).count(), 1);
    }

    #[test]
    fn shared_side_fails_property_three() {
        let g = RotatedGraph::line_through([0.0, 0.0], [0.0, 1.0]);
        let side = |a: Point, b: Point| Side { piece: Piece::segment(a, b), source: Some(0), graph: Some(RotatedGraph::line_through(a, b)) };
        let left = TypeIRegion {
            loops: vec![vec![side([-1.0, 0.0], [0.0, 0.0]), side([0.0, 0.0], [0.0, 1.0]), side([0.0, 1.0], [-1.0, 0.0])]],
            closed: true,
            interior_point: [-0.3, 0.3],
        };
        let right = TypeIRegion {
            loops: vec![vec![side([0.0, 0.0], [1.0, 0.0]), side([1.0, 0.0], [0.0, 1.0]), side([0.0, 1.0], [0.0, 0.0])]],
            closed: true,
            interior_point: [0.3, 0.3],
        };
        assert!(g.membership([0.0, 0.5]).abs() < 1e-12);
        let rep = validate_decomposition(&TypeIDecomposition::new(vec![left, right]));
        assert!(!rep.checks[2].pass);
        assert!(rep.checks[2].witnesses.iter().any(|w| w.contains("share the side")));
        assert!(rep.checks[0].pass && rep.checks[1].pass);
    }

    #[test]
    fn closed_decomposition_masks_to_intersection() {
        let hs = worked_scene();
        let c = decompose_closed(&hs, Rect::new(-3.0, 3.0, -3.0, 3.0), 1.0).unwrap();
        assert!(c.validate().is_empty(), "{:?}", c.validate());
        for cell in &c.cells {
            if let crate::cells::CellGeometry::Face { polygon } = &cell.geometry {
                assert!(hs.iter().all(|h| h.contains(polygon.interior_point, 1e-9)));
            }
        }
        assert!(c.counts().faces >= 1);
    }

    fn arb_halfplane() -> impl Strategy<Value = HalfPlane> {
        (proptest::collection::vec(-2.0f64..2.0, 1..=4), 0usize..3, any::<bool>()).prop_map(|(c, k, flip)| {
            let g = RotatedGraph::new(Polynomial::new(c), [0.0, FRAC_PI_4, 2.0 * FRAC_PI_4][k]);
            HalfPlane::new(if flip { g.flipped() } else { g }, false)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn random_scenes_satisfy_properties(hs in proptest::collection::vec(arb_halfplane(), 1..=4)) {
            let w = Rect::new(-2.0, 2.0, -2.0, 2.0);
            let d = intersect_halfplanes(&hs, &w).unwrap();
            let rep = validate_decomposition(&d);
            prop_assert!(rep.pass(), "{:?}", rep);
            // sampled membership consistency
            for i in 0..15 {
                for j in 0..15 {
                    let q = [-2.0 + (i as f64 + 0.37) * 4.0 / 15.0, -2.0 + (j as f64 + 0.61) * 4.0 / 15.0];
                    let in_all = hs.iter().all(|h| h.membership(q) >= 0.0);
                    let margin = hs.iter().map(|h| h.membership(q).abs()).fold(f64::INFINITY, f64::min);
                    if margin < 1e-6 {
                        continue;
                    }
                    prop_assert_eq!(d.contains(q, 0.0), in_all, "at {:?}", q);
                }
            }
        }
    }
}
