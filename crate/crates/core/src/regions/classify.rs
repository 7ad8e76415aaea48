use super::intersect::{intersect_halfplanes, TypeIDecomposition};
use super::{RegionError, TypeIRegion};
use crate::cells::arrangement::{build, BuildOptions, InputPiece, VERTEX_TOL};
use crate::cells::{CurveKind, Piece};
use crate::geom::{self, Point, Rect};
use crate::poly::{all_real_roots, graph_intersections, HalfPlane, Interval, Intersections, RotatedGraph};
use serde::{Deserialize, Serialize};

/// Residual allowed when checking that a point satisfies an equation.
const EQ_TOL: f64 = 1e-7;

/// A maximal open piece of a graph inside a basic set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenCurve {
    pub graph: RotatedGraph,
    #[serde(flatten)]
    pub kind: CurveKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum Classification {
    Empty,
    FinitePoints { points: Vec<Point> },
    OpenPolynomialCurve { curves: Vec<OpenCurve> },
    TypeIiRegions { decomposition: TypeIDecomposition },
}

fn local_range(g: &RotatedGraph, window: &Rect) -> Interval {
    let us: Vec<f64> = window.corners().iter().map(|&c| g.to_local(c).0).collect();
    Interval::new(us.iter().cloned().fold(f64::INFINITY, f64::min), us.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
}

/// Classifies `{curves = 0} ∩ halfplanes`. The parameter range of a curve covering
/// `window` stands in for the whole line when deciding whether a piece is unbounded.
pub fn classify_basic_set(curves: &[RotatedGraph], halfplanes: &[HalfPlane], window: &Rect) -> Result<Classification, RegionError> {
    if !window.is_valid() {
        return Err(RegionError::InvalidWindow);
    }
    for i in 0..curves.len() {
        if curves[..i].iter().any(|c| c.same_curve(&curves[i])) {
            return Err(RegionError::DuplicateSet);
        }
    }
    for i in 0..halfplanes.len() {
        if halfplanes[..i].iter().any(|h| h.same_set(&halfplanes[i])) {
            return Err(RegionError::DuplicateSet);
        }
    }
    match curves.len() {
        0 => {
            let d = intersect_halfplanes(halfplanes, window)?;
            Ok(if d.is_empty() { Classification::Empty } else { Classification::TypeIiRegions { decomposition: d } })
        }
        1 => {
            let curves = curve_pieces(&curves[0], halfplanes, window)?;
            Ok(if curves.is_empty() { Classification::Empty } else { Classification::OpenPolynomialCurve { curves } })
        }
        _ => {
            let (a, b) = (&curves[0], &curves[1]);
            let hits = match graph_intersections(a, b, local_range(a, window), 1e-12)? {
                Intersections::Points(h) => h,
                Intersections::OverlapPartial => return Err(RegionError::DuplicateSet),
            };
            let mut points: Vec<Point> = Vec::new();
            for h in hits {
                let p = h.point;
                let on_all = curves[2..].iter().all(|c| c.membership(p).abs() <= EQ_TOL * (1.0 + c.poly.eval_scale(c.to_local(p).0)));
                if on_all
                    && window.contains(p, VERTEX_TOL)
                    && halfplanes.iter().all(|hp| hp.contains(p, 0.0))
                    && points.iter().all(|q| geom::dist(*q, p) > VERTEX_TOL)
                {
                    points.push(p);
                }
            }
            Ok(if points.is_empty() { Classification::Empty } else { Classification::FinitePoints { points } })
        }
    }
}

/// Maximal parameter intervals of `g` on which every half-plane holds.
fn curve_pieces(g: &RotatedGraph, halfplanes: &[HalfPlane], window: &Rect) -> Result<Vec<OpenCurve>, RegionError> {
    let range = local_range(g, window);
    let mut cuts: Vec<f64> = Vec::new();
    for h in halfplanes {
        let (m, scale) = g.membership_along(&h.graph);
        if m.coeffs().iter().all(|c| c.abs() <= 1e-12 * scale) {
            // the curve is the boundary of this half-plane
            if h.strict {
                return Ok(Vec::new());
            }
            continue;
        }
        for r in all_real_roots(&m.trimmed(1e-15), 1e-12)? {
            if r.x > range.lo && r.x < range.hi {
                cuts.push(r.x);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    let mut knots = vec![range.lo];
    knots.extend(&cuts);
    knots.push(range.hi);
    let holds = |u: f64| halfplanes.iter().all(|h| h.contains(g.point_at(u), 0.0));
    let mut spans: Vec<(f64, f64)> = Vec::new();
    for w in knots.windows(2) {
        if w[1] - w[0] <= 1e-12 || !holds(0.5 * (w[0] + w[1])) {
            continue;
        }
        match spans.last_mut() {
            // closed constraints let the set continue through a touching point
            Some(last) if (last.1 - w[0]).abs() <= 1e-12 && holds(w[0]) => last.1 = w[1],
            _ => spans.push((w[0], w[1])),
        }
    }
    Ok(spans
        .into_iter()
        .map(|(a, b)| {
            let kind = match (a <= range.lo, b >= range.hi) {
                (true, true) => CurveKind::Whole,
                (false, true) => CurveKind::RightOf(a),
                (true, false) => CurveKind::LeftOf(b),
                (false, false) => CurveKind::Bounded(a, b),
            };
            OpenCurve { graph: g.clone(), kind }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    In,
    Boundary,
    Out,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrangedFace {
    pub region: TypeIRegion,
    pub membership: Membership,
}

/// Subdivision of a window by the boundaries of a family of open regions, with
/// every face, open side and vertex flagged against their union.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneArrangement {
    pub faces: Vec<ArrangedFace>,
    pub open_sides: Vec<(Piece, Membership)>,
    pub vertices: Vec<(Point, Membership)>,
}

impl PlaneArrangement {
    pub fn face_count(&self, m: Membership) -> usize {
        self.faces.iter().filter(|f| f.membership == m).count()
    }
}

/// Membership of `p` in the union of the interiors of `regions`, or in its closure.
pub fn union_membership(regions: &[TypeIRegion], p: Point) -> Membership {
    if regions.iter().any(|r| r.contains_as(p, VERTEX_TOL, false)) {
        Membership::In
    } else if regions.iter().any(|r| r.contains_as(p, VERTEX_TOL, true)) {
        Membership::Boundary
    } else {
        Membership::Out
    }
}

/// Inserts the sides of every region into one arrangement of the window.
pub fn arrange_boundaries(regions: &[TypeIRegion], window: &Rect) -> Result<PlaneArrangement, RegionError> {
    let mut input: Vec<InputPiece> = Vec::new();
    for r in regions {
        input.extend(r.sides().filter(|s| !s.is_window()).map(|s| InputPiece::from(s.piece.clone())));
    }
    let arr = build(*window, input, &[], BuildOptions { frame: true, faces: true })?;
    let none = |_: usize| None;
    let faces = arr
        .faces
        .iter()
        .map(|f| {
            let region = super::region_from_face(&arr, f, &none, false);
            let membership = union_membership(regions, f.interior_point);
            ArrangedFace { region, membership }
        })
        .collect();
    let open_sides = arr.edges.iter().map(|e| (e.piece.clone(), union_membership(regions, e.piece.midpoint()))).collect();
    let vertices = arr.vertices.iter().map(|&v| (v, union_membership(regions, v))).collect();
    Ok(PlaneArrangement { faces, open_sides, vertices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use std::f64::consts::PI;

    fn p(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    fn w() -> Rect {
        Rect::new(-3.0, 3.0, -3.0, 3.0)
    }

    /// Open lens between a downward and an upward parabola.
    fn lens(cx: f64, half: f64) -> TypeIRegion {
        let f = |s: f64| p(&[s * half * half, 0.0, -s]).shift(-cx);
        let hs = vec![HalfPlane::open(f(1.0), 0.0), HalfPlane::new(RotatedGraph::plain(f(-1.0)).flipped(), true)];
        let d = intersect_halfplanes(&hs, &w()).unwrap();
        assert_eq!(d.regions.len(), 1);
        d.regions[0].clone()
    }

    #[test]
    fn line_pair_meets_at_origin() {
        let a = RotatedGraph::plain(p(&[0.0, 1.0]));
        let b = RotatedGraph::plain(p(&[0.0, -1.0]));
        match classify_basic_set(&[a, b], &[], &w()).unwrap() {
            Classification::FinitePoints { points } => {
                assert_eq!(points.len(), 1);
                assert!(geom::norm(points[0]) < 1e-7);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parabola_below_one_is_bounded() {
        let g = RotatedGraph::plain(p(&[0.0, 0.0, 1.0]));
        let h = HalfPlane::open(p(&[1.0]), 0.0);
        match classify_basic_set(&[g], &[h], &w()).unwrap() {
            Classification::OpenPolynomialCurve { curves } => {
                assert_eq!(curves.len(), 1);
                match curves[0].kind {
                    CurveKind::Bounded(a, b) => assert!((a + 1.0).abs() < 1e-7 && (b - 1.0).abs() < 1e-7),
                    k => panic!("{k:?}"),
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn curve_kinds() {
        let g = RotatedGraph::plain(p(&[0.0, 1.0]));
        let kind = |hs: &[HalfPlane]| match classify_basic_set(std::slice::from_ref(&g), hs, &w()).unwrap() {
            Classification::OpenPolynomialCurve { curves } => curves[0].kind,
            other => panic!("{other:?}"),
        };
        assert_eq!(kind(&[]), CurveKind::Whole);
        // x > 0 as the open side of the vertical axis
        let right = HalfPlane::open(p(&[0.0]), PI / 2.0);
        assert!(right.membership([1.0, 0.0]) > 0.0);
        match kind(&[right]) {
            CurveKind::RightOf(a) => assert!(a.abs() < 1e-9),
            k => panic!("{k:?}"),
        }
        let empty = classify_basic_set(std::slice::from_ref(&g), &[HalfPlane::open(p(&[-10.0]), 0.0)], &w()).unwrap();
        assert_eq!(empty, Classification::Empty);
    }

    #[test]
    fn single_open_halfplane_is_one_region() {
        match classify_basic_set(&[], &[HalfPlane::open(p(&[0.0, 0.0, 1.0]), 0.0)], &w()).unwrap() {
            Classification::TypeIiRegions { decomposition } => {
                assert_eq!(decomposition.regions.len(), 1);
                assert!(!decomposition.regions[0].closed);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicates_rejected() {
        let g = RotatedGraph::plain(p(&[0.0, 1.0]));
        assert_eq!(classify_basic_set(&[g.clone(), g], &[], &w()), Err(RegionError::DuplicateSet));
    }

    #[test]
    fn parallel_lines_are_empty() {
        let a = RotatedGraph::plain(p(&[0.0, 1.0]));
        let b = RotatedGraph::plain(p(&[1.0, 1.0]));
        assert_eq!(classify_basic_set(&[a, b], &[], &w()).unwrap(), Classification::Empty);
    }

    #[test]
    fn one_region_two_faces() {
        let r = lens(0.0, 1.0);
        let a = arrange_boundaries(&[r], &w()).unwrap();
        assert_eq!(a.faces.len(), 2);
        assert_eq!(a.face_count(Membership::In), 1);
        assert!(a.open_sides.iter().filter(|s| s.1 == Membership::Boundary).count() >= 2);
    }

    #[test]
    fn disjoint_regions_three_faces() {
        let a = arrange_boundaries(&[lens(-1.5, 1.0), lens(1.5, 1.0)], &w()).unwrap();
        assert_eq!(a.faces.len(), 3);
        assert_eq!(a.face_count(Membership::In), 2);
    }

    #[test]
    fn slit_union() {
        // two lenses that overlap along a shared vertical chord: x in (-1, 0) and (0, 1) with the
        // same upper and lower parabolas
        let top = HalfPlane::open(p(&[1.0, 0.0, -1.0]), 0.0);
        let bottom = HalfPlane::new(RotatedGraph::plain(p(&[-1.0, 0.0, 1.0])).flipped(), true);
        let left = HalfPlane::open(p(&[0.0]), 3.0 * PI / 2.0);
        let right = HalfPlane::open(p(&[0.0]), PI / 2.0);
        let l = intersect_halfplanes(&[top.clone(), bottom.clone(), left], &w()).unwrap().regions;
        let r = intersect_halfplanes(&[top, bottom, right], &w()).unwrap().regions;
        let regions: Vec<TypeIRegion> = l.into_iter().chain(r).collect();
        assert_eq!(regions.len(), 2);
        let a = arrange_boundaries(&regions, &w()).unwrap();
        assert_eq!(a.face_count(Membership::In), 2);
        let slit: Vec<_> = a.open_sides.iter().filter(|(pc, _)| pc.midpoint()[0].abs() < 1e-9 && pc.midpoint()[1].abs() < 1.0).collect();
        assert_eq!(slit.len(), 1);
        assert_eq!(slit[0].1, Membership::Boundary);
        // flags agree with direct evaluation on a sample grid
        for f in &a.faces {
            let q = f.region.interior_point;
            let direct = regions.iter().any(|r| r.contains_as(q, 1e-9, false));
            assert_eq!(direct, f.membership == Membership::In);
        }
    }
}
