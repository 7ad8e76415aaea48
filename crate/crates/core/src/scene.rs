//! Scene files: a window, half-planes intersected into one basic set, open
//! polynomial curves and isolated points, all united.

use crate::cells::CurveKind;
use crate::geodesic::Tolerances;
use crate::geom::{Point, Rect};
use crate::poly::{normalize_angle, HalfPlane, Polynomial, RotatedGraph};
use crate::regions::OpenCurve;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid scene: {}", .0.join("; "))]
    Validation(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfPlaneSpec {
    pub coeffs: Vec<f64>,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKindName {
    Whole,
    RightOf,
    LeftOf,
    Bounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub coeffs: Vec<f64>,
    #[serde(default)]
    pub theta: f64,
    pub kind: CurveKindName,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SceneTolerances {
    pub eps_len: f64,
    pub eps_geom: f64,
    pub max_refine: usize,
    /// Spacing of the decomposition patterns.
    pub spacing: f64,
}

impl Default for SceneTolerances {
    fn default() -> Self {
        let t = Tolerances::default();
        SceneTolerances { eps_len: t.eps_len, eps_geom: t.eps_geom, max_refine: t.max_refine, spacing: 1.0 }
    }
}

impl SceneTolerances {
    pub fn geodesic(&self) -> Tolerances {
        Tolerances { eps_len: self.eps_len, eps_geom: self.eps_geom, max_refine: self.max_refine }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    #[serde(default)]
    pub halfplanes: Vec<HalfPlaneSpec>,
    #[serde(default)]
    pub curves: Vec<CurveSpec>,
    #[serde(default)]
    pub points: Vec<Point>,
    pub window: Rect,
    #[serde(default)]
    pub tolerances: SceneTolerances,
    #[serde(default)]
    pub seed: u64,
}

/// Same as `Scene` with the window optional, so that a missing window is reported
/// as a validation error rather than a parse error.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    #[serde(default)]
    halfplanes: Vec<HalfPlaneSpec>,
    #[serde(default)]
    curves: Vec<CurveSpec>,
    #[serde(default)]
    points: Vec<Point>,
    window: Option<Rect>,
    #[serde(default)]
    tolerances: SceneTolerances,
    #[serde(default)]
    seed: u64,
}

fn check_coeffs(what: &str, c: &[f64], errs: &mut Vec<String>) {
    if c.is_empty() {
        errs.push(format!("{what}: coeffs must be nonempty"));
    } else if c.iter().any(|x| !x.is_finite()) {
        errs.push(format!("{what}: coeffs must be finite"));
    }
}

fn check_theta(what: &str, theta: &mut f64, errs: &mut Vec<String>, warnings: &mut Vec<String>) {
    if !theta.is_finite() {
        errs.push(format!("{what}: theta must be finite"));
    } else if !(0.0..2.0 * PI).contains(theta) {
        let t = normalize_angle(*theta);
        warnings.push(format!("{what}: theta {} normalized to {}", theta, t));
        *theta = t;
    }
}

/// Parses and validates a scene. Angles outside `[0, 2 pi)` are normalized and
/// reported in the returned warnings.
pub fn parse_scene(text: &str) -> Result<(Scene, Vec<String>), SceneError> {
    let raw: RawScene = serde_json::from_str(text)
        .map_err(|e| SceneError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    let mut errs = Vec::new();
    let mut warnings = Vec::new();
    let window = match raw.window {
        None => {
            errs.push("window is required".to_string());
            Rect::new(0.0, 0.0, 0.0, 0.0)
        }
        Some(w) => {
            if !w.is_valid() {
                errs.push("window must have xmin < xmax and ymin < ymax".to_string());
            }
            w
        }
    };
    let mut halfplanes = raw.halfplanes;
    for (i, h) in halfplanes.iter_mut().enumerate() {
        let what = format!("halfplanes[{i}]");
        check_coeffs(&what, &h.coeffs, &mut errs);
        check_theta(&what, &mut h.theta, &mut errs, &mut warnings);
    }
    let mut curves = raw.curves;
    for (i, c) in curves.iter_mut().enumerate() {
        let what = format!("curves[{i}]");
        check_coeffs(&what, &c.coeffs, &mut errs);
        check_theta(&what, &mut c.theta, &mut errs, &mut warnings);
        if let Err(e) = curve_kind(c) {
            errs.push(format!("{what}: {e}"));
        }
    }
    for (i, p) in raw.points.iter().enumerate() {
        if !p[0].is_finite() || !p[1].is_finite() {
            errs.push(format!("points[{i}] must be finite"));
        }
    }
    let t = &raw.tolerances;
    if !(t.eps_len > 0.0 && t.eps_geom > 0.0 && t.max_refine > 0 && t.spacing > 0.0) {
        errs.push("tolerances must be positive".to_string());
    }
    if !errs.is_empty() {
        return Err(SceneError::Validation(errs));
    }
    let scene = Scene { halfplanes, curves, points: raw.points, window, tolerances: raw.tolerances, seed: raw.seed };
    Ok((scene, warnings))
}

fn curve_kind(c: &CurveSpec) -> Result<CurveKind, String> {
    let p = &c.params;
    let want = match c.kind {
        CurveKindName::Whole => 0,
        CurveKindName::RightOf | CurveKindName::LeftOf => 1,
        CurveKindName::Bounded => 2,
    };
    if p.len() != want {
        return Err(format!("kind {:?} takes {want} params, got {}", c.kind, p.len()));
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err("params must be finite".to_string());
    }
    Ok(match c.kind {
        CurveKindName::Whole => CurveKind::Whole,
        CurveKindName::RightOf => CurveKind::RightOf(p[0]),
        CurveKindName::LeftOf => CurveKind::LeftOf(p[0]),
        CurveKindName::Bounded => {
            if p[0] >= p[1] {
                return Err("bounded params must increase".to_string());
            }
            CurveKind::Bounded(p[0], p[1])
        }
    })
}

impl Scene {
    pub fn halfplanes(&self) -> Vec<HalfPlane> {
        self.halfplanes
            .iter()
            .map(|h| HalfPlane::new(RotatedGraph::new(Polynomial::new(h.coeffs.clone()), h.theta), h.strict))
            .collect()
    }

    /// Curve entries as open curves; `parse_scene` has checked the kinds.
    pub fn open_curves(&self) -> Vec<OpenCurve> {
        self.curves
            .iter()
            .map(|c| OpenCurve {
                graph: RotatedGraph::new(Polynomial::new(c.coeffs.clone()), c.theta),
                kind: curve_kind(c).unwrap_or(CurveKind::Whole),
            })
            .collect()
    }

    /// Curve entries read as equations `g = 0`.
    pub fn curve_graphs(&self) -> Vec<RotatedGraph> {
        self.open_curves().into_iter().map(|c| c.graph).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PARABOLA: &str = r#"{"halfplanes":[{"coeffs":[2,0,-1],"theta":0.7853981634,"strict":false}],
        "window":{"xmin":-3,"xmax":3,"ymin":-3,"ymax":3}}"#;

    #[test]
    fn minimal_scene() {
        let (s, w) = parse_scene(PARABOLA).unwrap();
        assert!(w.is_empty());
        let hs = s.halfplanes();
        assert_eq!(hs.len(), 1);
        assert!(!hs[0].strict);
        assert_eq!(hs[0].graph.poly.coeffs(), &[2.0, 0.0, -1.0]);
        assert_eq!(s.tolerances, SceneTolerances::default());
    }

    #[test]
    fn missing_window_and_unknown_fields() {
        assert!(matches!(parse_scene("{}"), Err(SceneError::Validation(v)) if v[0].contains("window")));
        let bad = r#"{"window":{"xmin":0,"xmax":1,"ymin":0,"ymax":1},"colour":3}"#;
        assert!(matches!(parse_scene(bad), Err(SceneError::Parse { .. })));
        assert!(matches!(parse_scene("{\n  \"window\": [1,"), Err(SceneError::Parse { line: 2, .. })));
        let empty = r#"{"halfplanes":[{"coeffs":[]}],"window":{"xmin":0,"xmax":1,"ymin":0,"ymax":1}}"#;
        assert!(matches!(parse_scene(empty), Err(SceneError::Validation(_))));
        let kind = r#"{"curves":[{"coeffs":[0],"kind":"bounded","params":[1]}],"window":{"xmin":0,"xmax":1,"ymin":0,"ymax":1}}"#;
        assert!(matches!(parse_scene(kind), Err(SceneError::Validation(_))));
    }

    #[test]
    fn theta_normalized_with_warning() {
        let text = r#"{"halfplanes":[{"coeffs":[1],"theta":7.0}],"window":{"xmin":0,"xmax":1,"ymin":0,"ymax":1}}"#;
        let (s, w) = parse_scene(text).unwrap();
        assert_eq!(w.len(), 1);
        assert!((s.halfplanes[0].theta - (7.0 - 2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        let text = r#"{"halfplanes":[{"coeffs":[0.1,0,1],"theta":0.3,"strict":true}],
            "curves":[{"coeffs":[0,1],"theta":0,"kind":"right_of","params":[0.25]}],
            "points":[[0.5,-0.125]],"window":{"xmin":-2,"xmax":2,"ymin":-2,"ymax":2},"seed":7}"#;
        let (s, _) = parse_scene(text).unwrap();
        let j = s.to_json();
        let (s2, _) = parse_scene(&j).unwrap();
        assert_eq!(s, s2);
        assert_eq!(j, s2.to_json());
        assert_eq!(s.open_curves()[0].kind, CurveKind::RightOf(0.25));
    }
}
