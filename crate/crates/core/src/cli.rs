//! Command-line front end: `semialg <command> <scene.json> [options]`.
//!
//! Exit codes: 0 success, 1 a `verify` suite failed, 2 bad usage or invalid scene,
//! 3 computational error. Errors are written to stderr as one JSON object.

use crate::cells::CellComplex;
use crate::geodesic::{geodesic_below_graph, geodesic_in_region, PiecewiseCurve};
use crate::geom::{self, Point, Rect};
use crate::interaction::{check_bounds, count_interactions, Bounds};
use crate::oracle::{polygonal_shortest_path, region_predicate, OracleConfig};
use crate::regions::{
    classify_basic_set, intersect_halfplanes, union_cell_decomposition, validate_decomposition, Classification, TypeIRegion,
};
use crate::render::{render_svg, RenderStyle};
use crate::scene::{parse_scene, Scene, SceneError};
use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Decompose,
    Classify,
    Geodesic,
    Verify,
    Render,
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    let x: f64 = x.trim().parse().map_err(|e| format!("{e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("{e}"))?;
    Ok([x, y])
}

#[derive(Debug, Parser)]
#[command(name = "semialg", version, about = "Cell decompositions and shortest curves for planar semi-algebraic scenes")]
pub struct Args {
    pub command: Command,
    pub scene: PathBuf,
    /// Geometric tolerance; overrides the scene's eps_geom.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Oracle grid cells per axis used by `verify`.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Seed for randomized suites; overrides the scene's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path for `render`.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub from: Option<Point>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub to: Option<Point>,
}

/// Outcome of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Why a command did not produce output.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("invalid scene: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("{0}: {1}")]
    Compute(String, String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Validation(_) => 2,
            Failure::Compute(..) => 3,
        }
    }

    fn outcome(self, warnings: Vec<String>) -> Outcome {
        let (code, body) = match self {
            Failure::Usage(m) => (2, json!({"error": "usage", "message": m})),
            Failure::Validation(v) => (2, json!({"error": "validation", "message": v.join("; "), "details": v})),
            Failure::Compute(kind, m) => (3, json!({"error": kind, "message": m})),
        };
        let mut stderr = String::new();
        for w in warnings {
            stderr.push_str(&json!({"warning": w}).to_string());
            stderr.push('\n');
        }
        stderr.push_str(&body.to_string());
        stderr.push('\n');
        Outcome { code, stdout: String::new(), stderr }
    }
}

fn compute<E: std::fmt::Display>(kind: &str) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure::Compute(kind.to_string(), e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run(argv: &[String]) -> Outcome {
    match Args::try_parse_from(argv) {
        Ok(args) => run_args(&args),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                Outcome { code, stdout: e.to_string(), stderr: String::new() }
            } else {
                Failure::Usage(e.to_string()).outcome(Vec::new())
            }
        }
    }
}

pub fn run_args(args: &Args) -> Outcome {
    let text = match std::fs::read_to_string(&args.scene) {
        Ok(t) => t,
        Err(e) => return Failure::Usage(format!("cannot read {}: {e}", args.scene.display())).outcome(Vec::new()),
    };
    let (mut scene, warnings) = match parse_scene(&text) {
        Ok(x) => x,
        Err(SceneError::Validation(v)) => return Failure::Validation(v).outcome(Vec::new()),
        Err(e) => return Failure::Validation(vec![e.to_string()]).outcome(Vec::new()),
    };
    if let Some(t) = args.tol {
        if !(t > 0.0) {
            return Failure::Usage("--tol must be positive".into()).outcome(warnings);
        }
        scene.tolerances.eps_geom = t;
    }
    if let Some(s) = args.seed {
        scene.seed = s;
    }
    let result = match args.command {
        Command::Decompose => decompose(&scene).map(|c| (0, to_json(&c))),
        Command::Classify => classify(&scene).map(|c| (0, to_json(&c))),
        Command::Geodesic => geodesic_cmd(&scene, args),
        Command::Verify => verify(&scene, args.grid).map(|r| (if r.pass { 0 } else { 1 }, to_json(&r))),
        Command::Render => render_cmd(&scene, args),
    };
    match result {
        Ok((code, stdout)) => {
            let stderr = warnings.iter().map(|w| format!("{}\n", json!({"warning": w}))).collect();
            Outcome { code, stdout, stderr }
        }
        Err(f) => f.outcome(warnings),
    }
}

fn regions_of(scene: &Scene) -> Result<Vec<TypeIRegion>, Failure> {
    let hs = scene.halfplanes();
    if hs.is_empty() {
        return Ok(Vec::new());
    }
    Ok(intersect_halfplanes(&hs, &scene.window).map_err(compute("decomposition"))?.regions)
}

/// Cell complex of `(∩ half-planes) ∪ curves ∪ points`.
pub fn decompose(scene: &Scene) -> Result<CellComplex, Failure> {
    let regions = regions_of(scene)?;
    union_cell_decomposition(&scene.points, &scene.open_curves(), &regions, scene.window, scene.tolerances.spacing)
        .map_err(compute("decomposition"))
}

pub fn classify(scene: &Scene) -> Result<Classification, Failure> {
    classify_basic_set(&scene.curve_graphs(), &scene.halfplanes(), &scene.window).map_err(compute("classification"))
}

/// Shortest curve between two points of the closure of the half-plane
/// intersection (the whole window when there are no half-planes).
pub fn shortest_curve(scene: &Scene, a: Point, b: Point) -> Result<PiecewiseCurve, Failure> {
    let tol = scene.tolerances.geodesic();
    let hs = scene.halfplanes();
    let w = &scene.window;
    for p in [a, b] {
        if !w.contains(p, tol.eps_geom) {
            return Err(Failure::Compute("geodesic".into(), format!("point ({}, {}) is outside the window", p[0], p[1])));
        }
    }
    if hs.len() == 1 && hs[0].graph.theta == 0.0 {
        let c = geodesic_below_graph(&hs[0].graph.poly, a, b, tol).map_err(compute("geodesic"))?;
        if c.sample(w.diameter() / 256.0).iter().all(|p| w.contains(*p, tol.eps_geom)) {
            return Ok(c);
        }
    }
    let regions = if hs.is_empty() { vec![TypeIRegion::window(w, true)] } else { regions_of(scene)? };
    let eps = tol.eps_geom * (1.0 + geom::norm(a).max(geom::norm(b)));
    let r = regions
        .iter()
        .find(|r| r.contains_as(a, eps, true) && r.contains_as(b, eps, true))
        .ok_or_else(|| Failure::Compute("geodesic".into(), "the points do not lie in one region".into()))?;
    geodesic_in_region(r, a, b, tol).map_err(compute("geodesic"))
}

fn endpoints(args: &Args) -> Result<Option<(Point, Point)>, Failure> {
    match (args.from, args.to) {
        (Some(a), Some(b)) => Ok(Some((a, b))),
        (None, None) => Ok(None),
        _ => Err(Failure::Usage("--from and --to go together".into())),
    }
}

fn geodesic_cmd(scene: &Scene, args: &Args) -> Result<(i32, String), Failure> {
    let (a, b) = endpoints(args)?.ok_or_else(|| Failure::Usage("geodesic needs --from X,Y --to X,Y".into()))?;
    let curve = shortest_curve(scene, a, b)?;
    let length = curve.length();
    Ok((0, to_json(&json!({"curve": curve, "length": length}))))
}

fn render_cmd(scene: &Scene, args: &Args) -> Result<(i32, String), Failure> {
    let path = args.svg.as_ref().ok_or_else(|| Failure::Usage("render needs --svg PATH".into()))?;
    let complex = decompose(scene)?;
    let curves = match endpoints(args)? {
        Some((a, b)) => vec![shortest_curve(scene, a, b)?],
        None => Vec::new(),
    };
    let svg = render_svg(&complex, &curves, &RenderStyle::default());
    std::fs::write(path, &svg).map_err(|e| Failure::Compute("io".into(), e.to_string()))?;
    Ok((0, to_json(&json!({"svg": path.display().to_string(), "cells": complex.cells.len(), "curves": curves.len()}))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub suites: Vec<SuiteResult>,
}

const SUITES: [&str; 5] = ["halfplane_decomposition", "classification", "cell_complex", "geodesics", "interactions"];
const PARTITION_SAMPLES: usize = 2000;
const GEODESIC_PAIRS: usize = 3;

fn threads() -> Option<usize> {
    std::env::var("SEMIALG_THREADS").ok()?.parse().ok().filter(|&n| n > 0)
}

/// Runs the property suites on a scene. Suites run in parallel and are reported
/// in a fixed order.
pub fn verify(scene: &Scene, grid: usize) -> Result<VerifyReport, Failure> {
    let run = || SUITES.par_iter().map(|name| run_suite(name, scene, grid)).collect::<Vec<_>>();
    let suites = match threads() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Compute("threads".into(), e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok(VerifyReport { pass: suites.iter().all(|s| s.pass), suites })
}

fn suite(name: &str, pass: bool, detail: impl Into<String>) -> SuiteResult {
    SuiteResult { name: name.to_string(), pass, detail: detail.into() }
}

/// Random point pairs inside one closed region.
fn sample_pairs(r: &TypeIRegion, rng: &mut ChaCha8Rng, n: usize) -> Vec<(Point, Point)> {
    let b = r.bbox();
    let mut draw = || {
        (0..10_000).find_map(|_| {
            let p = [rng.gen_range(b.xmin..=b.xmax), rng.gen_range(b.ymin..=b.ymax)];
            (r.contains_as(p, 0.0, true) && r.boundary_distance(p) > 1e-6 * (1.0 + b.diameter())).then_some(p)
        })
    };
    (0..n).filter_map(|_| Some((draw()?, draw()?))).collect()
}

fn run_suite(name: &str, scene: &Scene, grid: usize) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(scene.seed);
    let hs = scene.halfplanes();
    let closed = hs.iter().all(|h| !h.strict);
    match name {
        "halfplane_decomposition" => {
            if hs.is_empty() {
                return suite(name, true, "no half-planes");
            }
            match intersect_halfplanes(&hs, &scene.window) {
                Ok(d) => {
                    let rep = validate_decomposition(&d);
                    let failed: Vec<String> = rep.checks.iter().filter(|c| !c.pass).map(|c| format!("{:?}", c)).collect();
                    suite(name, rep.pass(), format!("{} regions; {}", d.regions.len(), if failed.is_empty() { "all properties hold".into() } else { failed.join("; ") }))
                }
                Err(e) => suite(name, false, e.to_string()),
            }
        }
        "classification" => match classify(scene) {
            Ok(c) => {
                let tag = serde_json::to_value(&c).ok().and_then(|v| v.get("tag").and_then(|t| t.as_str().map(String::from)));
                suite(name, true, tag.unwrap_or_default())
            }
            Err(f) => suite(name, false, format!("{f:?}")),
        },
        "cell_complex" => {
            let regions = match regions_of(scene) {
                Ok(r) => r,
                Err(f) => return suite(name, false, format!("{f:?}")),
            };
            let c = match union_cell_decomposition(&scene.points, &scene.open_curves(), &regions, scene.window, scene.tolerances.spacing) {
                Ok(c) => c,
                Err(e) => return suite(name, false, e.to_string()),
            };
            let issues = c.validate();
            if !issues.is_empty() {
                return suite(name, false, issues.join("; "));
            }
            let loc = c.locator();
            let w = scene.window;
            let mut bad = 0;
            for _ in 0..PARTITION_SAMPLES {
                let q = [rng.gen_range(w.xmin..=w.xmax), rng.gen_range(w.ymin..=w.ymax)];
                let near_boundary = regions.iter().any(|r| r.boundary_distance(q) < 1e-7);
                if near_boundary {
                    continue;
                }
                let inside = regions.iter().any(|r| r.contains(q, 0.0));
                if loc.cells_containing(q, 1e-9).len() != usize::from(inside) {
                    bad += 1;
                }
            }
            suite(name, bad == 0, format!("{} cells; {bad} of {PARTITION_SAMPLES} samples misplaced", c.cells.len()))
        }
        "geodesics" | "interactions" => {
            if !closed || hs.is_empty() {
                return suite(name, true, "no closed half-plane region");
            }
            let regions = match regions_of(scene) {
                Ok(r) => r,
                Err(f) => return suite(name, false, format!("{f:?}")),
            };
            let complex = if name == "interactions" {
                match decompose(scene) {
                    Ok(c) => Some(c),
                    Err(f) => return suite(name, false, format!("{f:?}")),
                }
            } else {
                None
            };
            let tol = scene.tolerances.geodesic();
            let mut problems = Vec::new();
            let mut checked = 0;
            for r in &regions {
                for (a, b) in sample_pairs(r, &mut rng, GEODESIC_PAIRS) {
                    let g = match geodesic_in_region(r, a, b, tol) {
                        Ok(g) => g,
                        Err(e) => {
                            problems.push(format!("{a:?}->{b:?}: {e}"));
                            continue;
                        }
                    };
                    checked += 1;
                    if let Some(c) = &complex {
                        match count_interactions(&g, c, 1e-3 * c.window.diameter()) {
                            Ok(rep) => {
                                let chk = check_bounds(&rep, c, Bounds { b0: usize::MAX, b1: usize::MAX, b2: None });
                                if !chk.pass {
                                    problems.push(format!("{a:?}->{b:?}: unbounded visits {:?}", chk.witnesses));
                                }
                            }
                            Err(e) => problems.push(format!("{a:?}->{b:?}: {e}")),
                        }
                        continue;
                    }
                    let cfg = OracleConfig { grid_n: grid.max(32), ..Default::default() };
                    let pred = region_predicate(r, 1e-9);
                    let window = expand(&r.bbox(), 1e-9);
                    match polygonal_shortest_path(&pred, a, b, window, cfg) {
                        Ok(o) => {
                            let l = g.length();
                            if l > o.length + 1e-9 || l < o.length - o.resolution_bound {
                                problems.push(format!("{a:?}->{b:?}: length {l} vs oracle {} (bound {})", o.length, o.resolution_bound));
                            }
                        }
                        Err(e) => problems.push(format!("{a:?}->{b:?}: oracle {e}")),
                    }
                    if !g.alternates() || g.tangency_residual() >= 1e-6 || !g.arcs_convex_up().unwrap_or(false) {
                        problems.push(format!("{a:?}->{b:?}: structure"));
                    }
                }
            }
            suite(name, problems.is_empty(), if problems.is_empty() { format!("{checked} curves checked") } else { problems.join("; ") })
        }
        _ => suite(name, false, "unknown suite"),
    }
}

fn expand(r: &Rect, d: f64) -> Rect {
    r.expanded(d * (1.0 + r.diameter()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::parse_scene;

    fn scene(text: &str) -> Scene {
        parse_scene(text).unwrap().0
    }

    #[test]
    fn point_argument() {
        assert_eq!(parse_point("-1,0.5"), Ok([-1.0, 0.5]));
        assert!(parse_point("1;2").is_err());
    }

    #[test]
    fn below_parabola_geodesic() {
        let s = scene(r#"{"halfplanes":[{"coeffs":[0,0,1]}],"window":{"xmin":-2,"xmax":2,"ymin":-2,"ymax":2}}"#);
        let c = shortest_curve(&s, [-1.0, 0.5], [1.0, 0.5]).unwrap();
        assert!((c.length() - 2.25676).abs() < 1e-4);
    }

    #[test]
    fn empty_intersection_verifies() {
        let s = scene(
            r#"{"halfplanes":[{"coeffs":[-1]},{"coeffs":[-1],"theta":3.141592653589793}],
                "window":{"xmin":-2,"xmax":2,"ymin":-2,"ymax":2}}"#,
        );
        let r = verify(&s, 64).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(matches!(classify(&s).unwrap(), Classification::Empty));
    }
}
