use std::path::PathBuf;
use std::process::{Command, Output};

const PARABOLA: &str = r#"{"halfplanes":[{"coeffs":[0,0,1]}],"window":{"xmin":-2,"xmax":2,"ymin":-2,"ymax":2},"seed":5}"#;

const ROTATED: &str = r#"{"halfplanes":[
    {"coeffs":[2,0,-1],"theta":0.7853981633974483,"strict":false},
    {"coeffs":[1],"theta":4.71238898038469},
    {"coeffs":[1],"theta":3.141592653589793}],
  "window":{"xmin":-3,"xmax":3,"ymin":-3,"ymax":3}}"#;

fn scene(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("semialg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn semialg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semialg")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn decompose_round_trips_and_is_deterministic() {
    let p = scene("rotated.json", ROTATED);
    let a = semialg(&["decompose", p.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = semialg(&["decompose", p.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    let c: semialg::cells::CellComplex = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(serde_json::to_string_pretty(&c).unwrap() + "\n", stdout(&a));
    assert!(c.validate().is_empty());
}

#[test]
fn geodesic_below_parabola() {
    let p = scene("parabola.json", PARABOLA);
    let o = semialg(&["geodesic", p.to_str().unwrap(), "--from", "-1,0.5", "--to", "1,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let len = v["length"].as_f64().unwrap();
    assert!((len - 2.25676).abs() < 1e-4, "{len}");
    let curve: semialg::geodesic::PiecewiseCurve = serde_json::from_value(v["curve"].clone()).unwrap();
    assert_eq!(curve.pieces.len(), 3);
}

#[test]
fn verify_empty_intersection_and_thread_cap() {
    let p = scene(
        "empty.json",
        r#"{"halfplanes":[{"coeffs":[-1]},{"coeffs":[-1],"theta":3.141592653589793}],"window":{"xmin":-2,"xmax":2,"ymin":-2,"ymax":2}}"#,
    );
    let o = semialg(&["verify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let c = semialg(&["classify", p.to_str().unwrap()]);
    assert!(stdout(&c).contains("\"empty\""));

    let q = scene("parabola.json", PARABOLA);
    let a = semialg(&["verify", q.to_str().unwrap(), "--grid", "128"]);
    let b = Command::new(env!("CARGO_BIN_EXE_semialg"))
        .args(["verify", q.to_str().unwrap(), "--grid", "128"])
        .env("SEMIALG_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn error_exit_codes() {
    let bad = scene("bad.json", "{}");
    let o = semialg(&["decompose", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"], "validation");

    let broken = scene("broken.json", "{\"window\": ");
    assert_eq!(semialg(&["classify", broken.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(semialg(&["frobnicate", broken.to_str().unwrap()]).status.code(), Some(2));

    let p = scene("parabola.json", PARABOLA);
    let o = semialg(&["geodesic", p.to_str().unwrap(), "--from", "0,5", "--to", "1,0.5"]);
    assert_eq!(o.status.code(), Some(3));
    let e: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"], "geodesic");
}

#[test]
fn theta_warning_on_stderr() {
    let p = scene("theta.json", r#"{"halfplanes":[{"coeffs":[0.5],"theta":7.0}],"window":{"xmin":-1,"xmax":1,"ymin":-1,"ymax":1}}"#);
    let o = semialg(&["classify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("normalized"));
}

#[test]
fn render_writes_parseable_svg() {
    let p = scene("parabola.json", PARABOLA);
    let out = p.with_file_name("parabola.svg");
    let o = semialg(&["render", p.to_str().unwrap(), "--svg", out.to_str().unwrap(), "--from", "-1,0.5", "--to", "1,0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(&out).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    let last = root.children().filter(|n| n.is_element()).next_back().unwrap();
    assert_eq!(last.attribute("class"), Some("curve"));
    assert_eq!(semialg(&["render", p.to_str().unwrap()]).status.code(), Some(2));
}
