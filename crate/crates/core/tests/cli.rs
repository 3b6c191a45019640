use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use driftcorr::io::read_trajectory;
use driftcorr::worldmap::io::{encode_field, read_field};
use driftcorr::worldmap::DistancePrior;
use driftcorr::geometry::Point2;

fn driftcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_driftcorr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = driftcorr(args);
    assert!(
        out.status.success(),
        "driftcorr {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn missing_map_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = driftcorr(&["dt", "--map", "/no/such/map.json", "--out", s(&dir.path().join("f.dfld"))]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("/no/such/map.json"), "{err}");
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(driftcorr(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(driftcorr(&["simulate", "--length"]).status.code(), Some(1));
    assert_eq!(driftcorr(&["--help"]).status.code(), Some(0));
}

#[test]
fn dt_writes_field_with_zero_centerline() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("map.json");
    fs::write(&map, r#"{"version":1,"polylines":[[[0,0],[20,0],[20,15]]]}"#).unwrap();
    let field_path = dir.path().join("field.dfld");
    let stdout = ok(&["dt", "--map", s(&map), "--cell-size", "1", "--out", s(&field_path)]);
    assert!(stdout.contains("occupied"), "{stdout}");

    let field = read_field(&field_path).unwrap();
    for p in [Point2::new(5.0, 0.0), Point2::new(20.0, 7.0), Point2::new(12.0, 0.0)] {
        assert_eq!(field.distance(p), 0.0, "at {p:?}");
    }
    assert_eq!(encode_field(&field), fs::read(&field_path).unwrap());
}

#[test]
fn unknown_config_version_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("map.json");
    fs::write(&map, r#"{"polylines":[[[0,0],[20,0]]]}"#).unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"version":7}"#).unwrap();
    let out = driftcorr(&["dt", "--map", s(&map), "--config", s(&cfg), "--out", s(&dir.path().join("f"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("version"));
}

#[test]
fn zero_drift_simulation_reproduces_truth() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("s");
    ok(&["simulate", "--kind", "straight", "--length", "100", "--out", s(&scen)]);
    let truth = fs::read(scen.join("truth.csv")).unwrap();
    assert_eq!(truth, fs::read(scen.join("slam.csv")).unwrap());
    assert_eq!(read_trajectory(scen.join("truth.csv")).unwrap().len(), 101);
}

#[test]
fn loop_closes_on_itself() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("loop");
    ok(&["simulate", "--kind", "loop", "--length", "200", "--out", s(&scen)]);
    let truth = read_trajectory(scen.join("truth.csv")).unwrap();
    assert!(truth.first().distance(truth.last()) < 1e-9);
}

#[test]
fn fixed_seed_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        ok(&["simulate", "--kind", "l_turns", "--length", "120", "--angle-noise", "0.01", "--seed", "99", "--out", s(out)]);
    };
    args(&dir.path().join("a"));
    args(&dir.path().join("b"));
    for f in ["truth.csv", "slam.csv", "map.json", "scenario.json"] {
        assert_eq!(
            fs::read(dir.path().join("a").join(f)).unwrap(),
            fs::read(dir.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
}

fn max_gap(a: &Path, b: &Path) -> f64 {
    let a = read_trajectory(a).unwrap();
    let b = read_trajectory(b).unwrap();
    assert_eq!(a.len(), b.len());
    a.points()
        .iter()
        .zip(b.points())
        .map(|(p, q)| p.distance(*q))
        .fold(0.0, f64::max)
}

#[test]
fn correcting_an_undrifted_run_keeps_it() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("s");
    ok(&["simulate", "--kind", "straight", "--length", "150", "--out", s(&scen)]);
    ok(&["correct", "--scenario", s(&scen), "--out", s(&scen)]);
    let worst = max_gap(&scen.join("slam.csv"), &scen.join("corrected.csv"));
    assert!(worst < 1e-4, "moved by {worst}");
    let log: serde_json::Value = serde_json::from_slice(&fs::read(scen.join("epochs.json")).unwrap()).unwrap();
    assert_eq!(log["version"], 1);
    assert_eq!(log["epochs"].as_array().unwrap().len(), 150);
}

// The heading-hold prior resists a square corner, so an undrifted staircase
// lags behind each corner before the map pulls it back.
#[test]
fn undrifted_corners_lag_boundedly() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("s");
    ok(&["simulate", "--kind", "l_turns", "--length", "150", "--out", s(&scen)]);
    ok(&["correct", "--scenario", s(&scen), "--out", s(&scen)]);
    let worst = max_gap(&scen.join("slam.csv"), &scen.join("corrected.csv"));
    assert!(worst > 0.1 && worst < 2.0, "moved by {worst}");
}

#[test]
fn correct_reports_improvement_on_drifted_run() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("s");
    ok(&["simulate", "--kind", "straight", "--length", "500", "--heading-bias", "0.002", "--out", s(&scen)]);
    let stdout = ok(&["correct", "--scenario", s(&scen), "--out", s(&dir.path().join("c"))]);
    let factor: f64 = stdout
        .split_whitespace()
        .find_map(|w| w.strip_suffix('x').and_then(|n| n.parse().ok()))
        .expect("improvement factor printed");
    assert!(factor >= 10.0, "{stdout}");
}

#[test]
fn malformed_csv_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let slam = dir.path().join("slam.csv");
    fs::write(&slam, "t,x,y\n0,0,0\n1,1,0\n2,oops,0\n").unwrap();
    let map = dir.path().join("map.json");
    fs::write(&map, r#"{"polylines":[[[0,0],[20,0]]]}"#).unwrap();
    let out = driftcorr(&["correct", "--slam", s(&slam), "--map", s(&map), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("slam.csv:4"), "{err}");
}

#[test]
fn eval_fans_out_over_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    ok(&["simulate", "--kind", "straight", "--length", "200", "--heading-bias", "0.002", "--out", s(&a)]);
    ok(&["simulate", "--kind", "loop", "--length", "200", "--heading-bias", "0.001", "--out", s(&b)]);
    let report = dir.path().join("r");
    let table = ok(&["eval", "--scenario", s(&a), s(&b), "--out", s(&report)]);
    assert!(table.contains("straight_200m") && table.contains("loop_200m"), "{table}");

    ok(&["correct", "--scenario", s(&a), "--out", s(&a)]);
    let single = ok(&[
        "eval",
        "--corrected",
        s(&a.join("corrected.csv")),
        "--slam",
        s(&a.join("slam.csv")),
        "--reference",
        s(&a.join("truth.csv")),
    ]);
    let json: serde_json::Value = serde_json::from_slice(&fs::read(report.join("report.json")).unwrap()).unwrap();
    let row = &json["rows"][0];
    assert_eq!(row["name"], "straight_200m");
    let corrected = format!("{:.1}", row["closing_corrected"].as_f64().unwrap());
    assert!(single.contains(&corrected), "{single} vs {corrected}");
}

#[test]
fn plot_draws_three_colored_polylines() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("s");
    ok(&["simulate", "--kind", "l_turns", "--length", "120", "--heading-bias", "0.003", "--out", s(&scen)]);
    ok(&["correct", "--scenario", s(&scen), "--out", s(&scen)]);
    ok(&["dt", "--map", s(&scen.join("map.json")), "--out", s(&scen.join("f.dfld"))]);
    let svg_path = dir.path().join("plot.svg");
    ok(&[
        "plot",
        "--reference",
        s(&scen.join("truth.csv")),
        "--corrected",
        s(&scen.join("corrected.csv")),
        "--slam",
        s(&scen.join("slam.csv")),
        "--field",
        s(&scen.join("f.dfld")),
        "--out",
        s(&svg_path),
    ]);
    let text = fs::read_to_string(&svg_path).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let strokes: Vec<&str> = doc
        .descendants()
        .filter(|n| n.has_tag_name("polyline"))
        .filter_map(|n| n.attribute("stroke"))
        .collect();
    assert_eq!(strokes.len(), 3);
    assert_eq!(strokes, ["blue", "red", "green"]);
}

#[test]
fn plot_without_trajectories_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = driftcorr(&["plot", "--out", s(&dir.path().join("p.svg"))]);
    assert_eq!(out.status.code(), Some(2));
}
