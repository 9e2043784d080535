use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ssflab"))
}

fn geometry(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "geometries", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

/// Header JSON and CSV rows of a successful run.
fn parse(out: &Output) -> (Value, Vec<Vec<String>>) {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().and_then(|l| l.strip_prefix("# ")).expect("header line");
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (serde_json::from_str(header).unwrap(), rows)
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<String> {
    let i = rows[0].iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
    rows[1..].iter().map(|r| r[i].clone()).collect()
}

fn floats(v: &[String]) -> Vec<f64> {
    v.iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn capacity_of_disk() {
    let out = run(&["capacity", "--geometry", &geometry("disk.json"), "--n", "40,80,120"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = parse(&out);
    let v = h["result"]["estimate"]["value"].as_f64().unwrap();
    assert!((v - 1.0).abs() < 0.01, "{v}");
    assert_eq!(rows[0], ["n", "d_n"]);
    assert_eq!(rows.len(), 4);
}

#[test]
fn malformed_geometry_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\n  \"type\": \"disk\",\n  \"center\": [0, 0,\n}").unwrap();
    let out = run(&["capacity", "--geometry", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:4:"), "{err}");
}

#[test]
fn union_reports_members() {
    let out = run(&["capacity", "--geometry", &geometry("union.json"), "--n", "30,60"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, _) = parse(&out);
    assert_eq!(h["result"]["members"].as_array().unwrap().len(), 2);
    assert_eq!(h["result"]["monotone_vs_members"], Value::Bool(true));
}

#[test]
fn toeplitz_disk_is_diagonal_and_matches_oracle() {
    let out = run(&["toeplitz", "--geometry", &geometry("disk.json"), "--k", "40", "--q", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = parse(&out);
    assert_eq!(h["result"]["diagonal"], Value::Bool(true));
    for d in floats(&column(&rows, "oracle_abs_diff")).iter().take(20) {
        assert!(*d < 1e-8);
    }
}

#[test]
fn negative_k_is_a_usage_error() {
    let out = run(&["toeplitz", "--geometry", &geometry("disk.json"), "--k", "-3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn square_residual_trend() {
    let out = run(&["toeplitz", "--geometry", &geometry("square.json"), "--k", "44", "--cap", "0.5901702"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = parse(&out);
    assert_eq!(h["result"]["cap_source"], "user");
    let r = floats(&column(&rows, "fipu_residual")[19..=40]);
    assert!(r.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn ssf_ball_dirichlet_and_neumann() {
    let sched = "-100,-1000,-10000";
    let out = run(&["ssf", "--obstacle", &geometry("ball.json"), "--ln-lambda", sched, "--b", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = parse(&out);
    assert_eq!(h["result"]["cap_source"], "caplib");
    assert!(floats(&column(&rows, "below")).iter().all(|&v| v == 0.0));
    assert!(column(&rows, "bounded_below").iter().all(|v| v == "true"));

    let out = run(&["ssf", "--cap", "1.0", "--boundary", "neumann", "--ln-lambda", sched]);
    assert!(out.status.success());
    let (h, rows) = parse(&out);
    assert_eq!(h["result"]["cap_source"], "user");
    assert!(h["result"]["interpretation"].is_string());
    assert!(floats(&column(&rows, "below_over_above")).iter().all(|&r| r == 2.0));
}

#[test]
fn ssf_schedule_above_threshold_is_rejected() {
    let out = run(&["ssf", "--cap", "1.0", "--ln-lambda", "-2.0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("e^-e"));
}

#[test]
fn verify_weyl_and_unknown_suite() {
    let out = run(&["verify", "weyl", "--seed", "42"]);
    assert!(out.status.success());
    let (_, rows) = parse(&out);
    assert_eq!(rows[1][..3], ["weyl", "1000", "0"]);
    let out = run(&["verify", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m6m7"));
}

#[test]
fn verify_form_comparison() {
    let out = run(&["verify", "m6m7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, _) = parse(&out);
    assert!(h["result"]["suites"][0]["worst"].as_f64().unwrap() < 1e-6);
}

#[test]
fn outputs_are_deterministic_and_rerunnable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = ["verify", "pushnitski", "--seed", "9", "--instances", "50", "--out"];
    assert!(bin().args(args).arg(&a).status().unwrap().success());
    assert!(bin().args(args).arg(&b).status().unwrap().success());
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    // the embedded config re-runs to the same output
    let c = dir.path().join("c.csv");
    let st = bin().args(["verify", "--config"]).arg(&a).arg("--out").arg(&c).status().unwrap();
    assert!(st.success());
    assert_eq!(std::fs::read(&c).unwrap(), ta);
}

#[test]
fn resolvent_norms_respect_bounds() {
    let out = run(&["resolvent", "--energy", "-2,-0.5,0.5,2", "--variant", "tilde"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = parse(&out);
    assert!(floats(&column(&rows, "ratio")).iter().all(|&r| r <= 1.0 + 1e-12));
}

#[test]
fn effective_grid_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("eff.json");
    std::fs::write(
        &cfg,
        r#"{"q": 1, "grid": {"n_perp": 96, "n_par": 65, "half_perp": 6.5, "half_par": 6.5, "pad": 2},
            "obstacle": {"type": "ball", "center": [0, 0, 0], "radius": 1}}"#,
    )
    .unwrap();
    let out = run(&["effective", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = parse(&out);
    assert!(h["result"]["mu_q_max"].as_f64().unwrap() > 0.0);
    assert_eq!(rows[0], ["x1", "x2", "upsilon", "shadow"]);
    assert_eq!(rows.len(), 1 + 96 * 96);
}
