use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cyclewalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclewalk"))
        .args(args)
        .env_remove("CYCLEWALK_SEED")
        .output()
        .expect("run cyclewalk")
}

fn ok(args: &[&str]) -> String {
    let out = cyclewalk(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn torus_has_two_holes() {
    let dir = tempfile::tempdir().unwrap();
    let torus = dir.path().join("torus.json");
    let basis = dir.path().join("basis");
    ok(&[
        "build-torus",
        "--n",
        "4",
        "-o",
        p(&torus),
        "--basis",
        p(&basis),
    ]);
    assert_eq!(ok(&["betti", p(&torus), "--dim", "1"]).trim(), "2");
    let all: Value = serde_json::from_str(&ok(&["betti", p(&torus)])).unwrap();
    assert_eq!(all["betti"], serde_json::json!([1, 2, 1]));
    assert!(basis.join("sigma1.json").exists() && basis.join("sigma2.json").exists());
    assert!(ok(&["validate", p(&torus)]).starts_with("ok"));
}

#[test]
fn square_has_one_hole() {
    let dir = tempfile::tempdir().unwrap();
    let sq = dir.path().join("square.json");
    fs::write(
        &sq,
        r#"{"n_vertices": 4, "simplices": {"1": [[0,1],[1,2],[2,3],[0,3]]}}"#,
    )
    .unwrap();
    assert_eq!(ok(&["betti", p(&sq), "--dim", "1"]).trim(), "1");
    let coo = dir.path().join("l1.coo");
    let spec: Value =
        serde_json::from_str(&ok(&["spectrum", p(&sq), "--dim", "1", "--coo", p(&coo)])).unwrap();
    let values: Vec<f64> = spec["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    // L_1 of the 4-cycle is the graph Laplacian of a 4-cycle: {0, 2, 2, 4}
    for (a, b) in values.iter().zip([0.0, 2.0, 2.0, 4.0]) {
        assert!((a - b).abs() < 1e-9, "{values:?}");
    }
    assert!(fs::read_to_string(&coo).unwrap().lines().count() >= 4);
}

#[test]
fn walk_is_reproducible_and_honours_the_seed_variable() {
    let dir = tempfile::tempdir().unwrap();
    let torus = dir.path().join("torus.json");
    let basis = dir.path().join("basis");
    ok(&[
        "build-torus",
        "--n",
        "4",
        "-o",
        p(&torus),
        "--basis",
        p(&basis),
    ]);
    let start = basis.join("sigma1.json");
    let args = [
        "walk",
        p(&torus),
        "--start",
        p(&start),
        "--time",
        "3",
        "--seed",
        "9",
    ];
    let a = ok(&args);
    let b = ok(&args);
    assert_eq!(a, b);
    assert!(!a.is_empty());
    for line in a.lines() {
        serde_json::from_str::<Value>(line).unwrap();
    }
    let env = Command::new(env!("CARGO_BIN_EXE_cyclewalk"))
        .args(["walk", p(&torus), "--start", p(&start), "--time", "3"])
        .env("CYCLEWALK_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(env.stdout).unwrap(), a);
    let summary = dir.path().join("summary.json");
    ok(&[
        "walk",
        p(&torus),
        "--start",
        p(&start),
        "--time",
        "3",
        "--seed",
        "9",
        "--record",
        "summary",
        "-o",
        p(&summary),
    ]);
    let s: Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["jumps"].as_u64().unwrap() as usize, a.lines().count());
}

#[test]
fn heat_and_scaling_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let torus = dir.path().join("torus.json");
    let basis = dir.path().join("basis");
    ok(&[
        "build-torus",
        "--n",
        "4",
        "-o",
        p(&torus),
        "--basis",
        p(&basis),
    ]);
    let norms = dir.path().join("norms.csv");
    let out = ok(&[
        "heat",
        p(&torus),
        "--start",
        p(&basis.join("sigma1.json")),
        "--time",
        "2",
        "--steps",
        "4",
        "--norms",
        p(&norms),
    ]);
    let chain: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(chain["dim"], 1);
    let table = fs::read_to_string(&norms).unwrap();
    assert_eq!(table.lines().next().unwrap(), "t,norm,energy,residual");
    assert_eq!(table.lines().count(), 6);

    let flat = dir.path().join("flat.csv");
    let report: Value = serde_json::from_str(&ok(&[
        "scaling",
        "--n-list",
        "4",
        "--trajectories",
        "1",
        "--snapshots",
        "2",
        "--csv",
        p(&flat),
    ]))
    .unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 1);
    assert_eq!(fs::read_to_string(&flat).unwrap().lines().count(), 4);
}

#[test]
fn find_holes_reports_one_loop_per_hole() {
    let dir = tempfile::tempdir().unwrap();
    let cx = dir.path().join("rips.json");
    ok(&[
        "build-rips",
        "--annulus",
        "60",
        "--radius",
        "0.45",
        "--seed",
        "2",
        "-o",
        p(&cx),
    ]);
    let b1: usize = ok(&["betti", p(&cx), "--dim", "1"]).trim().parse().unwrap();
    let traces = dir.path().join("traces");
    let report: Value = serde_json::from_str(&ok(&[
        "find-holes",
        p(&cx),
        "--max-steps",
        "3000",
        "--seed",
        "4",
        "--trace-dir",
        p(&traces),
    ]))
    .unwrap();
    let holes = report["holes"].as_array().unwrap();
    assert_eq!(holes.len(), b1);
    for h in holes {
        assert!(h["final_energy"].as_i64().unwrap() <= h["seed_energy"].as_i64().unwrap());
        let path = h["energy_trace_csv_path"].as_str().unwrap();
        assert!(fs::read_to_string(path)
            .unwrap()
            .starts_with("step,temperature,energy"));
    }
}

#[test]
fn exit_codes_separate_usage_from_bad_input() {
    assert_eq!(cyclewalk(&["betti"]).status.code(), Some(2));
    assert_eq!(cyclewalk(&["no-such-command"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        "{\"n_vertices\": 3,\n \"simplices\": {\"2\": [[0,1,2]]}}",
    )
    .unwrap();
    let out = cyclewalk(&["validate", p(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));
    fs::write(&bad, "not json").unwrap();
    assert_eq!(cyclewalk(&["betti", p(&bad)]).status.code(), Some(3));
    let missing = dir.path().join("missing.json");
    assert_eq!(cyclewalk(&["betti", p(&missing)]).status.code(), Some(3));
    assert!(cyclewalk(&["betti", p(&missing)]).stdout.is_empty());
}
