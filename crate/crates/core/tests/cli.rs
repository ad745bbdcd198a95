use std::path::Path;
use std::process::{Command, Output};

use rootsurf::cli::{Scenario, BUILTINS};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rootsurf")).args(args).output().unwrap()
}

fn verdict(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("verdict.json")).unwrap()).unwrap()
}

#[test]
fn every_builtin_meets_its_expectations_at_reduced_resolution() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, _) in BUILTINS {
        let samples = match name {
            "torus" => "16",
            "graphdemo" => "8",
            "example1" => "401",
            _ => "400",
        };
        let out = tmp.path().join(name);
        let o = run(&["builtin", name, "--samples", samples, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let v = verdict(&out);
        assert!(v["expectations"].as_array().unwrap().iter().all(|e| e["met"] == true), "{name}");
    }
}

#[test]
fn example1_reports_a_divergent_lift_near_two_thirds() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["builtin", "example1", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = verdict(tmp.path());
    assert_eq!(v["ah"]["answer"], "yes");
    assert_eq!(v["cole"]["answer"], "yes");
    assert_eq!(v["ah"]["witness_ref"], "witness_ah.csv");
    let divergent = v["lifts"]["lifts"].as_array().unwrap().iter().any(|l| {
        l["branch_tests"].as_array().unwrap().iter().any(|t| t["sample"] == 1333 && t["verdict"] == "divergent")
    });
    assert!(divergent);
    let witness = std::fs::read_to_string(tmp.path().join("witness_ah.csv")).unwrap();
    assert!(witness.starts_with("sample_index,x,sheet_index,target_sheet,value_re,value_im\n"));
    assert_eq!(witness.lines().count(), 1 + 2001 * 2);
}

#[test]
fn example2_figures_show_five_curves_and_the_crossing() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["builtin", "example2", "--svg", "--stability", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = verdict(tmp.path());
    assert_eq!(v["strips"]["source"], serde_json::json!([2, 3]));
    assert_eq!(v["strips"]["target"], serde_json::json!([2, 3]));
    assert_eq!(v["stability"]["resolutions"], serde_json::json!([2000, 4000, 8000]));
    assert_eq!(v["stability"]["stable"], true);
    for name in ["bundle_p.svg", "bundle_pT.svg"] {
        let svg = std::fs::read_to_string(tmp.path().join("figures").join(name)).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 10, "{name}");
        assert!(svg.matches("<circle").count() >= 2, "{name}: branch point not marked");
    }
    let bp = &v["bundle"]["branch_points"][0];
    assert_eq!(bp["sample"], 1000);
    assert!((bp["coordinate"][0].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn mismatched_analyses_and_bad_files_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"name": "x", "base": {"kind": "interval", "samples": 50}, "polynomial": {"coefficients": ["-x", "0"]}, "analyses": ["strips"]}"#,
        r#"{"name": "x", "base": {"kind": "circle", "samples": 50}, "polynomial": {"coefficients": ["-x", "0"]}, "analyses": ["cole"]}"#,
        r#"{"name": "x", "base": {"kind": "circle", "samples": 50}, "analyses": ["closedness"]}"#,
        r#"{"name": "x", "base": {"kind": "circle", "samples": 50}, "polynomial": {"coefficients": ["0", "0"]}, "analyses": ["cole"]}"#,
        r#"{"name": "x", "base": {"kind": "circle", "samples": 50}, "analyses": [], "extra": 1}"#,
    ];
    for (i, text) in cases.iter().enumerate() {
        let path = tmp.path().join(format!("{i}.json"));
        std::fs::write(&path, text).unwrap();
        let o = run(&["run", path.to_str().unwrap(), "--out", tmp.path().join("out").to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "case {i}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"), "case {i}");
    }
    assert_eq!(run(&["builtin", "nonexistent"]).status.code(), Some(1));
}

#[test]
fn schema_violations_name_the_json_path() {
    let err = Scenario::from_json(r#"{"name": "x", "base": {"kind": "circle", "samples": 8}, "analyses": ["colour"]}"#)
        .unwrap_err()
        .to_string();
    assert!(err.contains("analyses[0]"), "{err}");
}

#[test]
fn seed_changes_only_seeded_output() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("tree.json");
    std::fs::write(
        &path,
        r#"{"name": "tree", "base": {"kind": "graph", "vertices": 4, "edges": [[0, 1], [0, 2], [0, 3]], "samples_per_edge": 6},
            "analyses": ["closedness"], "expect": {"closed": true}, "trials": 5}"#,
    )
    .unwrap();
    let mut reports = Vec::new();
    for (dir, seed) in [("a", "1"), ("b", "1"), ("c", "2")] {
        let out = tmp.path().join(dir);
        let o = run(&["run", path.to_str().unwrap(), "--seed", seed, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        reports.push(std::fs::read(out.join("verdict.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    assert_ne!(reports[0], reports[2]);
}
