use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn numindex(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_numindex"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(o: &Output, key: &str) -> String {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} ")).map(str::to_string))
        .unwrap_or_else(|| panic!("no `{key}` in output:\n{}", stdout(o)))
}

fn setup() -> TempDir {
    let d = tempfile::tempdir().unwrap();
    let files = [
        ("ex.json", r#"{"dim":3,"kind":"example_3_2"}"#),
        (
            "linf.json",
            r#"{"dim":2,"kind":"lp","parameters":{"p":"inf"}}"#,
        ),
        ("e2.json", r#"{"dim":2,"kind":"euclidean"}"#),
        ("bad.json", "{\"dim\": 3,"),
        ("shift.csv", "0,1\n0,0\n"),
        ("skew.csv", "0,1\n-1,0\n"),
    ];
    for (name, text) in files {
        fs::write(d.path().join(name), text).unwrap();
    }
    d
}

#[test]
fn norm_of_ones_in_max_pairs_norm() {
    let d = setup();
    let o = numindex(d.path(), &["norm", "ex.json", "1,1,1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1.414213562373");
    let z = numindex(d.path(), &["norm", "ex.json", "0,0,0"]);
    assert_eq!(stdout(&z).trim().parse::<f64>().unwrap(), 0.0);
}

#[test]
fn malformed_descriptor_is_usage_error() {
    let d = setup();
    let o = numindex(d.path(), &["norm", "bad.json", "1,1,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));
    assert_eq!(numindex(d.path(), &["norm"]).status.code(), Some(2));
    assert_eq!(numindex(d.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn radius_exact_and_sampled() {
    let d = setup();
    let o = numindex(d.path(), &["radius", "linf.json", "shift.csv", "--exact"]);
    assert!(o.status.success());
    assert_eq!(field(&o, "value"), "1.000000000000");
    assert_eq!(field(&o, "method"), "exact_vertex");

    let o = numindex(
        d.path(),
        &["radius", "e2.json", "skew.csv", "--samples", "1000"],
    );
    assert!(o.status.success());
    assert_eq!(field(&o, "value"), "0.000000000000");

    let o = numindex(d.path(), &["radius", "ex.json", "shift.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn index_certificates() {
    let d = setup();
    let o = numindex(d.path(), &["index", "linf.json", "--out", "out"]);
    assert!(o.status.success());
    assert_eq!(field(&o, "upper"), "1.000000000000");
    assert_eq!(field(&o, "lower"), "1.000000000000");
    assert_eq!(field(&o, "certificate"), "cl_space");
    let saved: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("out/index.json")).unwrap())
            .unwrap();
    assert_eq!(saved["certificate"], "cl_space");

    let o = numindex(
        d.path(),
        &["index", "e2.json", "--restarts", "64", "--out", "out"],
    );
    assert!(field(&o, "upper").parse::<f64>().unwrap() <= 1e-6);

    let o = numindex(
        d.path(),
        &["index", "ex.json", "--restarts", "4", "--out", "out"],
    );
    assert!(o.status.success());
    assert!(field(&o, "lower").parse::<f64>().unwrap() > 0.0);
    assert_eq!(field(&o, "certificate"), "zero_radius_rank");
}

#[test]
fn verify_reports_failing_row() {
    let d = setup();
    let suite = r#"{"scenarios": [{
        "id": "euclidean-outer",
        "kind": "cor_2_9a_equality",
        "parameters": {
            "outer": {"dim": 2, "kind": "euclidean"},
            "components": [{"dim": 1, "kind": "lp", "parameters": {"p": 1}},
                           {"dim": 1, "kind": "lp", "parameters": {"p": 1}}],
            "restarts": 2, "budget": 300
        }
    }]}"#;
    fs::write(d.path().join("wrong.json"), suite).unwrap();
    let o = numindex(d.path(), &["verify", "wrong.json", "--out", "rep"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("FAIL euclidean-outer/index_equals_min"),
        "{err}"
    );
    let csv = fs::read_to_string(d.path().join("rep/report.csv")).unwrap();
    assert!(csv
        .lines()
        .any(|l| l.starts_with("euclidean-outer,index_equals_min,") && l.contains(",false,")));

    assert_eq!(
        numindex(d.path(), &["verify", "missing.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        numindex(d.path(), &["verify", "bad.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn bundled_suite_passes() {
    let d = setup();
    let o = numindex(
        d.path(),
        &["verify", "paper-core", "--out", "rep", "--quiet"],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).is_empty());
    let csv = fs::read_to_string(d.path().join("rep/report.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.contains(",true,")));
}

fn sweep_rows(path: PathBuf) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn lp_sweep_shape_and_stable_svg() {
    let d = setup();
    let args = [
        "sweep",
        "--family",
        "lp",
        "--p-range",
        "1:4:7",
        "--dims",
        "2,3",
        "--restarts",
        "1",
        "--budget",
        "300",
        "--out",
        "a",
    ];
    assert!(numindex(d.path(), &args).status.success());
    let rows = sweep_rows(d.path().join("a/sweep-lp.csv"));
    assert_eq!(rows.len(), 14);
    let svg = fs::read_to_string(d.path().join("a/sweep-lp.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));

    let mut again = args;
    again[again.len() - 1] = "b";
    assert!(numindex(d.path(), &again).status.success());
    assert_eq!(
        svg,
        fs::read_to_string(d.path().join("b/sweep-lp.svg")).unwrap()
    );
}

#[test]
fn lorentz_sweep_trend() {
    let d = setup();
    let o = numindex(
        d.path(),
        &[
            "sweep",
            "--family",
            "lorentz",
            "--p-range",
            "2:32:5",
            "--restarts",
            "2",
            "--budget",
            "800",
            "--out",
            "l",
            "--quiet",
        ],
    );
    assert!(o.status.success());
    let rows = sweep_rows(d.path().join("l/sweep-lorentz.csv"));
    let upper = |p: usize, dim: &str| -> f64 {
        rows.iter()
            .filter(|r| r[2] == dim)
            .nth(p)
            .map(|r| r[3].parse().unwrap())
            .unwrap()
    };
    // X_2 is Euclidean
    assert!(upper(0, "2") <= 1e-6 && upper(0, "3") <= 1e-6);
    for i in 1..4 {
        assert!(upper(i + 1, "2") <= upper(i, "2") + 5e-3);
    }
    assert!(upper(4, "3") > upper(4, "2"));
    assert!(d.path().join("l/sweep-lorentz.svg").exists());
}

#[test]
fn empty_sweep_range_is_usage_error() {
    let d = setup();
    for range in ["4:1:3", "1:4:0", "1:4", "a:b:c"] {
        let o = numindex(d.path(), &["sweep", "--family", "lp", "--p-range", range]);
        assert_eq!(o.status.code(), Some(2), "{range}");
    }
}
