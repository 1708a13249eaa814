use std::process::{Command, Output};

use clap::Parser;
use stark_window::bracket::sufficient_radius;
use stark_window::cli::{fmt_num, RunConfig};
use stark_window::WaveguideParams;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stark-window")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn trig_levels() {
    let text = stdout(&["levels", "--F", "0", "--d", "3.141592653589793", "--bc", "dirichlet", "--count", "3"]);
    assert_eq!(text, "n,lambda\n1,1\n2,4\n3,9\n");
}

#[test]
fn threshold_value() {
    let (h, rows) = csv(&stdout(&["threshold", "--F", "0", "--d", "3.141592653589793", "--i", "1"]));
    assert_eq!(h, ["i", "a_star"]);
    assert!((rows[0][1] - 2.404825557695773 / 0.75f64.sqrt()).abs() < 1e-12);
    assert!(rows[0][1].to_string().starts_with("2.77685"));
}

#[test]
fn certify_json() {
    let text = stdout(&["certify", "--F", "1", "--d", "1", "--a", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["q_value"].as_f64().unwrap() < 0.0);
    assert_eq!(v["valid"], serde_json::Value::Bool(true));
    assert_eq!(v["provenance"], "exact");
    assert_eq!(v["params"]["F"], 1.0);
    assert!(v["tolerances"]["eigen_residual"].as_f64().is_some());
}

#[test]
fn figure_sweeps() {
    let mut gaps = vec![];
    for f in ["0.01", "100"] {
        let (h, rows) = csv(&stdout(&["figure", "--F", f, "--d", "1", "--a-min", "0.5", "--a-max", "10", "--steps", "200"]));
        assert_eq!(h, ["a", "curve1", "curve2", "curve3", "edge"]);
        assert_eq!(rows.len(), 200);
        for c in 1..=3 {
            assert!(rows.windows(2).all(|w| w[1][c] < w[0][c]));
        }
        assert!(rows.iter().all(|r| r[4] == rows[0][4]));
        assert!(rows[199][1] < rows[199][4]);
        gaps.push(rows[0][4] - rows[199][1]);
        let a1 = sufficient_radius(&WaveguideParams::new(f.parse().unwrap(), 1.0, 1.0).unwrap(), 1).unwrap();
        let nearest = rows.iter().min_by(|x, y| (x[0] - a1).abs().total_cmp(&(y[0] - a1).abs())).unwrap();
        let best = rows.iter().map(|r| (r[1] - r[4]).abs()).fold(f64::INFINITY, f64::min);
        assert_eq!((nearest[1] - nearest[4]).abs(), best);
        if f == "0.01" {
            assert!(rows[0][1] > rows[0][4]);
        }
    }
    assert!(gaps[1] > gaps[0]);
}

#[test]
fn byte_identical_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &["levels", "--F", "2.5", "--d", "1.3", "--bc", "mixed", "--count", "5"],
        &["bracket", "--F", "0.3", "--d", "2", "--a", "6"],
        &["threshold", "--F", "7", "--i", "3", "--format", "json"],
        &["certify", "--F", "10", "--a", "0.1"],
        &["solve2d", "--F", "1", "--d", "1", "--a", "1", "--nr", "16", "--nz", "16", "--count", "2", "--format", "json"],
        &["figure", "--F", "1", "--steps", "50", "--format", "json"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let path = dir.path().join(format!("{i}.out"));
        let p = path.to_str().unwrap().to_owned();
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--out", &p]);
        let mut bytes = vec![];
        for _ in 0..2 {
            let out = run(&full);
            assert_eq!(out.status.code(), Some(0), "{full:?}");
            assert!(out.stdout.is_empty());
            bytes.push(std::fs::read(&path).unwrap());
            std::fs::remove_file(&path).unwrap();
        }
        let (a, b) = (&bytes[0], &bytes[1]);
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn json_config_round_trips() {
    let cases: [&[&str]; 3] = [
        &["stark-window", "levels", "--F", "0.1", "--d", "3.141592653589793", "--count", "4", "--method", "asymptotic-weak", "--format", "json"],
        &["stark-window", "solve2d", "--F", "0.7", "--a", "1.1", "--window", "inner-neumann", "--m", "2", "--nr", "16", "--nz", "16", "--format", "json"],
        &["stark-window", "figure", "--F", "1e-3", "--a-min", "0.1", "--a-max", "0.30000000000000004", "--steps", "7", "--format", "json"],
    ];
    for args in cases {
        let cfg = RunConfig::try_parse_from(args).unwrap();
        let v: serde_json::Value = serde_json::from_str(&stdout(&args[1..])).unwrap();
        let back: RunConfig = serde_json::from_value(v["config"].clone()).unwrap();
        assert_eq!(back, cfg);
    }
}

#[test]
fn provenance_labels() {
    let strong = stdout(&["levels", "--F", "10000", "--count", "2", "--method", "asymptotic-strong", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&strong).unwrap();
    assert_eq!(v["provenance"], "asymptotic-strong");
    assert_eq!(v["paper_convention"], true);
    let exact = v["levels"][0]["airy_zero"].as_f64().unwrap();
    assert!((exact / (2.338107410459767 * 10000f64.cbrt().powi(2)) - 1.0).abs() < 1e-12);
    let (h, _) = csv(&stdout(&["levels", "--F", "10000", "--count", "2", "--method", "asymptotic-strong"]));
    assert_eq!(h, ["n", "lambda", "paper_convention"]);
    let fd = stdout(&["levels", "--F", "1", "--method", "fd", "--nodes", "400", "--format", "json"]);
    assert!(fd.contains("\"provenance\": \"fd\""));
    let s2 = stdout(&["solve2d", "--nr", "16", "--nz", "16", "--format", "json"]);
    assert!(s2.contains("\"provenance\": \"fd\""));
}

#[test]
fn exit_codes() {
    for args in [
        &["levels", "--F", "-1"][..],
        &["levels", "--count", "0"],
        &["figure", "--a-min", "3", "--a-max", "2"],
        &["solve2d", "--nr", "15"],
        &["certify", "--a", "0"],
        &["threshold", "--i", "0"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    // The window is twelve orders of magnitude below the layer width: no
    // trial amplitude beats round-off.
    let out = run(&["certify", "--F", "0", "--d", "1e6", "--a", "1e-6"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["error"].as_str().unwrap().contains("no certificate"));
}

#[test]
fn numbers_round_trip() {
    for x in [1.0, 0.1, 1e-13, 6.272192834304556e-9, 2.776853366179491, 1e22, 123456789.0, f64::MIN_POSITIVE] {
        let s = fmt_num(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert!(s.len() <= x.to_string().len());
    }
    assert_eq!(fmt_num(4.0), "4");
}
