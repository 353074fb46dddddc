use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use supnorm_adapt::cli::{parse_sample, read_csv, write_csv, SCHEMA};
use supnorm_adapt::lepski::{select, SelectorKind, SelectorVariant};
use supnorm_adapt::risk_lab::experiments::rate_campaign;
use supnorm_adapt::risk_lab::{LevelRule, TestDensity};
use supnorm_adapt::rng::label;
use supnorm_adapt::{ProjectionKernel, StreamKey};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_supnorm-adapt"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_sample(dir: &Path, name: &str, xs: &[f64]) -> PathBuf {
    let mut text = String::from("# synthetic sample\n");
    for x in xs {
        text.push_str(&format!("{x:?}\n"));
    }
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn triangular(n: usize, seed: u64) -> Vec<f64> {
    TestDensity::Triangular.sample(n, &mut StreamKey::root(seed).child(label::SAMPLE).rng())
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn ten_points_is_a_degenerate_grid() {
    let dir = TempDir::new().unwrap();
    let input = write_sample(dir.path(), "small.txt", &triangular(10, 1));
    let out = run(&["estimate", "--input", input.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("j_min") && err.contains("j_max"), "{err}");
}

#[test]
fn malformed_input_exits_three() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.txt");
    fs::write(&p, "0.1\n0.2\nnot-a-number\n").unwrap();
    assert_eq!(
        run(&["estimate", "--input", p.to_str().unwrap(), "--seed", "1"])
            .status
            .code(),
        Some(3)
    );
    fs::write(&p, "# only comments\n\n").unwrap();
    assert_eq!(
        run(&["estimate", "--input", p.to_str().unwrap(), "--seed", "1"])
            .status
            .code(),
        Some(3)
    );
    fs::write(&p, "0.1\nNaN\n").unwrap();
    assert_eq!(
        run(&["estimate", "--input", p.to_str().unwrap(), "--seed", "1"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn missing_file_is_an_io_error() {
    let out = run(&["estimate", "--input", "/nonexistent/sample.txt", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_is_required() {
    let out = run(&["simulate", "--campaign", "rate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        vec!["simulate", "--seed", "1", "--n-ladder", ""],
        vec![
            "simulate",
            "--seed",
            "1",
            "--n-ladder",
            "4000,2000,8000,16000,32000",
            "--reps",
            "5",
        ],
        vec!["simulate", "--seed", "1", "--reps", "1"],
        vec!["oracle", "--seed", "1", "--reps", "1"],
        vec!["verify-bounds", "--seed", "1", "--reps", "1"],
        vec!["estimate", "--seed", "1", "--input", "x", "--order", "7"],
        vec!["estimate", "--seed", "1", "--input", "x", "--variant", "fastest"],
    ] {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn estimate_matches_library_selection_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let xs = triangular(1 << 14, 21);
    let input = write_sample(dir.path(), "tri.txt", &xs);
    let input = input.to_str().unwrap();
    let paths: Vec<PathBuf> = (0..3).map(|i| dir.path().join(format!("out{i}.json"))).collect();
    for (i, threads) in ["1", "1", "3"].iter().enumerate() {
        let out = run(&[
            "estimate",
            "--input",
            input,
            "--seed",
            "99",
            "--variant",
            "bar",
            "--m-draws",
            "20",
            "--threads",
            threads,
            "--output",
            paths[i].to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let bytes = fs::read(&paths[0]).unwrap();
    assert_eq!(bytes, fs::read(&paths[1]).unwrap());
    assert_eq!(bytes, fs::read(&paths[2]).unwrap());

    let doc = json(&paths[0]);
    assert_eq!(doc["schema"], SCHEMA);
    assert_eq!(doc["version"], format!("v{}", env!("CARGO_PKG_VERSION")));
    assert_eq!(doc["seed"], 99);
    assert_eq!(doc["config"]["selector"]["variant"], "bar");
    let s = parse_sample(&fs::read_to_string(input).unwrap()).unwrap();
    let mut v = SelectorVariant::new(SelectorKind::Bar);
    v.m_draws = 20;
    let lib = select(&s, &ProjectionKernel::haar(), v, &StreamKey::root(99)).unwrap();
    assert_eq!(doc["result"]["j_hat"], lib.trace.j_hat);
    assert_eq!(doc["result"]["plug_in_sup"].as_f64().unwrap(), lib.trace.plug_in_sup);
    assert_eq!(
        doc["result"]["trace"]["tests"].as_array().unwrap().len(),
        lib.trace.tests.len()
    );
    assert!(doc["result"]["trace"]["tests"][0]["threshold_se"].as_f64().unwrap() > 0.0);
}

#[test]
fn estimate_with_constraint_reports_sentinel() {
    let dir = TempDir::new().unwrap();
    let xs: Vec<f64> = (0..3000).map(|i| (i % 3) as f64 * 0.25).collect();
    let input = write_sample(dir.path(), "atoms.txt", &xs);
    let out_path = dir.path().join("out.json");
    let csv_path = dir.path().join("out.csv");
    let out = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--seed",
        "3",
        "--cdf-constraint",
        "--output",
        out_path.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out_path);
    assert_eq!(doc["result"]["empirical_cdf_sentinel"], true);
    assert!(doc["result"]["j_hat"].is_null());
    let series = read_csv(&fs::read_to_string(&csv_path).unwrap()).unwrap();
    assert_eq!(series.header, ["x", "ecdf"]);
}

#[test]
fn csv_output_round_trips_bytewise() {
    let dir = TempDir::new().unwrap();
    let input = write_sample(dir.path(), "tri.txt", &triangular(5000, 4));
    let csv_path = dir.path().join("est.csv");
    let out = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--seed",
        "5",
        "--order",
        "3",
        "--output",
        dir.path().join("est.json").to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read(&csv_path).unwrap();
    let series = read_csv(std::str::from_utf8(&text).unwrap()).unwrap();
    assert_eq!(series.header, ["x", "density", "cdf"]);
    assert!(series.rows.len() > 10);
    let mut again = Vec::new();
    write_csv(&series, &mut again).unwrap();
    assert_eq!(again, text);
}

#[test]
fn simulate_slope_matches_library_campaign() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("rate.json");
    let ladder = [512usize, 1024, 2048, 4096, 8192];
    let out = run(&[
        "simulate",
        "--campaign",
        "rate",
        "--seed",
        "17",
        "--reps",
        "4",
        "--n-ladder",
        "512,1024,2048,4096,8192",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out_path);
    let k = ProjectionKernel::haar();
    let rule = LevelRule::Select {
        variant: SelectorVariant::new(SelectorKind::BarEps),
    };
    let lib = rate_campaign(&TestDensity::Triangular, &k, rule, &ladder, 4, &StreamKey::root(17)).unwrap();
    assert_eq!(doc["result"]["slope"].as_f64().unwrap(), lib.regression.slope);
    let control = rate_campaign(
        &TestDensity::Triangular,
        &k,
        LevelRule::GridMin,
        &ladder,
        4,
        &StreamKey::root(17),
    )
    .unwrap();
    assert_eq!(
        doc["result"]["control_slope"].as_f64().unwrap(),
        control.regression.slope
    );
    for r in doc["result"]["adaptive"]["risks"].as_array().unwrap() {
        assert!(r["std_err"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn verify_bounds_zero_row_equals_prefactor() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("vb.json");
    let out = run(&[
        "verify-bounds",
        "--seed",
        "2",
        "--reps",
        "300",
        "--t-ladder",
        "0,1,2,4",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out_path);
    let first = &doc["result"]["bounds"][0];
    assert_eq!(first["t"], 0.0);
    for (name, b) in first["bounds"].as_object().unwrap() {
        if let Some(p) = b["prefactor"].as_f64() {
            assert_eq!(b["value"].as_f64().unwrap(), p, "{name}");
        }
    }
    assert_eq!(doc["result"]["violation"]["rows"][0]["bound"], 2.0);
}

#[test]
fn oracle_report_has_all_levels() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("oracle.json");
    let csv_path = dir.path().join("oracle.csv");
    let out = run(&[
        "oracle",
        "--seed",
        "8",
        "--n",
        "4096",
        "--reps",
        "50",
        "--output",
        out_path.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out_path);
    let levels = doc["result"]["levels"].as_array().unwrap();
    assert!(levels.len() >= 2);
    for l in levels {
        assert!(l["deviation_se"].as_f64().unwrap() > 0.0 && l["risk_se"].as_f64().unwrap() > 0.0);
        assert_eq!(l["w"], 1.0);
    }
    let series = read_csv(&fs::read_to_string(&csv_path).unwrap()).unwrap();
    assert_eq!(series.rows.len(), levels.len());
}

#[test]
fn json_keys_are_sorted() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("vb.json");
    run(&[
        "verify-bounds",
        "--seed",
        "2",
        "--reps",
        "50",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    let doc = json(&out_path);
    let keys: Vec<&String> = doc.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let text = fs::read_to_string(&out_path).unwrap();
    assert!(text.find("\"command\"").unwrap() < text.find("\"schema\"").unwrap());
}
