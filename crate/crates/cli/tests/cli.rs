use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dqkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn malmquist_fibonacci_riccati() {
    let v = stdout_json(&dqkit(&[
        "malmquist",
        "--eq",
        "riccati-fib",
        "--y0",
        "1/1",
        "--steps",
        "64",
        "--nu",
        "1",
    ]));
    assert_eq!(v["deg"], 1);
    assert_eq!(v["slow_growth"], true);
    assert_eq!(v["consistent"], true);
}

#[test]
fn entropy_of_squaring() {
    let v = stdout_json(&dqkit(&["entropy", "--eq", "squaring", "--J", "5"]));
    let degrees: Vec<u64> = v["degrees"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d.as_u64().unwrap())
        .collect();
    assert_eq!(degrees, [1, 2, 4, 8, 16, 32]);
    assert!((v["entropy"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-9);
}

#[test]
fn characteristic_of_exp_on_a_grid() {
    let out = dqkit(&["nevanlinna", "--model", "exp", "--r-grid", "10:100:geometric:16"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("r,m,N,T\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 16);
    for row in rows {
        let r: f64 = row[0].parse().unwrap();
        let t: f64 = row[3].parse().unwrap();
        assert!((t / (r / PI) - 1.0).abs() < 1e-3, "r = {r}, T = {t}");
    }
}

#[test]
fn orbit_csv_on_stdout() {
    let out = dqkit(&["orbit", "--eq", "riccati-fib", "--steps", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[5][1], "8/13");
}

#[test]
fn unknown_names_are_validation_errors() {
    let out = dqkit(&["orbit", "--eq", "no-such-equation"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("riccati-fib"));

    let out = dqkit(&["nevanlinna", "--model", "no-such-model", "--r-grid", "1:2:linear:3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exp-exp"));

    let out = dqkit(&["growth", "f-eta", "--formula", "nope", "--r-grid", "2:10:linear:9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_parameters_are_validation_errors() {
    assert_eq!(
        dqkit(&["nevanlinna", "--model", "exp", "--r-grid", "1:2:cubic:3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        dqkit(&["malmquist", "--eq", "riccati", "--tau", "-1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        dqkit(&[
            "growth",
            "e0",
            "--formula",
            "linear",
            "--r-grid",
            "1:100:linear:10",
            "--C",
            "0.5"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        dqkit(&["orbit", "--eq", "riccati", "--y0", "1/0"]).status.code(),
        Some(2)
    );
}

#[test]
fn short_orbits_are_numerical_errors() {
    let out = dqkit(&["malmquist", "--eq", "squaring", "--steps", "8"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn degenerate_maps_are_numerical_errors() {
    // y_{n+1} = 1/(n - 2) has no value at n = 2.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eq.json");
    fs::write(&path, r#"{"num": [[1]], "den": [[-2, 1]], "n0": 2}"#).unwrap();
    let path = path.to_str().unwrap();
    assert_eq!(
        dqkit(&["orbit", "--eq", path, "--y0", "0", "--steps", "3"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(dqkit(&["entropy", "--eq", path, "--J", "4"]).status.code(), Some(3));
    assert!(
        dqkit(&["orbit", "--eq", path, "--n0", "3", "--y0", "0", "--steps", "3"])
            .status
            .success()
    );
}

fn run_to(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--out", dir.to_str().unwrap()]);
    dqkit(&all)
}

#[test]
fn artifacts_are_deterministic_and_echo_parameters() {
    let args = [
        "nevanlinna",
        "sweep",
        "--model",
        "sin",
        "--r-grid",
        "1:50:geometric:24",
        "--tol",
        "1e-7",
        "--seed",
        "7",
    ];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(run_to(a.path(), &args).status.success());
    assert!(run_to(b.path(), &args).status.success());
    let read = |d: &Path| fs::read(d.join("characteristic.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));

    let meta: Value = serde_json::from_slice(&fs::read(a.path().join("metadata.json")).unwrap()).unwrap();
    let p = &meta["parameters"]["nevanlinna"];
    assert_eq!(p["r_grid"], "1:50:geometric:24");
    assert_eq!(p["tol"], 1e-7);
    assert_eq!(p["common"]["seed"], 7);
    assert_eq!(meta["core_version"], dqkit_version());
    assert_eq!(meta["resolved"]["quadrature"]["tol"], 1e-7);
    assert_eq!(meta["artifacts"][0], "characteristic.csv");
}

fn dqkit_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

#[test]
fn orbit_artifacts_are_deterministic() {
    let args = [
        "malmquist",
        "--eq",
        "quadratic-n",
        "--steps",
        "24",
        "--bit-budget",
        "4000000",
    ];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(run_to(a.path(), &args).status.success());
    assert!(run_to(b.path(), &args).status.success());
    for name in ["orbit.csv", "malmquist.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
    }
}

#[test]
fn equation_and_profile_files() {
    let dir = tempfile::tempdir().unwrap();
    let eq = dir.path().join("eq.json");
    // y_{n+1} = (y_n + 1) / (y_n + 2), coefficients as polynomials in n.
    fs::write(&eq, r#"{"num": [[1], [1]], "den": [[2], [1]], "n0": 0}"#).unwrap();
    let v = stdout_json(&dqkit(&["entropy", "--eq", eq.to_str().unwrap(), "--J", "8"]));
    assert_eq!(v["entropy"], 0.0);
    let missing_y0 = dqkit(&["orbit", "--eq", eq.to_str().unwrap()]);
    assert_eq!(missing_y0.status.code(), Some(2));

    let profile = dir.path().join("profile.csv");
    let mut text = String::from("r,T\n");
    for i in 0..200 {
        let r = 2.0 + 0.5 * i as f64;
        text.push_str(&format!("{r},{}\n", r * r));
    }
    fs::write(&profile, text).unwrap();
    let out = dqkit(&[
        "growth",
        "f-eta",
        "--profile",
        profile.to_str().unwrap(),
        "--h-eps",
        "1",
    ]);
    let v = stdout_json(&out);
    assert!(v["samples"].as_array().unwrap().len() > 100);
}

#[test]
fn growth_relation_verdicts() {
    let v = stdout_json(&dqkit(&[
        "growth",
        "relation",
        "--formula",
        "root-exponential",
        "--r-grid",
        "2.72:1e12:geometric:6000",
        "--h-eps",
        "0.5",
    ]));
    assert_eq!(v["verdict"], "consistent");
    let v = stdout_json(&dqkit(&[
        "growth",
        "relation",
        "--formula",
        "exponential",
        "--r-grid",
        "2.72:1000:geometric:1500",
        "--h-eps",
        "0.5",
    ]));
    assert_eq!(v["verdict"], "assumption_violated");
}

#[test]
fn model_file_and_lemma_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    fs::write(
        &model,
        r#"{"model": "rational", "params": {"zeros": [[0, 1]], "poles": [0.5, 1.5]}}"#,
    )
    .unwrap();
    let out = run_to(
        dir.path(),
        &[
            "nevanlinna",
            "lemma31",
            "--model",
            model.to_str().unwrap(),
            "--r-grid",
            "1e4:1e6:geometric:16",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&fs::read(dir.path().join("lemma31.json")).unwrap()).unwrap();
    assert_eq!(v["decreasing"], true);
    assert!(dir.path().join("lemma31.csv").exists());
}

#[test]
fn jensen_on_the_command_line() {
    let out = dqkit(&[
        "nevanlinna",
        "jensen",
        "--model",
        "pole-comb",
        "--params",
        r#"{"count": 5}"#,
        "--r-grid",
        "5:20:linear:4",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(csv_rows(&text).iter().all(|r| r[4] == "true"));
}
