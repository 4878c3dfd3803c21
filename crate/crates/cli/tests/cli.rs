use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randseries"))
        .args(args)
        .current_dir(dir)
        .env_remove("RANDSERIES_THREADS")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fixture() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let sample: Vec<String> = (0..50).map(|i| format!("{}", (i as f64 * 0.754_877_666) % 1.0)).collect();
    std::fs::write(d.join("sample.csv"), format!("x\n{}\n", sample.join("\n"))).unwrap();
    let small: Vec<String> = sample.iter().take(4).cloned().collect();
    std::fs::write(d.join("small.csv"), format!("x\n{}\n", small.join("\n"))).unwrap();
    let series: Vec<String> = (0..64).map(|t| format!("{}", ((t * 37 % 17) as f64 - 8.0) / 5.0)).collect();
    std::fs::write(d.join("series.csv"), format!("y\n{}\n", series.join("\n"))).unwrap();
    std::fs::write(d.join("binary.csv"), "z,x\n0.1,0\n0.3,1\n0.5,1\n0.9,0\n").unwrap();
    std::fs::write(d.join("counts.csv"), "z,x\n0.1,0\n0.4,2\n0.8,1\n").unwrap();
    let reg: String = (0..30).map(|i| {
        let z = i as f64 / 29.0;
        format!("{z},{}\n", (6.0 * z).sin() + 0.05 * ((i * 7 % 5) as f64 - 2.0))
    }).collect();
    std::fs::write(d.join("reg.csv"), format!("z,x\n{reg}")).unwrap();
    let mut func = String::from("y,0,0.25,0.5,0.75,1\n");
    for i in 0..8 {
        let a = i as f64 / 8.0;
        func.push_str(&format!("{},{a},{},{},{},{}\n", 2.0 * a + 0.1, a * a, 1.0 - a, 0.5, a));
    }
    std::fs::write(d.join("func.csv"), func).unwrap();
    std::fs::write(d.join("seq.csv"), "x\n1.2\n-0.8\n0.05\n0.01\n-0.02\n").unwrap();
    dir
}

fn csv_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn density_pipeline_writes_grid_and_diagnostics() {
    let dir = fixture();
    let d = dir.path();
    let args = [
        "density", "--q", "3", "--dim-prior", "geom:0.15:5:12", "--coef-prior", "dirichlet:1.0", "--mc", "1000",
        "--seed", "7", "--grid", "1000", "--data", "sample.csv", "--out", "est.csv",
    ];
    let o = run(d, &args);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines = csv_lines(&d.join("est.csv"));
    assert_eq!(lines[0], "x,mean,stderr");
    assert_eq!(lines.len(), 1001);
    let diag: Value = serde_json::from_str(&std::fs::read_to_string(d.join("est.json")).unwrap()).unwrap();
    assert_eq!(diag["config"]["seed"], 7);
    assert_eq!(diag["config"]["samples"], 1000);
    assert_eq!(diag["config"]["dim_prior"], "geom:0.15:5:12");
    let post = diag["dimension_posterior"].as_array().unwrap();
    assert_eq!(post.len(), 8);
    let mass: f64 = post.iter().map(|p| p["probability"].as_f64().unwrap()).sum();
    assert!((mass - 1.0).abs() < 1e-12);
    let se = diag["max_stderr"].as_f64().unwrap();
    assert!(se > 0.0 && se.is_finite());
    assert!(diag["wall_time_seconds"].as_f64().unwrap() >= 0.0);

    // The echoed arguments replay the run.
    let echoed: Vec<String> = diag["config"]["args"].as_array().unwrap().iter().map(|a| a.as_str().unwrap().replace("est.csv", "again.csv")).collect();
    let echoed: Vec<&str> = echoed.iter().map(String::as_str).collect();
    assert!(run(d, &echoed).status.success());
    assert_eq!(std::fs::read(d.join("est.csv")).unwrap(), std::fs::read(d.join("again.csv")).unwrap());
}

#[test]
fn mc_needs_two_draws() {
    let dir = fixture();
    let o = run(dir.path(), &["density", "--mc", "1", "--data", "sample.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--mc"), "{}", stderr(&o));
}

#[test]
fn config_errors_name_the_field() {
    let dir = fixture();
    let d = dir.path();
    let cases: [(&[&str], &str); 7] = [
        (&["density", "--data", "missing.csv", "--mc", "10"], "missing.csv"),
        (&["density", "--data", "sample.csv", "--dim-prior", "geom:2:5:12"], "--dim-prior"),
        (&["density", "--data", "sample.csv", "--coef-prior", "gamma:1"], "--coef-prior"),
        (&["density", "--data", "sample.csv", "--grid", "1", "--mc", "10"], "--grid"),
        (&["density", "--mc", "10"], "--data"),
        (&["binary", "--data", "counts.csv", "--q", "2", "--dim-prior", "fixed:2"], "binary response"),
        (&["linreg", "--data", "reg.csv", "--coef-prior", "beta:1:1"], "--coef-prior"),
    ];
    for (args, needle) in cases {
        let o = run(d, args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains(needle), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn malformed_csv_is_reported_with_location() {
    let dir = fixture();
    std::fs::write(dir.path().join("bad.csv"), "x\n0.1\nabc\n").unwrap();
    let o = run(dir.path(), &["density", "--data", "bad.csv", "--mc", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("line 3") && e.contains("`x`"), "{e}");
}

#[test]
fn exact_enumeration_over_budget_is_a_config_error() {
    let dir = fixture();
    let o = run(dir.path(), &["density", "--data", "sample.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("budget"), "{}", stderr(&o));
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = fixture();
    let o = Command::new(env!("CARGO_BIN_EXE_randseries"))
        .args(["density", "--data", "small.csv"])
        .current_dir(dir.path())
        .env("RANDSERIES_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("RANDSERIES_THREADS"));
}

#[test]
fn exact_density_with_variance_and_logistic_link() {
    let dir = fixture();
    let d = dir.path();
    let o = run(d, &["density", "--data", "small.csv", "--q", "2", "--dim-prior", "geom:0.3:2:4", "--grid", "11", "--variance", "--out", "v.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines = csv_lines(&d.join("v.csv"));
    assert_eq!(lines[0], "x,mean,stderr,variance");
    assert_eq!(lines.len(), 12);
    let diag: Value = serde_json::from_str(&std::fs::read_to_string(d.join("v.json")).unwrap()).unwrap();
    assert_eq!(diag["config"]["method"], "exact");
    assert_eq!(diag["max_stderr"], 0.0);

    std::fs::write(d.join("real.csv"), "y\n-2.5\n0.3\n1.7\n4.0\n").unwrap();
    let o = run(d, &["density", "--data", "real.csv", "--q", "2", "--dim-prior", "fixed:3", "--grid", "5", "--transform", "logistic:0:2", "--out", "r.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines = csv_lines(&d.join("r.csv"));
    assert_eq!(lines[0], "y,mean,stderr");
    assert!(lines[1].starts_with("-3.15,"), "{}", lines[1]);

    let o = run(d, &["density", "--data", "real.csv", "--mc", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--transform"));
}

#[test]
fn spectral_columns() {
    let dir = fixture();
    let d = dir.path();
    let o = run(d, &["spectral", "--data", "series.csv", "--mc", "200", "--seed", "1", "--grid", "20", "--out", "s.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines = csv_lines(&d.join("s.csv"));
    assert_eq!(lines[0], "omega,inverse_mean,stderr,plugin_spectral_density");
    for line in &lines[1..] {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!(v[1] > 0.0);
        assert!((v[1] * v[3] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn regression_subcommands() {
    let dir = fixture();
    let d = dir.path();
    let o = run(d, &["binary", "--data", "binary.csv", "--q", "2", "--dim-prior", "geom:0.3:2:4", "--grid", "9", "--out", "b.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for line in &csv_lines(&d.join("b.csv"))[1..] {
        let p: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&p));
    }
    let o = run(d, &["poisson", "--data", "counts.csv", "--q", "2", "--dim-prior", "geom:0.3:2:4", "--grid", "9", "--out", "p.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv_lines(&d.join("p.csv"))[0], "z,mean,stderr");

    let o = run(d, &["linreg", "--data", "reg.csv", "--dim-prior", "geom:0.15:4:12", "--coef-prior", "normal:4", "--grid", "21", "--out", "l.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines = csv_lines(&d.join("l.csv"));
    let mid: Vec<f64> = lines[6].split(',').map(|s| s.parse().unwrap()).collect();
    assert!((mid[1] - (6.0 * mid[0]).sin()).abs() < 0.15, "{mid:?}");
    assert!(run(d, &["linreg", "--data", "reg.csv", "--sigma-min", "0.01", "--grid", "5"]).status.success());
    let o = run(d, &["linreg", "--data", "reg.csv", "--mc", "100"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(d, &["funcreg", "--data", "func.csv", "--q", "2", "--dim-prior", "uniform:2:3", "--grid", "5", "--out", "f.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv_lines(&d.join("f.csv"))[0], "t,beta_mean,stderr");
    let diag: Value = serde_json::from_str(&std::fs::read_to_string(d.join("f.json")).unwrap()).unwrap();
    assert!(!diag["notes"].as_array().unwrap().is_empty(), "coarse grid note expected");
}

#[test]
fn whitenoise_shrinks_toward_zero() {
    let dir = fixture();
    let d = dir.path();
    let o = run(d, &["whitenoise", "--data", "seq.csv", "--n-obs", "100", "--coef-prior", "normal:1", "--out", "w.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines = csv_lines(&d.join("w.csv"));
    assert_eq!(lines[0], "index,coefficient_mean");
    let first: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(first[0], 1.0);
    assert!(first[1] > 0.0 && first[1] < 1.2);
}

#[test]
fn repro_report_and_curves() {
    let dir = fixture();
    let d = dir.path();
    let o = run(d, &["repro-section9", "--replicates", "2", "--seed", "3", "--report", "rep.json", "--out", "curve.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(d.join("rep.json")).unwrap()).unwrap();
    assert_eq!(rep["replicates"].as_array().unwrap().len(), 2);
    assert_eq!(rep["config"]["dim_prior"], "geom:0.15:5:12");
    assert!(rep["median_mse"].as_f64().unwrap() < 0.15);
    let lines = csv_lines(&d.join("curve.csv"));
    assert_eq!(lines[0], "x,truth,estimate,stderr");
    assert_eq!(lines.len(), 1001);
    assert_eq!(run(d, &["repro-section9", "--replicates", "0"]).status.code(), Some(2));
}

#[test]
fn help_and_unknown_subcommand() {
    let dir = fixture();
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(run(dir.path(), &["estimate"]).status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let dir = fixture();
    let o = run(dir.path(), &["verify", "--out", "checks.json"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{stdout}");
    assert!(!stdout.contains("FAIL"));
    let checks: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("checks.json")).unwrap()).unwrap();
    assert!(checks.as_array().unwrap().len() > 20);
}
