use std::path::Path;
use std::process::{Command, Output};

fn powerburr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_powerburr"))
        .args(args)
        .env_remove("POWERBURR_THREADS")
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn claims(dir: &Path) -> String {
    let p = dir.join("claims.csv");
    let out = powerburr(&["sample", "--spec", "gamma:1,2", "--n", "400", "--seed", "3", "--out", p.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p.to_str().unwrap().to_string()
}

#[test]
fn fit_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = claims(dir.path());
    let args = ["fit", "--input", &input, "--family", "gamma", "--family", "pareto", "--family", "extpareto", "--seed", "5"];
    let a = powerburr(&args);
    let b = powerburr(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["fits"].as_array().unwrap().len(), 3);
    assert!(v.get("wall_clock_seconds").map_or(true, |t| t.is_null()));
    let timed = json(&powerburr(&[&args[..], &["--timing"]].concat()));
    assert!(timed["wall_clock_seconds"].as_f64().is_some());
}

#[test]
fn backtest_from_counts() {
    let v = json(&powerburr(&[
        "backtest", "--count-n", "6446", "--epsilon", "0.05", "--exceedances", "314",
    ]));
    let p = v["backtests"][0]["report"]["p_value"].as_f64().unwrap();
    assert!((p - 0.668).abs() < 0.02, "{p}");
}

#[test]
fn reserve_from_given_spec() {
    let v = json(&powerburr(&[
        "reserve", "--spec", "gamma:1,2", "--lambda", "10", "--epsilon", "0.05", "--m", "5000", "--scale", "10",
    ]));
    let row = &v["reserves"][0];
    let q = row["estimate"]["q_star"].as_f64().unwrap();
    assert!(q > 10.0);
    assert!((row["scaled"].as_f64().unwrap() - q / 10.0).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "claim\n1\n0\n").unwrap();
    let out = powerburr(&["fit", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":3"));

    let input = claims(dir.path());
    // An epsilon outside (0, 1) is a configuration error.
    let out = powerburr(&["fit", "--input", &input, "--epsilon", "1.5"]);
    assert_eq!(out.status.code(), Some(4));
    let out = powerburr(&["reserve", "--spec", "gamma:1", "--lambda", "10"]);
    assert_eq!(out.status.code(), Some(4));

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "seed = 1\nunknown_key = 2\n").unwrap();
    let out = powerburr(&["fit", "--input", &input, "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));

    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, "epsilons = []\n").unwrap();
    let out = powerburr(&["fit", "--input", &input, "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = claims(dir.path());
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 99\nepsilons = [0.02]\nfamilies = [\"weibull\"]\n").unwrap();
    let v = json(&powerburr(&[
        "fit", "--input", &input, "--seed", "5", "--epsilon", "0.1", "--family", "gamma", "--config",
        cfg.to_str().unwrap(),
    ]));
    assert_eq!(v["config"]["seed"], 99);
    assert_eq!(v["config"]["epsilons"], serde_json::json!([0.02]));
    assert_eq!(v["fits"].as_array().unwrap().len(), 1);
    assert_eq!(v["fits"][0]["family"], "weibull");
}

#[test]
fn sample_output_is_a_claim_file() {
    let out = powerburr(&["sample", "--spec", "pareto:3,2", "--n", "5", "--seed", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "claim");
    assert_eq!(lines.len(), 6);
    assert!(lines[1..].iter().all(|l| l.parse::<f64>().unwrap() > 0.0));
}
