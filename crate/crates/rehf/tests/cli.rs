use std::path::Path;
use std::process::{Command, Output};

use rehf::config::RunConfig;
use rehf::io::{parse_field_dump, ReportJson};

fn rehf(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rehf"));
    c.args(args).env_remove("REHF_WORKERS");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn small_config(dir: &Path, width: f64, extra: &str) -> String {
    let cfg = RunConfig { kappa0_qbar: 0.2, disorder_width: width, n_cells: 2, n_pts: 4, ..RunConfig::default() };
    let p = dir.join(format!("w{width}.conf"));
    std::fs::write(&p, format!("{}{extra}", cfg.to_text())).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn mu_solve_lands_inside_the_bracket() {
    let o = rehf(&["mu-solve", "--beta", "1", "--kappa0", "1"], &[]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let mu = v["mu"].as_f64().unwrap();
    let pi = std::f64::consts::PI;
    assert!((8.0 * pi.powf(1.5)).ln() < mu && mu < (12.0 * pi * pi).powf(2.0 / 3.0), "{mu}");
    assert!((v["density"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn hypothesis_failure_exits_with_configuration_code() {
    let o = rehf(&["mu-solve", "--beta", "1", "--kappa0", "0.001"], &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("configuration"));
}

#[test]
fn multiplier_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let o = rehf(
        &[
            "multiplier",
            "--beta",
            "1",
            "--mu",
            "1",
            "--p-min",
            "0.1",
            "--p-max",
            "50",
            "--points",
            "5",
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 6);
    for l in text.lines().skip(1) {
        let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f.len(), 5);
        assert!(f[3] < 1e-6);
    }
    let o = rehf(&["multiplier", "--beta", "1", "--mu", "1", "--p-min", "0"], &[]);
    assert_eq!(code(&o), 2);
}

#[test]
fn periodic_solve_is_neutral_and_dumps_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 0.0, "");
    let out = dir.path().join("r.json");
    let dumps = dir.path().join("fields");
    let o = rehf(
        &[
            "solve",
            "--config",
            &cfg,
            "--seed",
            "1",
            "--out",
            out.to_str().unwrap(),
            "--dump-fields",
            dumps.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: ReportJson = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r.converged);
    assert!(r.neutrality.abs() < 1e-9);
    for name in ["phi", "kappa", "rho"] {
        let (n, f) = parse_field_dump(&std::fs::read_to_string(dumps.join(format!("{name}.txt"))).unwrap()).unwrap();
        assert_eq!(n, name);
        assert_eq!(f.grid().m(), 8);
    }
}

#[test]
fn same_seed_gives_byte_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 0.01, "");
    let mut texts = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("r{i}.json"));
        assert_eq!(code(&rehf(&["solve", "--config", &cfg, "--seed", "5", "--out", out.to_str().unwrap()], &[])), 0);
        texts.push(std::fs::read(out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let other = dir.path().join("r6.json");
    assert_eq!(code(&rehf(&["solve", "--config", &cfg, "--seed", "6", "--out", other.to_str().unwrap()], &[])), 0);
    assert_ne!(std::fs::read(other).unwrap(), texts[0]);
}

#[test]
fn configuration_problems_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let out = out.to_str().unwrap();
    let missing = dir.path().join("nope.conf");
    assert_eq!(code(&rehf(&["solve", "--config", missing.to_str().unwrap(), "--out", out], &[])), 2);
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "beta = 1\ncolour = red\n").unwrap();
    let o = rehf(&["solve", "--config", bad.to_str().unwrap(), "--out", out], &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
    assert_eq!(code(&rehf(&["frobnicate"], &[])), 2);
    assert_eq!(code(&rehf(&["verify", "--level", "medium", "--out", out], &[])), 2);
}

#[test]
fn iteration_budget_exhaustion_is_numeric() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 0.01, "");
    let text = std::fs::read_to_string(&cfg).unwrap().replace("max_iter = 200", "max_iter = 1");
    std::fs::write(&cfg, text).unwrap();
    let out = dir.path().join("r.json");
    let o = rehf(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("numeric"));
}

#[test]
fn ensemble_matches_single_solves() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 0.01, "");
    let ens = dir.path().join("ens");
    let o = rehf(
        &["ensemble", "--config", &cfg, "--seeds", "0..3", "--out", ens.to_str().unwrap()],
        &[("REHF_WORKERS", "2")],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(ens.join("aggregate.csv")).unwrap();
    let seeds: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(seeds, ["0", "1", "2", "3"]);
    let single = dir.path().join("s2.json");
    assert_eq!(code(&rehf(&["solve", "--config", &cfg, "--seed", "2", "--out", single.to_str().unwrap()], &[])), 0);
    assert_eq!(std::fs::read(single).unwrap(), std::fs::read(ens.join("seed_2.json")).unwrap());
}

#[test]
fn ensemble_rejects_bad_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 0.01, "");
    let ens = dir.path().join("ens");
    let o = rehf(
        &["ensemble", "--config", &cfg, "--seeds", "0..1", "--out", ens.to_str().unwrap()],
        &[("REHF_WORKERS", "0")],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn default_config_parses_back() {
    let o = rehf(&["default-config"], &[]);
    assert_eq!(code(&o), 0);
    assert_eq!(RunConfig::parse(&String::from_utf8_lossy(&o.stdout)).unwrap(), RunConfig::default());
}
