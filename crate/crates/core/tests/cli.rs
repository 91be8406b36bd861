use std::path::Path;
use std::process::{Command, Output};

use blowup::diagnostics::DiagnosticSeries;
use serde_json::Value;

fn blowup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blowup"))
        .args(args)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report(dir: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap()
}

fn outcomes(r: &Value, criterion: &str) -> Vec<String> {
    r["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["criterion"] == criterion)
        .map(|v| v["outcome"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn printed_defaults_load_back() {
    let tmp = tempfile::tempdir().unwrap();
    let o = blowup(&["--print-defaults"]);
    assert!(o.status.success());
    let cfg = tmp.path().join("defaults.toml");
    std::fs::write(&cfg, &o.stdout).unwrap();
    let out = tmp.path().join("out");
    let o = blowup(&["synth", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn synthetic_series_through_criteria() {
    let tmp = tempfile::tempdir().unwrap();
    let ss = tmp.path().join("ss");
    let dec = tmp.path().join("dec");
    let d = |p: &Path| p.to_str().unwrap().to_string();

    assert!(blowup(&["synth", "--out", &d(&ss)]).status.success());
    let o = blowup(&[
        "criteria",
        "--series",
        &d(&ss.join("series.csv")),
        "--out",
        &d(&ss),
        "--criteria",
        "trichotomy",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&ss);
    assert_eq!(outcomes(&r, "trichotomy"), vec!["case_i"]);
    assert_eq!(r["verdicts"][0]["t_star"], 1.0);
    assert_eq!(r["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);

    assert!(blowup(&["synth", "--kind", "decaying", "--out", &d(&dec)]).status.success());
    let o = blowup(&[
        "criteria",
        "--series",
        &d(&dec.join("series.csv")),
        "--out",
        &d(&dec),
        "--threshold",
        "1",
        "--t-star",
        "1.0,2.0",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&dec);
    assert_eq!(outcomes(&r, "lower_bound"), vec!["violated", "violated"]);
    // the euler series has no vorticity column, so bkm is skipped in a default run
    let skipped: Vec<&str> = r["skipped"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert!(skipped.iter().any(|s| s.starts_with("bkm")), "{skipped:?}");
}

#[test]
fn requesting_a_missing_column_is_an_unsupported_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert!(blowup(&["synth", "--out", out]).status.success());
    let series = tmp.path().join("series.csv");
    let o = blowup(&["criteria", "--series", series.to_str().unwrap(), "--out", out, "--criteria", "bkm"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unsupported"), "{}", stderr(&o));
}

#[test]
fn taylor_green_simulation_is_steady() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("tg.toml");
    std::fs::write(&cfg, "[time]\nt_end = 0.1\n").unwrap();
    let out = tmp.path().join("out");
    let o = blowup(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = DiagnosticSeries::load(&out.join("series.csv")).unwrap();
    assert!((s.times().last().unwrap() - 0.1).abs() < 1e-12);
    for a in s.column("alpha_k").unwrap() {
        assert!(a.abs() < 1e-8);
    }
    assert_eq!(s.meta.source, "simulation");
    assert_eq!(s.meta.config_hash.len(), 64);
}

#[test]
fn zero_initial_field_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("zero.toml");
    std::fs::write(&cfg, "[initial]\npreset = \"taylor_green2d\"\namplitude = 0.0\n").unwrap();
    let out = tmp.path().join("out");
    let o = blowup(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("zero"));
    assert!(!out.join("series.csv").exists());
}

#[test]
fn unwritable_output_fails_before_compute() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let cfg = tmp.path().join("long.toml");
    // long enough that running it first would be noticeable
    std::fs::write(&cfg, "[grid]\nn = 256\n[time]\nt_end = 100.0\n").unwrap();
    let start = std::time::Instant::now();
    let o = blowup(&["simulate", "--config", cfg.to_str().unwrap(), "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn invalid_config_lists_every_problem() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "model = \"ns2d\"\nk = 0\n[grid]\nn = 48\n").unwrap();
    let o = blowup(&["simulate", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("nu > 0") && e.contains("k must be") && e.contains("power of two"), "{e}");
}

#[test]
fn unknown_suite_lists_the_available_ones() {
    let o = blowup(&["verify", "identitties"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    for s in ["identities", "conservation", "constants", "fixtures", "all"] {
        assert!(e.contains(s), "{e}");
    }
}

#[test]
fn fixture_suite_passes_as_json() {
    let o = blowup(&["verify", "fixtures", "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["suites"][0]["checks"].as_array().unwrap().len() > 5);
}

#[test]
fn constants_suite_emits_the_fitted_table() {
    let o = blowup(&["verify", "constants"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout);
    for row in ["commutator", "C_kN", "threshold K (euler)", "threshold K (sqg)"] {
        assert!(text.contains(row), "{text}");
    }
}
