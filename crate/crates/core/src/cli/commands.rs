use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::criteria::{
    resolve_threshold, sweep, synth, CriteriaOptions, Criterion, CriterionVerdict, VerdictReport,
};
use crate::diagnostics::{
    fit_constants, held_out_check, record_run, DiagnosticSeries, FittedConstants, HeldOutReport,
    SeriesMeta,
};
use crate::error::{Error, Result};
use crate::flow::RunStatus;
use crate::spectral::Grid;

use super::config::{ensure_writable, hex, CriteriaConfig, RunConfig};

/// Files written by a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub series: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Runs the configured simulation and returns its series without touching the disk.
pub fn run_simulation(cfg: &RunConfig) -> Result<DiagnosticSeries> {
    cfg.validate()?;
    let grid = Grid::new(2, cfg.grid.n)?;
    let state = cfg.initial.state(cfg.model, &grid, cfg.nu)?;
    let params = cfg.params();
    let mut meta = SeriesMeta::new("simulation", params);
    meta.seed = cfg.initial_seed();
    meta.config_hash = cfg.config_hash();
    meta.fitted_constants = cfg.constants.clone();
    let (series, status) = record_run(state, &cfg.time, params, meta)?;
    if let RunStatus::BlowupSuspected { t, step } = status {
        log::warn!("state became non-finite at step {step} (t = {t}); series ends there");
    }
    Ok(series)
}

pub fn simulate(cfg: &RunConfig) -> Result<(Written, Option<VerdictReport>)> {
    cfg.validate()?;
    ensure_writable(&cfg.output.dir)?;
    let series = run_simulation(cfg)?;
    let series_path = cfg.output.series_path();
    series.save(&series_path)?;
    log::info!("wrote {} samples to {}", series.len(), series_path.display());

    let mut written = Written {
        series: Some(series_path.clone()),
        report: None,
    };
    if cfg.criteria.criteria.is_empty() {
        return Ok((written, None));
    }
    let report = evaluate_series(&series, &series_path, &cfg.criteria, &cfg.config_hash())?;
    let report_path = cfg.output.report_path();
    write_text(&report_path, &report.to_json()?)?;
    written.report = Some(report_path);
    Ok((written, Some(report)))
}

/// Candidate blow-up times when none are configured: the generator's `T*` for a
/// synthetic series, otherwise three points past the end of the record.
pub fn default_t_stars(series: &DiagnosticSeries) -> Vec<f64> {
    if let Some(t) = series
        .meta
        .profile
        .as_ref()
        .and_then(|p| p.get("t_star"))
        .and_then(|v| v.as_f64())
    {
        return vec![t];
    }
    let t = series.times();
    let last = t[t.len() - 1];
    let span = (last - t[0]).max(f64::MIN_POSITIVE);
    [0.05, 0.25, 1.0].iter().map(|f| last + f * span).collect()
}

/// Evaluates the configured criteria. With an empty list every criterion is tried and
/// the ones the series cannot support are reported as skipped.
pub fn evaluate_series(
    series: &DiagnosticSeries,
    series_path: &Path,
    cfg: &CriteriaConfig,
    config_hash: &str,
) -> Result<VerdictReport> {
    let t_stars = if cfg.t_star.is_empty() {
        default_t_stars(series)
    } else {
        cfg.t_star.clone()
    };
    let opts: CriteriaOptions = cfg.options;
    let mut verdicts: Vec<CriterionVerdict> = Vec::new();
    let mut skipped = Vec::new();
    if cfg.criteria.is_empty() {
        for c in Criterion::ALL {
            if c == Criterion::LowerBound {
                if let Err(e) = resolve_threshold(series, opts.threshold) {
                    skipped.push(format!("{c}: {e}"));
                    continue;
                }
            }
            match sweep(series, &[c], &t_stars, &opts) {
                Ok(v) => verdicts.extend(v),
                Err(e @ Error::Unsupported { .. }) => skipped.push(format!("{c}: {e}")),
                Err(e) => return Err(e),
            }
        }
    } else {
        verdicts = sweep(series, &cfg.criteria, &t_stars, &opts)?;
    }
    let mut report = VerdictReport::new(
        &series_path.display().to_string(),
        series,
        opts,
        config_hash.to_string(),
        verdicts,
    );
    report.skipped = skipped;
    Ok(report)
}

/// Hash of the settings that determine a criteria report.
pub fn criteria_hash(cfg: &CriteriaConfig, constants: &std::collections::BTreeMap<String, f64>) -> String {
    let json = serde_json::to_string(&(cfg, constants)).expect("criteria config serializes");
    hex(&Sha256::digest(json.as_bytes()))
}

/// Loads a series, applies constant overrides from the config, evaluates and writes
/// the report.
pub fn criteria(series_path: &Path, cfg: &RunConfig) -> Result<(PathBuf, VerdictReport)> {
    cfg.criteria.options.validate()?;
    ensure_writable(&cfg.output.dir)?;
    let mut series = DiagnosticSeries::load(series_path)?;
    for (k, v) in &cfg.constants {
        series.meta.fitted_constants.insert(k.clone(), *v);
    }
    let hash = criteria_hash(&cfg.criteria, &cfg.constants);
    let report = evaluate_series(&series, series_path, &cfg.criteria, &hash)?;
    let path = cfg.output.report_path();
    write_text(&path, &report.to_json()?)?;
    Ok((path, report))
}

pub fn synthesize(cfg: &RunConfig) -> Result<(PathBuf, DiagnosticSeries)> {
    cfg.validate_synth()?;
    ensure_writable(&cfg.output.dir)?;
    let mut series = synth(&cfg.synthetic_profile())?;
    series.meta.config_hash = cfg.config_hash();
    series.meta.fitted_constants = cfg.constants.clone();
    let path = cfg.output.series_path();
    series.save(&path)?;
    Ok((path, series))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub tool_version: String,
    pub config_hash: String,
    pub fitted: FittedConstants,
    pub held_out: HeldOutReport,
}

pub fn fit(cfg: &RunConfig) -> Result<(PathBuf, ConstantsReport)> {
    ensure_writable(&cfg.output.dir)?;
    let fitted = fit_constants(&cfg.fit)?;
    let held_out = held_out_check(&fitted, 1.05)?;
    let json = serde_json::to_string(&cfg.fit).expect("fit config serializes");
    let report = ConstantsReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: hex(&Sha256::digest(json.as_bytes())),
        fitted,
        held_out,
    };
    let path = cfg.output.dir.join("constants.json");
    write_text(&path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok((path, report))
}

/// Plain-text verdict table.
pub fn verdict_table(report: &VerdictReport) -> String {
    let mut out = format!(
        "{:<26} {:>12}  {:<13} evidence\n",
        "criterion", "T*", "outcome"
    );
    for v in &report.verdicts {
        let ev: Vec<String> = v
            .evidence
            .iter()
            .take(3)
            .map(|(k, x)| format!("{k}={x:.4e}"))
            .collect();
        out.push_str(&format!(
            "{:<26} {:>12.6}  {:<13} {}\n",
            v.criterion.id(),
            v.t_star,
            v.outcome.name(),
            ev.join(" ")
        ));
    }
    for s in &report.skipped {
        out.push_str(&format!("skipped {s}\n"));
    }
    out
}

pub fn constants_table(r: &ConstantsReport) -> String {
    let mut out = String::from("constant          value         held-out worst / fit\n");
    let worst = |k: &str| r.held_out.worst.get(k).copied().unwrap_or(f64::NAN);
    let rows = [
        ("commutator", r.fitted.commutator, worst("commutator")),
        ("alpha_gradient", r.fitted.alpha_gradient, worst("alpha_gradient")),
        ("gn", r.fitted.gn, worst("gn")),
        ("c_kn", r.fitted.c_kn, worst("c_kn")),
        ("c_kp", r.fitted.c_kp, worst("c_kp")),
    ];
    for (name, v, w) in rows {
        out.push_str(&format!("{name:<17} {v:<13.6e} {w:.4}\n"));
    }
    out.push_str(&format!("{:<17} {:<13.6e}\n", "k_euler", r.fitted.k_euler));
    out.push_str(&format!("{:<17} {:<13.6e}\n", "k_sqg", r.fitted.k_sqg));
    out
}
