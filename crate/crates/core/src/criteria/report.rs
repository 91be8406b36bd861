use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticSeries, SeriesParams};
use crate::error::{Error, Result};

use super::evaluate::evaluate;
use super::verdict::{CriteriaOptions, Criterion, CriterionVerdict};

/// Evaluates every `(criterion, T*)` pair, criterion-major, in parallel. The order of
/// the result does not depend on scheduling.
pub fn sweep(
    series: &DiagnosticSeries,
    criteria: &[Criterion],
    t_stars: &[f64],
    opts: &CriteriaOptions,
) -> Result<Vec<CriterionVerdict>> {
    if criteria.is_empty() || t_stars.is_empty() {
        return Err(Error::param("a sweep needs at least one criterion and one T*"));
    }
    opts.validate()?;
    let pairs: Vec<(Criterion, f64)> = criteria
        .iter()
        .flat_map(|c| t_stars.iter().map(move |t| (*c, *t)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(c, t)| evaluate(series, c, t, opts))
        .collect()
}

/// JSON document emitted by the `criteria` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub tool_version: String,
    pub config_hash: String,
    pub series: String,
    /// Hash of the series sidecar the verdicts were computed from.
    pub series_config_hash: String,
    pub params: SeriesParams,
    pub options: CriteriaOptions,
    pub verdicts: Vec<CriterionVerdict>,
    /// Criteria left out of a default run, with the reason.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
}

impl VerdictReport {
    pub fn new(
        series_path: &str,
        series: &DiagnosticSeries,
        options: CriteriaOptions,
        config_hash: String,
        verdicts: Vec<CriterionVerdict>,
    ) -> Self {
        VerdictReport {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash,
            series: series_path.to_string(),
            series_config_hash: series.meta.config_hash.clone(),
            params: *series.params(),
            options,
            verdicts,
            skipped: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}
