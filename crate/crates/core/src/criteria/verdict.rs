use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::SeriesParams;
use crate::error::{Error, Result};

/// Criteria that can be evaluated on a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// Liminf of the scale-invariant window against a threshold.
    LowerBound,
    /// Boundedness from below of the integrated deficit.
    Integral,
    /// Sequence of times where the growth rate clears the log-corrected critical rate.
    LogCorrected,
    /// Same with the pointwise stretching maximum and coefficient one.
    LogCorrectedLinf,
    /// Pointwise stretching maximum with the critical coefficient of the family.
    LogCorrectedLinfScaled,
    Trichotomy,
    /// Finiteness of the Osgood-weighted deficit integral.
    Osgood,
    /// Divergence of `∫‖ω‖_∞`.
    Bkm,
    /// Divergence of `∫‖v‖_p^{2p/(p−N)}`.
    Serrin,
    /// Residual of the exponential representation of the window.
    Representation,
}

impl Criterion {
    pub const ALL: [Criterion; 10] = [
        Criterion::LowerBound,
        Criterion::Integral,
        Criterion::LogCorrected,
        Criterion::LogCorrectedLinf,
        Criterion::LogCorrectedLinfScaled,
        Criterion::Trichotomy,
        Criterion::Osgood,
        Criterion::Bkm,
        Criterion::Serrin,
        Criterion::Representation,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Criterion::LowerBound => "lower_bound",
            Criterion::Integral => "integral",
            Criterion::LogCorrected => "log_corrected",
            Criterion::LogCorrectedLinf => "log_corrected_linf",
            Criterion::LogCorrectedLinfScaled => "log_corrected_linf_scaled",
            Criterion::Trichotomy => "trichotomy",
            Criterion::Osgood => "osgood",
            Criterion::Bkm => "bkm",
            Criterion::Serrin => "serrin",
            Criterion::Representation => "representation",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| {
                let ids: Vec<&str> = Criterion::ALL.iter().map(|c| c.id()).collect();
                Error::param(format!("unknown criterion `{s}`; available: {}", ids.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Satisfied,
    Violated,
    Inconclusive,
    /// Equality with the critical rate along a sequence of times.
    CaseI,
    /// Deficit of fixed sign with finite integral and finite window limit.
    #[serde(rename = "case_ii")]
    CaseII,
    /// Positive deficit with divergent integral; the window grows without bound.
    #[serde(rename = "case_iii")]
    CaseIII,
    /// The data rule out a blow-up at the candidate time.
    NotBlowup,
}

impl Outcome {
    /// Same string as the serialized form.
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Satisfied => "satisfied",
            Outcome::Violated => "violated",
            Outcome::Inconclusive => "inconclusive",
            Outcome::CaseI => "case_i",
            Outcome::CaseII => "case_ii",
            Outcome::CaseIII => "case_iii",
            Outcome::NotBlowup => "not_blowup",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the trailing window standing in for `t → T*` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowSpec {
    pub fraction: f64,
    pub min_samples: usize,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            fraction: 0.2,
            min_samples: 16,
        }
    }
}

impl WindowSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::param(format!(
                "window fraction must lie in (0, 1], got {}",
                self.fraction
            )));
        }
        if self.min_samples < 3 {
            return Err(Error::param("a window needs at least 3 samples"));
        }
        Ok(())
    }

    /// Trailing window of a series with `len` samples and times `t`.
    pub fn apply(&self, t: &[f64]) -> Window {
        let len = t.len();
        let w = ((self.fraction * len as f64).ceil() as usize)
            .max(self.min_samples)
            .min(len);
        let start = len - w;
        Window {
            start,
            end: len,
            t_start: t[start],
            t_end: t[len - 1],
        }
    }
}

/// Sample range `start..end` used for the tail estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start: usize,
    pub end: usize,
    pub t_start: f64,
    pub t_end: f64,
}

impl Window {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

/// Weight `g` of the Osgood-weighted integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OsgoodWeight {
    /// `g(s) = s²`
    Square,
    /// `g(s) = s log²(s + e)`
    LogSquared,
    /// `g(s) = 1`, which is not an Osgood function.
    Unit,
}

impl OsgoodWeight {
    pub fn eval(self, s: f64) -> f64 {
        match self {
            OsgoodWeight::Square => s * s,
            OsgoodWeight::LogSquared => s * (s + std::f64::consts::E).ln().powi(2),
            OsgoodWeight::Unit => 1.0,
        }
    }
}

/// Tunables shared by the evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CriteriaOptions {
    pub window: WindowSpec,
    /// Equality tolerance on `(T*−t)·deficit`.
    pub equality_tol: f64,
    /// Tail slopes below `−slope_tol` count as divergence to `−∞`.
    pub slope_tol: f64,
    pub eps0: f64,
    /// Lower-bound threshold; falls back to the constants stored with the series.
    pub threshold: Option<f64>,
    pub osgood_weight: OsgoodWeight,
    /// Representation residual accepted as satisfied.
    pub representation_tol: f64,
}

impl Default for CriteriaOptions {
    fn default() -> Self {
        CriteriaOptions {
            window: WindowSpec::default(),
            equality_tol: 1e-3,
            slope_tol: 1e-2,
            eps0: 2.0,
            threshold: None,
            osgood_weight: OsgoodWeight::Square,
            representation_tol: 1e-3,
        }
    }
}

impl CriteriaOptions {
    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        if !(self.equality_tol > 0.0) {
            return Err(Error::param("equality_tol must be positive"));
        }
        if !(self.slope_tol > 0.0) {
            return Err(Error::param("slope_tol must be positive"));
        }
        if !(self.eps0 > 1.0) {
            return Err(Error::param(format!("eps0 must exceed 1, got {}", self.eps0)));
        }
        if let Some(k) = self.threshold {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::param("threshold must be positive and finite"));
            }
        }
        if !(self.representation_tol > 0.0) {
            return Err(Error::param("representation_tol must be positive"));
        }
        Ok(())
    }
}

/// Result of one criterion at one candidate time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub criterion: Criterion,
    pub t_star: f64,
    pub outcome: Outcome,
    pub evidence: BTreeMap<String, f64>,
    pub window: Window,
    /// Sample indices of a detected sequence `t_n` (crossings or equality events).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub indices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sequence: Vec<f64>,
    pub params: SeriesParams,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CriterionVerdict {
    pub(crate) fn new(
        criterion: Criterion,
        t_star: f64,
        window: Window,
        params: SeriesParams,
    ) -> Self {
        CriterionVerdict {
            criterion,
            t_star,
            outcome: Outcome::Inconclusive,
            evidence: BTreeMap::new(),
            window,
            indices: Vec::new(),
            sequence: Vec::new(),
            params,
            notes: Vec::new(),
        }
    }

    pub(crate) fn set(&mut self, name: &str, value: f64) {
        if value.is_finite() {
            self.evidence.insert(name.to_string(), value);
        }
    }

    pub fn evidence(&self, name: &str) -> Option<f64> {
        self.evidence.get(name).copied()
    }
}
