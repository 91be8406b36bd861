//! Synthetic series with a prescribed deficit near `T*`.
//!
//! Samples sit at `T* − t_i = T*·2^{−i/m}`. The scaled deficit `r_i` is prescribed, the
//! rate is `(r_i + c)/(T* − t_i)`, and the window is built from the same trapezoid rule
//! the evaluators use, so the exponential representation holds to rounding.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    DiagnosticSample, DiagnosticSeries, Family, SeriesMeta, SeriesParams,
};
use crate::error::{Error, Result};

use super::tail::{cumulative_trapezoid, is_critical_ns};
use super::verdict::Outcome;

fn default_frequency() -> f64 {
    2.0 * PI
}
fn default_eps0() -> f64 {
    2.0
}
fn default_gap() -> f64 {
    0.5
}
fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}

/// Shape of the scaled deficit `r = (T*−t)·rate − c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// `r = A sin(ω ln(T*/(T*−t)))`; `A = 0` gives the exact critical rate.
    SelfSimilar {
        #[serde(default)]
        oscillation: f64,
        #[serde(default = "default_frequency")]
        frequency: f64,
    },
    /// `r` equals the log-corrected bound at `T*−t = T*·2^{−n}` and lies below it by
    /// the relative `gap` elsewhere. Needs `T* ≤ 1/e`.
    LogCorrected {
        #[serde(default = "default_eps0")]
        eps0: f64,
        #[serde(default = "default_gap")]
        gap: f64,
    },
    /// `r = A (T*−t)^μ`, i.e. a deficit `A (T*−t)^{μ−1}`; `A` may be negative.
    IntegrableDeficit {
        #[serde(default = "one")]
        strength: f64,
        #[serde(default = "half")]
        exponent: f64,
    },
    /// Constant `r = excess > 0`: deficit `excess/(T*−t)`.
    Supercritical {
        #[serde(default = "half")]
        excess: f64,
    },
    /// Constant rate `−rate ≤ 0`.
    Decaying {
        #[serde(default)]
        rate: f64,
    },
}

impl ProfileKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProfileKind::SelfSimilar { .. } => "self_similar",
            ProfileKind::LogCorrected { .. } => "log_corrected",
            ProfileKind::IntegrableDeficit { .. } => "integrable_deficit",
            ProfileKind::Supercritical { .. } => "supercritical",
            ProfileKind::Decaying { .. } => "decaying",
        }
    }
}

fn default_t_star() -> f64 {
    1.0
}
fn default_per_octave() -> usize {
    64
}
fn default_octaves() -> usize {
    20
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticProfile {
    #[serde(flatten)]
    pub kind: ProfileKind,
    #[serde(flatten)]
    pub params: SeriesParams,
    #[serde(default = "default_t_star")]
    pub t_star: f64,
    /// `Y` at `t = 0`.
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "default_per_octave")]
    pub samples_per_octave: usize,
    /// `T*−t` runs from `T*` down to `T*·2^{−octaves}`.
    #[serde(default = "default_octaves")]
    pub octaves: usize,
}

impl SyntheticProfile {
    pub fn new(kind: ProfileKind, params: SeriesParams) -> Self {
        SyntheticProfile {
            kind,
            params,
            t_star: 1.0,
            amplitude: 1.0,
            samples_per_octave: default_per_octave(),
            octaves: default_octaves(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples_per_octave * self.octaves + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Outcome the trichotomy classifier should report.
    pub fn expected_case(&self) -> Outcome {
        match self.kind {
            ProfileKind::SelfSimilar { .. } => Outcome::CaseI,
            ProfileKind::IntegrableDeficit { .. } if is_critical_ns(&self.params) => {
                Outcome::NotBlowup
            }
            ProfileKind::IntegrableDeficit { .. } => Outcome::CaseII,
            ProfileKind::Supercritical { .. } => Outcome::CaseIII,
            ProfileKind::Decaying { .. } | ProfileKind::LogCorrected { .. } => Outcome::NotBlowup,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sc = self.params.scaling()?;
        let mut errs = Vec::new();
        if self.params.dim != 2 && self.params.dim != 3 {
            errs.push(format!("dim must be 2 or 3, got {}", self.params.dim));
        }
        if !(self.t_star > 0.0 && self.t_star.is_finite()) {
            errs.push(format!("t_star must be positive, got {}", self.t_star));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            errs.push(format!("amplitude must be positive, got {}", self.amplitude));
        }
        if self.samples_per_octave == 0 || self.octaves == 0 {
            errs.push("samples_per_octave and octaves must be positive".into());
        }
        match self.kind {
            ProfileKind::SelfSimilar {
                oscillation,
                frequency,
            } => {
                if !oscillation.is_finite() || !(frequency > 0.0 && frequency.is_finite()) {
                    errs.push("oscillation must be finite and frequency positive".into());
                }
            }
            ProfileKind::LogCorrected { eps0, gap } => {
                if !(eps0 > 1.0 && eps0.is_finite()) {
                    errs.push(format!("eps0 must exceed 1, got {eps0}"));
                }
                if !(gap > 0.0 && gap.is_finite()) {
                    errs.push(format!("gap must be positive, got {gap}"));
                }
                if !(self.t_star <= 1.0 / E) {
                    errs.push("log_corrected needs t_star <= 1/e so the log factor stays above 1".into());
                }
                if !(sc.c > 0.0) {
                    errs.push("log_corrected needs a positive critical rate (p > N)".into());
                }
            }
            ProfileKind::IntegrableDeficit { strength, exponent } => {
                if !strength.is_finite() || strength == 0.0 {
                    errs.push("strength must be finite and nonzero".into());
                }
                if !(exponent > 0.0 && exponent.is_finite()) {
                    errs.push(format!("exponent must be positive, got {exponent}"));
                }
            }
            ProfileKind::Supercritical { excess } => {
                if !(excess > 0.0 && excess.is_finite()) {
                    errs.push(format!("excess must be positive, got {excess}"));
                }
            }
            ProfileKind::Decaying { rate } => {
                if !(rate >= 0.0 && rate.is_finite()) {
                    errs.push(format!("decaying rate must be nonnegative, got {rate}"));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// Builds the series of a profile.
pub fn synth(profile: &SyntheticProfile) -> Result<DiagnosticSeries> {
    profile.validate()?;
    let params = profile.params;
    let sc = params.scaling()?;
    let t_star = profile.t_star;
    let m = profile.samples_per_octave as f64;
    let n = profile.len();

    let t: Vec<f64> = (0..n)
        .map(|i| if i == 0 { 0.0 } else { t_star - t_star * (-(i as f64) / m).exp2() })
        .collect();
    // the distance the evaluators will see
    let tau: Vec<f64> = t.iter().map(|t| t_star - t).collect();
    let u: Vec<f64> = tau.iter().map(|x| -x.ln()).collect();

    let r: Vec<f64> = (0..n)
        .map(|i| match profile.kind {
            ProfileKind::SelfSimilar {
                oscillation,
                frequency,
            } => oscillation * (frequency * (u[i] - u[0])).sin(),
            ProfileKind::LogCorrected { eps0, gap } => {
                let bound = -sc.c * eps0 / (-tau[i].ln());
                let touch = i > 0 && i % profile.samples_per_octave == 0;
                if touch {
                    bound
                } else {
                    bound * (1.0 + gap)
                }
            }
            ProfileKind::IntegrableDeficit { strength, exponent } => {
                strength * tau[i].powf(exponent)
            }
            ProfileKind::Supercritical { excess } => excess,
            ProfileKind::Decaying { rate } => -rate * tau[i] - sc.c,
        })
        .collect();
    let rate: Vec<f64> = r.iter().zip(&tau).map(|(r, tau)| (r + sc.c) / tau).collect();
    // the evaluators recompute r from the stored rate
    let r: Vec<f64> = rate.iter().zip(&tau).map(|(q, tau)| tau * q - sc.c).collect();
    let integral = cumulative_trapezoid(&u, &r);
    let ln_y0 = profile.amplitude.ln();
    let q = sc.tau_power();

    let samples = (0..n)
        .map(|i| {
            let ln_x = ln_y0 + sc.a * integral[i] - q * tau[i].ln();
            let x = ln_x.exp();
            let mut s = DiagnosticSample::at(t[i]);
            s.x_scale = Some(x);
            match params.family {
                Family::Euler => {
                    s.alpha_k = Some(rate[i]);
                    s.dk_v_l2 = Some(x.powf(1.0 / sc.a));
                    s.v_l2 = Some(1.0);
                    if params.dim == 3 {
                        s.alpha_linf = Some(rate[i] / sc.c);
                    }
                }
                Family::NavierStokes => {
                    s.lambda_p = Some(rate[i]);
                    s.v_lp = Some(x);
                }
                Family::Sqg => {
                    s.alpha_kp = Some(rate[i]);
                    s.dk_theta_lp = Some(x.powf(1.0 / sc.a));
                    s.theta_lp = Some(1.0);
                    s.alpha_linf = Some(rate[i] / sc.c);
                }
            }
            s
        })
        .collect();

    let mut meta = SeriesMeta::new("synthetic", params);
    meta.profile = Some(serde_json::to_value(profile)?);
    DiagnosticSeries::new(meta, samples)
}
