//! Blow-up conditions evaluated on a series against a candidate time `T*`.
//!
//! Asymptotic statements are judged on a trailing window. Divergence of the integrated
//! deficit shows up as a negative slope of `∫ r du` in `u = ln(1/(T*−t))`; by the
//! exponential representation this is the same as the window `Y` decaying like a
//! positive power of `T*−t`.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{bkm_integral, serrin_integral, DiagnosticSeries, Family};
use crate::error::{Error, Result};

use super::osgood::{osgood_weighted_integral, OsgoodClass};
use super::tail::{
    check_t_star, cumulative_trapezoid, is_critical_ns, linear_fit, require_column, slope,
    unsupported, Tail,
};
use super::verdict::{CriteriaOptions, Criterion, CriterionVerdict, Outcome, Window};

/// `|r|` decaying at least this fast in `T*−t` counts as integrable.
const INTEGRABLE_EXPONENT: f64 = 0.3;
/// `|r|` decaying at most this fast counts as non-integrable.
const PERSISTENT_EXPONENT: f64 = 0.15;

fn reject_critical_ns(series: &DiagnosticSeries, criterion: Criterion) -> Result<()> {
    if is_critical_ns(series.params()) {
        return Err(unsupported(
            criterion,
            series.params(),
            "the critical rate vanishes at p = N; the condition is stated for p > N",
        ));
    }
    Ok(())
}

/// Time rescale `σ` making `σ(T*−t) ≤ 1/e` on the whole window, so `ln(1/(σ(T*−t))) ≥ 1`.
fn log_rescale(tau_window_start: f64) -> f64 {
    (1.0 / (E * tau_window_start)).min(1.0)
}

/// Liminf of `Y` against the threshold `k`.
///
/// Violated when `Y` decays like a positive power of `T*−t` on the window (so it
/// vanishes at `T*`) or is decreasing and already below `k/2`; satisfied when the
/// window minimum clears `k`.
pub fn eval_lower_bound(
    series: &DiagnosticSeries,
    t_star: f64,
    k: f64,
    opts: &CriteriaOptions,
) -> Result<CriterionVerdict> {
    let criterion = Criterion::LowerBound;
    opts.validate()?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::param(format!("threshold must be positive, got {k}")));
    }
    reject_critical_ns(series, criterion)?;
    let tail = Tail::build(series, t_star, criterion, true)?;
    let w = opts.window.apply(&tail.t);
    let ln_y = &tail.ln_y()[w.range()];
    let beta = slope(&tail.ln_tau(w.range()), ln_y);
    let decay = beta / tail.scaling.a;
    let y_min = ln_y.iter().copied().fold(f64::INFINITY, f64::min).exp();
    let y_last = ln_y[ln_y.len() - 1].exp();

    let mut v = CriterionVerdict::new(criterion, t_star, w, *series.params());
    v.outcome = if decay > opts.slope_tol || (decay > 1e-6 && y_last < 0.5 * k) {
        Outcome::Violated
    } else if y_min >= k * (1.0 - 1e-12) {
        Outcome::Satisfied
    } else {
        Outcome::Inconclusive
    };
    v.set("liminf_estimate", y_min);
    v.set("y_last", y_last);
    v.set("threshold", k);
    v.set("margin", y_min / k);
    v.set("tail_exponent", beta);
    v.set("decay_rate", decay);
    Ok(v)
}

/// Boundedness from below of `∫₀ᵗ deficit`.
pub fn eval_integral_condition(
    series: &DiagnosticSeries,
    t_star: f64,
    opts: &CriteriaOptions,
) -> Result<CriterionVerdict> {
    let criterion = Criterion::Integral;
    opts.validate()?;
    reject_critical_ns(series, criterion)?;
    let tail = Tail::build(series, t_star, criterion, false)?;
    let w = opts.window.apply(&tail.t);
    let s = slope(&tail.u[w.range()], &tail.integral[w.range()]);
    let mut v = CriterionVerdict::new(criterion, t_star, w, *series.params());
    v.outcome = if s < -opts.slope_tol {
        Outcome::Violated
    } else {
        Outcome::Satisfied
    };
    let tail_int = &tail.integral[w.range()];
    v.set("integral", tail_int[tail_int.len() - 1]);
    v.set(
        "integral_min",
        tail_int.iter().copied().fold(f64::INFINITY, f64::min),
    );
    v.set("tail_slope", s);
    Ok(v)
}

/// Which growth quantity the log-corrected bound is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogVariant {
    /// The family's growth rate with its critical coefficient `c`.
    Rate,
    /// `alpha_linf` with coefficient 1.
    Linf,
    /// `alpha_linf` with coefficient `c`.
    LinfScaled,
}

impl LogVariant {
    pub fn criterion(self) -> Criterion {
        match self {
            LogVariant::Rate => Criterion::LogCorrected,
            LogVariant::Linf => Criterion::LogCorrectedLinf,
            LogVariant::LinfScaled => Criterion::LogCorrectedLinfScaled,
        }
    }
}

/// Times where `q(t) ≥ c/(T*−t) − c ε₀ / ((T*−t) ln(1/(σ(T*−t))))`.
///
/// Every index meeting the bound is returned. Satisfied when crossings occur in each
/// quarter of the window, violated when the window has none.
pub fn eval_log_corrected(
    series: &DiagnosticSeries,
    t_star: f64,
    eps0: f64,
    variant: LogVariant,
    opts: &CriteriaOptions,
) -> Result<CriterionVerdict> {
    let criterion = variant.criterion();
    if !(eps0 > 1.0) || !eps0.is_finite() {
        return Err(Error::param(format!("eps0 must exceed 1, got {eps0}")));
    }
    opts.validate()?;
    check_t_star(series, t_star)?;
    let params = *series.params();
    let scaling = params.scaling()?;
    let (q, coef) = match variant {
        LogVariant::Rate => {
            reject_critical_ns(series, criterion)?;
            (require_column(series, criterion, params.family.rate_column())?, scaling.c)
        }
        LogVariant::Linf => (require_column(series, criterion, "alpha_linf")?, 1.0),
        LogVariant::LinfScaled => {
            reject_critical_ns(series, criterion)?;
            (require_column(series, criterion, "alpha_linf")?, scaling.c)
        }
    };
    let t = series.times();
    let tau: Vec<f64> = t.iter().map(|t| t_star - t).collect();
    let w = opts.window.apply(&t);
    let sigma = log_rescale(tau[w.start]);

    let mut indices = Vec::new();
    let mut max_margin = f64::NEG_INFINITY;
    for i in 0..t.len() {
        let st = sigma * tau[i];
        if st >= 1.0 {
            continue;
        }
        let l = -st.ln();
        let r = tau[i] * q[i] - coef;
        let margin = r + coef * eps0 / l;
        if w.range().contains(&i) {
            max_margin = max_margin.max(margin);
        }
        if margin >= -1e-12 * (coef + tau[i] * q[i].abs()) {
            indices.push(i);
        }
    }
    let in_window: Vec<usize> = indices.iter().copied().filter(|i| *i >= w.start).collect();
    let mut quarters = [false; 4];
    for &i in &in_window {
        quarters[((i - w.start) * 4 / w.len()).min(3)] = true;
    }
    let hit = quarters.iter().filter(|h| **h).count();

    let mut v = CriterionVerdict::new(criterion, t_star, w, params);
    v.outcome = if hit == 4 {
        Outcome::Satisfied
    } else if in_window.is_empty() {
        Outcome::Violated
    } else {
        Outcome::Inconclusive
    };
    v.set("crossings", indices.len() as f64);
    v.set("window_crossings", in_window.len() as f64);
    v.set("quarters_hit", hit as f64);
    v.set("sigma", sigma);
    v.set("eps0", eps0);
    v.set("coefficient", coef);
    v.set("max_window_margin", max_margin);
    if let Some(&i) = indices.last() {
        v.set("last_crossing_t", t[i]);
    }
    v.sequence = indices.iter().map(|&i| t[i]).collect();
    v.indices = indices;
    if variant != LogVariant::Rate {
        v.notes.push(format!(
            "pointwise variant evaluated with coefficient {coef}; the unscaled form uses 1, the scaled form the critical coefficient {}",
            scaling.c
        ));
    }
    Ok(v)
}

/// Separates the three behaviours of the deficit near `T*`.
///
/// Equality events are samples with `|r| ≤ tol` or a sign change of `r`. Two or more,
/// one of them in the second half of the window, give case (i). Otherwise a power law
/// `|r| ≈ B (T*−t)^μ` is fitted: `μ ≥ 0.3` means an integrable deficit, case (ii);
/// `μ ≤ 0.15` means a divergent integral, case (iii) for a positive deficit and
/// no blow-up for a negative one, since then `Y → 0`. At `p = N` for Navier–Stokes an
/// integrable deficit also rules out blow-up.
pub fn classify_trichotomy(
    series: &DiagnosticSeries,
    t_star: f64,
    tol: f64,
    opts: &CriteriaOptions,
) -> Result<CriterionVerdict> {
    let criterion = Criterion::Trichotomy;
    if !(tol > 0.0) {
        return Err(Error::param("equality tolerance must be positive"));
    }
    opts.validate()?;
    let tail = Tail::build(series, t_star, criterion, true)?;
    let params = *series.params();
    let critical = is_critical_ns(&params);
    let w = opts.window.apply(&tail.t);
    let r = &tail.r;
    let ln_y = tail.ln_y();
    let a = tail.scaling.a;
    let n = tail.t.len();
    let sigma = log_rescale(tail.tau[w.start]);
    let log_factor = |i: usize| -(sigma * tail.tau[i]).ln();

    let events: Vec<usize> = w
        .range()
        .filter(|&i| r[i].abs() <= tol || (i > 0 && r[i - 1] * r[i] < 0.0))
        .collect();
    let half = w.start + w.len() / 2;

    let mut v = CriterionVerdict::new(criterion, t_star, w, params);
    v.set("equality_events", events.len() as f64);
    v.set("deficit_last", r[n - 1]);
    v.set("y_last", ln_y[n - 1].exp());
    let abs_r: Vec<f64> = r.iter().map(|x| x.abs()).collect();
    v.set("integral_abs", *cumulative_trapezoid(&tail.u, &abs_r).last().unwrap());
    v.set("integral", tail.integral[n - 1]);

    if events.len() >= 2 && events.iter().any(|&i| i >= half) {
        v.outcome = Outcome::CaseI;
        v.set("last_event_t", tail.t[*events.last().unwrap()]);
        // r·ln(1/τ) → 0 along the events
        let late: Vec<f64> = events
            .iter()
            .filter(|&&i| i >= half)
            .map(|&i| abs_r[i] * log_factor(i))
            .collect();
        let early_max = events
            .iter()
            .filter(|&&i| i < half)
            .map(|&i| abs_r[i] * log_factor(i))
            .fold(0.0, f64::max);
        let late_max = late.iter().copied().fold(0.0, f64::max);
        let refined = late_max <= tol || late_max <= early_max;
        v.set("log_refined", refined as u8 as f64);
        v.sequence = events.iter().map(|&i| tail.t[i]).collect();
        v.indices = events;
        return Ok(v);
    }

    let second: Vec<f64> = (half..w.end).map(|i| r[i]).collect();
    let positive = second.iter().all(|x| *x > 0.0);
    let negative = second.iter().all(|x| *x < 0.0);
    if !positive && !negative {
        v.notes.push("deficit changes sign only once on the window".into());
        return Ok(v);
    }
    let sign = if positive { 1.0 } else { -1.0 };
    let idx: Vec<usize> = w.range().filter(|&i| abs_r[i] > 0.0).collect();
    let lt: Vec<f64> = idx.iter().map(|&i| tail.tau[i].ln()).collect();
    let lr: Vec<f64> = idx.iter().map(|&i| abs_r[i].ln()).collect();
    let (ln_b, mu) = linear_fit(&lt, &lr);
    v.set("sign", sign);
    v.set("mu", mu);

    if mu >= INTEGRABLE_EXPONENT {
        // Y(T*) = Y_last · exp(a ∫_{u_last}^∞ r du) with r = ±B τ^μ
        let rest = sign * ln_b.exp() * tail.tau[n - 1].powf(mu) / mu;
        v.set("y_limit", (ln_y[n - 1] + a * rest).exp());
        v.set("log_refined", 1.0);
        if critical {
            v.outcome = Outcome::NotBlowup;
            v.notes
                .push("integrable deficit at p = N: case (ii) cannot occur, so T* is not a blow-up time".into());
        } else {
            v.outcome = Outcome::CaseII;
        }
    } else if mu <= PERSISTENT_EXPONENT {
        let growth = slope(&tail.u[w.range()], &ln_y[w.range()]);
        v.set("y_growth", growth);
        if positive {
            v.outcome = Outcome::CaseIII;
        } else {
            v.outcome = Outcome::NotBlowup;
            v.set("y_vanishes", 1.0);
            v.notes.push("negative deficit with divergent integral: Y → 0, so T* is not a blow-up time".into());
        }
    } else {
        v.notes.push(format!(
            "deficit decay exponent {mu:.3} lies between {PERSISTENT_EXPONENT} and {INTEGRABLE_EXPONENT}"
        ));
    }
    Ok(v)
}

/// Largest relative gap between `Y(t)` and `Y(0) exp(a ∫₀ᵗ deficit)` over all samples.
pub fn representation_residual(series: &DiagnosticSeries, t_star: f64) -> Result<f64> {
    let tail = Tail::build(series, t_star, Criterion::Representation, true)?;
    let ln_y = tail.ln_y();
    let a = tail.scaling.a;
    Ok(ln_y
        .iter()
        .zip(&tail.integral)
        .map(|(ly, i)| (ln_y[0] + a * i - ly).exp_m1().abs())
        .fold(0.0, f64::max))
}

/// Divergence of `∫ f dt` at `T*` from the decay of `(T*−t) f` on the window.
fn divergence_verdict(
    v: &mut CriterionVerdict,
    tau: &[f64],
    f: &[f64],
    w: Window,
) {
    let (mut lt, mut lq) = (Vec::new(), Vec::new());
    for i in w.range() {
        let q = tau[i] * f[i];
        if q > 0.0 {
            lt.push(tau[i].ln());
            lq.push(q.ln());
        }
    }
    if lt.len() < 3 {
        v.outcome = Outcome::Violated;
        v.notes.push("integrand vanishes on the window".into());
        return;
    }
    let mu = slope(&lt, &lq);
    v.set("mu", mu);
    v.outcome = if mu >= INTEGRABLE_EXPONENT {
        Outcome::Violated
    } else if mu <= PERSISTENT_EXPONENT {
        Outcome::Satisfied
    } else {
        Outcome::Inconclusive
    };
}

/// Divergence of `∫‖ω‖_∞ dt` at `T*`.
pub fn eval_bkm(series: &DiagnosticSeries, t_star: f64, opts: &CriteriaOptions) -> Result<CriterionVerdict> {
    let criterion = Criterion::Bkm;
    opts.validate()?;
    check_t_star(series, t_star)?;
    let omega = require_column(series, criterion, "omega_linf")?;
    let t = series.times();
    let tau: Vec<f64> = t.iter().map(|t| t_star - t).collect();
    let w = opts.window.apply(&t);
    let mut v = CriterionVerdict::new(criterion, t_star, w, *series.params());
    v.set("integral", bkm_integral(series)?);
    divergence_verdict(&mut v, &tau, &omega, w);
    Ok(v)
}

/// Divergence of `∫‖v‖_p^{2p/(p−N)} dt` at `T*`; needs `p > N`.
pub fn eval_serrin(series: &DiagnosticSeries, t_star: f64, opts: &CriteriaOptions) -> Result<CriterionVerdict> {
    let criterion = Criterion::Serrin;
    opts.validate()?;
    check_t_star(series, t_star)?;
    let params = *series.params();
    let n = params.dim as f64;
    if !(params.p > n) {
        return Err(unsupported(criterion, &params, "the Serrin exponent needs p > N"));
    }
    let vp = require_column(series, criterion, "v_lp")?;
    let e = 2.0 * params.p / (params.p - n);
    let f: Vec<f64> = vp.iter().map(|x| x.powf(e)).collect();
    let t = series.times();
    let tau: Vec<f64> = t.iter().map(|t| t_star - t).collect();
    let w = opts.window.apply(&t);
    let mut v = CriterionVerdict::new(criterion, t_star, w, params);
    v.set("integral", serrin_integral(series, params.p)?);
    v.set("exponent", e);
    divergence_verdict(&mut v, &tau, &f, w);
    Ok(v)
}

fn eval_representation(
    series: &DiagnosticSeries,
    t_star: f64,
    opts: &CriteriaOptions,
) -> Result<CriterionVerdict> {
    opts.validate()?;
    let res = representation_residual(series, t_star)?;
    let w = opts.window.apply(&series.times());
    let mut v = CriterionVerdict::new(Criterion::Representation, t_star, w, *series.params());
    v.outcome = if res <= opts.representation_tol {
        Outcome::Satisfied
    } else {
        Outcome::Violated
    };
    v.set("residual", res);
    v.set("tolerance", opts.representation_tol);
    Ok(v)
}

fn eval_osgood(series: &DiagnosticSeries, t_star: f64, opts: &CriteriaOptions) -> Result<CriterionVerdict> {
    opts.validate()?;
    check_t_star(series, t_star)?;
    let weight = opts.osgood_weight;
    let w = opts.window.apply(&series.times());
    let mut v = CriterionVerdict::new(Criterion::Osgood, t_star, w, *series.params());
    match osgood_weighted_integral(series, t_star, |s| weight.eval(s), opts) {
        Ok(oi) => {
            v.outcome = match oi.finiteness {
                OsgoodClass::Osgood => Outcome::Satisfied,
                OsgoodClass::NotOsgood => Outcome::Violated,
                OsgoodClass::Inconclusive => Outcome::Inconclusive,
            };
            v.set("integral", oi.value);
            v.set("substituted", oi.substituted);
            v.set("t1", oi.t1);
            v.set("s1", oi.s1);
            v.set("s_end", oi.s_end);
            if let Some(q) = oi.tail_exponent {
                v.set("tail_exponent", q);
            }
        }
        Err(Error::InvalidParameter(msg)) => {
            v.notes.push(msg);
        }
        Err(e) => return Err(e),
    }
    Ok(v)
}

/// Lower-bound threshold: explicit value, else the fitted constant stored with the series.
pub fn resolve_threshold(series: &DiagnosticSeries, explicit: Option<f64>) -> Result<f64> {
    if let Some(k) = explicit {
        return Ok(k);
    }
    let key = match series.family() {
        Family::Euler => Some("k_euler"),
        Family::Sqg => Some("k_sqg"),
        Family::NavierStokes => None,
    };
    key.and_then(|k| series.meta.fitted_constants.get(k).copied())
        .ok_or_else(|| {
            Error::param(format!(
                "no lower-bound threshold for {}; pass one explicitly",
                series.family().name()
            ))
        })
}

/// Evaluates one criterion with the given options.
pub fn evaluate(
    series: &DiagnosticSeries,
    criterion: Criterion,
    t_star: f64,
    opts: &CriteriaOptions,
) -> Result<CriterionVerdict> {
    match criterion {
        Criterion::LowerBound => {
            let k = resolve_threshold(series, opts.threshold)?;
            eval_lower_bound(series, t_star, k, opts)
        }
        Criterion::Integral => eval_integral_condition(series, t_star, opts),
        Criterion::LogCorrected => eval_log_corrected(series, t_star, opts.eps0, LogVariant::Rate, opts),
        Criterion::LogCorrectedLinf => eval_log_corrected(series, t_star, opts.eps0, LogVariant::Linf, opts),
        Criterion::LogCorrectedLinfScaled => {
            eval_log_corrected(series, t_star, opts.eps0, LogVariant::LinfScaled, opts)
        }
        Criterion::Trichotomy => classify_trichotomy(series, t_star, opts.equality_tol, opts),
        Criterion::Osgood => eval_osgood(series, t_star, opts),
        Criterion::Bkm => eval_bkm(series, t_star, opts),
        Criterion::Serrin => eval_serrin(series, t_star, opts),
        Criterion::Representation => eval_representation(series, t_star, opts),
    }
}
