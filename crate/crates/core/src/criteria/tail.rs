//! Log-time view of a series relative to a candidate blow-up time.
//!
//! With `τ = T* − t` and `u = ln(1/τ)`, the scaled deficit is `r = τ·rate − c` and the
//! window obeys `ln Y(t) = ln Y(0) + a ∫ r du`.

use crate::diagnostics::{DiagnosticSeries, Family, Scaling, SeriesParams};
use crate::error::{Error, Result};

use super::verdict::Criterion;

pub(crate) struct Tail {
    pub t: Vec<f64>,
    pub tau: Vec<f64>,
    pub u: Vec<f64>,
    pub rate: Vec<f64>,
    /// Scaled deficit `τ·rate − c`.
    pub r: Vec<f64>,
    /// Cumulative trapezoid of `r` over `u`, zero at the first sample.
    pub integral: Vec<f64>,
    /// `ln Y`, present when the series carries `x_scale`.
    pub ln_y: Option<Vec<f64>>,
    pub scaling: Scaling,
}

pub(crate) fn unsupported(criterion: Criterion, params: &SeriesParams, reason: impl Into<String>) -> Error {
    Error::Unsupported {
        criterion: criterion.id().to_string(),
        model: params.family.name().to_string(),
        reason: reason.into(),
    }
}

pub(crate) fn check_t_star(series: &DiagnosticSeries, t_star: f64) -> Result<()> {
    if series.len() < 2 {
        return Err(Error::Series("criteria need at least two samples".into()));
    }
    let s = series.samples();
    let (first, last) = (s[0].t, s[s.len() - 1].t);
    if !t_star.is_finite() || t_star <= last {
        return Err(Error::param(format!(
            "candidate T* = {t_star} lies inside the recorded range [{first}, {last}]"
        )));
    }
    Ok(())
}

pub(crate) fn require_column(
    series: &DiagnosticSeries,
    criterion: Criterion,
    column: &str,
) -> Result<Vec<f64>> {
    if !series.has_column(column) {
        return Err(unsupported(
            criterion,
            series.params(),
            format!("the series has no `{column}` column"),
        ));
    }
    series.column(column)
}

/// Whether the series is Navier–Stokes at the critical exponent `p = N`.
pub(crate) fn is_critical_ns(params: &SeriesParams) -> bool {
    params.family == Family::NavierStokes && (params.p - params.dim as f64).abs() < 1e-12
}

pub(crate) fn cumulative_trapezoid(x: &[f64], f: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..x.len() {
        acc += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
        out.push(acc);
    }
    out
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

/// Least-squares fit `y ≈ intercept + slope·x`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let s = slope(x, y);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    (my - s * mx, s)
}

impl Tail {
    pub fn build(
        series: &DiagnosticSeries,
        t_star: f64,
        criterion: Criterion,
        need_y: bool,
    ) -> Result<Tail> {
        check_t_star(series, t_star)?;
        let params = series.params();
        let scaling = params.scaling()?;
        let rate = require_column(series, criterion, params.family.rate_column())?;
        let t = series.times();
        let tau: Vec<f64> = t.iter().map(|t| t_star - t).collect();
        let u: Vec<f64> = tau.iter().map(|x| -x.ln()).collect();
        let r: Vec<f64> = tau
            .iter()
            .zip(&rate)
            .map(|(tau, rate)| tau * rate - scaling.c)
            .collect();
        let integral = cumulative_trapezoid(&u, &r);
        let ln_y = if need_y {
            let x = require_column(series, criterion, "x_scale")?;
            if x.iter().any(|x| !(*x > 0.0)) {
                return Err(Error::Series("x_scale must be positive".into()));
            }
            let q = scaling.tau_power();
            Some(tau.iter().zip(&x).map(|(tau, x)| q * tau.ln() + x.ln()).collect())
        } else {
            None
        };
        Ok(Tail {
            t,
            tau,
            u,
            rate,
            r,
            integral,
            ln_y,
            scaling,
        })
    }

    pub fn ln_y(&self) -> &[f64] {
        self.ln_y.as_deref().expect("window requested at build time")
    }

    pub fn ln_tau(&self, range: std::ops::Range<usize>) -> Vec<f64> {
        self.tau[range].iter().map(|x| x.ln()).collect()
    }
}
