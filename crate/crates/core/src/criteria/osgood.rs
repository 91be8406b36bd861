//! Osgood integrability of a weight `g` and the Osgood-weighted deficit integral.

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticSeries;
use crate::error::{Error, Result};

use super::tail::{slope, Tail};
use super::verdict::{CriteriaOptions, Criterion};

pub const DEFAULT_S_MAX: f64 = 1e12;
pub const DEFAULT_OSGOOD_SAMPLES: usize = 2001;

/// Decay exponent of the integrand (in log variables) separating the classes.
const CONVERGENT_EXPONENT: f64 = 1.5;
const DIVERGENT_EXPONENT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OsgoodClass {
    Osgood,
    NotOsgood,
    Inconclusive,
}

impl OsgoodClass {
    fn from_exponent(q: f64) -> Self {
        if q >= CONVERGENT_EXPONENT {
            OsgoodClass::Osgood
        } else if q <= DIVERGENT_EXPONENT {
            OsgoodClass::NotOsgood
        } else {
            OsgoodClass::Inconclusive
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OsgoodReport {
    pub class: OsgoodClass,
    /// `∫₁^{S_max} ds/g(s)`.
    pub partial_integral: f64,
    /// Power-law decay exponent of `s/g(s)` in `ln s` on the tail.
    pub tail_exponent: f64,
    pub s_max: f64,
}

/// `samples` points from 1 to `s_max`, uniform in `ln s`.
pub fn log_grid(s_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !(s_max > 1.0 && s_max.is_finite()) || samples < 5 {
        return Err(Error::param("a log grid needs s_max > 1 and at least 5 samples"));
    }
    let w_max = s_max.ln();
    let m = (samples - 1) as f64;
    Ok((0..samples)
        .map(|i| if i + 1 == samples { s_max } else { (w_max * i as f64 / m).exp() })
        .collect())
}

fn simpson_uniform(h: f64, f: &[f64]) -> f64 {
    let n = f.len() - 1;
    let mut acc = f[0] + f[n];
    for (i, v) in f.iter().enumerate().take(n).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2)
        .zip(f.windows(2))
        .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
        .sum()
}

/// Judges `∫₁^∞ ds/g(s) < ∞` from samples of `g` on an increasing grid starting at 1.
pub fn osgood_check(s: &[f64], g: &[f64]) -> Result<OsgoodReport> {
    if s.len() != g.len() || s.len() < 5 {
        return Err(Error::param("osgood_check needs matching s and g with at least 5 samples"));
    }
    if !(s[0] >= 1.0) || s.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("s must increase strictly from at least 1"));
    }
    if let Some((i, v)) = g.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::param(format!("g must be positive and finite; g({}) = {v}", s[i])));
    }
    let w: Vec<f64> = s.iter().map(|s| s.ln()).collect();
    let h: Vec<f64> = s.iter().zip(g).map(|(s, g)| s / g).collect();

    let dw = w[1] - w[0];
    let uniform = w
        .windows(2)
        .all(|p| ((p[1] - p[0]) - dw).abs() <= 1e-9 * dw.abs().max(1e-300));
    let partial_integral = if uniform && w.len() % 2 == 1 {
        simpson_uniform((w[w.len() - 1] - w[0]) / (w.len() - 1) as f64, &h)
    } else {
        trapezoid(&w, &h)
    };

    let tail = (w.len() / 5).max(5).min(w.len());
    let start = w.len() - tail;
    let lw: Vec<f64> = w[start..].iter().map(|w| w.max(1e-300).ln()).collect();
    let lh: Vec<f64> = h[start..].iter().map(|h| h.ln()).collect();
    let q = -slope(&lw, &lh);
    Ok(OsgoodReport {
        class: OsgoodClass::from_exponent(q),
        partial_integral,
        tail_exponent: q,
        s_max: s[s.len() - 1],
    })
}

/// [`osgood_check`] on a log-uniform grid up to `s_max`.
pub fn osgood_check_fn(g: impl Fn(f64) -> f64, s_max: f64, samples: usize) -> Result<OsgoodReport> {
    let s = log_grid(s_max, samples)?;
    let gs: Vec<f64> = s.iter().map(|s| g(*s)).collect();
    osgood_check(&s, &gs)
}

/// Value of `∫_{t₁} deficit / g(ln Y) dt` over the recorded span.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OsgoodIntegral {
    pub value: f64,
    /// `a · value`, which equals `∫_{s₁}^{s_end} ds/g(s)` under `s = ln Y`.
    pub substituted: f64,
    pub t1: f64,
    pub s1: f64,
    pub s_end: f64,
    /// Decay exponent of the integrand in `ln u` on the trailing window.
    pub tail_exponent: Option<f64>,
    pub finiteness: OsgoodClass,
}

/// Integrates from the first time `t₁` after which the deficit stays nonnegative and
/// `ln Y > 1`. A negative deficit on the trailing window is an error.
pub fn osgood_weighted_integral(
    series: &DiagnosticSeries,
    t_star: f64,
    g: impl Fn(f64) -> f64,
    opts: &CriteriaOptions,
) -> Result<OsgoodIntegral> {
    opts.validate()?;
    let tail = Tail::build(series, t_star, Criterion::Osgood, true)?;
    let ln_y = tail.ln_y();
    let c = tail.scaling.c;
    let slack = |i: usize| 1e-12 * (c + tail.tau[i] * tail.rate[i].abs());
    let nonneg = |i: usize| tail.r[i] >= -slack(i);
    let w = opts.window.apply(&tail.t);
    if let Some(i) = w.range().find(|&i| !nonneg(i)) {
        return Err(Error::param(format!(
            "deficit is negative at t = {} (scaled deficit {}); the weighted integral needs a nonnegative deficit near T*",
            tail.t[i], tail.r[i]
        )));
    }

    let n = tail.t.len();
    let mut i1 = n;
    while i1 > 0 && nonneg(i1 - 1) && ln_y[i1 - 1] > 1.0 {
        i1 -= 1;
    }
    let s_end = ln_y[n - 1];
    if i1 >= n - 1 {
        return Ok(OsgoodIntegral {
            value: 0.0,
            substituted: 0.0,
            t1: tail.t[n - 1],
            s1: s_end,
            s_end,
            tail_exponent: None,
            finiteness: OsgoodClass::Osgood,
        });
    }

    let mut h = Vec::with_capacity(n - i1);
    for i in i1..n {
        let gv = g(ln_y[i]);
        if !(gv > 0.0 && gv.is_finite()) {
            return Err(Error::param(format!("g must be positive; g({}) = {gv}", ln_y[i])));
        }
        h.push(tail.r[i].max(0.0) / gv);
    }
    let value = trapezoid(&tail.u[i1..], &h);

    let u0 = tail.u[0];
    let (mut lx, mut lh) = (Vec::new(), Vec::new());
    for i in w.start.max(i1)..n {
        let hv = h[i - i1];
        if hv > 0.0 {
            lx.push((tail.u[i] - u0 + 1.0).ln());
            lh.push(hv.ln());
        }
    }
    let all_zero = h.iter().all(|v| *v == 0.0);
    let (tail_exponent, finiteness) = if all_zero {
        (None, OsgoodClass::Osgood)
    } else if lx.len() >= 3 {
        let q = -slope(&lx, &lh);
        (Some(q), OsgoodClass::from_exponent(q))
    } else {
        (None, OsgoodClass::Inconclusive)
    };
    Ok(OsgoodIntegral {
        value,
        substituted: tail.scaling.a * value,
        t1: tail.t[i1],
        s1: ln_y[i1],
        s_end,
        tail_exponent,
        finiteness,
    })
}
