//! Time series of diagnostics, the scale variable, and CSV/JSON persistence.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{Model, RunStatus};

/// Equation family whose scaling governs the criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Euler,
    NavierStokes,
    Sqg,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Euler => "euler",
            Family::NavierStokes => "navier_stokes",
            Family::Sqg => "sqg",
        }
    }

    /// Column holding the growth rate of the monitored norm.
    pub fn rate_column(self) -> &'static str {
        match self {
            Family::Euler => "alpha_k",
            Family::NavierStokes => "lambda_p",
            Family::Sqg => "alpha_kp",
        }
    }
}

impl From<Model> for Family {
    fn from(m: Model) -> Self {
        match m {
            Model::Euler2D => Family::Euler,
            Model::NS2D => Family::NavierStokes,
            Model::Sqg => Family::Sqg,
        }
    }
}

/// Scaling of a family: the critical rate `c/(T*−t)` and the exponent `a` with
/// `d ln X/dt = a · rate`. The scale-invariant window is `Y = (T*−t)^{a c} X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub c: f64,
    pub a: f64,
}

impl Scaling {
    pub fn tau_power(&self) -> f64 {
        self.a * self.c
    }
}

/// Parameters shared by every sample of a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesParams {
    pub family: Family,
    /// Spatial dimension `N`.
    pub dim: usize,
    pub k: usize,
    pub p: f64,
    pub nu: f64,
}

impl SeriesParams {
    pub fn scaling(&self) -> Result<Scaling> {
        let n = self.dim as f64;
        let k = self.k as f64;
        let p = self.p;
        match self.family {
            Family::Euler => {
                if self.k == 0 {
                    return Err(Error::param("k must be >= 1"));
                }
                Ok(Scaling {
                    c: 2.0 * k / (n + 2.0),
                    a: (n + 2.0) / (2.0 * k),
                })
            }
            Family::NavierStokes => {
                if !(p >= n) || !p.is_finite() {
                    return Err(Error::param(format!("Navier–Stokes scaling needs N <= p < ∞, got p = {p}")));
                }
                Ok(Scaling {
                    c: (p - n) / (2.0 * p),
                    a: 1.0,
                })
            }
            Family::Sqg => {
                if self.k == 0 || !(p >= 1.0) || !p.is_finite() {
                    return Err(Error::param("SQG scaling needs k >= 1 and finite p >= 1"));
                }
                Ok(Scaling {
                    c: k * p / (p + 2.0),
                    a: (p + 2.0) / (k * p),
                })
            }
        }
    }

    /// Whether `k` exceeds the regularity threshold of the family
    /// (`N/2 + 1` for Euler and Navier–Stokes, `2/p + 1` for SQG).
    pub fn k_is_supercritical(&self) -> bool {
        let k = self.k as f64;
        match self.family {
            Family::Euler | Family::NavierStokes => k > self.dim as f64 / 2.0 + 1.0,
            Family::Sqg => k > 2.0 / self.p + 1.0,
        }
    }
}

/// One row of a series. Quantities that do not apply to the model are `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSample {
    pub t: f64,
    pub alpha_k: Option<f64>,
    pub lambda_p: Option<f64>,
    pub gamma_p: Option<f64>,
    pub delta_p: Option<f64>,
    pub alpha_kp: Option<f64>,
    pub dk_v_l2: Option<f64>,
    pub v_l2: Option<f64>,
    pub v_lp: Option<f64>,
    pub dk_theta_lp: Option<f64>,
    pub theta_lp: Option<f64>,
    pub grad_v_linf: Option<f64>,
    pub omega_linf: Option<f64>,
    pub alpha_linf: Option<f64>,
    pub x_scale: Option<f64>,
}

/// CSV column order, fixed for format version 1.
pub const COLUMNS: [&str; 15] = [
    "t",
    "alpha_k",
    "lambda_p",
    "gamma_p",
    "delta_p",
    "alpha_kp",
    "dk_v_l2",
    "v_l2",
    "v_lp",
    "dk_theta_lp",
    "theta_lp",
    "grad_v_linf",
    "omega_linf",
    "alpha_linf",
    "x_scale",
];

pub const FORMAT_VERSION: u32 = 1;

impl DiagnosticSample {
    pub fn at(t: f64) -> Self {
        DiagnosticSample {
            t,
            ..Default::default()
        }
    }

    pub fn get(&self, column: &str) -> Option<f64> {
        match column {
            "t" => Some(self.t),
            "alpha_k" => self.alpha_k,
            "lambda_p" => self.lambda_p,
            "gamma_p" => self.gamma_p,
            "delta_p" => self.delta_p,
            "alpha_kp" => self.alpha_kp,
            "dk_v_l2" => self.dk_v_l2,
            "v_l2" => self.v_l2,
            "v_lp" => self.v_lp,
            "dk_theta_lp" => self.dk_theta_lp,
            "theta_lp" => self.theta_lp,
            "grad_v_linf" => self.grad_v_linf,
            "omega_linf" => self.omega_linf,
            "alpha_linf" => self.alpha_linf,
            "x_scale" => self.x_scale,
            _ => None,
        }
    }

    fn slot(&mut self, column: &str) -> Option<&mut Option<f64>> {
        Some(match column {
            "alpha_k" => &mut self.alpha_k,
            "lambda_p" => &mut self.lambda_p,
            "gamma_p" => &mut self.gamma_p,
            "delta_p" => &mut self.delta_p,
            "alpha_kp" => &mut self.alpha_kp,
            "dk_v_l2" => &mut self.dk_v_l2,
            "v_l2" => &mut self.v_l2,
            "v_lp" => &mut self.v_lp,
            "dk_theta_lp" => &mut self.dk_theta_lp,
            "theta_lp" => &mut self.theta_lp,
            "grad_v_linf" => &mut self.grad_v_linf,
            "omega_linf" => &mut self.omega_linf,
            "alpha_linf" => &mut self.alpha_linf,
            "x_scale" => &mut self.x_scale,
            _ => return None,
        })
    }
}

/// Metadata persisted in the JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub format_version: u32,
    pub tool_version: String,
    /// `simulation` or `synthetic`.
    pub source: String,
    pub model: Option<Model>,
    #[serde(flatten)]
    pub params: SeriesParams,
    pub grid_n: Option<usize>,
    pub seed: Option<u64>,
    pub config_hash: String,
    pub fitted_constants: BTreeMap<String, f64>,
    pub columns: Vec<String>,
    pub status: Option<RunStatus>,
    /// Generator parameters of a synthetic series.
    pub profile: Option<serde_json::Value>,
}

impl SeriesMeta {
    pub fn new(source: &str, params: SeriesParams) -> Self {
        SeriesMeta {
            format_version: FORMAT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            source: source.to_string(),
            model: None,
            params,
            grid_n: None,
            seed: None,
            config_hash: String::new(),
            fitted_constants: BTreeMap::new(),
            columns: COLUMNS.iter().map(|c| c.to_string()).collect(),
            status: None,
            profile: None,
        }
    }
}

/// Time-ordered diagnostics with their metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSeries {
    pub meta: SeriesMeta,
    samples: Vec<DiagnosticSample>,
}

impl DiagnosticSeries {
    /// Validates strictly increasing, finite times.
    pub fn new(meta: SeriesMeta, samples: Vec<DiagnosticSample>) -> Result<Self> {
        for w in samples.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::Series(format!(
                    "times must increase strictly ({} then {})",
                    w[0].t, w[1].t
                )));
            }
        }
        if samples.iter().any(|s| !s.t.is_finite()) {
            return Err(Error::Series("non-finite time".into()));
        }
        Ok(DiagnosticSeries { meta, samples })
    }

    pub fn samples(&self) -> &[DiagnosticSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn params(&self) -> &SeriesParams {
        &self.meta.params
    }

    pub fn family(&self) -> Family {
        self.meta.params.family
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Values of a column, failing if it is absent anywhere.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        if !COLUMNS.contains(&name) {
            return Err(Error::Series(format!("unknown column `{name}`")));
        }
        self.samples
            .iter()
            .map(|s| {
                s.get(name).ok_or_else(|| {
                    Error::Series(format!("column `{name}` is absent at t = {}", s.t))
                })
            })
            .collect()
    }

    pub fn has_column(&self, name: &str) -> bool {
        !self.samples.is_empty() && self.samples.iter().all(|s| s.get(name).is_some())
    }

    /// Writes the CSV and its JSON sidecar (same stem, `.json` extension).
    pub fn save(&self, csv_path: &Path) -> Result<()> {
        self.write_csv(csv_path)?;
        let json = serde_json::to_string_pretty(&self.meta)?;
        let side = sidecar_path(csv_path);
        fs::write(&side, json + "\n").map_err(|e| Error::io(&side, e))
    }

    pub fn load(csv_path: &Path) -> Result<Self> {
        let side = sidecar_path(csv_path);
        let text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
        let meta: SeriesMeta = serde_json::from_str(&text)?;
        if meta.format_version != FORMAT_VERSION {
            return Err(Error::Series(format!(
                "unsupported format version {}",
                meta.format_version
            )));
        }
        let samples = read_csv(csv_path)?;
        DiagnosticSeries::new(meta, samples)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| map_csv(path, e))?;
        w.write_record(COLUMNS)?;
        for s in &self.samples {
            let row: Vec<String> = COLUMNS
                .iter()
                .map(|c| s.get(c).map(format_value).unwrap_or_default())
                .collect();
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// `series.csv` → `series.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn map_csv(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Series(format!("{other:?}")),
        }
    } else {
        Error::Csv(e)
    }
}

/// Shortest representation that parses back to the same value.
fn format_value(v: f64) -> String {
    format!("{v:?}")
}

fn read_csv(path: &Path) -> Result<Vec<DiagnosticSample>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| map_csv(path, e))?;
    let header: Vec<String> = r.headers()?.iter().map(|h| h.to_string()).collect();
    if header != COLUMNS {
        return Err(Error::Series(format!(
            "{}: columns {:?} do not match the expected {:?}",
            path.display(),
            header,
            COLUMNS
        )));
    }
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let mut s = DiagnosticSample::default();
        for (name, cell) in COLUMNS.iter().zip(rec.iter()) {
            if cell.is_empty() {
                if *name == "t" {
                    return Err(Error::Series(format!("row {}: empty time", line + 2)));
                }
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| {
                Error::Series(format!("row {}: `{cell}` in column {name} is not a number", line + 2))
            })?;
            if *name == "t" {
                s.t = v;
            } else if let Some(slot) = s.slot(name) {
                *slot = Some(v);
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// Scale variable `X` and window `Y = (T_ref − t)^{a c} X` of one sample.
///
/// `initial` is `‖v₀‖_{L²}` for Euler and `‖θ₀‖_{L^p}` for SQG; Navier–Stokes ignores it.
pub fn scale_x(
    params: &SeriesParams,
    sample: &DiagnosticSample,
    initial: f64,
    t_ref: f64,
) -> Result<(f64, f64)> {
    if !(t_ref > sample.t) {
        return Err(Error::param(format!(
            "reference time {t_ref} must exceed the sample time {}",
            sample.t
        )));
    }
    let sc = params.scaling()?;
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Error::Series(format!("sample at t = {} lacks {name}", sample.t)))
    };
    let x = match params.family {
        Family::Euler => need(sample.dk_v_l2, "dk_v_l2")?.powf(sc.a) * initial.powf(1.0 - sc.a),
        Family::NavierStokes => need(sample.v_lp, "v_lp")?,
        Family::Sqg => {
            need(sample.dk_theta_lp, "dk_theta_lp")?.powf(sc.a) * initial.powf(1.0 - sc.a)
        }
    };
    let y = (t_ref - sample.t).powf(sc.tau_power()) * x;
    Ok((x, y))
}

fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    t.windows(2)
        .zip(f.windows(2))
        .map(|(tw, fw)| 0.5 * (tw[1] - tw[0]) * (fw[0] + fw[1]))
        .sum()
}

/// Trapezoid value of `∫‖ω‖_{L^∞} dt` over the recorded span.
pub fn bkm_integral(series: &DiagnosticSeries) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::Series("an integral needs at least two samples".into()));
    }
    Ok(trapezoid(&series.times(), &series.column("omega_linf")?))
}

/// Trapezoid value of `∫‖v‖_{L^p}^{2p/(p−N)} dt` over the recorded span; needs `p > N`.
pub fn serrin_integral(series: &DiagnosticSeries, p: f64) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::Series("an integral needs at least two samples".into()));
    }
    let n = series.params().dim as f64;
    if p != series.params().p {
        return Err(Error::param(format!(
            "the series records ‖v‖_{{L^p}} for p = {}, not {p}",
            series.params().p
        )));
    }
    if !(p > n) {
        return Err(Error::param(format!("the Serrin exponent needs p > N, got p = {p}")));
    }
    let e = 2.0 * p / (p - n);
    let f: Vec<f64> = series.column("v_lp")?.iter().map(|v| v.powf(e)).collect();
    Ok(trapezoid(&series.times(), &f))
}

/// Largest relative excursion of `‖v(t)‖_{L^p}` outside the envelope
/// `‖v₀‖ exp(∓∫₀ᵗ|λ_p|)`, with trapezoid integrals. Zero or negative means inside.
pub fn lp_envelope_excess(series: &DiagnosticSeries) -> Result<f64> {
    let v = series.column("v_lp")?;
    let lambda = series.column("lambda_p")?;
    let t = series.times();
    let v0 = v[0];
    let mut acc = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..v.len() {
        if i > 0 {
            acc += 0.5 * (t[i] - t[i - 1]) * (lambda[i].abs() + lambda[i - 1].abs());
        }
        let lo = v0 * (-acc).exp();
        let hi = v0 * acc.exp();
        worst = worst.max((lo - v[i]) / v0).max((v[i] - hi) / v0);
    }
    Ok(worst)
}
