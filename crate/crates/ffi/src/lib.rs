//! C interface to the blow-up diagnostics.
//!
//! Series are opaque handles released with `blowup_series_free`. Every fallible call
//! returns a [`BlowupStatus`]; on failure `blowup_last_error` describes the problem.
//! Strings returned through `char **` are owned by the caller and released with
//! `blowup_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use blowup::cli::commands::{evaluate_series, run_simulation};
use blowup::cli::config::{CriteriaConfig, RunConfig};
use blowup::criteria::{
    classify_trichotomy, eval_lower_bound, osgood_check, representation_residual, synth,
    CriteriaOptions, Criterion, OsgoodClass, Outcome, SyntheticProfile,
};
use blowup::diagnostics::DiagnosticSeries;
use blowup::Error;

/// Status code of every fallible call.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupStatus {
    Ok = 0,
    NullPointer = -1,
    InvalidArgument = -2,
    Io = -3,
    Numerical = -4,
    Unsupported = -5,
    Panic = -6,
}

/// Verdict of a criterion.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupOutcome {
    Satisfied = 0,
    Violated = 1,
    Inconclusive = 2,
    CaseI = 3,
    CaseIi = 4,
    CaseIii = 5,
    NotBlowup = 6,
}

impl From<Outcome> for BlowupOutcome {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Satisfied => BlowupOutcome::Satisfied,
            Outcome::Violated => BlowupOutcome::Violated,
            Outcome::Inconclusive => BlowupOutcome::Inconclusive,
            Outcome::CaseI => BlowupOutcome::CaseI,
            Outcome::CaseII => BlowupOutcome::CaseIi,
            Outcome::CaseIII => BlowupOutcome::CaseIii,
            Outcome::NotBlowup => BlowupOutcome::NotBlowup,
        }
    }
}

#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupOsgoodClass {
    Osgood = 0,
    NotOsgood = 1,
    Inconclusive = 2,
}

/// Opaque diagnostic series.
pub struct BlowupSeries {
    inner: DiagnosticSeries,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BlowupStatus {
    match e {
        Error::Io { .. } => BlowupStatus::Io,
        Error::Csv(c) if c.is_io_error() => BlowupStatus::Io,
        Error::NonFinite => BlowupStatus::Numerical,
        Error::Unsupported { .. } => BlowupStatus::Unsupported,
        _ => BlowupStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BlowupStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BlowupStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("{what} is null"));
            BlowupStatus::NullPointer
        }
        Ok(Err(Failure::Invalid(msg))) => {
            set_error(msg);
            BlowupStatus::InvalidArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            BlowupStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn series_arg<'a>(p: *const BlowupSeries) -> Result<&'a DiagnosticSeries, Failure> {
    p.as_ref().map(|s| &s.inner).ok_or(Failure::Null("series"))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

fn boxed(series: DiagnosticSeries) -> *mut BlowupSeries {
    Box::into_raw(Box::new(BlowupSeries { inner: series }))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn blowup_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or NULL. Valid until the next failing
/// call on the same thread.
#[no_mangle]
pub extern "C" fn blowup_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn blowup_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a synthetic series from a JSON profile such as
/// `{"kind":"supercritical","excess":0.5,"family":"euler","dim":2,"k":3,"p":2,"nu":0}`.
///
/// # Safety
/// `profile_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_series_synth(
    profile_json: *const c_char,
    out: *mut *mut BlowupSeries,
) -> BlowupStatus {
    guard(|| {
        let text = str_arg(profile_json, "profile_json")?;
        let out = out_arg(out, "out")?;
        let profile: SyntheticProfile =
            serde_json::from_str(text).map_err(|e| Failure::Invalid(format!("profile: {e}")))?;
        *out = boxed(synth(&profile)?);
        Ok(())
    })
}

/// Loads a series CSV and its JSON sidecar.
///
/// # Safety
/// `csv_path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_series_load(
    csv_path: *const c_char,
    out: *mut *mut BlowupSeries,
) -> BlowupStatus {
    guard(|| {
        let path = str_arg(csv_path, "csv_path")?;
        let out = out_arg(out, "out")?;
        *out = boxed(DiagnosticSeries::load(Path::new(path))?);
        Ok(())
    })
}

/// Writes a series CSV and its JSON sidecar.
///
/// # Safety
/// `series` must be a live handle and `csv_path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn blowup_series_save(
    series: *const BlowupSeries,
    csv_path: *const c_char,
) -> BlowupStatus {
    guard(|| {
        let s = series_arg(series)?;
        let path = str_arg(csv_path, "csv_path")?;
        s.save(Path::new(path))?;
        Ok(())
    })
}

/// Runs a simulation described by a TOML configuration (the `simulate` schema).
///
/// # Safety
/// `config_toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_simulate(
    config_toml: *const c_char,
    out: *mut *mut BlowupSeries,
) -> BlowupStatus {
    guard(|| {
        let text = str_arg(config_toml, "config_toml")?;
        let out = out_arg(out, "out")?;
        let cfg = RunConfig::parse(text)?;
        *out = boxed(run_simulation(&cfg)?);
        Ok(())
    })
}

/// # Safety
/// `series` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn blowup_series_free(series: *mut BlowupSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of samples.
///
/// # Safety
/// `series` must be a live handle and `len` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_series_len(series: *const BlowupSeries, len: *mut usize) -> BlowupStatus {
    guard(|| {
        *out_arg(len, "len")? = series_arg(series)?.len();
        Ok(())
    })
}

/// Copies a column into `buf`. `written` receives the column length; if it exceeds
/// `cap` nothing is copied and the call fails with `InvalidArgument`. Missing values
/// are NaN. Pass `buf = NULL, cap = 0` to query the length.
///
/// # Safety
/// `buf` must hold `cap` doubles (or be NULL with `cap = 0`); other pointers valid.
#[no_mangle]
pub unsafe extern "C" fn blowup_series_column(
    series: *const BlowupSeries,
    name: *const c_char,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> BlowupStatus {
    guard(|| {
        let s = series_arg(series)?;
        let name = str_arg(name, "name")?;
        let written = out_arg(written, "written")?;
        let values: Vec<f64> = if name == "t" {
            s.times()
        } else {
            if !s.has_column(name) && !blowup::diagnostics::COLUMNS.contains(&name) {
                return Err(Failure::Invalid(format!("unknown column `{name}`")));
            }
            s.samples().iter().map(|x| x.get(name).unwrap_or(f64::NAN)).collect()
        };
        *written = values.len();
        if buf.is_null() && cap == 0 {
            return Ok(());
        }
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        if values.len() > cap {
            return Err(Failure::Invalid(format!("column has {} values, buffer holds {cap}", values.len())));
        }
        std::slice::from_raw_parts_mut(buf, values.len()).copy_from_slice(&values);
        Ok(())
    })
}

/// Trichotomy classification at `t_star` with equality tolerance `tol`.
///
/// # Safety
/// `series` must be a live handle and `outcome` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_classify_trichotomy(
    series: *const BlowupSeries,
    t_star: f64,
    tol: f64,
    outcome: *mut BlowupOutcome,
) -> BlowupStatus {
    guard(|| {
        let s = series_arg(series)?;
        let outcome = out_arg(outcome, "outcome")?;
        *outcome = classify_trichotomy(s, t_star, tol, &CriteriaOptions::default())?.outcome.into();
        Ok(())
    })
}

/// Lower-bound criterion with threshold `k`; `k <= 0` uses the constant stored with
/// the series.
///
/// # Safety
/// `series` must be a live handle and `outcome` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_eval_lower_bound(
    series: *const BlowupSeries,
    t_star: f64,
    k: f64,
    outcome: *mut BlowupOutcome,
) -> BlowupStatus {
    guard(|| {
        let s = series_arg(series)?;
        let outcome = out_arg(outcome, "outcome")?;
        let k = if k > 0.0 {
            k
        } else {
            blowup::criteria::resolve_threshold(s, None)?
        };
        *outcome = eval_lower_bound(s, t_star, k, &CriteriaOptions::default())?.outcome.into();
        Ok(())
    })
}

/// Largest relative gap in the exponential representation of the window.
///
/// # Safety
/// `series` must be a live handle and `residual` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn blowup_representation_residual(
    series: *const BlowupSeries,
    t_star: f64,
    residual: *mut f64,
) -> BlowupStatus {
    guard(|| {
        let s = series_arg(series)?;
        *out_arg(residual, "residual")? = representation_residual(s, t_star)?;
        Ok(())
    })
}

/// Osgood test on samples `g[i] = g(s[i])` with increasing `s` starting at 1.
///
/// # Safety
/// `s` and `g` must hold `len` doubles; `class` must be valid; `partial_integral` may
/// be NULL.
#[no_mangle]
pub unsafe extern "C" fn blowup_osgood_check(
    s: *const f64,
    g: *const f64,
    len: usize,
    class: *mut BlowupOsgoodClass,
    partial_integral: *mut f64,
) -> BlowupStatus {
    guard(|| {
        if s.is_null() || g.is_null() {
            return Err(Failure::Null("samples"));
        }
        let class = out_arg(class, "class")?;
        let r = osgood_check(std::slice::from_raw_parts(s, len), std::slice::from_raw_parts(g, len))?;
        *class = match r.class {
            OsgoodClass::Osgood => BlowupOsgoodClass::Osgood,
            OsgoodClass::NotOsgood => BlowupOsgoodClass::NotOsgood,
            OsgoodClass::Inconclusive => BlowupOsgoodClass::Inconclusive,
        };
        if let Some(p) = partial_integral.as_mut() {
            *p = r.partial_integral;
        }
        Ok(())
    })
}

/// JSON verdict report. `criteria` is a comma-separated id list or NULL/empty for every
/// supported criterion; `t_stars` may be NULL with `n_t_stars = 0` to use defaults.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out_json` receives a string to be
/// released with `blowup_string_free`.
#[no_mangle]
pub unsafe extern "C" fn blowup_report_json(
    series: *const BlowupSeries,
    criteria: *const c_char,
    t_stars: *const f64,
    n_t_stars: usize,
    out_json: *mut *mut c_char,
) -> BlowupStatus {
    guard(|| {
        let s = series_arg(series)?;
        let out = out_arg(out_json, "out_json")?;
        let list: Vec<Criterion> = if criteria.is_null() {
            Vec::new()
        } else {
            str_arg(criteria, "criteria")?
                .split(',')
                .map(str::trim)
                .filter(|c| !c.is_empty())
                .map(|c| c.parse::<Criterion>())
                .collect::<Result<_, _>>()?
        };
        let t_star = if n_t_stars == 0 {
            Vec::new()
        } else if t_stars.is_null() {
            return Err(Failure::Null("t_stars"));
        } else {
            std::slice::from_raw_parts(t_stars, n_t_stars).to_vec()
        };
        let cfg = CriteriaConfig {
            criteria: list,
            t_star,
            options: CriteriaOptions::default(),
        };
        let report = evaluate_series(s, Path::new("<memory>"), &cfg, "")?;
        let json = report.to_json()?;
        *out = CString::new(json).map_err(|e| Failure::Invalid(e.to_string()))?.into_raw();
        Ok(())
    })
}
