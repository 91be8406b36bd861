//! Verification suites: identity residuals, conservation, fitted constants and fixture
//! round-trips, reported as a table of measured values against tolerances.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{
    classify_trichotomy, eval_log_corrected, osgood_check_fn, osgood_weighted_integral,
    representation_residual, synth, CriteriaOptions, LogVariant, OsgoodClass, Outcome,
    ProfileKind, SyntheticProfile, DEFAULT_OSGOOD_SAMPLES, DEFAULT_S_MAX,
};
use crate::diagnostics::{
    alpha_hat_local, alpha_k, alpha_kp, alpha_local, fit_constants, gn_ratio, grad_v_linf,
    held_out_check, lp_envelope_excess, record_run, sqg_velocity, DiagnosticSeries, Family,
    FitConfig, SeriesMeta, SeriesParams,
};
use crate::error::{Error, Result};
use crate::flow::{rhs, step_rk4, velocity_of, FlowState, Initial, Model, StepperConfig};
use crate::spectral::{
    dk_seminorm_l2, dk_tensor, lp_norm, max_abs_interpolant, random_scalar, random_velocity,
    Field, Grid, RandomSpec,
};

pub const DEFAULT_SEED: u64 = 7;

pub const SUITES: [&str; 5] = ["identities", "conservation", "constants", "fixtures", "all"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    /// `None` for informational rows.
    pub tolerance: Option<f64>,
    pub passed: bool,
}

impl Check {
    fn bound(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            tolerance: Some(tolerance),
            passed: measured <= tolerance,
        }
    }

    fn info(name: impl Into<String>, measured: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            tolerance: None,
            passed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tool_version: String,
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

impl VerifyReport {
    /// Fixed-width table, one row per check.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&format!("[{}] ({:.1} s)\n", s.suite, s.seconds));
            for c in &s.checks {
                let tol = c.tolerance.map(|t| format!("{t:.1e}")).unwrap_or_else(|| "-".into());
                let status = match (c.tolerance, c.passed) {
                    (None, _) => "info",
                    (_, true) => "PASS",
                    (_, false) => "FAIL",
                };
                out.push_str(&format!("  {status:<4}  {:<44} {:>13.6e}  tol {tol}\n", c.name, c.measured));
            }
        }
        out.push_str(if self.passed { "all checks passed\n" } else { "some checks FAILED\n" });
        out
    }
}

/// Runs a suite by name; `all` runs every suite.
pub fn run_suite(name: &str, seed: u64, fit: &FitConfig) -> Result<VerifyReport> {
    let names: Vec<&str> = match name {
        "all" => SUITES[..4].to_vec(),
        n if SUITES.contains(&n) => vec![n],
        other => {
            return Err(Error::param(format!(
                "unknown suite `{other}`; available: {}",
                SUITES.join(", ")
            )))
        }
    };
    let mut suites = Vec::new();
    for n in names {
        let start = Instant::now();
        let checks = match n {
            "identities" => identities(seed)?,
            "conservation" => conservation(seed)?,
            "constants" => constants(fit)?,
            _ => fixtures(seed)?,
        };
        suites.push(SuiteReport {
            suite: n.to_string(),
            checks,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    let passed = suites.iter().all(|s| s.passed());
    Ok(VerifyReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        suites,
        passed,
    })
}

fn grid2(n: usize) -> Result<Grid> {
    Grid::new(2, n)
}

fn params(family: Family, k: usize, p: f64, nu: f64) -> SeriesParams {
    SeriesParams {
        family,
        dim: 2,
        k,
        p,
        nu,
    }
}

/// `d/dt ln N(state)` by a two-step central difference around the returned midpoint.
fn log_rate(s0: &FlowState, dt: f64, norm: impl Fn(&FlowState) -> Result<f64>) -> Result<(FlowState, f64)> {
    let s1 = step_rk4(s0, dt)?;
    let s2 = step_rk4(&s1, dt)?;
    let r = (norm(&s2)?.ln() - norm(s0)?.ln()) / (2.0 * dt);
    Ok((s1, r))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn recorded(
    initial: Initial,
    model: Model,
    n: usize,
    nu: f64,
    p: SeriesParams,
    cfg: StepperConfig,
) -> Result<DiagnosticSeries> {
    let state = initial.state(model, &grid2(n)?, nu)?;
    let (series, _) = record_run(state, &cfg, p, SeriesMeta::new("simulation", p))?;
    Ok(series)
}

fn identities(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let g64 = grid2(64)?;

    let tg = Initial::TaylorGreen2d { amplitude: 1.0 }.state(Model::Euler2D, &g64, 0.0)?;
    out.push(Check::bound(
        "steady taylor-green |alpha_k|",
        alpha_k(&velocity_of(&tg)?, 3)?.abs(),
        1e-8,
    ));
    let sq = Initial::SqgSingleMode {
        mode: 1,
        amplitude: 1.0,
    }
    .state(Model::Sqg, &g64, 0.0)?;
    out.push(Check::bound("steady sqg |alpha_kp|", alpha_kp(sq.prognostic(), 3, 2.0)?.abs(), 1e-10));
    out.push(Check::bound("steady sqg |rhs|_inf", rhs(&sq)?.max_abs(), 1e-10));

    let s0 = Initial::RandomSmooth(RandomSpec::new(seed).with_cutoff(8.0))
        .state(Model::Euler2D, &grid2(128)?, 0.0)?;
    let (mid, fd) = log_rate(&s0, 1e-4, |s| dk_seminorm_l2(&velocity_of(s)?, 3))?;
    out.push(Check::bound(
        "alpha_k vs log-derivative of |D^3 v|",
        rel(alpha_k(&velocity_of(&mid)?, 3)?, fd),
        1e-4,
    ));

    let s0 = Initial::RandomSmooth(RandomSpec::new(seed).with_cutoff(6.0)).state(Model::Sqg, &g64, 0.0)?;
    let (mid, fd) = log_rate(&s0, 1e-4, |s| lp_norm(&dk_tensor(s.prognostic(), 3)?, 2.0))?;
    out.push(Check::bound(
        "alpha_kp vs log-derivative of |D^3 theta|_2",
        rel(alpha_kp(mid.prognostic(), 3, 2.0)?, fd),
        1e-4,
    ));

    let nu = 0.01;
    for p in [2.0, 4.0] {
        let s = recorded(
            Initial::TaylorGreen2d { amplitude: 1.0 },
            Model::NS2D,
            64,
            nu,
            params(Family::NavierStokes, 1, p, nu),
            StepperConfig::fixed(0.01, 1.0),
        )?;
        let lam = s.column("lambda_p")?;
        let worst = lam.iter().map(|l| (l + 2.0 * nu).abs()).fold(0.0, f64::max);
        out.push(Check::bound(format!("taylor-green lambda_p + 2 nu, p = {p}"), worst, 1e-6));
        out.push(Check::bound(format!("L^p envelope excess, p = {p}"), lp_envelope_excess(&s)?, 1e-4));
        if p == 4.0 {
            let worst = [0.5, 1.0, 2.0]
                .iter()
                .map(|d| representation_residual(&s, 1.0 + d))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            out.push(Check::bound("representation residual, navier-stokes", worst, 1e-4));
        }
    }

    let spec = RandomSpec::new(seed).with_cutoff(6.0);
    let runs = [
        (Model::Euler2D, params(Family::Euler, 3, 2.0, 0.0), "euler"),
        (Model::Sqg, params(Family::Sqg, 3, 2.0, 0.0), "sqg"),
    ];
    for (model, p, label) in runs {
        let cfg = StepperConfig {
            t_end: 0.5,
            cfl_safety: 0.2,
            ..Default::default()
        };
        let s = recorded(Initial::RandomSmooth(spec), model, 64, 0.0, p, cfg)?;
        let worst = [0.5, 1.0, 2.0]
            .iter()
            .map(|d| representation_residual(&s, 0.5 + d))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        out.push(Check::bound(format!("representation residual, {label}"), worst, 1e-3));
    }

    let g3 = Grid::new(3, 16)?;
    let mut worst3 = f64::NEG_INFINITY;
    let mut worst_sqg = f64::NEG_INFINITY;
    for i in 0..20 {
        let s = seed.wrapping_mul(1000).wrapping_add(i);
        let v = random_velocity(&g3, &RandomSpec::new(s).with_cutoff(4.0))?;
        worst3 = worst3.max(alpha_local(&v)?.max_abs() - grad_v_linf(&v)?);
        let th = random_scalar(&grid2(32)?, &RandomSpec::new(s).with_cutoff(6.0))?;
        worst_sqg = worst_sqg.max(alpha_hat_local(&th)?.max_abs() - grad_v_linf(&sqg_velocity(&th)?)?);
    }
    out.push(Check::bound("max |alpha|_inf - |grad v|_inf (3D)", worst3, 1e-12));
    out.push(Check::bound("max |alpha_hat|_inf - |grad v|_inf (sqg)", worst_sqg, 1e-12));
    Ok(out)
}

fn drift(values: &[f64]) -> f64 {
    values.iter().map(|v| rel(*v, values[0])).fold(0.0, f64::max)
}

fn conservation(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let g = grid2(128)?;
    let cfg = StepperConfig {
        cfl_safety: 0.2,
        ..Default::default()
    };
    let spec = RandomSpec::new(seed).with_cutoff(6.0);

    let s0 = Initial::RandomSmooth(spec).state(Model::Euler2D, &g, 0.0)?;
    let mut energy = Vec::new();
    crate::flow::run(s0, &cfg, &mut |s: &FlowState| {
        energy.push(lp_norm(&velocity_of(s)?, 2.0)?);
        Ok(())
    })?;
    out.push(Check::bound("euler energy drift over unit time", drift(&energy), 1e-5));

    let s0 = Initial::RandomSmooth(spec).state(Model::Sqg, &g, 0.0)?;
    let mut norms: [Vec<f64>; 3] = Default::default();
    crate::flow::run(s0, &cfg, &mut |s: &FlowState| {
        let th = s.prognostic();
        norms[0].push(lp_norm(th, 2.0)?);
        norms[1].push(lp_norm(th, 4.0)?);
        norms[2].push(max_abs_interpolant(th)?);
        Ok(())
    })?;
    for (label, v) in ["2", "4", "inf"].iter().zip(&norms) {
        out.push(Check::bound(format!("sqg |theta|_{label} drift over unit time"), drift(v), 1e-5));
    }
    Ok(out)
}

/// Number of non-decreasing steps of the Gagliardo–Nirenberg ratio along `sin(m x₁)`.
pub fn gn_monotonicity_breaks(n: usize) -> Result<usize> {
    let g = grid2(n)?;
    let mut ratios = Vec::new();
    for m in [1.0, 2.0, 4.0, 8.0, 16.0] {
        let f = Field::scalar_from_fn(g, |x| (m * x[0]).sin());
        ratios.push(gn_ratio(&f, 3, 2.0)?.ok_or_else(|| Error::param("degenerate ratio"))?);
    }
    Ok(ratios.windows(2).filter(|w| !(w[1] < w[0])).count())
}

fn constants(fit: &FitConfig) -> Result<Vec<Check>> {
    let fitted = fit_constants(fit)?;
    let held = held_out_check(&fitted, 1.05)?;
    let mut out = vec![
        Check::info("fitted commutator constant", fitted.commutator),
        Check::info("fitted alpha/gradient constant", fitted.alpha_gradient),
        Check::info("fitted gagliardo-nirenberg constant", fitted.gn),
        Check::info("fitted C_kN", fitted.c_kn),
        Check::info("lower-bound threshold K (euler)", fitted.k_euler),
        Check::info("fitted C_kp", fitted.c_kp),
        Check::info("lower-bound threshold K (sqg)", fitted.k_sqg),
    ];
    for (name, count) in &held.violations {
        let label = format!("held-out {name} above 1.05x fit");
        out.push(if name == "commutator" {
            Check::bound(label, *count as f64, 0.0)
        } else {
            Check::info(label, *count as f64)
        });
    }
    out.push(Check::bound("gn ratio monotonicity breaks along sin(m x1)", gn_monotonicity_breaks(128)? as f64, 0.0));
    Ok(out)
}

/// Equation families the fixtures are drawn for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureFamily {
    Euler,
    NavierStokes,
    NavierStokesCritical,
    Sqg,
}

impl FixtureFamily {
    pub const ALL: [FixtureFamily; 4] = [
        FixtureFamily::Euler,
        FixtureFamily::NavierStokes,
        FixtureFamily::NavierStokesCritical,
        FixtureFamily::Sqg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FixtureFamily::Euler => "euler",
            FixtureFamily::NavierStokes => "navier-stokes p>N",
            FixtureFamily::NavierStokesCritical => "navier-stokes p=N",
            FixtureFamily::Sqg => "sqg",
        }
    }

    pub fn draw_params(self, rng: &mut impl Rng) -> SeriesParams {
        match self {
            FixtureFamily::Euler => SeriesParams {
                family: Family::Euler,
                dim: rng.gen_range(2..=3),
                k: rng.gen_range(2..=5),
                p: 2.0,
                nu: 0.0,
            },
            FixtureFamily::NavierStokes => SeriesParams {
                family: Family::NavierStokes,
                dim: 2,
                k: 1,
                p: rng.gen_range(3.0..8.0),
                nu: 0.01,
            },
            FixtureFamily::NavierStokesCritical => {
                let dim = rng.gen_range(2..=3);
                SeriesParams {
                    family: Family::NavierStokes,
                    dim,
                    k: 1,
                    p: dim as f64,
                    nu: 0.01,
                }
            }
            FixtureFamily::Sqg => SeriesParams {
                family: Family::Sqg,
                dim: 2,
                k: rng.gen_range(2..=5),
                p: rng.gen_range(1.5..6.0),
                nu: 0.0,
            },
        }
    }
}

/// Profile kinds used for randomized fixtures.
pub const FIXTURE_KINDS: [&str; 5] = [
    "self_similar",
    "integrable_deficit",
    "supercritical",
    "decaying",
    "log_corrected",
];

/// Random profile of a kind; the sample span keeps `|r|` clear of the equality
/// tolerance wherever the kind is not meant to touch it.
pub fn random_profile(
    kind: &str,
    params: SeriesParams,
    tol: f64,
    rng: &mut impl Rng,
) -> Result<SyntheticProfile> {
    let c = params.scaling()?.c;
    let mut t_star = rng.gen_range(0.5..3.0);
    let mut octaves = 20;
    let kind = match kind {
        "self_similar" => ProfileKind::SelfSimilar {
            oscillation: if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.005..0.05) },
            frequency: rng.gen_range(4.0..10.0),
        },
        "integrable_deficit" => {
            let a: f64 = rng.gen_range(0.5..2.0);
            let mu = rng.gen_range(0.4..0.9);
            let tau_min = (10.0 * tol / a).powf(1.0 / mu);
            octaves = ((t_star / tau_min).log2().floor() as usize).max(2);
            ProfileKind::IntegrableDeficit {
                strength: if rng.gen_bool(0.5) { a } else { -a },
                exponent: mu,
            }
        }
        "supercritical" => ProfileKind::Supercritical {
            excess: rng.gen_range(0.1..1.0),
        },
        "decaying" => {
            if c > 0.0 {
                ProfileKind::Decaying {
                    rate: rng.gen_range(0.0..2.0),
                }
            } else {
                let rate: f64 = rng.gen_range(0.5..2.0);
                octaves = ((t_star * rate / (10.0 * tol)).log2().floor() as usize).max(2);
                ProfileKind::Decaying { rate }
            }
        }
        "log_corrected" => {
            t_star = rng.gen_range(0.05..1.0 / std::f64::consts::E);
            ProfileKind::LogCorrected {
                eps0: rng.gen_range(1.2..4.0),
                gap: rng.gen_range(0.1..1.0),
            }
        }
        other => return Err(Error::param(format!("unknown fixture kind `{other}`"))),
    };
    Ok(SyntheticProfile {
        t_star,
        amplitude: rng.gen_range(0.1..10.0),
        octaves,
        ..SyntheticProfile::new(kind, params)
    })
}

fn fixtures(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let opts = CriteriaOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for fam in FixtureFamily::ALL {
        let mut wrong = 0usize;
        let mut case_ii = 0usize;
        let mut residual = 0.0f64;
        for kind in FIXTURE_KINDS {
            if kind == "log_corrected" && fam == FixtureFamily::NavierStokesCritical {
                continue;
            }
            for _ in 0..50 {
                let p = random_profile(kind, fam.draw_params(&mut rng), opts.equality_tol, &mut rng)?;
                let s = synth(&p)?;
                let v = classify_trichotomy(&s, p.t_star, opts.equality_tol, &opts)?;
                wrong += (v.outcome != p.expected_case()) as usize;
                case_ii += (v.outcome == Outcome::CaseII) as usize;
                residual = residual.max(representation_residual(&s, p.t_star)?);
            }
        }
        out.push(Check::bound(format!("{} trichotomy mislabels", fam.name()), wrong as f64, 0.0));
        if fam == FixtureFamily::NavierStokesCritical {
            out.push(Check::bound("p=N case_ii labels", case_ii as f64, 0.0));
        }
        out.push(Check::bound(format!("{} fixture representation residual", fam.name()), residual, 1e-9));
    }

    let e = std::f64::consts::E;
    let expect = [
        (OsgoodClass::Osgood, osgood_check_fn(|s| s * s, DEFAULT_S_MAX, DEFAULT_OSGOOD_SAMPLES)?),
        (
            OsgoodClass::Osgood,
            osgood_check_fn(|s| s * (s + e).ln().powi(2), DEFAULT_S_MAX, DEFAULT_OSGOOD_SAMPLES)?,
        ),
        (OsgoodClass::NotOsgood, osgood_check_fn(|s| s, DEFAULT_S_MAX, DEFAULT_OSGOOD_SAMPLES)?),
        (OsgoodClass::NotOsgood, osgood_check_fn(|_| 1.0, DEFAULT_S_MAX, DEFAULT_OSGOOD_SAMPLES)?),
    ];
    let wrong = expect.iter().filter(|(c, r)| *c != r.class).count();
    out.push(Check::bound("osgood classification errors", wrong as f64, 0.0));
    out.push(Check::bound(
        "osgood partial integral of s^-2 vs 1",
        (expect[0].1.partial_integral - 1.0).abs(),
        1e-6,
    ));

    let mut worst = 0.0f64;
    for fam in [FixtureFamily::Euler, FixtureFamily::NavierStokes, FixtureFamily::Sqg] {
        let p = SyntheticProfile {
            samples_per_octave: 256,
            ..SyntheticProfile::new(
                ProfileKind::Supercritical {
                    excess: rng.gen_range(0.2..0.8),
                },
                fam.draw_params(&mut rng),
            )
        };
        let s = synth(&p)?;
        let weights: [(fn(f64) -> f64, fn(f64, f64) -> f64); 3] = [
            (|s| s * s, |a, b| 1.0 / a - 1.0 / b),
            (|s| s.powf(1.5), |a, b| 2.0 * (a.powf(-0.5) - b.powf(-0.5))),
            (|s| s.exp(), |a, b| (-a).exp() - (-b).exp()),
        ];
        for (g, anti) in weights {
            let oi = osgood_weighted_integral(&s, p.t_star, g, &opts)?;
            worst = worst.max((oi.substituted - anti(oi.s1, oi.s_end)).abs());
        }
    }
    out.push(Check::bound("osgood-weighted integral vs substitution", worst, 1e-4));

    let p = SyntheticProfile {
        t_star: 0.25,
        ..SyntheticProfile::new(
            ProfileKind::LogCorrected { eps0: 2.0, gap: 0.5 },
            FixtureFamily::Euler.draw_params(&mut rng),
        )
    };
    let s = synth(&p)?;
    let v = eval_log_corrected(&s, p.t_star, 2.0, LogVariant::Rate, &opts)?;
    let expected: Vec<usize> = (1..=p.octaves).map(|n| n * p.samples_per_octave).collect();
    let missed = expected.iter().filter(|i| !v.indices.contains(i)).count()
        + v.indices.iter().filter(|i| !expected.contains(i)).count();
    out.push(Check::bound("log-corrected sequence index mismatches", missed as f64, 0.0));
    Ok(out)
}
