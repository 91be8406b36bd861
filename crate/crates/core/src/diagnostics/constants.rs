//! Empirical constants of the commutator, Gagliardo–Nirenberg and growth-rate bounds,
//! fitted as suprema over a seeded family of random smooth fields.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quantities::{alpha_gradient_ratio, alpha_k, alpha_kp, commutator_ratio, gn_ratio};
use super::series::{Family, SeriesParams};
use crate::error::{Error, Result};
use crate::spectral::{
    dk_seminorm_l2, dk_tensor, lp_norm, random_scalar, random_velocity, Grid, RandomSpec,
};

/// Family of random fields used for fitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub n: usize,
    pub k: usize,
    /// Exponent used for the SQG constant.
    pub p: f64,
    pub family_size: usize,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            n: 64,
            k: 3,
            p: 2.0,
            family_size: 100,
            seed: 2024,
        }
    }
}

/// Fitted suprema. `k_euler` and `k_sqg` are the lower-bound thresholds derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FittedConstants {
    /// Commutator ratio sup.
    pub commutator: f64,
    /// `sup |α_k| / ‖∇v‖_∞`.
    pub alpha_gradient: f64,
    /// Gagliardo–Nirenberg ratio sup at `p = 2`.
    pub gn: f64,
    /// `C_{k,N} = sup α_k / (‖D^k v‖^a ‖v‖^{1−a})`.
    pub c_kn: f64,
    /// `K = k / ((N+2) C_{k,N})`.
    pub k_euler: f64,
    /// `C_{k,p} = sup α_{k,p} / (‖D^kθ‖_p^a ‖θ‖_p^{1−a})`.
    pub c_kp: f64,
    /// `K = kp / (2(p+2) C_{k,p})`.
    pub k_sqg: f64,
    pub config: FitConfig,
}

impl FittedConstants {
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        [
            ("commutator", self.commutator),
            ("alpha_gradient", self.alpha_gradient),
            ("gn", self.gn),
            ("c_kn", self.c_kn),
            ("k_euler", self.k_euler),
            ("c_kp", self.c_kp),
            ("k_sqg", self.k_sqg),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    /// Lower-bound threshold for a family, if one is fitted.
    pub fn threshold(&self, family: Family) -> Option<f64> {
        match family {
            Family::Euler => Some(self.k_euler),
            Family::Sqg => Some(self.k_sqg),
            Family::NavierStokes => None,
        }
    }
}

/// Ratios of one family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemberRatios {
    pub seed: u64,
    pub commutator: Option<f64>,
    pub alpha_gradient: Option<f64>,
    pub gn: Option<f64>,
    pub c_kn: Option<f64>,
    pub c_kp: Option<f64>,
}

/// Seeds of the fitting family are even, held-out seeds odd.
fn member_seed(base: u64, i: usize, held_out: bool) -> u64 {
    base.wrapping_mul(1 << 24)
        .wrapping_add(2 * i as u64)
        .wrapping_add(held_out as u64)
}

fn member_spec(seed: u64, grid: &Grid) -> RandomSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed);
    // products must stay resolved without truncation
    let max_cut = ((grid.n() / 4) as f64 - 1.0).clamp(2.0, 10.0);
    let cutoff = rng.gen_range(2.0..=max_cut);
    let slope = rng.gen_range(1.5..4.0);
    RandomSpec::new(seed).with_cutoff(cutoff).with_slope(slope)
}

pub fn member_ratios(cfg: &FitConfig, seed: u64) -> Result<MemberRatios> {
    let grid = Grid::new(2, cfg.n)?;
    let spec = member_spec(seed, &grid);
    let f = random_scalar(&grid, &spec)?;
    let g = random_scalar(&grid, &RandomSpec { seed: seed ^ 0xa5a5_a5a5, ..spec })?;
    let v = random_velocity(&grid, &spec)?;
    let k = cfg.k;

    let euler = SeriesParams {
        family: Family::Euler,
        dim: 2,
        k,
        p: 2.0,
        nu: 0.0,
    }
    .scaling()?;
    let x = dk_seminorm_l2(&v, k)?.powf(euler.a) * lp_norm(&v, 2.0)?.powf(1.0 - euler.a);
    let c_kn = (x > 0.0).then(|| alpha_k(&v, k).map(|a| a / x)).transpose()?;

    let sqg = SeriesParams {
        family: Family::Sqg,
        dim: 2,
        k,
        p: cfg.p,
        nu: 0.0,
    }
    .scaling()?;
    let xs = lp_norm(&dk_tensor(&f, k)?, cfg.p)?.powf(sqg.a) * lp_norm(&f, cfg.p)?.powf(1.0 - sqg.a);
    let c_kp = (xs > 0.0).then(|| alpha_kp(&f, k, cfg.p).map(|a| a / xs)).transpose()?;

    Ok(MemberRatios {
        seed,
        commutator: commutator_ratio(&f, &g, k, 2.0)?,
        alpha_gradient: alpha_gradient_ratio(&v, k)?,
        gn: gn_ratio(&f, k, 2.0)?,
        c_kn,
        c_kp,
    })
}

/// Ratios over the fitting family (`held_out = false`) or the disjoint held-out family.
pub fn family_ratios(cfg: &FitConfig, held_out: bool) -> Result<Vec<MemberRatios>> {
    if cfg.family_size == 0 {
        return Err(Error::param("family_size must be >= 1"));
    }
    (0..cfg.family_size)
        .into_par_iter()
        .map(|i| member_ratios(cfg, member_seed(cfg.seed, i, held_out)))
        .collect()
}

fn sup(values: impl Iterator<Item = Option<f64>>) -> f64 {
    values.flatten().fold(f64::NEG_INFINITY, f64::max)
}

pub fn fit_constants(cfg: &FitConfig) -> Result<FittedConstants> {
    let r = family_ratios(cfg, false)?;
    let commutator = sup(r.iter().map(|m| m.commutator));
    let alpha_gradient = sup(r.iter().map(|m| m.alpha_gradient));
    let gn = sup(r.iter().map(|m| m.gn));
    let c_kn = sup(r.iter().map(|m| m.c_kn));
    let c_kp = sup(r.iter().map(|m| m.c_kp));
    let k = cfg.k as f64;
    let n = 2.0;
    Ok(FittedConstants {
        commutator,
        alpha_gradient,
        gn,
        c_kn,
        k_euler: k / ((n + 2.0) * c_kn),
        c_kp,
        k_sqg: k * cfg.p / (2.0 * (cfg.p + 2.0) * c_kp),
        config: *cfg,
    })
}

/// Largest held-out ratio relative to each fitted constant, and how many held-out
/// members exceed `factor` times the constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeldOutReport {
    pub factor: f64,
    pub worst: BTreeMap<String, f64>,
    pub violations: BTreeMap<String, usize>,
}

impl HeldOutReport {
    pub fn total_violations(&self) -> usize {
        self.violations.values().sum()
    }
}

pub fn held_out_check(fitted: &FittedConstants, factor: f64) -> Result<HeldOutReport> {
    let r = family_ratios(&fitted.config, true)?;
    let mut worst = BTreeMap::new();
    let mut violations = BTreeMap::new();
    let checks: [(&str, f64, fn(&MemberRatios) -> Option<f64>); 5] = [
        ("commutator", fitted.commutator, |m| m.commutator),
        ("alpha_gradient", fitted.alpha_gradient, |m| m.alpha_gradient),
        ("gn", fitted.gn, |m| m.gn),
        ("c_kn", fitted.c_kn, |m| m.c_kn),
        ("c_kp", fitted.c_kp, |m| m.c_kp),
    ];
    for (name, c, get) in checks {
        let vals: Vec<f64> = r.iter().filter_map(get).collect();
        worst.insert(name.to_string(), sup(vals.iter().map(|v| Some(v / c))));
        violations.insert(name.to_string(), vals.iter().filter(|v| **v > factor * c).count());
    }
    Ok(HeldOutReport {
        factor,
        worst,
        violations,
    })
}
