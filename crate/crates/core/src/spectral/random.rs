//! Seeded band-limited random fields with a power-law amplitude spectrum and random phases.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fft::inverse_component;
use super::field::Field;
use super::grid::Grid;
use super::ops::{leray_project, perp_gradient};
use crate::error::{Error, Result};

/// Shape of a random smooth field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomSpec {
    pub seed: u64,
    /// Coefficient magnitudes fall off like `|ξ|^{-slope}`.
    pub slope: f64,
    /// Largest Euclidean frequency with nonzero energy.
    pub cutoff: f64,
    /// Root-mean-square of the generated scalar.
    pub amplitude: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec::new(0)
    }
}

impl RandomSpec {
    pub fn new(seed: u64) -> Self {
        RandomSpec {
            seed,
            slope: 3.0,
            cutoff: 8.0,
            amplitude: 1.0,
        }
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_slope(mut self, slope: f64) -> Self {
        self.slope = slope;
        self
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.cutoff >= 1.0) {
            return Err(Error::param("random field cutoff must be >= 1"));
        }
        if self.cutoff > grid.dealias_cutoff() as f64 {
            return Err(Error::param(format!(
                "random field cutoff {} exceeds the dealiased band |ξ| <= {}",
                self.cutoff,
                grid.dealias_cutoff()
            )));
        }
        if !self.slope.is_finite() || !self.amplitude.is_finite() {
            return Err(Error::param("random field slope and amplitude must be finite"));
        }
        Ok(())
    }
}

fn is_canonical(k: [i64; 3]) -> bool {
    for &c in &k {
        if c != 0 {
            return c > 0;
        }
    }
    false
}

/// Mean-free random scalar with `|ξ| <= cutoff`.
pub fn random_scalar(grid: &Grid, spec: &RandomSpec) -> Result<Field> {
    spec.validate(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut energy = 0.0;
    for slot in 0..grid.len() {
        let k = grid.wavevector(slot);
        if !is_canonical(k) {
            continue;
        }
        let mag = ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt();
        if mag > spec.cutoff {
            continue;
        }
        let phase: f64 = rng.gen_range(0.0..2.0 * PI);
        let z = Complex64::from_polar(mag.powf(-spec.slope), phase);
        let partner = grid
            .slot_of([-k[0], -k[1], -k[2]])
            .expect("cutoff keeps modes inside the grid");
        coeffs[slot] = z;
        coeffs[partner] = z.conj();
        energy += 2.0 * z.norm_sqr();
    }
    let scale = if energy > 0.0 {
        spec.amplitude / energy.sqrt()
    } else {
        0.0
    };
    for z in &mut coeffs {
        *z *= scale;
    }
    Ok(inverse_component(grid, coeffs))
}

/// Divergence-free random velocity.
///
/// In 2D it is the perpendicular gradient of a random stream function; in 3D the
/// Leray projection of three independent random components.
pub fn random_velocity(grid: &Grid, spec: &RandomSpec) -> Result<Field> {
    if grid.dim() == 2 {
        let psi = random_scalar(grid, spec)?;
        return perp_gradient(&psi);
    }
    let parts: Vec<Field> = (0..3)
        .map(|c| {
            let mut s = *spec;
            s.seed = spec.seed.wrapping_mul(3).wrapping_add(c as u64 + 1);
            random_scalar(grid, &s)
        })
        .collect::<Result<_>>()?;
    leray_project(&Field::stack(&parts)?)
}
