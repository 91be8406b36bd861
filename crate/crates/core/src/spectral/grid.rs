use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform discretisation of the 2π-periodic torus in two or three dimensions.
///
/// Samples are stored row-major with axis 0 (the `x₁` direction) varying
/// slowest. Frequencies along each axis follow the FFT ordering
/// `0, 1, …, n/2−1, −n/2, …, −1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
}

impl Grid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per dimension must be a power of two >= 8, got {n}"
            )));
        }
        Ok(Grid { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        2.0 * PI
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Total number of grid points, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of a single cell, `(2π/n)^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Torus volume `(2π)^dim`.
    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.dim as i32)
    }

    /// Signed integer frequency of FFT index `i` along one axis, in `[−n/2, n/2)`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Frequency used by derivative and singular-integral multipliers.
    ///
    /// The Nyquist index carries no well-defined real derivative, so it maps to 0.
    pub fn derivative_wavenumber(&self, i: usize) -> f64 {
        if i == self.n / 2 {
            0.0
        } else {
            self.wavenumber(i) as f64
        }
    }

    /// Per-axis indices of a flat offset. Unused trailing axes are 0.
    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            2 => [flat / n, flat % n, 0],
            _ => [flat / (n * n), (flat / n) % n, flat % n],
        }
    }

    pub fn ravel(&self, idx: [usize; 3]) -> usize {
        let n = self.n;
        match self.dim {
            2 => idx[0] * n + idx[1],
            _ => (idx[0] * n + idx[1]) * n + idx[2],
        }
    }

    /// Physical coordinates of grid point `flat`.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let h = self.spacing();
        let idx = self.unravel(flat);
        let mut x = [0.0; 3];
        for d in 0..self.dim {
            x[d] = idx[d] as f64 * h;
        }
        x
    }

    /// Integer wavevector of spectral slot `flat`.
    pub fn wavevector(&self, flat: usize) -> [i64; 3] {
        let idx = self.unravel(flat);
        let mut k = [0i64; 3];
        for d in 0..self.dim {
            k[d] = self.wavenumber(idx[d]);
        }
        k
    }

    /// Derivative wavevector of spectral slot `flat` (Nyquist components zeroed).
    pub fn derivative_wavevector(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut k = [0.0; 3];
        for d in 0..self.dim {
            k[d] = self.derivative_wavenumber(idx[d]);
        }
        k
    }

    /// Flat spectral slot holding wavevector `k`, if it is representable.
    pub fn slot_of(&self, k: [i64; 3]) -> Option<usize> {
        let n = self.n as i64;
        let mut idx = [0usize; 3];
        for d in 0..self.dim {
            if k[d] < -n / 2 || k[d] >= n / 2 {
                return None;
            }
            idx[d] = k[d].rem_euclid(n) as usize;
        }
        Some(self.ravel(idx))
    }

    /// Largest frequency magnitude kept by the two-thirds truncation.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }
}
