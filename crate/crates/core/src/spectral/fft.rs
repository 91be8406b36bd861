//! Multidimensional complex FFTs on the periodic grid, built from 1D rustfft plans.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{Field, Spectrum};
use super::grid::Grid;
use crate::error::{Error, Result};

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANS: RefCell<HashMap<usize, Plans>> = RefCell::new(HashMap::new());
}

fn plans(n: usize) -> Plans {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
            })
            .clone()
    })
}

/// In-place unnormalised transform of one component along every axis.
fn transform_component(grid: &Grid, data: &mut [Complex64], inverse: bool) {
    let n = grid.n();
    let (fwd, inv) = plans(n);
    let plan = if inverse { inv } else { fwd };
    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];

    for axis in 0..grid.dim() {
        let stride = n.pow((grid.dim() - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_exact_mut(n) {
                plan.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (j, z) in line.iter_mut().enumerate() {
                    *z = data[start + j * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (j, z) in line.iter().enumerate() {
                    data[start + j * stride] = *z;
                }
            }
        }
    }
}

/// Forward transform with `1/n^dim` normalisation. Non-finite input is rejected.
pub fn transform(f: &Field) -> Result<Spectrum> {
    if !f.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(transform_unchecked(f))
}

pub(crate) fn transform_unchecked(f: &Field) -> Spectrum {
    let grid = *f.grid();
    let scale = 1.0 / grid.len() as f64;
    let mut coeffs: Vec<Complex64> = f
        .values()
        .iter()
        .map(|&v| Complex64::new(v * scale, 0.0))
        .collect();
    for chunk in coeffs.chunks_exact_mut(grid.len()) {
        transform_component(&grid, chunk, false);
    }
    Spectrum::from_parts(grid, f.components(), coeffs)
}

/// Inverse transform; the imaginary residue of a non-Hermitian input is dropped.
pub fn inverse(s: &Spectrum) -> Field {
    let grid = *s.grid();
    let mut work = s.coeffs().to_vec();
    for chunk in work.chunks_exact_mut(grid.len()) {
        transform_component(&grid, chunk, true);
    }
    Field::from_parts(grid, s.components(), work.into_iter().map(|z| z.re).collect())
}

/// Scalar field from a single component's coefficients.
pub(crate) fn inverse_component(grid: &Grid, coeffs: Vec<Complex64>) -> Field {
    inverse(&Spectrum::from_parts(*grid, 1, coeffs))
}
