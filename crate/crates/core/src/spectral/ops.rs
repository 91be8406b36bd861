//! Differential, singular-integral and projection operators acting through Fourier multipliers.

use num_complex::Complex64;

use super::fft::{inverse, inverse_component, transform, transform_unchecked};
use super::field::{Field, Spectrum};
use super::grid::Grid;
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative tolerance on the grid mean below which a vorticity counts as mean-free.
pub const MEAN_FREE_TOL: f64 = 1e-9;

fn norm2(k: [f64; 3]) -> f64 {
    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
}

/// Multiplies one component's coefficients by `m(ξ)`.
pub(crate) fn multiply(
    grid: &Grid,
    coeffs: &[Complex64],
    m: impl Fn([f64; 3]) -> Complex64,
) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .map(|(slot, &z)| z * m(grid.derivative_wavevector(slot)))
        .collect()
}

/// Multiplier `Π_d (iξ_d)^{β_d}` of the partial derivative `∂^β`.
pub(crate) fn derivative_multiplier(beta: &[usize], k: [f64; 3]) -> Complex64 {
    let order: usize = beta.iter().sum();
    let mut real = 1.0;
    for (d, &b) in beta.iter().enumerate() {
        real *= k[d].powi(b as i32);
    }
    I.powu(order as u32) * real
}

/// `∂^β f` applied to every component.
pub fn derivative(f: &Field, beta: &[usize]) -> Result<Field> {
    let grid = *f.grid();
    if beta.len() != grid.dim() {
        return Err(Error::Shape(format!(
            "multi-index has {} entries on a {}D grid",
            beta.len(),
            grid.dim()
        )));
    }
    let spec = transform(f)?;
    Ok(derivative_of_spectrum(&spec, beta))
}

pub(crate) fn derivative_of_spectrum(spec: &Spectrum, beta: &[usize]) -> Field {
    let grid = *spec.grid();
    let mut out = Vec::with_capacity(spec.components() * grid.len());
    for c in 0..spec.components() {
        let d = multiply(&grid, spec.component(c), |k| derivative_multiplier(beta, k));
        out.extend(inverse_component(&grid, d).into_values());
    }
    Field::from_parts(grid, spec.components(), out)
}

/// All multi-indices `β` with `|β| = k` in `dim` dimensions, lexicographically descending.
pub fn multi_indices(dim: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for b in (0..=left).rev() {
            prefix.push(b);
            rec(dim, left - b, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, k, &mut Vec::new(), &mut out);
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Multinomial weight `k!/β!`.
pub fn multinomial(beta: &[usize]) -> f64 {
    let k: usize = beta.iter().sum();
    factorial(k) / beta.iter().map(|&b| factorial(b)).product::<f64>()
}

/// `∫ D^k f · D^k g dx` for single components given by their coefficients.
///
/// Exact for trigonometric polynomials: `(2π)^dim Σ_ξ |ξ|^{2k} Re(f̂ conj ĝ)`.
pub fn sobolev_inner(grid: &Grid, a: &[Complex64], b: &[Complex64], k: usize) -> f64 {
    let sum: f64 = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(slot, (x, y))| {
            let w = norm2(grid.derivative_wavevector(slot)).powi(k as i32);
            w * (x * y.conj()).re
        })
        .sum();
    grid.volume() * sum
}

/// `‖D^k f‖_{L²}` summed over components, via the `|ξ|^k` multiplier.
pub fn dk_seminorm_l2(f: &Field, k: usize) -> Result<f64> {
    let spec = transform(f)?;
    Ok(dk_seminorm_l2_spectral(&spec, k))
}

pub(crate) fn dk_seminorm_l2_spectral(spec: &Spectrum, k: usize) -> f64 {
    let grid = *spec.grid();
    (0..spec.components())
        .map(|c| {
            let comp = spec.component(c);
            if k == 0 {
                grid.volume() * comp.iter().map(|z| z.norm_sqr()).sum::<f64>()
            } else {
                sobolev_inner(&grid, comp, comp, k)
            }
        })
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

/// The k-th derivative tensor: one component `√(k!/β!) ∂^β f_c` per source component
/// `c` and multi-index `|β| = k`, so the pointwise Euclidean norm is `|D^k f|`.
pub fn dk_tensor(f: &Field, k: usize) -> Result<Field> {
    if k == 0 {
        return Err(Error::param("dk_tensor needs k >= 1"));
    }
    let spec = transform(f)?;
    Ok(dk_tensor_spectral(&spec, k))
}

pub(crate) fn dk_tensor_spectral(spec: &Spectrum, k: usize) -> Field {
    let grid = *spec.grid();
    let betas = multi_indices(grid.dim(), k);
    let mut out = Vec::with_capacity(spec.components() * betas.len() * grid.len());
    for c in 0..spec.components() {
        for beta in &betas {
            let w = multinomial(beta).sqrt();
            let d = multiply(&grid, spec.component(c), |kv| {
                derivative_multiplier(beta, kv) * w
            });
            out.extend(inverse_component(&grid, d).into_values());
        }
    }
    Field::from_parts(grid, spec.components() * betas.len(), out)
}

/// Grid quadrature of `‖f‖_{L^p}` using the pointwise Euclidean magnitude.
/// `p = f64::INFINITY` gives the largest sampled magnitude.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::param(format!("L^p norm needs p >= 1, got {p}")));
    }
    Ok(lp_of_magnitudes(f.grid(), &f.magnitude(), p))
}

pub(crate) fn lp_of_magnitudes(grid: &Grid, mags: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return mags.iter().cloned().fold(0.0, f64::max);
    }
    let sum: f64 = if p == 2.0 {
        mags.iter().map(|m| m * m).sum()
    } else {
        mags.iter().map(|m| m.powf(p)).sum()
    };
    (sum * grid.cell_volume()).powf(1.0 / p)
}

/// Riesz transform `R_j` with multiplier `iξ_j/|ξ|`; the mean maps to zero.
pub fn riesz(f: &Field, j: usize) -> Result<Field> {
    f.require_scalar("riesz")?;
    let grid = *f.grid();
    if j >= grid.dim() {
        return Err(Error::param(format!("direction {j} out of range")));
    }
    let spec = transform(f)?;
    Ok(riesz_spectral(&grid, spec.component(0), j))
}

pub(crate) fn riesz_spectral(grid: &Grid, coeffs: &[Complex64], j: usize) -> Field {
    inverse_component(
        grid,
        multiply(grid, coeffs, |k| {
            let m = norm2(k).sqrt();
            if m == 0.0 {
                ZERO
            } else {
                I * (k[j] / m)
            }
        }),
    )
}

/// `(−Δ)^{−1/2}` with multiplier `1/|ξ|`; the mean maps to zero.
pub fn inv_sqrt_laplacian(f: &Field) -> Result<Field> {
    f.require_scalar("inv_sqrt_laplacian")?;
    let grid = *f.grid();
    let spec = transform(f)?;
    Ok(inverse_component(
        &grid,
        multiply(&grid, spec.component(0), |k| {
            let m = norm2(k).sqrt();
            if m == 0.0 {
                ZERO
            } else {
                Complex64::new(1.0 / m, 0.0)
            }
        }),
    ))
}

pub(crate) fn check_mean_free(f: &Field) -> Result<()> {
    let mean = f.mean(0);
    if mean.abs() > MEAN_FREE_TOL * f.max_abs().max(1.0) {
        return Err(Error::NonzeroMean { mean });
    }
    Ok(())
}

/// Velocity `v = ∇⊥Δ^{−1}ω` of a mean-free 2D vorticity, so that `curl v = ω` and `div v = 0`.
pub fn biot_savart_2d(omega: &Field) -> Result<Field> {
    omega.require_scalar("biot_savart_2d")?;
    if omega.grid().dim() != 2 {
        return Err(Error::Shape("biot_savart_2d needs a 2D grid".into()));
    }
    check_mean_free(omega)?;
    let spec = transform(omega)?;
    Ok(biot_savart_spectral(omega.grid(), spec.component(0)))
}

pub(crate) fn biot_savart_spectral(grid: &Grid, w: &[Complex64]) -> Field {
    let v1 = multiply(grid, w, |k| {
        let k2 = norm2(k);
        if k2 == 0.0 {
            ZERO
        } else {
            I * (k[1] / k2)
        }
    });
    let v2 = multiply(grid, w, |k| {
        let k2 = norm2(k);
        if k2 == 0.0 {
            ZERO
        } else {
            -I * (k[0] / k2)
        }
    });
    let mut values = inverse_component(grid, v1).into_values();
    values.extend(inverse_component(grid, v2).into_values());
    Field::from_parts(*grid, 2, values)
}

/// Scalar curl `∂₁v₂ − ∂₂v₁` of a 2D vector field.
pub fn curl_2d(v: &Field) -> Result<Field> {
    v.require_vector("curl_2d")?;
    if v.grid().dim() != 2 {
        return Err(Error::Shape("curl_2d needs a 2D grid".into()));
    }
    let grid = *v.grid();
    let spec = transform(v)?;
    let a = multiply(&grid, spec.component(1), |k| I * k[0]);
    let b = multiply(&grid, spec.component(0), |k| I * k[1]);
    let c: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    Ok(inverse_component(&grid, c))
}

/// Vorticity `∇×v` of a 3D vector field.
pub fn curl_3d(v: &Field) -> Result<Field> {
    v.require_vector("curl_3d")?;
    if v.grid().dim() != 3 {
        return Err(Error::Shape("curl_3d needs a 3D grid".into()));
    }
    let g = velocity_gradient(v)?;
    let len = v.grid().len();
    let d = |i: usize, j: usize| g.component(i * 3 + j);
    let mut values = vec![0.0; 3 * len];
    for p in 0..len {
        values[p] = d(2, 1)[p] - d(1, 2)[p];
        values[len + p] = d(0, 2)[p] - d(2, 0)[p];
        values[2 * len + p] = d(1, 0)[p] - d(0, 1)[p];
    }
    Ok(Field::from_parts(*v.grid(), 3, values))
}

/// Spectral divergence of a vector field.
pub fn divergence(v: &Field) -> Result<Field> {
    v.require_vector("divergence")?;
    let grid = *v.grid();
    let spec = transform(v)?;
    Ok(inverse_component(&grid, divergence_spectral(&spec)))
}

pub(crate) fn divergence_spectral(spec: &Spectrum) -> Vec<Complex64> {
    let grid = *spec.grid();
    let mut acc = vec![ZERO; grid.len()];
    for c in 0..grid.dim() {
        for (slot, z) in spec.component(c).iter().enumerate() {
            acc[slot] += I * grid.derivative_wavevector(slot)[c] * z;
        }
    }
    acc
}

/// Gradient of a scalar field.
pub fn gradient(f: &Field) -> Result<Field> {
    f.require_scalar("gradient")?;
    let spec = transform(f)?;
    Ok(gradient_spectral(f.grid(), spec.component(0)))
}

pub(crate) fn gradient_spectral(grid: &Grid, coeffs: &[Complex64]) -> Field {
    let mut values = Vec::with_capacity(grid.dim() * grid.len());
    for d in 0..grid.dim() {
        values.extend(inverse_component(grid, multiply(grid, coeffs, |k| I * k[d])).into_values());
    }
    Field::from_parts(*grid, grid.dim(), values)
}

/// Velocity gradient with component `i·dim + j` holding `∂_j v_i`.
pub fn velocity_gradient(v: &Field) -> Result<Field> {
    v.require_vector("velocity_gradient")?;
    let spec = transform(v)?;
    Ok(velocity_gradient_spectral(&spec))
}

pub(crate) fn velocity_gradient_spectral(spec: &Spectrum) -> Field {
    let grid = *spec.grid();
    let dim = grid.dim();
    let mut values = Vec::with_capacity(dim * dim * grid.len());
    for i in 0..dim {
        for j in 0..dim {
            values.extend(
                inverse_component(&grid, multiply(&grid, spec.component(i), |k| I * k[j]))
                    .into_values(),
            );
        }
    }
    Field::from_parts(grid, dim * dim, values)
}

/// Orthogonal projection onto divergence-free fields, `û − ξ(ξ·û)/|ξ|²`.
pub fn leray_project(u: &Field) -> Result<Field> {
    u.require_vector("leray_project")?;
    let spec = transform(u)?;
    Ok(inverse(&leray_spectral(&spec)))
}

pub(crate) fn leray_spectral(spec: &Spectrum) -> Spectrum {
    let grid = *spec.grid();
    let dim = grid.dim();
    let mut out = spec.clone();
    for slot in 0..grid.len() {
        let k = grid.derivative_wavevector(slot);
        let k2 = norm2(k);
        if k2 == 0.0 {
            continue;
        }
        let mut dot = ZERO;
        for c in 0..dim {
            dot += spec.component(c)[slot] * k[c];
        }
        for c in 0..dim {
            out.component_mut(c)[slot] -= dot * (k[c] / k2);
        }
    }
    out
}

/// `∇⊥f = (−∂₂f, ∂₁f)` of a 2D scalar.
pub fn perp_gradient(f: &Field) -> Result<Field> {
    f.require_scalar("perp_gradient")?;
    if f.grid().dim() != 2 {
        return Err(Error::Shape("perp_gradient needs a 2D grid".into()));
    }
    let grid = *f.grid();
    let spec = transform(f)?;
    let a = multiply(&grid, spec.component(0), |k| -I * k[1]);
    let b = multiply(&grid, spec.component(0), |k| I * k[0]);
    let mut values = inverse_component(&grid, a).into_values();
    values.extend(inverse_component(&grid, b).into_values());
    Ok(Field::from_parts(grid, 2, values))
}

/// Zeroes every mode with some `|ξ_d| > n/3`.
pub fn dealias(s: &Spectrum) -> Spectrum {
    let mut out = s.clone();
    dealias_in_place(&mut out);
    out
}

pub(crate) fn dealias_in_place(s: &mut Spectrum) {
    let grid = *s.grid();
    for c in 0..s.components() {
        dealias_component(&grid, s.component_mut(c));
    }
}

pub(crate) fn dealias_component(grid: &Grid, coeffs: &mut [Complex64]) {
    let cut = grid.dealias_cutoff();
    for (slot, z) in coeffs.iter_mut().enumerate() {
        let k = grid.wavevector(slot);
        if k[..grid.dim()].iter().any(|kd| kd.abs() > cut) {
            *z = ZERO;
        }
    }
}

/// Truncated spectrum of the pointwise product `a·b` of two sampled scalars.
pub(crate) fn dealiased_product(grid: &Grid, a: &[f64], b: &[f64]) -> Vec<Complex64> {
    let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let mut spec = transform_unchecked(&Field::from_parts(*grid, 1, prod));
    dealias_component(grid, spec.component_mut(0));
    spec.component(0).to_vec()
}

/// Pressure `π = Σ_{j,k} R_j R_k (v_j v_k)`, solving `Δπ = −div div(v⊗v)` with zero mean.
pub fn pressure_from_velocity(v: &Field) -> Result<Field> {
    v.require_vector("pressure_from_velocity")?;
    if !v.is_finite() {
        return Err(Error::NonFinite);
    }
    let grid = *v.grid();
    let dim = grid.dim();
    let mut acc = vec![ZERO; grid.len()];
    for j in 0..dim {
        for k in j..dim {
            let prod = dealiased_product(&grid, v.component(j), v.component(k));
            let sym = if j == k { 1.0 } else { 2.0 };
            for (slot, z) in prod.iter().enumerate() {
                let kv = grid.derivative_wavevector(slot);
                let k2 = norm2(kv);
                if k2 > 0.0 {
                    acc[slot] -= z * (sym * kv[j] * kv[k] / k2);
                }
            }
        }
    }
    Ok(inverse_component(&grid, acc))
}

/// Largest magnitude of a scalar's trigonometric interpolant.
///
/// Starts at the largest sample and polishes with Newton steps on the interpolant,
/// so the result does not depend on where the extremum sits between grid points.
/// Nyquist modes are ignored.
pub fn max_abs_interpolant(f: &Field) -> Result<f64> {
    f.require_scalar("max_abs_interpolant")?;
    let grid = *f.grid();
    let dim = grid.dim();
    let spec = transform(f)?;
    let half = (grid.n() / 2) as i64;
    let modes: Vec<([f64; 3], Complex64)> = spec
        .component(0)
        .iter()
        .enumerate()
        .filter(|(slot, z)| {
            z.norm() > 0.0 && grid.wavevector(*slot)[..dim].iter().all(|k| k.abs() != half)
        })
        .map(|(slot, z)| {
            let k = grid.wavevector(slot);
            ([k[0] as f64, k[1] as f64, k[2] as f64], *z)
        })
        .collect();

    // value, gradient and Hessian of the interpolant at x
    let eval = |x: [f64; 3]| {
        let mut val = 0.0;
        let mut grad = [0.0; 3];
        let mut hess = [[0.0; 3]; 3];
        for (k, z) in &modes {
            let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
            let e = *z * Complex64::new(phase.cos(), phase.sin());
            val += e.re;
            for a in 0..dim {
                grad[a] -= k[a] * e.im;
                for b in 0..dim {
                    hess[a][b] -= k[a] * k[b] * e.re;
                }
            }
        }
        (val, grad, hess)
    };

    let (start, _) = f
        .component(0)
        .iter()
        .enumerate()
        .fold((0usize, -1.0), |(bi, bv), (i, v)| {
            if v.abs() > bv {
                (i, v.abs())
            } else {
                (bi, bv)
            }
        });
    let mut x = grid.point(start);
    let (mut best, _, _) = eval(x);
    let h = grid.spacing();
    for _ in 0..30 {
        let (_, g, hm) = eval(x);
        let step = match solve_small(dim, hm, g) {
            Some(s) => s,
            None => break,
        };
        let len = step[..dim].iter().map(|s| s * s).sum::<f64>().sqrt();
        if len > h {
            break;
        }
        let mut next = x;
        for a in 0..dim {
            next[a] -= step[a];
        }
        let (val, _, _) = eval(next);
        if val.abs() < best.abs() {
            break;
        }
        x = next;
        best = val;
        if len < 1e-14 {
            break;
        }
    }
    Ok(best.abs().max(f.max_abs()))
}

fn solve_small(dim: usize, m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    if dim == 2 {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        Some([
            (b[0] * m[1][1] - m[0][1] * b[1]) / det,
            (m[0][0] * b[1] - b[0] * m[1][0]) / det,
            0.0,
        ])
    } else {
        let det = |a: [[f64; 3]; 3]| {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        };
        let d = det(m);
        if d.abs() < 1e-300 {
            return None;
        }
        let mut out = [0.0; 3];
        for (col, o) in out.iter_mut().enumerate() {
            let mut a = m;
            for row in 0..3 {
                a[row][col] = b[row];
            }
            *o = det(a) / d;
        }
        Some(out)
    }
}
