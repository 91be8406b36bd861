//! Instantaneous scalar and pointwise quantities computed from a single field.

use crate::error::{Error, Result};
use crate::flow::{nonlinear_term_spectral, sqg_velocity_spectral};
use crate::spectral::{
    curl_3d, dealiased_product, dk_seminorm_l2_spectral, dk_tensor_spectral, gradient_spectral,
    lp_norm, lp_of_magnitudes, pressure_from_velocity, sobolev_inner,
    transform, velocity_gradient, velocity_gradient_spectral, Field, Spectrum,
};

/// Floor applied to `|D^kθ|` before raising it to `p − 2`.
pub const MAGNITUDE_FLOOR: f64 = 1e-30;

fn check_p(p: f64) -> Result<()> {
    if !(p >= 2.0) || p.is_infinite() {
        return Err(Error::param(format!("p must be finite and >= 2, got {p}")));
    }
    Ok(())
}

/// `‖∇v‖_{L^∞}`, the largest pointwise Frobenius norm of the velocity gradient.
pub fn grad_v_linf(v: &Field) -> Result<f64> {
    Ok(velocity_gradient(v)?.max_magnitude())
}

/// `α_k = −∫ D^k[(v·∇)v]·D^k v dx / ‖D^k v‖²`, zero for a field with `D^k v = 0`.
pub fn alpha_k(v: &Field, k: usize) -> Result<f64> {
    v.require_vector("alpha_k")?;
    let spec = transform(v)?;
    alpha_k_spectral(v, &spec, k)
}

pub(crate) fn alpha_k_spectral(v: &Field, spec: &Spectrum, k: usize) -> Result<f64> {
    let den = dk_seminorm_l2_spectral(spec, k).powi(2);
    if den == 0.0 {
        return Ok(0.0);
    }
    let nl = nonlinear_term_spectral(v)?;
    let grid = *v.grid();
    let num: f64 = (0..grid.dim())
        .map(|c| sobolev_inner(&grid, nl.component(c), spec.component(c), k))
        .sum();
    Ok(-num / den)
}

fn sym_part(grad: &Field, dim: usize, p: usize) -> [[f64; 3]; 3] {
    let mut s = [[0.0; 3]; 3];
    for (i, row) in s.iter_mut().enumerate().take(dim) {
        for (j, e) in row.iter_mut().enumerate().take(dim) {
            *e = 0.5 * (grad.component(i * dim + j)[p] + grad.component(j * dim + i)[p]);
        }
    }
    s
}

fn quadratic_form(s: &[[f64; 3]; 3], xi: [f64; 3]) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            acc += xi[i] * s[i][j] * xi[j];
        }
    }
    acc
}

/// Pointwise `α = ξ·Sξ` of a 3D velocity with `ξ = ω/|ω|`; zero where `ω = 0`.
pub fn alpha_local(v: &Field) -> Result<Field> {
    v.require_vector("alpha_local")?;
    let grid = *v.grid();
    if grid.dim() != 3 {
        return Err(Error::Shape("alpha_local needs a 3D velocity".into()));
    }
    let grad = velocity_gradient(v)?;
    let w = curl_3d(v)?;
    let values = (0..grid.len())
        .map(|p| {
            let om = [w.component(0)[p], w.component(1)[p], w.component(2)[p]];
            let m = (om[0] * om[0] + om[1] * om[1] + om[2] * om[2]).sqrt();
            if m == 0.0 {
                return 0.0;
            }
            let xi = [om[0] / m, om[1] / m, om[2] / m];
            quadratic_form(&sym_part(&grad, 3, p), xi)
        })
        .collect();
    Field::new(grid, 1, values)
}

/// SQG velocity `R^⊥θ`.
pub fn sqg_velocity(theta: &Field) -> Result<Field> {
    theta.require_scalar("sqg_velocity")?;
    if theta.grid().dim() != 2 {
        return Err(Error::Shape("SQG fields are 2D".into()));
    }
    let spec = transform(theta)?;
    Ok(sqg_velocity_spectral(theta.grid(), spec.component(0)))
}

/// Pointwise `α̂ = ξ·Sξ` of SQG with `ξ = ∇⊥θ/|∇⊥θ|` and `S` the strain of `v = R^⊥θ`;
/// zero where `∇⊥θ = 0`.
pub fn alpha_hat_local(theta: &Field) -> Result<Field> {
    let v = sqg_velocity(theta)?;
    let grid = *theta.grid();
    let spec = transform(theta)?;
    let g = gradient_spectral(&grid, spec.component(0));
    let grad = velocity_gradient(&v)?;
    let values = (0..grid.len())
        .map(|p| {
            let t = [-g.component(1)[p], g.component(0)[p], 0.0];
            let m = (t[0] * t[0] + t[1] * t[1]).sqrt();
            if m == 0.0 {
                return 0.0;
            }
            quadratic_form(&sym_part(&grad, 2, p), [t[0] / m, t[1] / m, 0.0])
        })
        .collect();
    Field::new(grid, 1, values)
}

/// `γ_p`, `δ_p` and `λ_p = γ_p − ν δ_p` for a velocity field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpRates {
    pub gamma: f64,
    pub delta: f64,
    pub lambda: f64,
}

/// Growth-rate decomposition of `‖v‖_{L^p}` under Navier–Stokes, with
/// `d/dt ‖v‖_p = λ_p ‖v‖_p`.
///
/// `γ_p = −∫∇π·v|v|^{p−2} / ‖v‖_p^p` (the integrated-by-parts form of
/// `∫π div(v|v|^{p−2})`), and
/// `δ_p = [∫|∇v|²|v|^{p−2} + (p−2)∫|∇|v||²|v|^{p−2}] / ‖v‖_p^p`.
/// All three vanish for `v = 0`.
pub fn lp_rates(v: &Field, p: f64, nu: f64) -> Result<LpRates> {
    v.require_vector("lp_rates")?;
    check_p(p)?;
    let grid = *v.grid();
    let dim = grid.dim();
    let mags = v.magnitude();
    let norm_p = lp_of_magnitudes(&grid, &mags, p).powf(p);
    if norm_p == 0.0 {
        return Ok(LpRates {
            gamma: 0.0,
            delta: 0.0,
            lambda: 0.0,
        });
    }
    let pi = pressure_from_velocity(v)?;
    let pi_spec = transform(&pi)?;
    let grad_pi = gradient_spectral(&grid, pi_spec.component(0));
    let grad_v = velocity_gradient_spectral(&transform(v)?);

    let (mut g_sum, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for (pt, &m) in mags.iter().enumerate() {
        let w = if p == 2.0 { 1.0 } else { m.powf(p - 2.0) };
        let mut dot = 0.0;
        for c in 0..dim {
            dot += grad_pi.component(c)[pt] * v.component(c)[pt];
        }
        g_sum += dot * w;
        let mut frob = 0.0;
        for c in 0..dim * dim {
            frob += grad_v.component(c)[pt].powi(2);
        }
        d1 += frob * w;
        if p != 2.0 && m > 0.0 {
            // ∇|v| = Σ_i v_i ∇v_i / |v|
            let mut gm2 = 0.0;
            for j in 0..dim {
                let mut s = 0.0;
                for i in 0..dim {
                    s += v.component(i)[pt] * grad_v.component(i * dim + j)[pt];
                }
                gm2 += s * s;
            }
            d2 += gm2 / (m * m) * w;
        }
    }
    let cell = grid.cell_volume();
    let gamma = -g_sum * cell / norm_p;
    let delta = (d1 + (p - 2.0) * d2) * cell / norm_p;
    Ok(LpRates {
        gamma,
        delta,
        lambda: gamma - nu * delta,
    })
}

pub fn gamma_p(v: &Field, p: f64) -> Result<f64> {
    Ok(lp_rates(v, p, 0.0)?.gamma)
}

pub fn delta_p(v: &Field, p: f64) -> Result<f64> {
    Ok(lp_rates(v, p, 0.0)?.delta)
}

pub fn lambda_p(v: &Field, p: f64, nu: f64) -> Result<f64> {
    Ok(lp_rates(v, p, nu)?.lambda)
}

/// Truncated spectrum of `(v·∇)θ` with `v = R^⊥θ`.
fn sqg_advection(theta: &Field, spec: &Spectrum) -> Spectrum {
    let grid = *theta.grid();
    let v = sqg_velocity_spectral(&grid, spec.component(0));
    let g = gradient_spectral(&grid, spec.component(0));
    let a = dealiased_product(&grid, v.component(0), g.component(0));
    let b = dealiased_product(&grid, v.component(1), g.component(1));
    let sum = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    Spectrum::from_parts(grid, 1, sum)
}

/// `α_{k,p} = −∫ D^k[(v·∇)θ]·D^kθ |D^kθ|^{p−2} dx / ‖D^kθ‖_p^p` with `v = R^⊥θ`;
/// zero when `D^kθ = 0`.
pub fn alpha_kp(theta: &Field, k: usize, p: f64) -> Result<f64> {
    theta.require_scalar("alpha_kp")?;
    if theta.grid().dim() != 2 {
        return Err(Error::Shape("SQG fields are 2D".into()));
    }
    if k == 0 {
        return Err(Error::param("alpha_kp needs k >= 1"));
    }
    check_p(p)?;
    let grid = *theta.grid();
    let spec = transform(theta)?;
    let dk = dk_tensor_spectral(&spec, k);
    let mags = dk.magnitude();
    let den = lp_of_magnitudes(&grid, &mags, p).powf(p);
    if den == 0.0 {
        return Ok(0.0);
    }
    let adv = dk_tensor_spectral(&sqg_advection(theta, &spec), k);
    let mut num = 0.0;
    for (pt, &m) in mags.iter().enumerate() {
        let w = if p == 2.0 {
            1.0
        } else {
            m.max(MAGNITUDE_FLOOR).powf(p - 2.0)
        };
        let mut dot = 0.0;
        for c in 0..dk.components() {
            dot += adv.component(c)[pt] * dk.component(c)[pt];
        }
        num += dot * w;
    }
    Ok(-num * grid.cell_volume() / den)
}

/// `(N + p)/(kp)`, the interpolation exponent of the Gagliardo–Nirenberg bound on `‖∇f‖_∞`.
pub fn gn_exponent(dim: usize, k: usize, p: f64) -> f64 {
    (p + dim as f64) / (k as f64 * p)
}

/// `‖∇f‖_∞ / (‖D^k f‖_p^θ ‖f‖_p^{1−θ})` with `θ = (N+p)/(kp)`; `None` when the
/// denominator vanishes.
pub fn gn_ratio(f: &Field, k: usize, p: f64) -> Result<Option<f64>> {
    f.require_scalar("gn_ratio")?;
    if k == 0 || !(p >= 1.0) {
        return Err(Error::param("gn_ratio needs k >= 1 and p >= 1"));
    }
    let grid = *f.grid();
    let spec = transform(f)?;
    let grad = gradient_spectral(&grid, spec.component(0)).max_magnitude();
    let dk = dk_tensor_spectral(&spec, k);
    let dk_p = lp_norm(&dk, p)?;
    let f_p = lp_norm(f, p)?;
    let theta = gn_exponent(grid.dim(), k, p);
    let den = dk_p.powf(theta) * f_p.powf(1.0 - theta);
    if !(den > 0.0) || !den.is_finite() {
        return Ok(None);
    }
    Ok(Some(grad / den))
}

/// `‖D^k(fg) − f D^k g‖_p / (‖∇f‖_∞ ‖D^{k−1}g‖_p + ‖D^k f‖_p ‖g‖_∞)`.
///
/// The product `fg` is differentiated without truncation, so both inputs should be
/// band-limited below `n/4`. A vanishing commutator gives `Some(0)`; otherwise a
/// vanishing denominator gives `None`.
pub fn commutator_ratio(f: &Field, g: &Field, k: usize, p: f64) -> Result<Option<f64>> {
    f.require_scalar("commutator_ratio")?;
    g.require_scalar("commutator_ratio")?;
    if f.grid() != g.grid() {
        return Err(Error::Shape("commutator_ratio needs fields on one grid".into()));
    }
    if k == 0 || !(p >= 1.0) {
        return Err(Error::param("commutator_ratio needs k >= 1 and p >= 1"));
    }
    let grid = *f.grid();
    let fg: Vec<f64> = f.values().iter().zip(g.values()).map(|(a, b)| a * b).collect();
    let d_fg = dk_tensor_spectral(&transform(&Field::new(grid, 1, fg)?)?, k);
    let g_spec = transform(g)?;
    let d_g = dk_tensor_spectral(&g_spec, k);
    let len = grid.len();
    let mut diff = Vec::with_capacity(d_fg.values().len());
    let mut scale = 0.0f64;
    for c in 0..d_fg.components() {
        for pt in 0..len {
            let a = d_fg.component(c)[pt];
            let b = f.values()[pt] * d_g.component(c)[pt];
            scale = scale.max(a.abs()).max(b.abs());
            diff.push(a - b);
        }
    }
    let comm = lp_norm(&Field::new(grid, d_fg.components(), diff)?, p)?;
    let f_spec = transform(f)?;
    let grad_f = gradient_spectral(&grid, f_spec.component(0)).max_magnitude();
    let dkm1_g = if k == 1 {
        lp_norm(g, p)?
    } else {
        lp_norm(&dk_tensor_spectral(&g_spec, k - 1), p)?
    };
    let dk_f = lp_norm(&dk_tensor_spectral(&f_spec, k), p)?;
    let den = grad_f * dkm1_g + dk_f * g.max_abs();
    let vol = grid.volume().powf(1.0 / p);
    if comm <= 1e-12 * scale * vol {
        return Ok(Some(0.0));
    }
    if !(den > 0.0) {
        return Ok(None);
    }
    Ok(Some(comm / den))
}

/// `|α_k| / ‖∇v‖_∞`; `None` when the gradient vanishes.
pub fn alpha_gradient_ratio(v: &Field, k: usize) -> Result<Option<f64>> {
    let g = grad_v_linf(v)?;
    if !(g > 0.0) {
        return Ok(None);
    }
    Ok(Some(alpha_k(v, k)?.abs() / g))
}
