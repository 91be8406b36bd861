use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    biot_savart_spectral, check_mean_free, dealias_component, gradient_spectral,
    inverse_component, multiply, transform, transform_unchecked, velocity_gradient_spectral,
    Field, Grid, Spectrum,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Evolution equation. Euler and Navier–Stokes evolve vorticity, SQG the active scalar θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "euler2d")]
    Euler2D,
    #[serde(rename = "ns2d")]
    NS2D,
    #[serde(rename = "sqg")]
    Sqg,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Euler2D => "euler2d",
            Model::NS2D => "ns2d",
            Model::Sqg => "sqg",
        }
    }

    pub fn is_viscous(self) -> bool {
        self == Model::NS2D
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Prognostic scalar of a 2D flow at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    model: Model,
    prognostic: Field,
    nu: f64,
    t: f64,
}

impl FlowState {
    pub fn new(model: Model, prognostic: Field, nu: f64, t: f64) -> Result<Self> {
        prognostic.require_scalar("flow state")?;
        if prognostic.grid().dim() != 2 {
            return Err(Error::Shape("time evolution is 2D only".into()));
        }
        if !prognostic.is_finite() {
            return Err(Error::NonFinite);
        }
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::param(format!("viscosity must be finite and >= 0, got {nu}")));
        }
        if nu != 0.0 && !model.is_viscous() {
            return Err(Error::param(format!("model {model} is inviscid but nu = {nu}")));
        }
        if !t.is_finite() {
            return Err(Error::param("time must be finite"));
        }
        if model != Model::Sqg {
            check_mean_free(&prognostic)?;
        }
        Ok(FlowState {
            model,
            prognostic,
            nu,
            t,
        })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn prognostic(&self) -> &Field {
        &self.prognostic
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn grid(&self) -> &Grid {
        self.prognostic.grid()
    }

    pub(crate) fn with(&self, prognostic: Field, t: f64) -> FlowState {
        FlowState {
            model: self.model,
            prognostic,
            nu: self.nu,
            t,
        }
    }
}

/// `v = R^⊥θ = (−R₂θ, R₁θ)` from θ's coefficients.
pub(crate) fn sqg_velocity_spectral(grid: &Grid, theta: &[Complex64]) -> Field {
    let m = |k: [f64; 3]| (k[0] * k[0] + k[1] * k[1]).sqrt();
    let v1 = multiply(grid, theta, |k| {
        let r = m(k);
        if r == 0.0 {
            ZERO
        } else {
            -I * (k[1] / r)
        }
    });
    let v2 = multiply(grid, theta, |k| {
        let r = m(k);
        if r == 0.0 {
            ZERO
        } else {
            I * (k[0] / r)
        }
    });
    let mut values = inverse_component(grid, v1).into_values();
    values.extend(inverse_component(grid, v2).into_values());
    Field::from_parts(*grid, 2, values)
}

fn velocity_from_coeffs(model: Model, grid: &Grid, q: &[Complex64]) -> Field {
    match model {
        Model::Sqg => sqg_velocity_spectral(grid, q),
        Model::Euler2D | Model::NS2D => biot_savart_spectral(grid, q),
    }
}

/// Velocity carried by the state.
pub fn velocity_of(state: &FlowState) -> Result<Field> {
    let spec = transform(state.prognostic())?;
    Ok(velocity_from_coeffs(state.model, state.grid(), spec.component(0)))
}

/// Coefficients of `−P(v·∇q) + νΔq` with `P` the 2/3-rule truncation.
pub(crate) fn rhs_spectral(model: Model, nu: f64, grid: &Grid, q: &[Complex64]) -> Vec<Complex64> {
    let v = velocity_from_coeffs(model, grid, q);
    let g = gradient_spectral(grid, q);
    let adv: Vec<f64> = (0..grid.len())
        .map(|p| v.component(0)[p] * g.component(0)[p] + v.component(1)[p] * g.component(1)[p])
        .collect();
    let mut out = transform_unchecked(&Field::from_parts(*grid, 1, adv))
        .component(0)
        .to_vec();
    dealias_component(grid, &mut out);
    for (slot, z) in out.iter_mut().enumerate() {
        let k = grid.derivative_wavevector(slot);
        *z = -*z - q[slot] * (nu * (k[0] * k[0] + k[1] * k[1]));
    }
    // transport by a divergence-free field preserves the mean
    out[0] = ZERO;
    out
}

/// Time derivative of the prognostic scalar.
pub fn rhs(state: &FlowState) -> Result<Field> {
    let spec = transform(state.prognostic())?;
    let out = rhs_spectral(state.model, state.nu, state.grid(), spec.component(0));
    Ok(inverse_component(state.grid(), out))
}

/// Truncated spectrum of `(v·∇)v` for a 2D or 3D velocity.
pub(crate) fn nonlinear_term_spectral(v: &Field) -> Result<Spectrum> {
    v.require_vector("nonlinear_term")?;
    let grid = *v.grid();
    let dim = grid.dim();
    let grad = velocity_gradient_spectral(&transform(v)?);
    let mut values = Vec::with_capacity(dim * grid.len());
    for i in 0..dim {
        let mut acc = vec![0.0; grid.len()];
        for j in 0..dim {
            let dvij = grad.component(i * dim + j);
            for (p, a) in acc.iter_mut().enumerate() {
                *a += v.component(j)[p] * dvij[p];
            }
        }
        values.extend(acc);
    }
    let mut spec = transform_unchecked(&Field::from_parts(grid, dim, values));
    for c in 0..dim {
        dealias_component(&grid, spec.component_mut(c));
    }
    Ok(spec)
}

/// Dealiased `(v·∇)v`.
pub fn nonlinear_term(v: &Field) -> Result<Field> {
    Ok(crate::spectral::inverse(&nonlinear_term_spectral(v)?))
}
