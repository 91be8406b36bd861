//! Periodic-grid fields, FFT transforms and the operators built on Fourier multipliers.
//!
//! Conventions shared by every consumer:
//!
//! * the domain is the torus `[0, 2π)^dim` and integrals are uniform-weight grid sums;
//! * coefficients are normalised so that `f(x) = Σ_ξ f̂(ξ) e^{iξ·x}`;
//! * `D^k` is the full k-th derivative tensor, so `|D^k f|² = Σ_{|β|=k} (k!/β!) (∂^β f)²`
//!   and `‖D^k f‖_{L²}² = (2π)^dim Σ_ξ |ξ|^{2k} |f̂(ξ)|²`;
//! * derivative multipliers treat the Nyquist frequency as 0.

mod fft;
mod field;
mod grid;
mod ops;
mod random;

pub use fft::{inverse, transform};
pub use field::{Field, Spectrum};
pub use grid::Grid;
pub use ops::{
    biot_savart_2d, curl_2d, curl_3d, dealias, derivative, divergence, dk_seminorm_l2, dk_tensor,
    gradient, inv_sqrt_laplacian, leray_project, lp_norm, max_abs_interpolant, multi_indices,
    multinomial, perp_gradient, pressure_from_velocity, riesz, sobolev_inner, velocity_gradient,
    MEAN_FREE_TOL,
};
pub use random::{random_scalar, random_velocity, RandomSpec};

pub(crate) use fft::{inverse_component, transform_unchecked};
pub(crate) use ops::{
    biot_savart_spectral, check_mean_free, dealias_component, dealiased_product,
    dk_seminorm_l2_spectral, dk_tensor_spectral, gradient_spectral, lp_of_magnitudes, multiply,
    velocity_gradient_spectral,
};

#[cfg(test)]
mod tests;
