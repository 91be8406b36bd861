//! 2D Euler (vorticity form), 2D Navier–Stokes and SQG: right-hand sides, the RK4 stepper,
//! initial conditions, and the static nonlinear term `(v·∇)v` in 2D or 3D.

mod initial;
mod model;
mod stepper;

pub use initial::{read_raw_field, write_raw_field, Initial};
pub use model::{nonlinear_term, rhs, velocity_of, FlowState, Model};
pub use stepper::{run, step_rk4, Observer, RunOutcome, RunStatus, StepperConfig};

pub(crate) use model::{nonlinear_term_spectral, sqg_velocity_spectral};

#[cfg(test)]
mod tests;
