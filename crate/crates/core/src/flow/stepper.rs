use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{rhs_spectral, velocity_of, FlowState};
use crate::error::{Error, Result};
use crate::spectral::{inverse_component, transform};

/// Time-step control for [`run`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepperConfig {
    /// Fixed step; `None` picks it from the CFL condition every step.
    pub dt: Option<f64>,
    pub cfl_safety: f64,
    pub t_end: f64,
    pub record_every: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            dt: None,
            cfl_safety: 0.5,
            t_end: 1.0,
            record_every: 1,
        }
    }
}

impl StepperConfig {
    pub fn fixed(dt: f64, t_end: f64) -> Self {
        StepperConfig {
            dt: Some(dt),
            t_end,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::param(format!("dt must be positive, got {dt}")));
            }
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::param(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        if !self.t_end.is_finite() {
            return Err(Error::param("t_end must be finite"));
        }
        if self.record_every == 0 {
            return Err(Error::param("record_every must be >= 1"));
        }
        Ok(())
    }

    /// Step size for the given state: the fixed `dt`, or `cfl·h/max|v|` capped by the
    /// viscous stability limit.
    pub fn dt_for(&self, state: &FlowState) -> Result<f64> {
        if let Some(dt) = self.dt {
            return Ok(dt);
        }
        let grid = state.grid();
        let h = grid.spacing();
        let vmax = velocity_of(state)?.max_magnitude();
        let mut dt = if vmax > 0.0 {
            self.cfl_safety * h / vmax
        } else {
            self.cfl_safety * h
        };
        if state.nu() > 0.0 {
            let kmax = grid.dealias_cutoff() as f64;
            dt = dt.min(self.cfl_safety * 2.5 / (state.nu() * 2.0 * kmax * kmax));
        }
        Ok(dt)
    }
}

/// One classical Runge–Kutta step of size `dt`.
///
/// Non-finite intermediate values are carried through; [`run`] checks the result.
pub fn step_rk4(state: &FlowState, dt: f64) -> Result<FlowState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param(format!("dt must be positive, got {dt}")));
    }
    let grid = *state.grid();
    let (model, nu) = (state.model(), state.nu());
    let q0 = transform(state.prognostic())?.component(0).to_vec();
    let f = |q: &[Complex64]| rhs_spectral(model, nu, &grid, q);
    let shifted = |a: f64, k: &[Complex64]| -> Vec<Complex64> {
        q0.iter().zip(k).map(|(q, d)| q + d * a).collect()
    };

    let k1 = f(&q0);
    let k2 = f(&shifted(dt / 2.0, &k1));
    let k3 = f(&shifted(dt / 2.0, &k2));
    let k4 = f(&shifted(dt, &k3));
    let q1: Vec<Complex64> = (0..q0.len())
        .map(|i| q0[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0))
        .collect();
    Ok(state.with(inverse_component(&grid, q1), state.t() + dt))
}

/// Receives states during [`run`].
pub trait Observer {
    fn observe(&mut self, state: &FlowState) -> Result<()>;
}

impl<F: FnMut(&FlowState) -> Result<()>> Observer for F {
    fn observe(&mut self, state: &FlowState) -> Result<()> {
        self(state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    /// The state became non-finite during the step starting at `t`.
    BlowupSuspected { t: f64, step: usize },
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// Last finite state.
    pub state: FlowState,
    pub steps: usize,
    pub status: RunStatus,
}

/// Integrates from `state.t()` to `cfg.t_end`, observing the initial state, every
/// `record_every`-th step and the final state. The last step is shortened to land on `t_end`.
pub fn run(state: FlowState, cfg: &StepperConfig, observer: &mut impl Observer) -> Result<RunOutcome> {
    cfg.validate()?;
    if cfg.t_end < state.t() {
        return Err(Error::param(format!(
            "t_end {} precedes the initial time {}",
            cfg.t_end,
            state.t()
        )));
    }
    observer.observe(&state)?;
    let mut current = state;
    let mut steps = 0usize;
    let mut last_recorded = 0usize;
    // relative slack so round-off in accumulated time does not add a sliver step
    let eps = 1e-12 * cfg.t_end.abs().max(1.0);
    while current.t() < cfg.t_end - eps {
        let mut dt = cfg.dt_for(&current)?;
        let remaining = cfg.t_end - current.t();
        let last = dt >= remaining - eps;
        if last {
            dt = remaining;
        }
        let next = step_rk4(&current, dt)?;
        if !next.prognostic().is_finite() {
            log::warn!("non-finite state after step {} at t = {}", steps + 1, current.t());
            return Ok(RunOutcome {
                status: RunStatus::BlowupSuspected {
                    t: current.t(),
                    step: steps + 1,
                },
                state: current,
                steps,
            });
        }
        current = if last {
            let t_end = cfg.t_end;
            let q = next.prognostic().clone();
            next.with(q, t_end)
        } else {
            next
        };
        steps += 1;
        if steps.is_multiple_of(cfg.record_every) {
            observer.observe(&current)?;
            last_recorded = steps;
        }
    }
    if last_recorded != steps {
        observer.observe(&current)?;
    }
    Ok(RunOutcome {
        state: current,
        steps,
        status: RunStatus::Completed,
    })
}
