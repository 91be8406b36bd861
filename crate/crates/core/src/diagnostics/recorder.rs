use crate::error::{Error, Result};
use crate::flow::{run, velocity_of, FlowState, Observer, RunStatus, StepperConfig};
use crate::spectral::{dk_seminorm_l2_spectral, dk_tensor_spectral, lp_norm, transform};

use super::quantities::{alpha_hat_local, alpha_k_spectral, alpha_kp, grad_v_linf, lp_rates};
use super::series::{DiagnosticSample, DiagnosticSeries, Family, SeriesMeta, SeriesParams};

/// Diagnostics of one state for the given parameters. `initial` is the conserved norm
/// entering `X` (see [`super::scale_x`]); `None` means this state is the initial one.
pub fn sample_state(
    state: &FlowState,
    params: &SeriesParams,
    initial: Option<f64>,
) -> Result<DiagnosticSample> {
    let family = Family::from(state.model());
    if family != params.family {
        return Err(Error::param(format!(
            "state of model {} recorded with {} parameters",
            state.model(),
            params.family.name()
        )));
    }
    let sc = params.scaling()?;
    let k = params.k;
    let p = params.p;
    let mut s = DiagnosticSample::at(state.t());
    match family {
        Family::Euler | Family::NavierStokes => {
            let v = velocity_of(state)?;
            let spec = transform(&v)?;
            let dk = dk_seminorm_l2_spectral(&spec, k);
            let v2 = dk_seminorm_l2_spectral(&spec, 0);
            s.alpha_k = Some(alpha_k_spectral(&v, &spec, k)?);
            s.dk_v_l2 = Some(dk);
            s.v_l2 = Some(v2);
            s.v_lp = Some(lp_norm(&v, p)?);
            s.grad_v_linf = Some(grad_v_linf(&v)?);
            s.omega_linf = Some(state.prognostic().max_abs());
            if family == Family::NavierStokes {
                let r = lp_rates(&v, p, state.nu())?;
                s.gamma_p = Some(r.gamma);
                s.delta_p = Some(r.delta);
                s.lambda_p = Some(r.lambda);
                s.x_scale = s.v_lp;
            } else {
                let v0 = initial.unwrap_or(v2);
                s.x_scale = Some(dk.powf(sc.a) * v0.powf(1.0 - sc.a));
            }
        }
        Family::Sqg => {
            let theta = state.prognostic();
            let spec = transform(theta)?;
            let dk = lp_norm(&dk_tensor_spectral(&spec, k), p)?;
            let th = lp_norm(theta, p)?;
            s.alpha_kp = Some(alpha_kp(theta, k, p)?);
            s.dk_theta_lp = Some(dk);
            s.theta_lp = Some(th);
            s.grad_v_linf = Some(grad_v_linf(&velocity_of(state)?)?);
            s.alpha_linf = Some(alpha_hat_local(theta)?.max_abs());
            let th0 = initial.unwrap_or(th);
            s.x_scale = Some(dk.powf(sc.a) * th0.powf(1.0 - sc.a));
        }
    }
    Ok(s)
}

/// Collects samples during a run.
#[derive(Debug, Clone)]
pub struct Recorder {
    params: SeriesParams,
    initial: Option<f64>,
    samples: Vec<DiagnosticSample>,
}

impl Recorder {
    pub fn new(params: SeriesParams) -> Result<Self> {
        params.scaling()?;
        if !params.k_is_supercritical() {
            log::warn!(
                "k = {} does not exceed the {} regularity threshold; quantities are still computed",
                params.k,
                params.family.name()
            );
        }
        Ok(Recorder {
            params,
            initial: None,
            samples: Vec::new(),
        })
    }

    pub fn samples(&self) -> &[DiagnosticSample] {
        &self.samples
    }

    pub fn into_series(self, meta: SeriesMeta) -> Result<DiagnosticSeries> {
        DiagnosticSeries::new(meta, self.samples)
    }
}

impl Observer for Recorder {
    fn observe(&mut self, state: &FlowState) -> Result<()> {
        let s = sample_state(state, &self.params, self.initial)?;
        if self.initial.is_none() {
            self.initial = match self.params.family {
                Family::Euler => s.v_l2,
                Family::Sqg => s.theta_lp,
                Family::NavierStokes => s.v_lp,
            };
        }
        self.samples.push(s);
        Ok(())
    }
}

/// Runs the stepper while recording; the series keeps every sample taken before a
/// non-finite state stopped the run.
pub fn record_run(
    state: FlowState,
    cfg: &StepperConfig,
    params: SeriesParams,
    mut meta: SeriesMeta,
) -> Result<(DiagnosticSeries, RunStatus)> {
    let mut rec = Recorder::new(params)?;
    let out = run(state.clone(), cfg, &mut rec)?;
    meta.model = Some(state.model());
    meta.grid_n = Some(state.grid().n());
    meta.status = Some(out.status);
    Ok((rec.into_series(meta)?, out.status))
}
