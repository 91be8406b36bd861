//! Scale-invariant growth quantities, norms and inequality ratios of instantaneous
//! fields, and the time series assembled from them during a run.

mod constants;
mod quantities;
mod recorder;
mod series;

pub use constants::{
    family_ratios, fit_constants, held_out_check, member_ratios, FitConfig, FittedConstants,
    HeldOutReport, MemberRatios,
};
pub use quantities::{
    alpha_gradient_ratio, alpha_hat_local, alpha_k, alpha_kp, alpha_local, commutator_ratio,
    delta_p, gamma_p, gn_exponent, gn_ratio, grad_v_linf, lambda_p, lp_rates, sqg_velocity,
    LpRates, MAGNITUDE_FLOOR,
};
pub use recorder::{record_run, sample_state, Recorder};
pub use series::{
    bkm_integral, lp_envelope_excess, scale_x, serrin_integral, sidecar_path, DiagnosticSample, DiagnosticSeries,
    Family, Scaling, SeriesMeta, SeriesParams, COLUMNS, FORMAT_VERSION,
};

#[cfg(test)]
mod tests;
