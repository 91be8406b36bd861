//! Blow-up conditions, trichotomy classification and Osgood machinery evaluated on
//! diagnostic series, plus synthetic series realising each behaviour.

mod evaluate;
mod osgood;
mod report;
mod synth;
mod tail;
mod verdict;

pub use evaluate::{
    classify_trichotomy, eval_bkm, eval_integral_condition, eval_log_corrected,
    eval_lower_bound, eval_serrin, evaluate, representation_residual, resolve_threshold,
    LogVariant,
};
pub use osgood::{
    log_grid, osgood_check, osgood_check_fn, osgood_weighted_integral, OsgoodClass,
    OsgoodIntegral, OsgoodReport, DEFAULT_OSGOOD_SAMPLES, DEFAULT_S_MAX,
};
pub use report::{sweep, VerdictReport};
pub use synth::{synth, ProfileKind, SyntheticProfile};
pub use verdict::{
    CriteriaOptions, Criterion, CriterionVerdict, OsgoodWeight, Outcome, Window, WindowSpec,
};
