//! Entanglement measures and key-rate bounds: the Rényi-2 Gaussian entanglement of
//! formation, the Gaussian intrinsic entanglement, and the loss-family closed forms.

mod bounds;
mod closed_form;
mod gie;
mod param;
mod reof;

pub use bounds::{additivity_check, key_bounds, reof_value, AdditivityReport, KeyBounds};
pub use closed_form::{
    coherent_information, crossing_analysis, crossing_analysis_for, crossing_lambda, crossing_r0,
    degradability_certificate, degrading_channel, detect_pure_loss, loss_environment_marginal, one_way_distillable,
    reof_closed_form, CrossingAnalysis, DegradabilityCertificate, DEFAULT_SQUEEZING, FAMILY_TOL,
};
pub use gie::{gie_numeric, saddle_check, GieBudget, GieResult};
pub use param::{OptOptions, OptimizerResult, PureQcmParam, ENV_SQUEEZE_CAP};
pub use reof::{reof_numeric, reof_squashed};
