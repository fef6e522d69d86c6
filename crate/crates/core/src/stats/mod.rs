//! Tail fits, maximum scaling, variance growth and sampling diagnostics.

mod autocorr;
mod ks;
mod scaling;
mod tails;

pub use autocorr::{effective_sample_size, integrated_autocorrelation};
pub use ks::{cdf_from_density, ks_distance, ks_pvalue, ks_two_sample};
pub use scaling::{
    max_scaling, thin_by_autocorrelation, variance_growth, MaxNormalization, MaxScalingReport, VarianceGrowthReport,
};
pub use tails::{
    fit_power_tail, fit_stretched_tail, fit_tail, select_tail_model, TailModel, TailReport, MIN_EXCEEDANCES,
    MIN_SAMPLES,
};
