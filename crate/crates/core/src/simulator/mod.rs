//! Finite-size kernel ridge regression experiments on the sphere.

mod data;
mod fit;
mod gram;
mod run;
mod surrogate;
mod test_error;

pub use data::{make_dataset, sample_sphere, Dataset};
pub use fit::{empirical_train_error, krr_fit, KrrFit, IDENTITY_TOLERANCE};
pub use gram::{harmonic_matrix, inner_products, kernel_gram, Gram, CLAMP_TOLERANCE};
pub use run::{
    run_kernel_trial, run_surrogate_trial, EmpiricalRun, RunKind, TrialOptions, DATA_STREAM, MC_STREAM,
    SURROGATE_STREAM,
};
pub use surrogate::{gaussian_equivalent_run, sample_wishart, wishart_stieltjes_mc, SurrogateRun, DEFAULT_SURROGATE_CAP};
pub use test_error::{test_error_mc, test_error_parts, test_error_semianalytic, TestErrorParts};
