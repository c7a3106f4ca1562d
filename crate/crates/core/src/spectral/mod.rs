//! Kernel and teacher specifications and their expansion coefficients.

mod coeffs;
mod kernel;
mod table;
mod teacher;

pub use coeffs::{
    alpha_finite_quadrature, alpha_limit_hermite, mehler_expectation, mu_finite_quadrature, mu_finite_rodrigues,
    mu_limit_from_taylor, random_feature_profile, teacher_energy_gaussian, teacher_energy_sphere,
};
pub use kernel::{Activation, KernelDescriptor, KernelSpec, ScalarFn};
pub use table::{build_table, limit_ratio, sample_size, CoefficientTable, TableRequest, TailSource};
pub use teacher::{TeacherDescriptor, TeacherSpec};
