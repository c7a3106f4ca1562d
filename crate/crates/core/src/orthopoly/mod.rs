//! Orthonormal polynomial systems for the sphere marginal `tau_{d-1,1}` and
//! the standard Gaussian, plus the Gauss rules built from them.
//!
//! `tau_{d-1,1}` is the law of `x^T e_1` for `x` uniform on the sphere of
//! radius `sqrt(d)`. Its density on `[-sqrt(d), sqrt(d)]` is proportional to
//! `(1 - x^2/d)^{(d-3)/2}`, and its orthonormal polynomials `q_{k,d}` tend
//! to the probabilists' Hermite polynomials as `d -> infinity`.

mod dims;
mod hermite;
mod integrate;
mod quadrature;
mod ultraspherical;

pub use dims::{
    harmonic_dimension, ln_harmonic_dimension, sphere_marginal_moment, SphereMarginalMoments,
};
pub use hermite::{hermite_eval, hermite_eval_all, HermiteBasis};
pub use integrate::{adaptive_legendre, gaussian_expectation, gaussian_smoothing, sphere_marginal_expectation};
pub use quadrature::{
    default_node_count, gauss_rule_gaussian, gauss_rule_sphere_marginal, Measure, QuadratureRule,
};
pub use ultraspherical::{
    build_ultraspherical, hermite_limit_check, sphere_recurrence_sq, UltrasphericalBasis,
};
