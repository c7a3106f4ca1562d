//! Asymptotic predictions at polynomial scaling.

mod fixed_point;
mod predict;
mod ridgeless;

pub use fixed_point::{
    epsilon_bound, fixed_point_residual, perturbed_stieltjes, stieltjes_derivative_at_zero, stieltjes_mp,
    stieltjes_phase_limit, theta, PerturbedPoint, PhaseEnd,
};
pub use predict::{
    bias_variance, cross_term, gamma_inputs, gamma_limit, gamma_slope_term, predict, predict_inputs,
    predict_phase_limit, Mode, PhaseInputs, Prediction, Regime,
};
pub use ridgeless::ridgeless_limit;
