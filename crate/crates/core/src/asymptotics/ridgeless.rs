use crate::error::{Error, Result};
use crate::scalar::Real;

use super::predict::{predict_inputs, PhaseInputs};

/// Ridges the limit is extrapolated from.
const RIDGE_SEQUENCE: [f64; 3] = [1e-4, 1e-6, 1e-8];

/// Value at 0 of the polynomial through `(x_i, y_i)` (Neville).
fn extrapolate_to_zero<T: Real>(xs: &[T], ys: &[T]) -> T {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// `lambda -> 0` limit of `(bias, variance)` for a pure degree-K spectrum
/// (no kernel mass above K, no teacher energy above K).
///
/// The general formulas are evaluated along a decreasing ridge sequence and
/// extrapolated to zero, so the result is the limit of the finite-ridge
/// predictions rather than a separately coded closed form.
pub fn ridgeless_limit<T: Real>(alpha: T, mu: T, delta: T, sigma: T) -> Result<(T, T)> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidArgument(format!("delta must be > 0, got {delta}")));
    }
    if (delta - T::one()).abs() <= T::of(1e-9) {
        return Err(Error::InterpolationThreshold);
    }
    let ridges: Vec<T> = RIDGE_SEQUENCE.iter().map(|&l| T::of(l)).collect();
    let mut bias = Vec::with_capacity(ridges.len());
    let mut variance = Vec::with_capacity(ridges.len());
    for &lambda in &ridges {
        let p = predict_inputs(&PhaseInputs {
            phase: 1,
            mu,
            alpha,
            lambda,
            lambda_eff: lambda,
            tail: T::zero(),
            sigma,
            delta,
            alpha_above: Vec::new(),
        })?;
        bias.push(p.bias);
        variance.push(p.variance);
    }
    let b = extrapolate_to_zero(&ridges, &bias).max(T::zero());
    let v = extrapolate_to_zero(&ridges, &variance).max(T::zero());
    Ok((b, v))
}
