use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

fn check_args<T: Real>(lambda_eff: T, mu: T, delta: T) -> Result<()> {
    if !(lambda_eff > T::zero()) {
        return Err(Error::NonPositiveRidge(lambda_eff.to_f64().unwrap_or(f64::NAN)));
    }
    if !(mu >= T::zero()) || !mu.is_finite() {
        return Err(Error::InvalidArgument(format!("mu must be >= 0, got {mu}")));
    }
    if !(delta > T::zero()) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("delta must be > 0, got {delta}")));
    }
    Ok(())
}

/// Nonnegative root `R` of `lt mu delta R^2 + (lt + mu - mu delta) R - 1 = 0`.
///
/// Both branches of the quadratic formula are written so that nothing
/// cancels: `2 / (b + sqrt(b^2 + 4a))` when `b >= 0`, and
/// `(sqrt(b^2 + 4a) - b) / 2a` when `b < 0`.
pub fn stieltjes_mp<T: Real>(lambda_eff: T, mu: T, delta: T) -> Result<T> {
    check_args(lambda_eff, mu, delta)?;
    if mu == T::zero() {
        return Ok(T::one() / lambda_eff);
    }
    let a = lambda_eff * mu * delta;
    let b = lambda_eff + mu - mu * delta;
    let disc = (b * b + T::of(4.0) * a).sqrt();
    if b >= T::zero() {
        Ok(T::of(2.0) / (b + disc))
    } else {
        Ok((disc - b) / (T::of(2.0) * a))
    }
}

/// `|1/R - lt - mu/(1 + delta mu R)|`.
pub fn fixed_point_residual<T: Real>(r: T, lambda_eff: T, mu: T, delta: T) -> T {
    (T::one() / r - lambda_eff - mu / (T::one() + delta * mu * r)).abs()
}

/// Variance inflation `(1 + mu delta R)^2 / (delta mu^2 R^2)`.
pub fn theta<T: Real>(lambda_eff: T, mu: T, delta: T) -> Result<T> {
    let r = stieltjes_mp(lambda_eff, mu, delta)?;
    Ok(theta_at(r, mu, delta))
}

pub(crate) fn theta_at<T: Real>(r: T, mu: T, delta: T) -> T {
    let s = T::one() + mu * delta * r;
    let ratio = s / (mu * r);
    ratio * ratio / delta
}

/// `dR/d eps` at `eps = 0`, equal to `-1/(theta - 1)`.
pub fn stieltjes_derivative_at_zero<T: Real>(lambda_eff: T, mu: T, delta: T) -> Result<T> {
    let th = theta(lambda_eff, mu, delta)?;
    if th.is_infinite() {
        return Ok(T::zero());
    }
    Ok(-T::one() / (th - T::one()))
}

/// `eps_0 = 1 / (2 mu delta)`.
pub fn epsilon_bound<T: Real>(mu: T, delta: T) -> T {
    T::one() / (T::of(2.0) * mu * delta)
}

/// Fixed point with the degree-K eigenvalue perturbed to `mu (1 + eps mu delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbedPoint<T = f64> {
    pub epsilon: T,
    pub r_value: T,
}

pub fn perturbed_stieltjes<T: Real>(lambda_eff: T, mu: T, delta: T, epsilon: T) -> Result<PerturbedPoint<T>> {
    check_args(lambda_eff, mu, delta)?;
    let bound = epsilon_bound(mu, delta);
    if !(epsilon.abs() <= bound) {
        return Err(Error::OutsidePerturbationDomain {
            epsilon: epsilon.to_f64().unwrap_or(f64::NAN),
            bound: bound.to_f64().unwrap_or(f64::NAN),
        });
    }
    let r_value = stieltjes_mp(lambda_eff, mu * (T::one() + epsilon * mu * delta), delta)?;
    Ok(PerturbedPoint { epsilon, r_value })
}

/// Which end of the phase the exact limits refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseEnd {
    /// `delta_K -> 0`
    Start,
    /// `delta_K -> infinity`
    End,
}

/// `R -> 1/(lt + mu)` as `delta -> 0` and `R -> 1/lt` as `delta -> infinity`.
pub fn stieltjes_phase_limit<T: Real>(lambda_eff: T, mu: T, end: PhaseEnd) -> Result<T> {
    check_args(lambda_eff, mu, T::one())?;
    Ok(match end {
        PhaseEnd::Start => T::one() / (lambda_eff + mu),
        PhaseEnd::End => T::one() / lambda_eff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_point() {
        let r = stieltjes_mp(1.0f64, 1.0, 1.0).unwrap();
        assert!((r - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        let th = theta(1.0f64, 1.0, 1.0).unwrap();
        assert!((th - 6.854101966249685).abs() < 1e-12);
        let dr = stieltjes_derivative_at_zero(1.0f64, 1.0, 1.0).unwrap();
        assert!((dr + 0.1708203932499369).abs() < 1e-12);
    }

    #[test]
    fn zero_mu_is_inverse_ridge() {
        assert_eq!(stieltjes_mp(0.25f64, 0.0, 3.0).unwrap(), 4.0);
    }

    #[test]
    fn ridge_must_be_positive() {
        assert!(matches!(stieltjes_mp(0.0f64, 1.0, 1.0), Err(Error::NonPositiveRidge(_))));
        assert!(stieltjes_mp(1.0f64, 1.0, 0.0).is_err());
    }

    #[test]
    fn both_branches_solve_the_quadratic() {
        for &(l, m, d) in &[(1e-4, 5.0, 20.0), (1e-4, 0.1, 0.05), (10.0, 0.1, 20.0), (1e-3, 1.0, 1.0)] {
            let r: f64 = stieltjes_mp(l, m, d).unwrap();
            assert!(fixed_point_residual(r, l, m, d) < 1e-12 * (1.0 / r).max(1.0), "{l} {m} {d}");
        }
    }

    #[test]
    fn perturbation_domain() {
        let p = perturbed_stieltjes(1.0f64, 1.0, 1.0, 0.5).unwrap();
        assert_eq!(p.r_value, stieltjes_mp(1.0f64, 1.5, 1.0).unwrap());
        assert!(matches!(
            perturbed_stieltjes(1.0f64, 1.0, 1.0, 0.51),
            Err(Error::OutsidePerturbationDomain { .. })
        ));
        assert_eq!(perturbed_stieltjes(1.0f64, 1.0, 1.0, 0.0).unwrap().r_value, stieltjes_mp(1.0f64, 1.0, 1.0).unwrap());
    }

    #[test]
    fn phase_limits_approached() {
        let small = stieltjes_mp(0.3f64, 2.0, 1e-9).unwrap();
        assert!((small - stieltjes_phase_limit(0.3f64, 2.0, PhaseEnd::Start).unwrap()).abs() < 1e-8);
        let large = stieltjes_mp(0.3f64, 2.0, 1e9).unwrap();
        assert!((large - stieltjes_phase_limit(0.3f64, 2.0, PhaseEnd::End).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn single_precision() {
        let r: f32 = stieltjes_mp(1.0f32, 1.0, 1.0).unwrap();
        assert!((r - 0.618_034).abs() < 1e-6);
    }
}
