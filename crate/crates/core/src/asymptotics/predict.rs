use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::CoefficientTable;

use super::fixed_point::{epsilon_bound, stieltjes_mp, theta_at, PhaseEnd};

/// Which coefficients feed the formulas.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Limit coefficients `mu_k`, `alpha_k` and `delta_K = n K!/d^K`.
    #[default]
    Limit,
    /// Heuristic: finite-d coefficients with `delta_K = n / N_{K,d}`.
    PlugIn,
}

/// Point in the polynomial scaling regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime<T = f64> {
    pub phase: usize,
    pub delta_phase: T,
    pub lambda: T,
    pub mode: Mode,
    /// `(d, n)` when the point annotates a finite experiment.
    pub finite: Option<(usize, usize)>,
}

impl<T: Real> Regime<T> {
    pub fn limit(phase: usize, delta_phase: T, lambda: T) -> Self {
        Regime {
            phase,
            delta_phase,
            lambda,
            mode: Mode::Limit,
            finite: None,
        }
    }
}

impl Regime<f64> {
    /// The regime a finite-d table describes, in the given mode.
    pub fn from_table(table: &CoefficientTable, mode: Mode) -> Result<Self> {
        let delta_phase = match mode {
            Mode::Limit => table.delta_phase,
            Mode::PlugIn => table
                .delta_phase_finite
                .ok_or_else(|| Error::InvalidArgument("plug-in mode needs a finite-d table".into()))?,
        };
        Ok(Regime {
            phase: table.phase,
            delta_phase,
            lambda: table.lambda,
            mode,
            finite: table.n.filter(|_| table.dimension > 0).map(|n| (table.dimension, n)),
        })
    }
}

/// Scalars entering the phase-K formulas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseInputs<T = f64> {
    pub phase: usize,
    pub mu: T,
    pub alpha: T,
    pub lambda: T,
    pub lambda_eff: T,
    /// Teacher energy above degree K.
    pub tail: T,
    pub sigma: T,
    pub delta: T,
    /// `alpha_k` for `K < k <= L`.
    pub alpha_above: Vec<T>,
}

/// Asymptotic train/test errors at one regime point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction<T = f64> {
    pub r_star: T,
    pub theta: T,
    pub e_train: T,
    pub e_test: T,
    pub bias: T,
    pub variance: T,
    /// `B_k` for `k <= L`.
    pub bias_by_degree: Vec<T>,
    /// Teacher energy beyond the truncation `L`; `sum B_k` plus this equals
    /// the bias.
    pub bias_beyond_truncation: T,
}

impl PhaseInputs<f64> {
    pub fn from_table(table: &CoefficientTable, regime: &Regime<f64>) -> Result<Self> {
        let k = table.phase;
        if regime.phase != k {
            return Err(Error::InvalidArgument(format!(
                "regime phase {} does not match table phase {k}",
                regime.phase
            )));
        }
        // the kernel tail is a table property; the ridge may be overridden
        let (mu, alpha, tail_mass, tail) = match regime.mode {
            Mode::Limit => {
                if table.mu_limit.is_empty() {
                    return Err(Error::LimitRequiresTaylor);
                }
                (
                    table.mu_limit[k],
                    &table.alpha_limit,
                    table.lambda_eff - table.lambda,
                    table.tail_alpha_sq,
                )
            }
            Mode::PlugIn => {
                let (Some(lt), Some(tail)) = (table.lambda_eff_finite, table.tail_alpha_sq_finite) else {
                    return Err(Error::InvalidArgument("plug-in mode needs a finite-d table".into()));
                };
                (table.mu_finite[k], &table.alpha_finite, lt - table.lambda, tail)
            }
        };
        Ok(PhaseInputs {
            phase: k,
            mu,
            alpha: alpha[k],
            lambda: regime.lambda,
            lambda_eff: regime.lambda + tail_mass,
            tail,
            sigma: table.noise_sigma,
            delta: regime.delta_phase,
            alpha_above: alpha[k + 1..].to_vec(),
        })
    }
}

fn check_inputs<T: Real>(inp: &PhaseInputs<T>) -> Result<()> {
    if !(inp.lambda > T::zero()) {
        return Err(Error::NonPositiveRidge(inp.lambda.to_f64().unwrap_or(f64::NAN)));
    }
    if !(inp.mu > T::zero()) {
        return Err(Error::NonDegeneracyViolated {
            k: inp.phase,
            value: inp.mu.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Evaluate the phase-K formulas.
pub fn predict_inputs<T: Real>(inp: &PhaseInputs<T>) -> Result<Prediction<T>> {
    check_inputs(inp)?;
    let (mu, delta) = (inp.mu, inp.delta);
    let r = stieltjes_mp(inp.lambda_eff, mu, delta)?;
    let th = theta_at(r, mu, delta);
    assemble(inp, r, th)
}

fn assemble<T: Real>(inp: &PhaseInputs<T>, r: T, th: T) -> Result<Prediction<T>> {
    let one = T::one();
    let s = one + inp.mu * inp.delta * r;
    let a2 = inp.alpha * inp.alpha;
    let sig2 = inp.sigma * inp.sigma;
    let e_train = inp.lambda * (a2 * r / s + (sig2 + inp.tail) * r);
    let (e_test, bias, variance, b_k) = if th.is_infinite() {
        // theta -> infinity: the variance vanishes and 1/(theta-1) -> 0
        let b_k = a2 / (s * s);
        (b_k + inp.tail, b_k + inp.tail, T::zero(), b_k)
    } else {
        let tm1 = th - one;
        let shrunk = a2 / (s * s);
        let e_test = (th * shrunk + th * inp.tail + sig2) / tm1;
        let bias = th * (shrunk + inp.tail) / tm1;
        let variance = sig2 / tm1;
        let b_k = th * shrunk / tm1 + inp.tail / tm1;
        (e_test, bias, variance, b_k)
    };
    let mut bias_by_degree = vec![T::zero(); inp.phase];
    bias_by_degree.push(b_k);
    bias_by_degree.extend(inp.alpha_above.iter().map(|&a| a * a));
    let captured: T = inp.alpha_above.iter().map(|&a| a * a).sum();
    Ok(Prediction {
        r_star: r,
        theta: th,
        e_train,
        e_test,
        bias,
        variance,
        bias_by_degree,
        bias_beyond_truncation: inp.tail - captured,
    })
}

/// Exact `delta_K -> 0` or `delta_K -> infinity` limit of the prediction
/// (`theta` is infinite at both ends, so the variance vanishes).
pub fn predict_phase_limit<T: Real>(inp: &PhaseInputs<T>, end: PhaseEnd) -> Result<Prediction<T>> {
    check_inputs(inp)?;
    let a2 = inp.alpha * inp.alpha;
    let noise_like = inp.sigma * inp.sigma + inp.tail;
    let (r, shrunk, e_train) = match end {
        PhaseEnd::Start => {
            let r = T::one() / (inp.lambda_eff + inp.mu);
            (r, a2, inp.lambda * (a2 + noise_like) * r)
        }
        // s grows like delta, so alpha^2 R / s -> 0
        PhaseEnd::End => {
            let r = T::one() / inp.lambda_eff;
            (r, T::zero(), inp.lambda * noise_like * r)
        }
    };
    let mut bias_by_degree = vec![T::zero(); inp.phase];
    bias_by_degree.push(shrunk);
    bias_by_degree.extend(inp.alpha_above.iter().map(|&a| a * a));
    let captured: T = inp.alpha_above.iter().map(|&a| a * a).sum();
    Ok(Prediction {
        r_star: r,
        theta: T::infinity(),
        e_train,
        e_test: shrunk + inp.tail,
        bias: shrunk + inp.tail,
        variance: T::zero(),
        bias_by_degree,
        bias_beyond_truncation: inp.tail - captured,
    })
}

/// `predict` on a coefficient table.
pub fn predict(table: &CoefficientTable, regime: &Regime<f64>) -> Result<Prediction<f64>> {
    predict_inputs(&PhaseInputs::from_table(table, regime)?)
}

/// `(bias, variance)`, consistent with `predict`.
pub fn bias_variance(table: &CoefficientTable, regime: &Regime<f64>) -> Result<(f64, f64)> {
    let p = predict(table, regime)?;
    Ok((p.bias, p.variance))
}

/// `Gamma(eps) = alpha^2 R_eps / (1 + delta mu_eps R_eps) + (sigma^2 + T) R_eps`
/// with `mu_eps = mu (1 + eps mu delta)`; `Gamma(0) = E_train / lambda`.
pub fn gamma_inputs<T: Real>(inp: &PhaseInputs<T>, epsilon: T) -> Result<T> {
    check_inputs(inp)?;
    let bound = epsilon_bound(inp.mu, inp.delta);
    if !(epsilon.abs() <= bound) {
        return Err(Error::OutsidePerturbationDomain {
            epsilon: epsilon.to_f64().unwrap_or(f64::NAN),
            bound: bound.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mu_eps = inp.mu * (T::one() + epsilon * inp.mu * inp.delta);
    let r = stieltjes_mp(inp.lambda_eff, mu_eps, inp.delta)?;
    let a2 = inp.alpha * inp.alpha;
    Ok(a2 * r / (T::one() + inp.delta * mu_eps * r) + (inp.sigma * inp.sigma + inp.tail) * r)
}

pub fn gamma_limit(table: &CoefficientTable, regime: &Regime<f64>, epsilon: f64) -> Result<f64> {
    gamma_inputs(&PhaseInputs::from_table(table, regime)?, epsilon)
}

/// Closed form of `-Gamma'(0)`:
/// `alpha^2/((theta-1) s^2) + (delta mu alpha R / s)^2 + (sigma^2 + T)/(theta-1)`.
/// This is the quadratic (`c^T A c`) part of the test error in the limit.
pub fn gamma_slope_term<T: Real>(inp: &PhaseInputs<T>) -> Result<T> {
    check_inputs(inp)?;
    let r = stieltjes_mp(inp.lambda_eff, inp.mu, inp.delta)?;
    let th = theta_at(r, inp.mu, inp.delta);
    let s = T::one() + inp.delta * inp.mu * r;
    let tm1 = th - T::one();
    let a2 = inp.alpha * inp.alpha;
    let cross = inp.delta * inp.mu * inp.alpha * r / s;
    Ok(a2 / (tm1 * s * s) + cross * cross + (inp.sigma * inp.sigma + inp.tail) / tm1)
}

/// Limit of the cross term `2 E[g h]` restricted to degree K:
/// `2 mu delta alpha^2 R / s`.
pub fn cross_term<T: Real>(inp: &PhaseInputs<T>) -> Result<T> {
    check_inputs(inp)?;
    let r = stieltjes_mp(inp.lambda_eff, inp.mu, inp.delta)?;
    let s = T::one() + inp.delta * inp.mu * r;
    Ok(T::of(2.0) * inp.mu * inp.delta * inp.alpha * inp.alpha * r / s)
}
