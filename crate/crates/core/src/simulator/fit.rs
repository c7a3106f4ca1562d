use crate::error::{Error, Result};
use crate::numerics::SpdSystem;
use crate::scalar::{dot, dot_compensated};

use super::gram::Gram;

/// Tolerance of the algebraic identities checked on every fit.
pub const IDENTITY_TOLERANCE: f64 = 1e-8;

/// Kernel ridge solution `c = (lambda I + K)^{-1} y`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrrFit {
    pub gram: Gram,
    pub lambda: f64,
    pub coefficients: Vec<f64>,
    /// `||(y - Kc) - lambda c|| / ||y||`.
    pub residual: f64,
}

fn gram_times(gram: &Gram, c: &[f64]) -> Vec<f64> {
    let n = gram.n;
    (0..n)
        .map(|i| dot_compensated(&gram.values[i * n..(i + 1) * n], c))
        .collect()
}

/// Solve the dual ridge system by Cholesky and verify `y - Kc = lambda c`.
pub fn krr_fit(gram: Gram, y: &[f64], lambda: f64) -> Result<KrrFit> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveRidge(lambda));
    }
    let n = gram.n;
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    let factor = SpdSystem::ridge(n, &gram.values, lambda)?.factor()?;
    let coefficients = factor.solve(y)?;
    drop(factor);
    let kc = gram_times(&gram, &coefficients);
    let gap: f64 = (0..n)
        .map(|i| {
            let r = (y[i] - kc[i]) - lambda * coefficients[i];
            r * r
        })
        .sum::<f64>()
        .sqrt();
    let norm_y = dot(y, y).sqrt();
    let residual = if norm_y > 0.0 { gap / norm_y } else { gap };
    if !(residual <= IDENTITY_TOLERANCE) {
        return Err(Error::SolverResidual { relative: residual });
    }
    Ok(KrrFit {
        gram,
        lambda,
        coefficients,
        residual,
    })
}

/// Training objective at the optimum, computed as `(lambda/n) y^T c` and
/// cross-checked against `(||y - Kc||^2 + lambda c^T K c) / n`.
pub fn empirical_train_error(fit: &KrrFit, y: &[f64]) -> Result<f64> {
    let n = fit.gram.n;
    let c = &fit.coefficients;
    let resolvent = fit.lambda * dot_compensated(y, c) / n as f64;
    let kc = gram_times(&fit.gram, c);
    let misfit: f64 = y.iter().zip(&kc).map(|(a, b)| (a - b) * (a - b)).sum();
    let objective = (misfit + fit.lambda * dot_compensated(c, &kc)) / n as f64;
    let scale = resolvent.abs().max(objective.abs());
    if (resolvent - objective).abs() > IDENTITY_TOLERANCE * scale {
        return Err(Error::TrainErrorIdentity { resolvent, objective });
    }
    Ok(resolvent)
}
