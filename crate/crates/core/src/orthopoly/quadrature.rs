use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{symtri_eigen, SymmetricTridiagonal};
use crate::scalar::Real;

use super::ultraspherical::sphere_recurrence_sq;

/// Probability measure a rule integrates against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    SphereMarginal { d: usize },
    Gaussian,
    /// Uniform probability measure on `[-1, 1]`.
    Uniform,
}

/// Gauss rule: nodes, positive weights summing to one, exact for polynomials
/// up to `exact_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T = f64> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    pub exact_degree: usize,
    pub measure: Measure,
    /// Squared first eigenvector components (the textbook Golub-Welsch
    /// weights), kept for cross-checking `weights`.
    pub golub_welsch_weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `max(64, 2L + 32)` nodes.
pub fn default_node_count(max_degree: usize) -> usize {
    (2 * max_degree + 32).max(64)
}

/// Golub-Welsch on a zero-diagonal Jacobi matrix with off-diagonal `b`.
///
/// Weights are taken from the Christoffel function
/// `w_i = 1 / sum_{k<m} p_k(x_i)^2`, which keeps full relative accuracy in
/// the tails where squared eigenvector components lose digits.
fn symmetric_gauss_rule<T: Real>(b: Vec<T>, measure: Measure) -> Result<QuadratureRule<T>> {
    let m = b.len() + 1;
    let jacobi = SymmetricTridiagonal::new(vec![T::zero(); m], b.clone())?;
    let (mut nodes, first) = symtri_eigen(&jacobi)?;
    // the spectrum of a zero-diagonal Jacobi matrix is symmetric
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let half = (nodes[j] - nodes[i]) / T::of(2.0);
        nodes[i] = -half;
        nodes[j] = half;
    }
    if m % 2 == 1 {
        nodes[m / 2] = T::zero();
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let mut prev = T::zero();
            let mut cur = T::one();
            let mut sum = T::one();
            for k in 0..m - 1 {
                let bk = if k == 0 { T::zero() } else { b[k - 1] };
                let next = (x * cur - bk * prev) / b[k];
                prev = cur;
                cur = next;
                sum += cur * cur;
            }
            if sum.is_finite() {
                T::one() / sum
            } else {
                // node so far in the tail that its weight underflows
                T::zero()
            }
        })
        .collect();
    let golub_welsch_weights = first.iter().map(|v| *v * *v).collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        exact_degree: 2 * m - 1,
        measure,
        golub_welsch_weights,
    })
}

/// `m`-node Gauss rule for `tau_{d-1,1}`.
pub fn gauss_rule_sphere_marginal<T: Real>(d: usize, m: usize) -> Result<QuadratureRule<T>> {
    if d < 3 {
        return Err(Error::DimensionTooSmall(d));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one node".into()));
    }
    let b = (1..m).map(|k| sphere_recurrence_sq::<T>(k, d).sqrt()).collect();
    symmetric_gauss_rule(b, Measure::SphereMarginal { d })
}

/// `m`-node Gauss-Legendre rule for the uniform probability measure on
/// `[-1, 1]`.
pub(crate) fn gauss_rule_uniform<T: Real>(m: usize) -> Result<QuadratureRule<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one node".into()));
    }
    let b = (1..m)
        .map(|k| {
            let kf = T::of_usize(k);
            kf / (T::of(4.0) * kf * kf - T::one()).sqrt()
        })
        .collect();
    symmetric_gauss_rule(b, Measure::Uniform)
}

/// `m`-node Gauss-Hermite rule for the standard Gaussian.
pub fn gauss_rule_gaussian<T: Real>(m: usize) -> Result<QuadratureRule<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one node".into()));
    }
    let b = (1..m).map(|k| T::of_usize(k).sqrt()).collect();
    symmetric_gauss_rule(b, Measure::Gaussian)
}
