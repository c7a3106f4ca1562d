use crate::error::{Error, Result};
use crate::scalar::Real;

use super::hermite::hermite_eval;

/// Squared recurrence coefficient `b_k^2` of the orthonormal polynomials of
/// `tau_{d-1,1}` in the variable `x in [-sqrt d, sqrt d]`:
///
/// `b_k^2 = d k (k+d-3) / ((2k+d-2)(2k+d-4))`, `k >= 1`.
///
/// This is the Gegenbauer recurrence for the weight `(1-z^2)^{(d-3)/2}`
/// rescaled by `x = sqrt(d) z`; it is a ratio of small integers, so it stays
/// finite for every `d`.
pub fn sphere_recurrence_sq<T: Real>(k: usize, d: usize) -> T {
    let df = T::of_usize(d);
    let kf = T::of_usize(k);
    let two = T::of(2.0);
    df * kf * (kf + df - T::of(3.0)) / ((two * kf + df - two) * (two * kf + df - T::of(4.0)))
}

/// Orthonormal polynomials `q_0, ..., q_L` of `tau_{d-1,1}` via the symmetric
/// three-term recurrence `x q_k = b_{k+1} q_{k+1} + b_k q_{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UltrasphericalBasis<T = f64> {
    dimension: usize,
    max_degree: usize,
    /// `b[k]` for `k = 0..=L`; `b[0]` is unused and zero.
    b: Vec<T>,
}

pub fn build_ultraspherical<T: Real>(d: usize, max_degree: usize) -> Result<UltrasphericalBasis<T>> {
    UltrasphericalBasis::new(d, max_degree)
}

impl<T: Real> UltrasphericalBasis<T> {
    pub fn new(d: usize, max_degree: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::DimensionTooSmall(d));
        }
        let mut b = vec![T::zero(); max_degree + 1];
        for (k, slot) in b.iter_mut().enumerate().skip(1) {
            let sq: T = sphere_recurrence_sq(k, d);
            if !(sq > T::zero()) {
                return Err(Error::InvalidWeightParameters {
                    k,
                    value: sq.to_f64().unwrap_or(f64::NAN),
                });
            }
            *slot = sq.sqrt();
        }
        Ok(Self {
            dimension: d,
            max_degree,
            b,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Recurrence coefficients `b_1..b_L`.
    pub fn recurrence(&self) -> &[T] {
        &self.b[1..]
    }

    pub fn support_radius(&self) -> T {
        T::of_usize(self.dimension).sqrt()
    }

    pub fn eval(&self, k: usize, x: T) -> Result<T> {
        if k > self.max_degree {
            return Err(Error::DegreeExceedsBasis {
                degree: k,
                max: self.max_degree,
            });
        }
        Ok(self.eval_unchecked(k, x))
    }

    fn eval_unchecked(&self, k: usize, x: T) -> T {
        let mut prev = T::zero();
        let mut cur = T::one();
        for j in 0..k {
            let next = (x * cur - self.b[j] * prev) / self.b[j + 1];
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `q_0(x), ..., q_L(x)`.
    pub fn eval_all(&self, x: T) -> Vec<T> {
        let mut out = Vec::with_capacity(self.max_degree + 1);
        let mut prev = T::zero();
        let mut cur = T::one();
        out.push(cur);
        for j in 0..self.max_degree {
            let next = (x * cur - self.b[j] * prev) / self.b[j + 1];
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    /// Elementwise `q_k` of a matrix (any shape, flattened). The flag reports
    /// whether any entry lies outside `[-sqrt d, sqrt d]`.
    pub fn eval_matrix(&self, k: usize, entries: &[T]) -> Result<(Vec<T>, bool)> {
        if k > self.max_degree {
            return Err(Error::DegreeExceedsBasis {
                degree: k,
                max: self.max_degree,
            });
        }
        let r = self.support_radius();
        let outside = entries.iter().any(|x| x.abs() > r);
        Ok((entries.iter().map(|&x| self.eval_unchecked(k, x)).collect(), outside))
    }
}

/// `|q_{k,d}(x) - H_k(x)|` for each `d` in `dims`.
pub fn hermite_limit_check<T: Real>(dims: &[usize], k: usize, x: T) -> Result<Vec<T>> {
    let h = hermite_eval(k, x);
    dims.iter()
        .map(|&d| {
            let basis = UltrasphericalBasis::<T>::new(d, k)?;
            Ok((basis.eval(k, x)? - h).abs())
        })
        .collect()
}
