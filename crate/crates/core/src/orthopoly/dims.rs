use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dimension `N_k` of the space of degree-`k` spherical harmonics in `d`
/// dimensions.
///
/// `N_k = ((d+2k-2)/k) * C(d+k-3, k-1)`; the binomial is accumulated as a
/// product of ratios, and the log-space value is used once that overflows.
pub fn harmonic_dimension<T: Real>(k: usize, d: usize) -> Result<T> {
    if d < 3 {
        return Err(Error::DimensionTooSmall(d));
    }
    match k {
        0 => Ok(T::one()),
        1 => Ok(T::of_usize(d)),
        _ => {
            let df = T::of_usize(d);
            let kf = T::of_usize(k);
            let mut binom = T::one();
            for i in 1..k {
                binom = binom * (df - T::of(2.0) + T::of_usize(i)) / T::of_usize(i);
            }
            let value = (df + T::of_usize(2 * k) - T::of(2.0)) / kf * binom;
            if value.is_finite() {
                Ok(value)
            } else {
                Ok(ln_harmonic_dimension::<T>(k, d)?.exp())
            }
        }
    }
}

/// `ln N_k`, finite for every `(k, d)`.
pub fn ln_harmonic_dimension<T: Real>(k: usize, d: usize) -> Result<T> {
    if d < 3 {
        return Err(Error::DimensionTooSmall(d));
    }
    let df = T::of_usize(d);
    Ok(match k {
        0 => T::zero(),
        1 => df.ln(),
        _ => {
            let mut acc = ((df + T::of_usize(2 * k) - T::of(2.0)) / T::of_usize(k)).ln();
            for i in 1..k {
                acc += ((df - T::of(2.0) + T::of_usize(i)) / T::of_usize(i)).ln();
            }
            acc
        }
    })
}

/// `E X^m` for `X ~ tau_{d-1,1}`: zero for odd `m`, otherwise
/// `(2k-1)!! / prod_{i<k} (1 + 2i/d)` with `m = 2k`.
pub fn sphere_marginal_moment<T: Real>(m: usize, d: usize) -> T {
    if m % 2 == 1 {
        return T::zero();
    }
    let k = m / 2;
    let df = T::of_usize(d);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::of_usize(2 * i + 1) / (T::one() + T::of_usize(2 * i) / df);
    }
    acc
}

/// Cached even moments of `tau_{d-1,1}`.
#[derive(Debug, Clone)]
pub struct SphereMarginalMoments<T = f64> {
    dimension: usize,
    even: Vec<T>,
}

impl<T: Real> SphereMarginalMoments<T> {
    /// Moments up to order `2 * max_half`.
    pub fn new(dimension: usize, max_half: usize) -> Self {
        let even = (0..=max_half)
            .map(|k| sphere_marginal_moment::<T>(2 * k, dimension))
            .collect();
        Self { dimension, even }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn moment(&self, m: usize) -> T {
        if m % 2 == 1 {
            T::zero()
        } else if let Some(v) = self.even.get(m / 2) {
            *v
        } else {
            sphere_marginal_moment(m, self.dimension)
        }
    }
}
