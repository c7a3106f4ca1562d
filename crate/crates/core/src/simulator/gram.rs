use crate::error::{Error, Result};
use crate::orthopoly::UltrasphericalBasis;
use crate::scalar::dot;
use crate::spectral::KernelSpec;

/// Kernel arguments farther than this outside `[-1, 1]` are rejected.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

/// Kernel matrix together with the arguments it was evaluated at.
#[derive(Debug, Clone, PartialEq)]
pub struct Gram {
    pub n: usize,
    /// `<x_i, x_j> / d`, clamped to `[-1, 1]`, unit diagonal.
    pub inner: Vec<f64>,
    /// `f(inner)`.
    pub values: Vec<f64>,
}

/// `<x_i, x_j> / d` for row-major `x` (`n x d`).
pub fn inner_products(x: &[f64], n: usize, d: usize) -> Result<Vec<f64>> {
    if x.len() != n * d {
        return Err(Error::DimensionMismatch {
            expected: n * d,
            got: x.len(),
        });
    }
    let mut inner = vec![0.0; n * n];
    let inv_d = 1.0 / d as f64;
    for i in 0..n {
        let xi = &x[i * d..(i + 1) * d];
        inner[i * n + i] = 1.0;
        for j in 0..i {
            let mut z = dot(xi, &x[j * d..(j + 1) * d]) * inv_d;
            if z.abs() > 1.0 {
                if z.abs() > 1.0 + CLAMP_TOLERANCE {
                    return Err(Error::OffSphereInput(z));
                }
                z = z.signum();
            }
            inner[i * n + j] = z;
            inner[j * n + i] = z;
        }
    }
    Ok(inner)
}

/// `K_ij = f(<x_i, x_j>/d)` for points on the `sqrt d` sphere.
pub fn kernel_gram(kernel: &KernelSpec, x: &[f64], n: usize, d: usize) -> Result<Gram> {
    let inner = inner_products(x, n, d)?;
    let diag = kernel.evaluate(1.0);
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = diag;
        for j in 0..i {
            let v = kernel.evaluate(inner[i * n + j]);
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    Ok(Gram { n, inner, values })
}

/// `sum_k (weights_k) q_k(sqrt d z)` applied elementwise to `inner`.
///
/// With `weights_k = mu_{k,d} / sqrt N_k` this rebuilds a kernel matrix
/// from its harmonic expansion.
pub fn harmonic_matrix(inner: &[f64], d: usize, weights: &[f64]) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Ok(vec![0.0; inner.len()]);
    }
    let basis = UltrasphericalBasis::<f64>::new(d, weights.len() - 1)?;
    // rec[j - 1] = b_j
    let rec = basis.recurrence();
    let sd = (d as f64).sqrt();
    Ok(inner
        .iter()
        .map(|&z| {
            let x = sd * z;
            let mut prev = 0.0;
            let mut cur = 1.0;
            let mut acc = weights[0];
            for (j, &w) in weights.iter().enumerate().skip(1) {
                let back = if j >= 2 { rec[j - 2] } else { 0.0 };
                let next = (x * cur - back * prev) / rec[j - 1];
                prev = cur;
                cur = next;
                acc += w * cur;
            }
            acc
        })
        .collect())
}
