use crate::error::{Error, Result};
use crate::numerics::RandomStream;
use crate::orthopoly::UltrasphericalBasis;
use crate::scalar::dot;
use crate::spectral::{CoefficientTable, KernelSpec, TeacherSpec};

use super::data::{sample_sphere, Dataset};
use super::fit::KrrFit;
use super::gram::CLAMP_TOLERANCE;

const MC_BATCH: usize = 512;

/// Monte-Carlo estimate of `E (g(<x, xi>/sqrt d) - h(x))^2` over `m_test`
/// fresh sphere points, with its standard error.
pub fn test_error_mc(
    fit: &KrrFit,
    dataset: &Dataset,
    teacher: &TeacherSpec,
    kernel: &KernelSpec,
    m_test: usize,
    stream: &mut RandomStream,
) -> Result<(f64, f64)> {
    if m_test < 1000 {
        return Err(Error::InvalidArgument(format!("m_test must be >= 1000, got {m_test}")));
    }
    let (n, d) = (dataset.n, dataset.d);
    let sd = (d as f64).sqrt();
    let inv_d = 1.0 / d as f64;
    let c = &fit.coefficients;
    let (mut mean, mut m2, mut count) = (0.0f64, 0.0f64, 0usize);
    let mut remaining = m_test;
    while remaining > 0 {
        let batch = remaining.min(MC_BATCH);
        remaining -= batch;
        let fresh = sample_sphere(stream, batch, d);
        for x in fresh.chunks_exact(d) {
            let mut h = 0.0;
            for i in 0..n {
                let mut z = dot(x, dataset.row(i)) * inv_d;
                if z.abs() > 1.0 {
                    if z.abs() > 1.0 + CLAMP_TOLERANCE {
                        return Err(Error::OffSphereInput(z));
                    }
                    z = z.signum();
                }
                h += kernel.evaluate(z) * c[i];
            }
            let target = teacher.eval(dot(x, &dataset.xi) / sd);
            let e = (target - h) * (target - h);
            count += 1;
            let delta = e - mean;
            mean += delta / count as f64;
            m2 += delta * (e - mean);
        }
    }
    let var = m2 / (count as f64 - 1.0);
    Ok((mean, (var / count as f64).sqrt()))
}

/// The three pieces of the conditional test error (`I - II + III`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestErrorParts {
    pub part_i: f64,
    pub part_ii: f64,
    pub part_iii: f64,
}

impl TestErrorParts {
    pub fn total(&self) -> f64 {
        (self.part_i - self.part_ii + self.part_iii).max(0.0)
    }
}

/// `sum_k w_k q_k(x)` by the three-term recurrence.
fn harmonic_sum(rec: &[f64], weights: &[f64], x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut acc = weights[0];
    for j in 1..weights.len() {
        let back = if j >= 2 { rec[j - 2] } else { 0.0 };
        let next = (x * cur - back * prev) / rec[j - 1];
        prev = cur;
        cur = next;
        acc += weights[j] * cur;
    }
    acc
}

/// Exact test error given the training set, through the harmonic expansion
/// truncated at the table's degree `L`:
///
/// - `I = E g(X)^2` under the sphere marginal (no truncation),
/// - `II = 2 sum_i c_i sum_k mu_{k,d} alpha_{k,d} / N_k q_k(eta_i)`,
/// - `III = c^T A c` with `A_ij = sum_k mu_{k,d}^2 / N_k^{3/2} q_k(sqrt d z_ij)`.
pub fn test_error_parts(fit: &KrrFit, table: &CoefficientTable, dataset: &Dataset) -> Result<TestErrorParts> {
    if table.truncation < table.phase {
        return Err(Error::TruncationBelowPhase {
            l: table.truncation,
            k: table.phase,
        });
    }
    if table.dimension != dataset.d || table.mu_finite.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "need a finite-d table at d = {} (table has d = {})",
            dataset.d, table.dimension
        )));
    }
    let d = dataset.d;
    let n = dataset.n;
    let l = table.truncation;
    let basis = UltrasphericalBasis::<f64>::new(d, l)?;
    let rec = basis.recurrence();
    let cross_w: Vec<f64> = (0..=l)
        .map(|k| table.mu_finite[k] * table.alpha_finite[k] / table.harmonic_dims[k])
        .collect();
    let quad_w: Vec<f64> = (0..=l)
        .map(|k| table.mu_finite[k] * table.mu_finite[k] / table.harmonic_dims[k].powf(1.5))
        .collect();
    let c = &fit.coefficients;
    let part_i = table
        .sphere_teacher_energy
        .ok_or_else(|| Error::InvalidArgument("table lacks the sphere teacher energy".into()))?;
    let part_ii = 2.0
        * c.iter()
            .zip(&dataset.eta)
            .map(|(ci, &e)| ci * harmonic_sum(rec, &cross_w, e))
            .sum::<f64>();
    let sd = (d as f64).sqrt();
    let inner = &fit.gram.inner;
    let diag = harmonic_sum(rec, &quad_w, sd);
    let mut part_iii = 0.0;
    for i in 0..n {
        let row = &inner[i * n..i * n + i];
        let mut acc = 0.0;
        for (j, &z) in row.iter().enumerate() {
            acc += c[j] * harmonic_sum(rec, &quad_w, sd * z);
        }
        part_iii += c[i] * (2.0 * acc + diag * c[i]);
    }
    Ok(TestErrorParts {
        part_i,
        part_ii,
        part_iii,
    })
}

/// `I - II + III`, floored at zero.
pub fn test_error_semianalytic(fit: &KrrFit, table: &CoefficientTable, dataset: &Dataset) -> Result<f64> {
    Ok(test_error_parts(fit, table, dataset)?.total())
}
