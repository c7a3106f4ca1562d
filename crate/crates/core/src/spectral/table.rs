use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orthopoly::harmonic_dimension;

use super::coeffs::{
    alpha_finite_quadrature, alpha_limit_hermite, mu_finite_quadrature, mu_finite_rodrigues, mu_limit_from_taylor,
    teacher_energy_gaussian, teacher_energy_sphere,
};
use super::kernel::KernelSpec;
use super::teacher::TeacherSpec;

/// Largest truncation tried by the automatic choice.
const MAX_AUTO_TRUNCATION: usize = 40;

/// What to build: `dimension == 0` requests a limit-only table, in which
/// case `delta_phase` must be given; otherwise `n` (or `delta_phase`, from
/// which `n = round(delta d^K / K!)`) fixes the sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRequest {
    pub phase: usize,
    pub dimension: usize,
    pub n: Option<usize>,
    pub delta_phase: Option<f64>,
    pub lambda: f64,
    pub truncation: Option<usize>,
}

/// Where `lambda_eff` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSource {
    /// `lambda + f(1) - sum_{k<=K} mu_k` from Taylor data.
    Taylor,
    /// Same identity with finite-d coefficients (profile kernels).
    FiniteDimension,
}

/// Everything the theory and the simulator need about a kernel/teacher pair.
///
/// Finite-d arrays are empty for limit-only tables, and `mu_limit` is empty
/// for kernels without Taylor data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub phase: usize,
    pub truncation: usize,
    pub dimension: usize,
    pub n: Option<usize>,
    pub lambda: f64,
    pub noise_sigma: f64,
    pub mu_limit: Vec<f64>,
    pub alpha_limit: Vec<f64>,
    pub mu_finite: Vec<f64>,
    pub alpha_finite: Vec<f64>,
    pub harmonic_dims: Vec<f64>,
    /// `n / N_{k,d}` per degree.
    pub delta: Vec<f64>,
    /// `delta_K = n K! / d^K`.
    pub delta_phase: f64,
    /// `n / N_{K,d}`.
    pub delta_phase_finite: Option<f64>,
    pub lambda_eff: f64,
    pub lambda_eff_source: TailSource,
    pub lambda_eff_finite: Option<f64>,
    /// `E g(G)^2 - sum_{k<=K} alpha_k^2`.
    pub tail_alpha_sq: f64,
    /// `E g(X)^2 - sum_{k<=K} alpha_{k,d}^2` under the sphere marginal.
    pub tail_alpha_sq_finite: Option<f64>,
    /// `f(1)`.
    pub total_kernel_mass: f64,
    /// `E g(G)^2`.
    pub total_teacher_energy: f64,
    pub sphere_teacher_energy: Option<f64>,
    /// `f(1) - sum_{k<=L} mu_{k,d}`: kernel mass beyond the truncation.
    pub kernel_mass_residual: Option<f64>,
    /// `E g(X)^2 - sum_{k<=L} alpha_{k,d}^2`.
    pub teacher_energy_residual: Option<f64>,
}

fn sum_to(v: &[f64], k: usize) -> f64 {
    v.iter().take(k + 1).sum()
}

fn sq_sum_to(v: &[f64], k: usize) -> f64 {
    v.iter().take(k + 1).map(|a| a * a).sum()
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// `n = round(delta d^K / K!)`.
pub fn sample_size(delta: f64, d: usize, phase: usize) -> usize {
    (delta * (phase as f64 * (d as f64).ln() - ln_factorial(phase)).exp()).round() as usize
}

/// `n K! / d^K`.
pub fn limit_ratio(n: usize, d: usize, phase: usize) -> f64 {
    n as f64 * (ln_factorial(phase) - phase as f64 * (d as f64).ln()).exp()
}

/// Smallest `L >= K + 3` leaving at most `1e-6 E g^2` of teacher energy
/// beyond degree `L`.
fn auto_truncation(teacher: &TeacherSpec, phase: usize, energy: f64) -> Result<usize> {
    if let Some(a) = teacher.polynomial_coefficients() {
        return Ok((phase + 3).max(a.len() - 1));
    }
    let alpha = alpha_limit_hermite(teacher, MAX_AUTO_TRUNCATION)?;
    let mut captured = sq_sum_to(&alpha, phase + 2);
    for l in phase + 3..=MAX_AUTO_TRUNCATION {
        captured += alpha[l] * alpha[l];
        if energy - captured <= 1e-6 * energy {
            return Ok(l);
        }
    }
    Ok(phase + 4)
}

/// Assemble a coefficient table.
pub fn build_table(kernel: &KernelSpec, teacher: &TeacherSpec, req: &TableRequest) -> Result<CoefficientTable> {
    let k = req.phase;
    if k == 0 {
        return Err(Error::InvalidArgument("phase degree K must be >= 1".into()));
    }
    if !(req.lambda > 0.0) {
        return Err(Error::NonPositiveRidge(req.lambda));
    }
    let energy = teacher_energy_gaussian(teacher)?;
    let l = match req.truncation {
        Some(l) => l,
        None => auto_truncation(teacher, k, energy)?,
    };
    if l < k {
        return Err(Error::TruncationBelowPhase { l, k });
    }
    let mass = kernel.total_mass();
    let mu_limit = match mu_limit_from_taylor(kernel, l) {
        Ok(m) => m,
        Err(Error::LimitRequiresTaylor) => Vec::new(),
        Err(e) => return Err(e),
    };
    let alpha_limit = alpha_limit_hermite(teacher, l)?;
    let tail_alpha_sq = energy - sq_sum_to(&alpha_limit, k);

    let d = req.dimension;
    let mut table = CoefficientTable {
        phase: k,
        truncation: l,
        dimension: d,
        n: None,
        lambda: req.lambda,
        noise_sigma: teacher.noise_sigma,
        mu_limit,
        alpha_limit,
        mu_finite: Vec::new(),
        alpha_finite: Vec::new(),
        harmonic_dims: Vec::new(),
        delta: Vec::new(),
        delta_phase: 0.0,
        delta_phase_finite: None,
        lambda_eff: f64::NAN,
        lambda_eff_source: TailSource::Taylor,
        lambda_eff_finite: None,
        tail_alpha_sq,
        tail_alpha_sq_finite: None,
        total_kernel_mass: mass,
        total_teacher_energy: energy,
        sphere_teacher_energy: None,
        kernel_mass_residual: None,
        teacher_energy_residual: None,
    };

    if d == 0 {
        table.delta_phase = req
            .delta_phase
            .ok_or_else(|| Error::InvalidArgument("limit tables need delta_K".into()))?;
        table.n = req.n;
    } else {
        let n = match (req.n, req.delta_phase) {
            (Some(n), _) => n,
            (None, Some(delta)) => sample_size(delta, d, k),
            (None, None) => return Err(Error::InvalidArgument("finite-d tables need n or delta_K".into())),
        };
        if n == 0 {
            return Err(Error::InvalidArgument("sample size rounds to zero".into()));
        }
        let mu_finite = match mu_finite_rodrigues(kernel, d, l) {
            Ok(m) => m,
            Err(Error::DerivativesUnavailable) => mu_finite_quadrature(kernel, d, l)?,
            Err(e) => return Err(e),
        };
        let alpha_finite = alpha_finite_quadrature(teacher, d, l)?;
        let dims = (0..=l)
            .map(|j| harmonic_dimension::<f64>(j, d))
            .collect::<Result<Vec<_>>>()?;
        let sphere_energy = teacher_energy_sphere(teacher, d)?;
        table.n = Some(n);
        table.delta = dims.iter().map(|nk| n as f64 / nk).collect();
        table.delta_phase = limit_ratio(n, d, k);
        table.delta_phase_finite = Some(n as f64 / dims[k]);
        table.lambda_eff_finite = Some(req.lambda + (mass - sum_to(&mu_finite, k)));
        table.tail_alpha_sq_finite = Some(sphere_energy - sq_sum_to(&alpha_finite, k));
        table.kernel_mass_residual = Some(mass - sum_to(&mu_finite, l));
        table.teacher_energy_residual = Some(sphere_energy - sq_sum_to(&alpha_finite, l));
        table.sphere_teacher_energy = Some(sphere_energy);
        table.mu_finite = mu_finite;
        table.alpha_finite = alpha_finite;
        table.harmonic_dims = dims;
    }

    if !table.mu_limit.is_empty() {
        table.lambda_eff = req.lambda + (mass - sum_to(&table.mu_limit, k));
    } else if let Some(v) = table.lambda_eff_finite {
        table.lambda_eff = v;
        table.lambda_eff_source = TailSource::FiniteDimension;
    } else {
        return Err(Error::LimitRequiresTaylor);
    }
    table.validate()?;
    Ok(table)
}

impl CoefficientTable {
    pub fn is_limit_only(&self) -> bool {
        self.dimension == 0
    }

    /// Check the structural invariants (positivity, mass and energy bounds,
    /// non-degeneracy up to `K`).
    pub fn validate(&self) -> Result<()> {
        let k = self.phase;
        // a vanishing coefficient below K is harmless only when the teacher
        // has nothing to learn at that degree
        let check_list = |mu: &[f64], alpha: &[f64], dims: Option<&[f64]>| -> Result<()> {
            for (j, &m) in mu.iter().enumerate() {
                // quadrature-derived entries carry round-off scaled by sqrt N_k
                let slack = 1e-12 + dims.map_or(0.0, |n| 64.0 * f64::EPSILON * n[j].sqrt() * self.total_kernel_mass);
                if m < -slack {
                    return Err(Error::InvalidArgument(format!(
                        "kernel coefficient mu_{j} = {m} is negative (kernel not PSD)"
                    )));
                }
                let idle = j < k && m >= 0.0 && alpha.get(j).is_some_and(|a| a.abs() <= 1e-12);
                if j <= k && !(m > 0.0) && !idle {
                    return Err(Error::NonDegeneracyViolated { k: j, value: m });
                }
            }
            Ok(())
        };
        check_list(&self.mu_limit, &self.alpha_limit, None)?;
        check_list(&self.mu_finite, &self.alpha_finite, Some(&self.harmonic_dims))?;
        if !self.mu_finite.is_empty() && self.mu_finite.iter().sum::<f64>() > self.total_kernel_mass + 1e-9 {
            return Err(Error::InvalidArgument("finite-d kernel coefficients exceed f(1)".into()));
        }
        if sq_sum_to(&self.alpha_limit, self.truncation) > self.total_teacher_energy * (1.0 + 1e-12) + 1e-9 {
            return Err(Error::InvalidArgument("teacher coefficients exceed E g^2".into()));
        }
        if let Some(e) = self.sphere_teacher_energy {
            if sq_sum_to(&self.alpha_finite, self.truncation) > e * (1.0 + 1e-12) + 1e-9 {
                return Err(Error::InvalidArgument("finite-d teacher coefficients exceed E g^2".into()));
            }
        }
        if !(self.lambda_eff >= self.lambda - 1e-15) {
            return Err(Error::InvalidArgument(format!(
                "effective ridge {} below lambda {}",
                self.lambda_eff, self.lambda
            )));
        }
        Ok(())
    }

    /// The same finite-d table at another sample size (only the
    /// n-dependent ratios change).
    pub fn at_sample_size(&self, n: usize) -> Result<Self> {
        if self.is_limit_only() {
            return Err(Error::InvalidArgument("limit tables have no sample size".into()));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("sample size must be >= 1".into()));
        }
        let mut t = self.clone();
        t.n = Some(n);
        t.delta = t.harmonic_dims.iter().map(|nk| n as f64 / nk).collect();
        t.delta_phase = limit_ratio(n, t.dimension, t.phase);
        t.delta_phase_finite = Some(n as f64 / t.harmonic_dims[t.phase]);
        Ok(t)
    }

    /// The same limit table at another phase ratio.
    pub fn at_phase_ratio(&self, delta_phase: f64) -> Self {
        let mut t = self.clone();
        t.delta_phase = delta_phase;
        t
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}
