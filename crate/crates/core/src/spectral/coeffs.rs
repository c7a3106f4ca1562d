//! Kernel and teacher expansion coefficients, in the limit and at finite d.

use crate::error::{Error, Result};
use crate::orthopoly::{
    adaptive_legendre, default_node_count, gauss_rule_sphere_marginal, gaussian_expectation, gaussian_smoothing, harmonic_dimension,
    hermite_eval, UltrasphericalBasis,
};

use super::kernel::{Activation, KernelSpec};
use super::teacher::TeacherSpec;

const STABILITY_TOL: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 4;
const HERMITE_TOL: f64 = 1e-12;

/// `mu_k = f^{(k)}(0)/k!` for `k <= L`.
pub fn mu_limit_from_taylor(kernel: &KernelSpec, max_degree: usize) -> Result<Vec<f64>> {
    let mut c = kernel.taylor_coefficients().ok_or(Error::LimitRequiresTaylor)?;
    c.resize(max_degree + 1, 0.0);
    Ok(c)
}

/// Integrate `integrand(x, q)` for every degree `k <= L` against
/// `tau_{d-1,1}`, doubling the Gauss rule until successive values settle.
///
/// `scale[k]` multiplies the k-th integral. Convergence is judged against
/// `1e-10` or the rounding floor `64 eps scale_k E|integrand_k|`, whichever
/// is larger: a large prefactor (like `sqrt N_k`) amplifies round-off beyond
/// any fixed absolute target.
fn sphere_coefficients<F>(d: usize, max_degree: usize, extra_degree: usize, scale: &[f64], integrand: F) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let basis = UltrasphericalBasis::<f64>::new(d, max_degree)?;
    let mut m = default_node_count(max_degree + extra_degree);
    let eval = |m: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        let rule = gauss_rule_sphere_marginal::<f64>(d, m)?;
        let mut acc = vec![0.0; max_degree + 1];
        let mut abs = vec![0.0; max_degree + 1];
        let mut vals = vec![0.0; max_degree + 1];
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            if w == 0.0 {
                continue;
            }
            let q = basis.eval_all(x);
            integrand(x, &q, &mut vals);
            for k in 0..=max_degree {
                acc[k] += w * vals[k];
                abs[k] += w * vals[k].abs();
            }
        }
        for k in 0..=max_degree {
            acc[k] *= scale[k];
            abs[k] *= scale[k].abs();
        }
        Ok((acc, abs))
    };
    let (mut prev, _) = eval(m)?;
    for _ in 0..MAX_DOUBLINGS {
        m *= 2;
        let (cur, abs) = eval(m)?;
        let settled = (0..=max_degree).all(|k| {
            let floor = 64.0 * f64::EPSILON * abs[k];
            (cur[k] - prev[k]).abs() <= STABILITY_TOL.max(floor)
        });
        if settled && cur.iter().all(|v| v.is_finite()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged(format!(
        "sphere-marginal coefficients at d = {d} after {MAX_DOUBLINGS} doublings"
    )))
}

fn sqrt_dims(d: usize, max_degree: usize) -> Result<Vec<f64>> {
    (0..=max_degree)
        .map(|k| harmonic_dimension::<f64>(k, d).map(f64::sqrt))
        .collect()
}

/// `mu_{k,d} = sqrt(N_k) * E[f(X/sqrt d) q_k(X)]`, `X ~ tau_{d-1,1}`.
pub fn mu_finite_quadrature(kernel: &KernelSpec, d: usize, max_degree: usize) -> Result<Vec<f64>> {
    let scale = sqrt_dims(d, max_degree)?;
    let sd = (d as f64).sqrt();
    let extra = kernel.polynomial_degree().unwrap_or(16);
    sphere_coefficients(d, max_degree, extra, &scale, |x, q, out| {
        let f = kernel.evaluate(x / sd);
        for (o, &qk) in out.iter_mut().zip(q) {
            *o = f * qk;
        }
    })
}

/// Rodrigues form: `mu_{k,d} = N_k / prod_{i<k}(d-1+2i) * E[(1-W^2)^k f^{(k)}(W)]`
/// with `W = X/sqrt d` (density proportional to `(1-w^2)^{(d-3)/2}`).
///
/// The integrand has no cancellation, so this path keeps full relative
/// accuracy where the direct projection loses digits to the `sqrt N_k`
/// prefactor.
pub fn mu_finite_rodrigues(kernel: &KernelSpec, d: usize, max_degree: usize) -> Result<Vec<f64>> {
    if kernel.taylor_coefficients().is_none() {
        return Err(Error::DerivativesUnavailable);
    }
    let mut scale = Vec::with_capacity(max_degree + 1);
    for k in 0..=max_degree {
        let n_k = harmonic_dimension::<f64>(k, d)?;
        let denom: f64 = (0..k).map(|i| (d - 1 + 2 * i) as f64).product();
        scale.push(n_k / denom);
    }
    let sd = (d as f64).sqrt();
    let extra = kernel.polynomial_degree().unwrap_or(16) + max_degree;
    // derivative evaluation itself cannot fail past the check above
    sphere_coefficients(d, max_degree, extra, &scale, |x, _q, out| {
        let w = x / sd;
        let one_minus = (1.0 - w * w).max(0.0);
        let mut power = 1.0;
        for (k, o) in out.iter_mut().enumerate() {
            *o = power * kernel.derivative(k, w).unwrap_or(0.0);
            power *= one_minus;
        }
    })
}

/// Hermite-basis coefficients of `sum_i a_i x^i`, exactly through the
/// three-term recurrence (`x H_k = sqrt(k+1) H_{k+1} + sqrt(k) H_{k-1}`).
fn hermite_coefficients_of_polynomial(a: &[f64], max_degree: usize) -> Vec<f64> {
    let top = a.len().max(1) - 1;
    let width = top.max(max_degree) + 2;
    let mut power = vec![0.0; width];
    power[0] = 1.0;
    let mut out = vec![0.0; width];
    for (i, &ai) in a.iter().enumerate() {
        if i > 0 {
            let mut next = vec![0.0; width];
            for k in 0..width - 1 {
                if power[k] == 0.0 {
                    continue;
                }
                next[k + 1] += (k as f64 + 1.0).sqrt() * power[k];
                if k > 0 {
                    next[k - 1] += (k as f64).sqrt() * power[k];
                }
            }
            power = next;
        }
        for k in 0..width {
            out[k] += ai * power[k];
        }
    }
    out.truncate(max_degree + 1);
    out.resize(max_degree + 1, 0.0);
    out
}

/// `alpha_k = E[g(G) H_k(G)]` for `k <= L`.
pub fn alpha_limit_hermite(teacher: &TeacherSpec, max_degree: usize) -> Result<Vec<f64>> {
    if let Some(a) = teacher.polynomial_coefficients() {
        return Ok(hermite_coefficients_of_polynomial(a, max_degree));
    }
    (0..=max_degree)
        .map(|k| gaussian_expectation(|x| teacher.eval(x) * hermite_eval(k, x), HERMITE_TOL))
        .collect()
}

/// `E g(G)^2`: Gaussian moments for polynomials, quadrature otherwise.
pub fn teacher_energy_gaussian(teacher: &TeacherSpec) -> Result<f64> {
    if let Some(a) = teacher.polynomial_coefficients() {
        let moment = |m: usize| -> f64 {
            if m % 2 == 1 {
                0.0
            } else {
                (1..m).step_by(2).map(|j| j as f64).product()
            }
        };
        let mut e = 0.0;
        for (i, &ai) in a.iter().enumerate() {
            for (j, &aj) in a.iter().enumerate() {
                e += ai * aj * moment(i + j);
            }
        }
        return Ok(e);
    }
    gaussian_expectation(|x| teacher.eval(x).powi(2), HERMITE_TOL)
}

/// `alpha_{k,d} = E[g(X) q_k(X)]`, `X ~ tau_{d-1,1}`.
pub fn alpha_finite_quadrature(teacher: &TeacherSpec, d: usize, max_degree: usize) -> Result<Vec<f64>> {
    let extra = teacher.polynomial_coefficients().map(|a| a.len()).unwrap_or(16);
    sphere_coefficients(d, max_degree, extra, &vec![1.0; max_degree + 1], |x, q, out| {
        let g = teacher.eval(x);
        for (o, &qk) in out.iter_mut().zip(q) {
            *o = g * qk;
        }
    })
}

/// `E g(X)^2` under `tau_{d-1,1}`.
pub fn teacher_energy_sphere(teacher: &TeacherSpec, d: usize) -> Result<f64> {
    let extra = teacher.polynomial_coefficients().map(|a| 2 * a.len()).unwrap_or(32);
    let v = sphere_coefficients(d, 0, extra, &[1.0], |x, _q, out| {
        out[0] = teacher.eval(x).powi(2);
    })?;
    Ok(v[0])
}

/// `E[s(X) s(Y)]` with `corr(X, Y) = z`, by nested one-dimensional
/// quadrature. The inner integral `E s(zx + sqrt(1-z^2) U)` is a Gaussian
/// smoothing of `s`, hence smooth in `x`; the outer one is adaptive with a
/// break at the origin.
pub fn mehler_expectation(activation: &Activation, z: f64) -> Result<f64> {
    let c = (1.0 - z * z).max(0.0).sqrt();
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let mut outer = |x: f64| {
        let w = norm * (-0.5 * x * x).exp();
        if w == 0.0 {
            return 0.0;
        }
        let sx = activation.eval(x);
        if sx == 0.0 {
            return 0.0;
        }
        w * sx * gaussian_smoothing(|v| activation.eval(v), z * x, c)
    };
    let left = adaptive_legendre(&mut outer, -30.0, 0.0, 1e-11)?;
    let right = adaptive_legendre(&mut outer, 0.0, 30.0, 1e-11)?;
    Ok(left + right)
}

/// Hermite coefficients `c_k = E[s(G) H_k(G)]` of an activation, returned as
/// a kernel whose Taylor coefficients are `c_k^2`.
///
/// The truncation is validated against the exact correlation function at
/// `z in {-0.5, 0, 0.5}`; a gap above `1e-6` is an error.
pub fn random_feature_profile(activation: Activation, hermite_truncation: usize) -> Result<KernelSpec> {
    let second_moment = gaussian_expectation(|x| activation.eval(x).powi(2), HERMITE_TOL)?;
    if !second_moment.is_finite() {
        return Err(Error::InvalidArgument("activation has no finite second moment".into()));
    }
    let mut hermite_coefficients = vec![0.0; hermite_truncation + 1];
    for (k, ck) in hermite_coefficients.iter_mut().enumerate() {
        *ck = gaussian_expectation(|x| activation.eval(x) * hermite_eval(k, x), HERMITE_TOL)?;
    }
    let kernel = KernelSpec::RandomFeature {
        activation: activation.clone(),
        hermite_truncation,
        hermite_coefficients,
        second_moment,
    };
    for z in [-0.5, 0.0, 0.5] {
        let exact = mehler_expectation(&activation, z)?;
        let series = kernel.evaluate(z);
        if (exact - series).abs() > 1e-6 {
            return Err(Error::TruncationTooSmall(format!(
                "at z = {z}: correlation {exact} vs truncated series {series} (truncation {hermite_truncation})"
            )));
        }
    }
    Ok(kernel)
}
