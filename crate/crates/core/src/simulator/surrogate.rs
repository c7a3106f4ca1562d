use crate::error::{Error, Result};
use crate::numerics::{RandomStream, SpdSystem};
use crate::scalar::dot;
use crate::spectral::CoefficientTable;

use super::fit::krr_fit;
use super::gram::Gram;

/// `p x p` Wishart matrix with `dof` degrees of freedom and identity scale,
/// i.e. the law of `G G^T` for a `p x dof` standard Gaussian `G`.
///
/// For `dof >= p` it is drawn through the Bartlett factor `L L^T`
/// (`L_ii^2 ~ chi^2(dof - i)`, standard normals below the diagonal), which
/// costs `O(p^3)` however large `dof` is; otherwise `G` is drawn directly.
pub fn sample_wishart(stream: &mut RandomStream, p: usize, dof: f64) -> Vec<f64> {
    let mut a = vec![0.0; p * p];
    if dof >= p as f64 {
        let mut l = vec![0.0; p * p];
        for i in 0..p {
            l[i * p + i] = stream.chi_squared(dof - i as f64).sqrt();
            for j in 0..i {
                l[i * p + j] = stream.standard_normal();
            }
        }
        for i in 0..p {
            for j in 0..=i {
                let v = dot(&l[i * p..i * p + j + 1], &l[j * p..j * p + j + 1]);
                a[i * p + j] = v;
                a[j * p + i] = v;
            }
        }
    } else {
        let m = dof.round() as usize;
        let g = stream.draw_standard_normal(p * m);
        for i in 0..p {
            for j in 0..=i {
                let v = dot(&g[i * m..(i + 1) * m], &g[j * m..(j + 1) * m]);
                a[i * p + j] = v;
                a[j * p + i] = v;
            }
        }
    }
    a
}

/// `(1/n) Tr (lt I + (mu/N) G G^T)^{-1}` for a fresh `n x N` standard
/// Gaussian `G`, `N = round(n / delta)`.
///
/// When `N < n` the trace is taken on the `N x N` side:
/// `Tr_n = (n - N)/lt + Tr_N (lt I + (mu/N) G^T G)^{-1}`.
pub fn wishart_stieltjes_mc(lambda_eff: f64, mu: f64, delta: f64, n: usize, stream: &mut RandomStream) -> Result<f64> {
    if !(lambda_eff > 0.0) {
        return Err(Error::NonPositiveRidge(lambda_eff));
    }
    if !(delta > 0.0) || n == 0 {
        return Err(Error::InvalidArgument("need delta > 0 and n >= 1".into()));
    }
    if mu == 0.0 {
        return Ok(1.0 / lambda_eff);
    }
    let big_n = ((n as f64 / delta).round() as usize).max(1);
    let (p, dof) = if big_n >= n { (n, big_n) } else { (big_n, n) };
    let mut a = sample_wishart(stream, p, dof as f64);
    let scale = mu / big_n as f64;
    for v in a.iter_mut() {
        *v *= scale;
    }
    let trace = SpdSystem::ridge(p, &a, lambda_eff)?.factor()?.trace_inverse();
    let full = if big_n >= n {
        trace
    } else {
        (n - big_n) as f64 / lambda_eff + trace
    };
    Ok(full / n as f64)
}

/// Outcome of one Gaussian-equivalent trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateRun {
    pub e_train: f64,
    pub e_test: f64,
    /// `sum_k N_k` over the simulated degrees.
    pub feature_dimension: f64,
}

/// Default cap on the surrogate feature dimension.
pub const DEFAULT_SURROGATE_CAP: f64 = 1e12;

/// Ridge regression on Gaussian features matched to the kernel's harmonic
/// blocks.
///
/// Degree `k <= L` contributes `N_k` features `u ~ N(0, I)` scaled by
/// `sqrt(mu_{k,d}/N_k)`; the teacher direction has i.i.d. standard normal
/// blocks `beta_k`, giving labels `sum_k alpha_{k,d}/sqrt(N_k) beta_k^T u_k
/// + noise`. Only the Gram matrix `U_k U_k^T`, the projections `U_k beta_k`
/// and `||beta_k||^2` enter, and these are drawn jointly as one
/// `(n+1) x (n+1)` Wishart matrix per degree. Kernel mass above `L` joins
/// the ridge and teacher energy above `L` joins the noise (and the test
/// error, which the predictor cannot reduce). The test error is the exact
/// Gaussian expectation, with no test sampling.
pub fn gaussian_equivalent_run(
    table: &CoefficientTable,
    n: usize,
    lambda: f64,
    stream: &mut RandomStream,
    cap: f64,
) -> Result<SurrogateRun> {
    if table.mu_finite.is_empty() {
        return Err(Error::InvalidArgument("the surrogate needs a finite-d table".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveRidge(lambda));
    }
    let l = table.truncation;
    let dims = &table.harmonic_dims;
    let feature_dimension: f64 = dims.iter().sum();
    if feature_dimension > cap {
        return Err(Error::SurrogateTooLarge {
            dimension: feature_dimension,
            cap,
        });
    }
    let p = n + 1;
    let mut blocks = Vec::with_capacity(l + 1);
    let mut gram = vec![0.0; n * n];
    let mut signal = vec![0.0; n];
    let mut teacher_energy = 0.0;
    for k in 0..=l {
        let w = sample_wishart(stream, p, dims[k]);
        let mu_t = table.mu_finite[k] / dims[k];
        let a_k = table.alpha_finite[k] / dims[k].sqrt();
        for i in 0..n {
            for j in 0..n {
                gram[i * n + j] += mu_t * w[i * p + j];
            }
            signal[i] += a_k * w[i * p + n];
        }
        teacher_energy += a_k * a_k * w[n * p + n];
        blocks.push(w);
    }
    let tail_noise = table.teacher_energy_residual.unwrap_or(0.0).max(0.0);
    let tail_ridge = table.kernel_mass_residual.unwrap_or(0.0).max(0.0);
    let noise_sd = (table.noise_sigma * table.noise_sigma + tail_noise).sqrt();
    let y: Vec<f64> = signal.iter().map(|s| s + noise_sd * stream.standard_normal()).collect();
    let fit = krr_fit(
        Gram {
            n,
            inner: Vec::new(),
            values: gram,
        },
        &y,
        lambda + tail_ridge,
    )?;
    let c = &fit.coefficients;
    let e_train = lambda * dot(&y, c) / n as f64;
    let mut e_test = teacher_energy + tail_noise;
    for (k, w) in blocks.iter().enumerate() {
        let mu_t = table.mu_finite[k] / dims[k];
        let a_k = table.alpha_finite[k] / dims[k].sqrt();
        let mut cross = 0.0;
        let mut quad = 0.0;
        for i in 0..n {
            cross += c[i] * w[i * p + n];
            quad += c[i] * dot(&w[i * p..i * p + n], c);
        }
        e_test += -2.0 * a_k * mu_t * cross + mu_t * mu_t * quad;
    }
    Ok(SurrogateRun {
        e_train,
        e_test: e_test.max(0.0),
        feature_dimension,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_stream;

    #[test]
    fn wishart_mean_is_dof_identity() {
        let (p, dof) = (6usize, 40.0);
        let trials = 400;
        let mut mean = vec![0.0; p * p];
        let mut s = make_stream(8, 0);
        for _ in 0..trials {
            for (m, v) in mean.iter_mut().zip(sample_wishart(&mut s, p, dof)) {
                *m += v / trials as f64;
            }
        }
        for i in 0..p {
            for j in 0..p {
                let expect = if i == j { dof } else { 0.0 };
                // sd of an entry is sqrt(2 dof) or sqrt(dof), over sqrt(trials)
                assert!((mean[i * p + j] - expect).abs() < 5.0 * (2.0 * dof / trials as f64).sqrt());
            }
        }
    }

    #[test]
    fn zero_mu_trace() {
        assert_eq!(wishart_stieltjes_mc(0.5, 0.0, 1.0, 200, &mut make_stream(1, 1)).unwrap(), 2.0);
    }

    #[test]
    fn trace_bounded_by_inverse_ridge() {
        let v = wishart_stieltjes_mc(4.0, 1.0, 0.5, 150, &mut make_stream(1, 2)).unwrap();
        assert!(v < 0.25 && v > 0.2);
    }
}
