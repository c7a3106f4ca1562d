//! Adaptive expectations for callables that are not polynomials.

use std::sync::OnceLock;

use crate::error::{Error, Result};

use super::quadrature::{gauss_rule_gaussian, gauss_rule_sphere_marginal, gauss_rule_uniform, QuadratureRule};

const PANEL_NODES: usize = 10;
const MAX_DEPTH: usize = 48;
/// Half-width of the window used for Gaussian integrals by panels.
const GAUSSIAN_WINDOW: f64 = 30.0;

fn panel_rule() -> &'static QuadratureRule<f64> {
    static RULE: OnceLock<QuadratureRule<f64>> = OnceLock::new();
    RULE.get_or_init(|| gauss_rule_uniform(PANEL_NODES).expect("legendre rule"))
}

fn hermite_rules() -> &'static [QuadratureRule<f64>] {
    static RULES: OnceLock<Vec<QuadratureRule<f64>>> = OnceLock::new();
    RULES.get_or_init(|| {
        [64usize, 128, 256, 512, 1024]
            .iter()
            .map(|&m| gauss_rule_gaussian(m).expect("hermite rule"))
            .collect()
    })
}

fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let rule = panel_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    // probability weights on [-1,1] carry a factor 1/2
    2.0 * half * rule.integrate(|t| f(mid + half * t))
}

/// `int_a^b f(x) dx` by adaptive bisection of 10-point Gauss-Legendre
/// panels; a panel is accepted once it agrees with its two halves to within
/// its share of `abs_tol`.
pub fn adaptive_legendre<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let total = (b - a).abs();
    let mut stack = vec![(a, b, panel(&mut f, a, b), 0usize)];
    let mut sum = 0.0;
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(&mut f, lo, mid);
        let right = panel(&mut f, mid, hi);
        let share = abs_tol * ((hi - lo).abs() / total).max(1e-14);
        if (left + right - whole).abs() <= share {
            sum += left + right;
        } else if depth >= MAX_DEPTH {
            return Err(Error::QuadratureNotConverged(format!(
                "adaptive panel [{lo}, {hi}] did not reach tolerance"
            )));
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    if sum.is_finite() {
        Ok(sum)
    } else {
        Err(Error::QuadratureNotConverged("non-finite integrand".into()))
    }
}

/// `E f(G)` for `G ~ N(0,1)`.
///
/// Gauss-Hermite rules are doubled from 64 nodes until two successive
/// values agree to `tol` (relative to `max(1, |value|)`); integrands with
/// kinks never settle that way and are integrated by adaptive panels on
/// `[-30, 0] u [0, 30]` instead.
pub fn gaussian_expectation<F: FnMut(f64) -> f64>(mut f: F, tol: f64) -> Result<f64> {
    let rules = hermite_rules();
    let mut prev = rules[0].integrate(&mut f);
    for rule in &rules[1..] {
        let cur = rule.integrate(&mut f);
        if cur.is_finite() && (cur - prev).abs() <= tol * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let mut g = |x: f64| {
        let w = norm * (-0.5 * x * x).exp();
        if w == 0.0 {
            0.0
        } else {
            f(x) * w
        }
    };
    let tol_abs = 0.1 * tol;
    let left = adaptive_legendre(&mut g, -GAUSSIAN_WINDOW, 0.0, tol_abs)?;
    let right = adaptive_legendre(&mut g, 0.0, GAUSSIAN_WINDOW, tol_abs)?;
    Ok(left + right)
}

/// `E f(mean + scale G)` on a fixed composite Gauss-Legendre grid with a
/// break point at the origin, where common activations have their kinks.
///
/// The panel layout moves continuously with `mean`, so the result is a
/// smooth function of `mean` and can itself be integrated adaptively.
pub fn gaussian_smoothing<F: FnMut(f64) -> f64>(mut f: F, mean: f64, scale: f64) -> f64 {
    const HALF_WIDTH: f64 = 12.0;
    const PANEL_WIDTH: f64 = 0.25;
    if scale == 0.0 {
        return f(mean);
    }
    let norm = 1.0 / (scale * (2.0 * std::f64::consts::PI).sqrt());
    let mut g = |v: f64| {
        let t = (v - mean) / scale;
        norm * (-0.5 * t * t).exp() * f(v)
    };
    let (lo, hi) = (mean - HALF_WIDTH * scale, mean + HALF_WIDTH * scale);
    let pieces: Vec<(f64, f64)> = if lo < 0.0 && hi > 0.0 {
        vec![(lo, 0.0), (0.0, hi)]
    } else {
        vec![(lo, hi)]
    };
    let mut sum = 0.0;
    for (a, b) in pieces {
        let count = ((b - a) / (PANEL_WIDTH * scale)).ceil().max(1.0) as usize;
        let w = (b - a) / count as f64;
        for i in 0..count {
            let p0 = a + w * i as f64;
            sum += panel(&mut g, p0, if i + 1 == count { b } else { p0 + w });
        }
    }
    sum
}

/// `E f(X)` for `X ~ tau_{d-1,1}`.
///
/// Gauss rules for the measure itself are doubled from `initial_nodes` (four
/// doublings at most); if that does not settle to `tol` absolute, the
/// density is integrated directly by adaptive panels.
pub fn sphere_marginal_expectation<F: FnMut(f64) -> f64>(
    d: usize,
    mut f: F,
    initial_nodes: usize,
    tol: f64,
) -> Result<f64> {
    let mut m = initial_nodes.max(1);
    let mut prev = gauss_rule_sphere_marginal::<f64>(d, m)?.integrate(&mut f);
    for _ in 0..4 {
        m *= 2;
        let cur = gauss_rule_sphere_marginal::<f64>(d, m)?.integrate(&mut f);
        if cur.is_finite() && (cur - prev).abs() <= tol {
            return Ok(cur);
        }
        prev = cur;
    }
    let radius = (d as f64).sqrt();
    let exponent = 0.5 * (d as f64 - 3.0);
    let density = |x: f64| {
        if exponent == 0.0 {
            1.0
        } else {
            let s = 1.0 - x * x / d as f64;
            if s <= 0.0 {
                0.0
            } else {
                (exponent * s.ln()).exp()
            }
        }
    };
    let z = adaptive_legendre(density, -radius, radius, 1e-15)?;
    let num = adaptive_legendre(|x| f(x) * density(x), -radius, radius, tol * z * 0.1)?;
    let out = num / z;
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::QuadratureNotConverged(format!(
            "sphere-marginal expectation at d = {d}"
        )))
    }
}
