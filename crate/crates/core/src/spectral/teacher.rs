use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::kernel::ScalarFn;

/// Link function `g` of the teacher `y = g(<x, xi>/sqrt d) + sigma z`.
#[derive(Clone)]
pub struct TeacherSpec {
    g: ScalarFn,
    name: String,
    /// Monomial coefficients `a_0, a_1, ...` when `g` is a polynomial.
    polynomial: Option<Vec<f64>>,
    growth_constant: f64,
    growth_degree: u32,
    pub noise_sigma: f64,
}

impl fmt::Debug for TeacherSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TeacherSpec")
            .field("name", &self.name)
            .field("polynomial", &self.polynomial)
            .field("growth", &(self.growth_constant, self.growth_degree))
            .field("noise_sigma", &self.noise_sigma)
            .finish()
    }
}

/// Serializable teacher description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TeacherDescriptor {
    Polynomial { coefficients: Vec<f64>, noise_sigma: f64 },
    Named { function: String, noise_sigma: f64 },
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma >= 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("noise sigma must be >= 0, got {sigma}")))
    }
}

impl TeacherSpec {
    /// `g(x) = sum_i a_i x^i`; growth bound `(sum |a_i|, degree)`.
    pub fn polynomial(coefficients: Vec<f64>, noise_sigma: f64) -> Result<Self> {
        check_sigma(noise_sigma)?;
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument("empty teacher polynomial".into()));
        }
        let c = coefficients.clone();
        let growth_constant = c.iter().map(|a| a.abs()).sum();
        let growth_degree = (c.len() - 1) as u32;
        let g: ScalarFn = Arc::new(move |x| c.iter().rev().fold(0.0, |acc, &a| acc * x + a));
        let t = TeacherSpec {
            g,
            name: "polynomial".into(),
            polynomial: Some(coefficients),
            growth_constant,
            growth_degree,
            noise_sigma,
        };
        t.check_growth()?;
        Ok(t)
    }

    /// Arbitrary `g` with the declared bound `|g(x)| <= C (1 + |x|^K)`.
    pub fn callable(
        name: impl Into<String>,
        g: ScalarFn,
        growth_constant: f64,
        growth_degree: u32,
        noise_sigma: f64,
    ) -> Result<Self> {
        check_sigma(noise_sigma)?;
        let t = TeacherSpec {
            g,
            name: name.into(),
            polynomial: None,
            growth_constant,
            growth_degree,
            noise_sigma,
        };
        t.check_growth()?;
        Ok(t)
    }

    /// `x^4/20 + x^3/2 + x^2 + x`.
    pub fn fig1(noise_sigma: f64) -> Result<Self> {
        TeacherSpec::polynomial(vec![0.0, 1.0, 1.0, 0.5, 0.05], noise_sigma)
    }

    pub fn from_descriptor(desc: &TeacherDescriptor) -> Result<Self> {
        match desc {
            TeacherDescriptor::Polynomial {
                coefficients,
                noise_sigma,
            } => TeacherSpec::polynomial(coefficients.clone(), *noise_sigma),
            TeacherDescriptor::Named { function, noise_sigma } => {
                let (g, c, k): (ScalarFn, f64, u32) = match function.as_str() {
                    "tanh" => (Arc::new(f64::tanh), 1.0, 0),
                    "relu" => (Arc::new(|x: f64| x.max(0.0)), 1.0, 1),
                    "sin" => (Arc::new(f64::sin), 1.0, 0),
                    "abs" => (Arc::new(f64::abs), 1.0, 1),
                    other => return Err(Error::InvalidArgument(format!("unknown teacher function `{other}`"))),
                };
                TeacherSpec::callable(function.clone(), g, c, k, *noise_sigma)
            }
        }
    }

    pub fn descriptor(&self) -> TeacherDescriptor {
        match &self.polynomial {
            Some(c) => TeacherDescriptor::Polynomial {
                coefficients: c.clone(),
                noise_sigma: self.noise_sigma,
            },
            None => TeacherDescriptor::Named {
                function: self.name.clone(),
                noise_sigma: self.noise_sigma,
            },
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.g)(x)
    }

    pub fn function(&self) -> &ScalarFn {
        &self.g
    }

    pub fn polynomial_coefficients(&self) -> Option<&[f64]> {
        self.polynomial.as_deref()
    }

    pub fn growth(&self) -> (f64, u32) {
        (self.growth_constant, self.growth_degree)
    }

    pub fn with_noise(mut self, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        self.noise_sigma = sigma;
        Ok(self)
    }

    /// Spot-check the growth bound on a grid of `[-50, 50]`.
    pub fn check_growth(&self) -> Result<()> {
        for i in 0..=2000 {
            let x = -50.0 + 0.05 * i as f64;
            let bound = self.growth_constant * (1.0 + x.abs().powi(self.growth_degree as i32));
            let v = self.eval(x);
            if !(v.abs() <= bound * (1.0 + 1e-12)) {
                return Err(Error::TeacherGrowthViolated { x });
            }
        }
        Ok(())
    }
}
