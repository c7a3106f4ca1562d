use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shared real callable.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Activation of a random-feature layer.
#[derive(Clone)]
pub enum Activation {
    Identity,
    Relu,
    Tanh,
    Sigmoid,
    /// Orthonormal Hermite polynomial of the given degree.
    Hermite(usize),
    Custom { name: String, f: ScalarFn },
}

impl Activation {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            Activation::Hermite(k) => crate::orthopoly::hermite_eval(*k, x),
            Activation::Custom { f, .. } => f(x),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Activation::Identity => "identity".into(),
            Activation::Relu => "relu".into(),
            Activation::Tanh => "tanh".into(),
            Activation::Sigmoid => "sigmoid".into(),
            Activation::Hermite(k) => format!("hermite{k}"),
            Activation::Custom { name, .. } => name.clone(),
        }
    }

    /// Parse one of the built-in names (`relu`, `tanh`, `sigmoid`,
    /// `identity`, `hermiteK`).
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "identity" | "linear" => Some(Activation::Identity),
            "relu" => Some(Activation::Relu),
            "tanh" => Some(Activation::Tanh),
            "sigmoid" => Some(Activation::Sigmoid),
            _ => name
                .strip_prefix("hermite")
                .and_then(|k| k.parse().ok())
                .map(Activation::Hermite),
        }
    }
}

impl fmt::Debug for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Activation({})", self.name())
    }
}

/// Profile `f` of an inner-product kernel `K(x, x') = f(<x, x'> / d)`.
#[derive(Clone)]
pub enum KernelSpec {
    /// `f(z) = sum_k c_k z^k`. `f_one` is the declared total mass `f(1)`; it
    /// exceeds the coefficient sum when the series was truncated.
    Taylor { coefficients: Vec<f64>, f_one: f64 },
    /// `f(z) = (z + offset)^degree`.
    Polynomial { offset: f64, degree: usize },
    /// `f(z) = E[s(X) s(Y)]` with `corr(X, Y) = z`, carried by its Hermite
    /// coefficients `c_k = E[s(G) H_k(G)]`; evaluates the truncated series
    /// `sum_k c_k^2 z^k`.
    RandomFeature {
        activation: Activation,
        hermite_truncation: usize,
        hermite_coefficients: Vec<f64>,
        second_moment: f64,
    },
    /// Opaque profile on `[-1, 1]` bounded by `bound`.
    Profile { name: String, f: ScalarFn, bound: f64 },
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Taylor { coefficients, f_one } => f
                .debug_struct("Taylor")
                .field("coefficients", coefficients)
                .field("f_one", f_one)
                .finish(),
            KernelSpec::Polynomial { offset, degree } => f
                .debug_struct("Polynomial")
                .field("offset", offset)
                .field("degree", degree)
                .finish(),
            KernelSpec::RandomFeature {
                activation,
                hermite_truncation,
                ..
            } => f
                .debug_struct("RandomFeature")
                .field("activation", activation)
                .field("hermite_truncation", hermite_truncation)
                .finish(),
            KernelSpec::Profile { name, bound, .. } => f
                .debug_struct("Profile")
                .field("name", name)
                .field("bound", bound)
                .finish(),
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn horner(coefficients: &[f64], z: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

/// Serializable description of a kernel, used by configs and table dumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelDescriptor {
    Taylor {
        coefficients: Vec<f64>,
        #[serde(default)]
        f_one: Option<f64>,
    },
    Polynomial {
        offset: f64,
        degree: usize,
    },
    RandomFeature {
        activation: String,
        #[serde(default = "default_hermite_truncation")]
        hermite_truncation: usize,
    },
    Exponential {
        #[serde(default = "one")]
        scale: f64,
    },
}

fn default_hermite_truncation() -> usize {
    24
}

fn one() -> f64 {
    1.0
}

impl KernelSpec {
    /// Taylor kernel whose total mass is the coefficient sum.
    pub fn taylor(coefficients: Vec<f64>) -> Self {
        let f_one = coefficients.iter().sum();
        KernelSpec::Taylor { coefficients, f_one }
    }

    pub fn polynomial(offset: f64, degree: usize) -> Result<Self> {
        if !(offset >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "polynomial kernel offset must be >= 0, got {offset}"
            )));
        }
        Ok(KernelSpec::Polynomial { offset, degree })
    }

    pub fn profile(name: impl Into<String>, f: ScalarFn, bound: f64) -> Result<Self> {
        let k = KernelSpec::Profile {
            name: name.into(),
            f,
            bound,
        };
        k.check_bound()?;
        Ok(k)
    }

    /// `z^3/30 + z^2/2 + z + 1`.
    pub fn fig1() -> Self {
        KernelSpec::taylor(vec![1.0, 1.0, 0.5, 1.0 / 30.0])
    }

    pub fn from_descriptor(desc: &KernelDescriptor) -> Result<Self> {
        match desc {
            KernelDescriptor::Taylor { coefficients, f_one } => {
                if coefficients.is_empty() {
                    return Err(Error::InvalidArgument("empty Taylor coefficient list".into()));
                }
                let sum: f64 = coefficients.iter().sum();
                let f_one = f_one.unwrap_or(sum);
                if f_one < sum - 1e-12 * sum.abs().max(1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "declared f(1) = {f_one} is below the coefficient sum {sum}"
                    )));
                }
                Ok(KernelSpec::Taylor {
                    coefficients: coefficients.clone(),
                    f_one,
                })
            }
            KernelDescriptor::Polynomial { offset, degree } => KernelSpec::polynomial(*offset, *degree),
            KernelDescriptor::RandomFeature {
                activation,
                hermite_truncation,
            } => {
                let act = Activation::from_name(activation)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown activation `{activation}`")))?;
                super::random_feature_profile(act, *hermite_truncation)
            }
            KernelDescriptor::Exponential { scale } => {
                let s = *scale;
                KernelSpec::profile(format!("exp({s} z)"), Arc::new(move |z| (s * z).exp()), s.abs().exp())
            }
        }
    }

    /// Best-effort descriptor (custom profiles and activations have none).
    pub fn descriptor(&self) -> Option<KernelDescriptor> {
        match self {
            KernelSpec::Taylor { coefficients, f_one } => Some(KernelDescriptor::Taylor {
                coefficients: coefficients.clone(),
                f_one: Some(*f_one),
            }),
            KernelSpec::Polynomial { offset, degree } => Some(KernelDescriptor::Polynomial {
                offset: *offset,
                degree: *degree,
            }),
            KernelSpec::RandomFeature {
                activation: a @ (Activation::Identity | Activation::Relu | Activation::Tanh | Activation::Sigmoid | Activation::Hermite(_)),
                hermite_truncation,
                ..
            } => Some(KernelDescriptor::RandomFeature {
                activation: a.name(),
                hermite_truncation: *hermite_truncation,
            }),
            _ => None,
        }
    }

    pub fn evaluate(&self, z: f64) -> f64 {
        match self {
            KernelSpec::Taylor { coefficients, .. } => horner(coefficients, z),
            KernelSpec::Polynomial { offset, degree } => (z + offset).powi(*degree as i32),
            KernelSpec::RandomFeature {
                hermite_coefficients,
                ..
            } => hermite_coefficients.iter().rev().fold(0.0, |acc, &c| acc * z + c * c),
            KernelSpec::Profile { f, .. } => f(z),
        }
    }

    /// Total kernel mass `f(1)`, the diagonal of the Gram matrix.
    pub fn total_mass(&self) -> f64 {
        match self {
            KernelSpec::Taylor { f_one, .. } => *f_one,
            // the represented kernel is the truncated series
            _ => self.evaluate(1.0),
        }
    }

    /// Taylor coefficients at 0, when the profile carries them.
    pub fn taylor_coefficients(&self) -> Option<Vec<f64>> {
        match self {
            KernelSpec::Taylor { coefficients, .. } => Some(coefficients.clone()),
            KernelSpec::Polynomial { offset, degree } => Some(
                (0..=*degree)
                    .map(|j| binomial(*degree, j) * offset.powi((*degree - j) as i32))
                    .collect(),
            ),
            KernelSpec::RandomFeature {
                hermite_coefficients,
                ..
            } => Some(hermite_coefficients.iter().map(|c| c * c).collect()),
            KernelSpec::Profile { .. } => None,
        }
    }

    /// `f^{(k)}(z)` for kernels with Taylor data.
    pub fn derivative(&self, k: usize, z: f64) -> Result<f64> {
        let c = self.taylor_coefficients().ok_or(Error::DerivativesUnavailable)?;
        if k >= c.len() {
            return Ok(0.0);
        }
        // falling-factorial weights j!/(j-k)!
        let shifted: Vec<f64> = (k..c.len())
            .map(|j| c[j] * ((j - k + 1)..=j).fold(1.0, |acc, i| acc * i as f64))
            .collect();
        Ok(horner(&shifted, z))
    }

    /// Declared bound `C_f` on `|f|` over `[-1, 1]`.
    pub fn bound(&self) -> f64 {
        match self {
            KernelSpec::Profile { bound, .. } => *bound,
            _ => self
                .taylor_coefficients()
                .map(|c| c.iter().map(|v| v.abs()).sum())
                .unwrap_or(f64::INFINITY),
        }
    }

    /// Spot-check `|f(z)| <= C_f` on a 1001-point grid of `[-1, 1]`.
    pub fn check_bound(&self) -> Result<()> {
        let bound = self.bound();
        for i in 0..=1000 {
            let z = -1.0 + 2.0 * i as f64 / 1000.0;
            let value = self.evaluate(z);
            if !(value.abs() <= bound * (1.0 + 1e-12)) {
                return Err(Error::KernelBoundViolated { z, value, bound });
            }
        }
        Ok(())
    }

    /// `E s(G)^2 - sum_k c_k^2` for random-feature kernels: activation
    /// energy dropped by the Hermite truncation.
    pub fn truncation_gap(&self) -> Option<f64> {
        match self {
            KernelSpec::RandomFeature {
                second_moment,
                hermite_coefficients,
                ..
            } => Some(second_moment - hermite_coefficients.iter().map(|c| c * c).sum::<f64>()),
            _ => None,
        }
    }

    /// Polynomial degree of `f`, if finite.
    pub fn polynomial_degree(&self) -> Option<usize> {
        match self {
            KernelSpec::Profile { .. } => None,
            _ => self.taylor_coefficients().map(|c| c.len().saturating_sub(1)),
        }
    }
}
