//! Learning curves of kernel ridge regression on the sphere in the
//! polynomial scaling regime `n ~ d^K / K!`.
//!
//! The crate covers the asymptotic theory (a Marchenko-Pastur type fixed
//! point and the resulting train/test error formulas), the kernel and
//! teacher expansion coefficients it consumes, finite-size simulations that
//! check it, and a small experiment harness.
//!
//! ```
//! use krr_core::asymptotics::stieltjes_mp;
//! let r = stieltjes_mp(1.0_f64, 1.0, 1.0).unwrap();
//! assert!((r - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-14);
//! ```

pub mod asymptotics;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod orthopoly;
pub mod scalar;
pub mod simulator;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double precision prediction, the default for all callable-based code.
pub type Prediction = asymptotics::Prediction<f64>;
pub type PhaseInputs = asymptotics::PhaseInputs<f64>;
pub type Regime = asymptotics::Regime<f64>;
/// Single precision variants of the generic theory types.
pub type Prediction32 = asymptotics::Prediction<f32>;
pub type PhaseInputs32 = asymptotics::PhaseInputs<f32>;
