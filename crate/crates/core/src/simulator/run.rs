use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::make_stream;
use crate::spectral::{CoefficientTable, KernelSpec, TeacherSpec};

use super::data::make_dataset;
use super::fit::{empirical_train_error, krr_fit};
use super::gram::kernel_gram;
use super::surrogate::gaussian_equivalent_run;
use super::test_error::{test_error_mc, test_error_semianalytic};

/// Sub-stream indices within one trial seed.
pub const DATA_STREAM: u64 = 0;
pub const MC_STREAM: u64 = 1;
pub const SURROGATE_STREAM: u64 = 2;

/// What kind of trial produced a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Kernel,
    Surrogate,
}

/// Measurements from one simulated trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRun {
    pub kind: RunKind,
    pub trial_seed: u64,
    pub n: usize,
    pub d: usize,
    pub truncation: usize,
    pub e_train: f64,
    /// Semi-analytic test error (primary estimator).
    pub e_test: f64,
    pub e_test_mc: Option<f64>,
    pub e_test_mc_se: Option<f64>,
    pub ms: Option<f64>,
}

impl EmpiricalRun {
    /// `|semi - mc| <= 3 SE` when an MC estimate exists.
    pub fn estimators_agree(&self) -> Option<bool> {
        match (self.e_test_mc, self.e_test_mc_se) {
            (Some(mc), Some(se)) => Some((self.e_test - mc).abs() <= 3.0 * se),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrialOptions {
    /// Fresh test points for the Monte-Carlo cross-check (none if `None`).
    pub m_test: Option<usize>,
    pub timing: bool,
}

fn table_size(table: &CoefficientTable) -> Result<(usize, usize)> {
    match table.n {
        Some(n) if table.dimension > 0 => Ok((n, table.dimension)),
        _ => Err(Error::InvalidArgument("simulation needs a finite-d table with n".into())),
    }
}

/// One kernel ridge regression experiment on the sphere.
pub fn run_kernel_trial(
    kernel: &KernelSpec,
    teacher: &TeacherSpec,
    table: &CoefficientTable,
    trial_seed: u64,
    opts: TrialOptions,
) -> Result<EmpiricalRun> {
    let start = Instant::now();
    let (n, d) = table_size(table)?;
    let dataset = make_dataset(teacher, &mut make_stream(trial_seed, DATA_STREAM), n, d);
    let gram = kernel_gram(kernel, &dataset.x, n, d)?;
    let fit = krr_fit(gram, &dataset.y, table.lambda)?;
    let e_train = empirical_train_error(&fit, &dataset.y)?;
    let e_test = test_error_semianalytic(&fit, table, &dataset)?;
    let (e_test_mc, e_test_mc_se) = match opts.m_test {
        Some(m) => {
            let (v, se) = test_error_mc(&fit, &dataset, teacher, kernel, m, &mut make_stream(trial_seed, MC_STREAM))?;
            (Some(v), Some(se))
        }
        None => (None, None),
    };
    Ok(EmpiricalRun {
        kind: RunKind::Kernel,
        trial_seed,
        n,
        d,
        truncation: table.truncation,
        e_train,
        e_test,
        e_test_mc,
        e_test_mc_se,
        ms: opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

/// One Gaussian-equivalent trial at the table's `(n, d)`.
pub fn run_surrogate_trial(table: &CoefficientTable, trial_seed: u64, cap: f64, timing: bool) -> Result<EmpiricalRun> {
    let start = Instant::now();
    let (n, d) = table_size(table)?;
    let run = gaussian_equivalent_run(table, n, table.lambda, &mut make_stream(trial_seed, SURROGATE_STREAM), cap)?;
    Ok(EmpiricalRun {
        kind: RunKind::Surrogate,
        trial_seed,
        n,
        d,
        truncation: table.truncation,
        e_train: run.e_train,
        e_test: run.e_test,
        e_test_mc: None,
        e_test_mc_se: None,
        ms: timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}
