use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{predict, ridgeless_limit, stieltjes_mp, Regime};
use crate::error::{Error, Result};
use crate::numerics::make_stream;
use crate::simulator::{
    run_kernel_trial, run_surrogate_trial, wishart_stieltjes_mc, EmpiricalRun, TrialOptions, MC_STREAM,
};
use crate::spectral::{build_table, sample_size, CoefficientTable, KernelSpec, TableRequest, TeacherSpec};

use super::config::ExperimentConfig;

/// Row category, written to the `kind` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Theory,
    Ridgeless,
    Kernel,
    Surrogate,
    Aggregate,
    AggregateSurrogate,
    MpTheory,
    MpTrial,
    MpAggregate,
    Failed,
}

impl RowKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RowKind::Theory => "theory",
            RowKind::Ridgeless => "ridgeless",
            RowKind::Kernel => "kernel",
            RowKind::Surrogate => "surrogate",
            RowKind::Aggregate => "aggregate",
            RowKind::AggregateSurrogate => "aggregate_surrogate",
            RowKind::MpTheory => "mp_theory",
            RowKind::MpTrial => "mp_trial",
            RowKind::MpAggregate => "mp_aggregate",
            RowKind::Failed => "failed",
        }
    }

    pub fn is_trial(self) -> bool {
        matches!(self, RowKind::Kernel | RowKind::Surrogate | RowKind::MpTrial | RowKind::Failed)
    }
}

/// One output row. For aggregate rows `trial` holds the number of trials
/// that entered the mean.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub n: Option<usize>,
    pub kind: Option<RowKind>,
    pub trial: Option<usize>,
    pub e_train: Option<f64>,
    pub e_test: Option<f64>,
    pub bias: Option<f64>,
    pub variance: Option<f64>,
    pub r_star: Option<f64>,
    pub theta: Option<f64>,
    pub seed: Option<u64>,
    pub ms: Option<f64>,
    /// `n / N_{K,d}`, the finite-dimension ratio.
    pub delta_finite: Option<f64>,
    pub e_train_se: Option<f64>,
    pub e_test_se: Option<f64>,
    pub r_star_se: Option<f64>,
    pub e_test_mc: Option<f64>,
    pub e_test_mc_se: Option<f64>,
    pub message: Option<String>,
}

impl SweepRow {
    pub fn kind(&self) -> RowKind {
        self.kind.unwrap_or(RowKind::Failed)
    }
}

/// Rows of a sweep plus failure bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub attempted_trials: usize,
    pub failed_trials: usize,
}

impl SweepOutcome {
    /// More than half of the attempted trials failed.
    pub fn is_partial_failure(&self) -> bool {
        self.attempted_trials > 0 && 2 * self.failed_trials > self.attempted_trials
    }

    pub fn rows_of(&self, kind: RowKind) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.kind() == kind)
    }
}

/// Seed for trial `trial` at grid point `point`: a SplitMix64 finalizer
/// applied to a counter derived from the master seed.
pub fn trial_seed(master_seed: u64, point: usize, trial: usize) -> u64 {
    let counter = ((point as u64) << 32) | trial as u64;
    let mut z = master_seed ^ counter.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Kernel, teacher and per-point tables for a config.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub kernel: KernelSpec,
    pub teacher: TeacherSpec,
    pub deltas: Vec<f64>,
    /// `None` only in ridgeless-only configs without a ridge.
    pub tables: Vec<Option<CoefficientTable>>,
    /// Limit coefficients for ridgeless rows and MP checks.
    pub reference: CoefficientTable,
}

fn base_request(cfg: &ExperimentConfig, lambda: f64, delta: f64) -> TableRequest {
    let finite = cfg.dimension > 0;
    TableRequest {
        phase: cfg.phase,
        dimension: cfg.dimension,
        n: finite.then(|| sample_size(delta, cfg.dimension, cfg.phase).max(1)),
        delta_phase: (!finite).then_some(delta),
        lambda,
        truncation: cfg.truncation.degree(),
    }
}

/// Build every table the sweep needs. Finite-d tables are computed once and
/// re-targeted per sample size.
pub fn plan_sweep(cfg: &ExperimentConfig) -> Result<SweepPlan> {
    let kernel = KernelSpec::from_descriptor(&cfg.kernel)?;
    let teacher = TeacherSpec::from_descriptor(&cfg.teacher)?;
    let deltas = cfg.grid();
    // the ridge only enters lambda_eff; ridgeless rows never read it
    let reference_lambda = cfg.lambda.unwrap_or(1.0);
    let base = build_table(&kernel, &teacher, &base_request(cfg, reference_lambda, deltas[0]))?;
    let reference = if cfg.dimension == 0 {
        base.clone()
    } else {
        let mut req = base_request(cfg, reference_lambda, deltas[0]);
        req.dimension = 0;
        req.n = None;
        req.delta_phase = Some(deltas[0]);
        req.truncation = Some(base.truncation);
        build_table(&kernel, &teacher, &req)?
    };
    let tables = match cfg.lambda {
        None => vec![None; deltas.len()],
        Some(_) => deltas
            .iter()
            .map(|&delta| {
                if cfg.dimension == 0 {
                    Ok(Some(base.at_phase_ratio(delta)))
                } else {
                    let n = sample_size(delta, cfg.dimension, cfg.phase).max(1);
                    base.at_sample_size(n).map(Some)
                }
            })
            .collect::<Result<_>>()?,
    };
    Ok(SweepPlan {
        kernel,
        teacher,
        deltas,
        tables,
        reference,
    })
}

/// Theory row for one grid point.
pub fn theory_row(cfg: &ExperimentConfig, table: &CoefficientTable, delta: f64) -> Result<SweepRow> {
    let regime = Regime::from_table(table, cfg.theory_mode).or_else(|_| {
        Ok::<_, Error>(Regime::limit(table.phase, table.delta_phase, table.lambda))
    })?;
    let p = predict(table, &regime)?;
    Ok(SweepRow {
        delta,
        n: table.n,
        kind: Some(RowKind::Theory),
        e_train: Some(p.e_train),
        e_test: Some(p.e_test),
        bias: Some(p.bias),
        variance: Some(p.variance),
        r_star: Some(p.r_star),
        theta: Some(p.theta),
        delta_finite: table.delta_phase_finite,
        ..SweepRow::default()
    })
}

fn ridgeless_row(cfg: &ExperimentConfig, plan: &SweepPlan, delta: f64) -> SweepRow {
    let k = cfg.phase;
    let r = &plan.reference;
    let mut row = SweepRow {
        delta,
        kind: Some(RowKind::Ridgeless),
        ..SweepRow::default()
    };
    match ridgeless_limit(r.alpha_limit[k], r.mu_limit[k], delta, r.noise_sigma) {
        Ok((bias, variance)) => {
            row.bias = Some(bias);
            row.variance = Some(variance);
            row.e_test = Some(bias + variance);
        }
        Err(e) => row.message = Some(e.to_string()),
    }
    row
}

fn empirical_row(run: &EmpiricalRun, delta: f64, trial: usize, table: &CoefficientTable) -> SweepRow {
    SweepRow {
        delta,
        n: Some(run.n),
        kind: Some(match run.kind {
            crate::simulator::RunKind::Kernel => RowKind::Kernel,
            crate::simulator::RunKind::Surrogate => RowKind::Surrogate,
        }),
        trial: Some(trial),
        e_train: Some(run.e_train),
        e_test: Some(run.e_test),
        seed: Some(run.trial_seed),
        ms: run.ms,
        delta_finite: table.delta_phase_finite,
        e_test_mc: run.e_test_mc,
        e_test_mc_se: run.e_test_mc_se,
        ..SweepRow::default()
    }
}

fn failed_row(delta: f64, n: Option<usize>, trial: usize, seed: u64, err: &Error) -> SweepRow {
    SweepRow {
        delta,
        n,
        kind: Some(RowKind::Failed),
        trial: Some(trial),
        seed: Some(seed),
        message: Some(err.to_string()),
        ..SweepRow::default()
    }
}

/// Sample mean and standard error.
pub fn mean_se(values: &[f64]) -> (f64, Option<f64>) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, Some((var / m).sqrt()))
}

fn aggregate_row(rows: &[SweepRow], kind: RowKind, delta: f64) -> Option<SweepRow> {
    if rows.is_empty() {
        return None;
    }
    let pick = |f: fn(&SweepRow) -> Option<f64>| rows.iter().filter_map(f).collect::<Vec<_>>();
    let train = pick(|r| r.e_train);
    let test = pick(|r| r.e_test);
    let rstar = pick(|r| r.r_star);
    let mut row = SweepRow {
        delta,
        n: rows[0].n,
        kind: Some(kind),
        trial: Some(rows.len()),
        delta_finite: rows[0].delta_finite,
        ..SweepRow::default()
    };
    if !train.is_empty() {
        let (m, se) = mean_se(&train);
        row.e_train = Some(m);
        row.e_train_se = se;
    }
    if !test.is_empty() {
        let (m, se) = mean_se(&test);
        row.e_test = Some(m);
        row.e_test_se = se;
    }
    if !rstar.is_empty() {
        let (m, se) = mean_se(&rstar);
        row.r_star = Some(m);
        row.r_star_se = se;
    }
    Some(row)
}

#[derive(Debug, Clone, Copy)]
enum Task {
    Kernel { point: usize, trial: usize },
    Surrogate { point: usize, trial: usize },
    Mp { point: usize, trial: usize },
}

impl Task {
    fn point(self) -> usize {
        match self {
            Task::Kernel { point, .. } | Task::Surrogate { point, .. } | Task::Mp { point, .. } => point,
        }
    }
}

fn mp_inputs(plan: &SweepPlan, point: usize, cfg: &ExperimentConfig) -> (f64, f64) {
    let lambda_eff = match &plan.tables[point] {
        Some(t) => t.lambda_eff,
        None => plan.reference.lambda_eff,
    };
    (lambda_eff, plan.reference.mu_limit[cfg.phase])
}

fn run_task(cfg: &ExperimentConfig, plan: &SweepPlan, task: Task) -> SweepRow {
    let point = task.point();
    let delta = plan.deltas[point];
    let table = plan.tables[point].as_ref();
    match task {
        Task::Kernel { trial, .. } | Task::Surrogate { trial, .. } => {
            let seed = trial_seed(cfg.master_seed, point, trial);
            let table = table.expect("simulation configs carry a ridge");
            let run = match task {
                Task::Kernel { .. } => run_kernel_trial(
                    &plan.kernel,
                    &plan.teacher,
                    table,
                    seed,
                    TrialOptions {
                        m_test: cfg.m_test,
                        timing: cfg.record_timings,
                    },
                ),
                _ => run_surrogate_trial(table, seed, cfg.surrogate_cap, cfg.record_timings),
            };
            match run {
                Ok(run) => empirical_row(&run, delta, trial, table),
                Err(e) => failed_row(delta, table.n, trial, seed, &e),
            }
        }
        Task::Mp { trial, .. } => {
            let seed = trial_seed(cfg.master_seed, point, trial);
            let (lambda_eff, mu) = mp_inputs(plan, point, cfg);
            let start = std::time::Instant::now();
            let mut stream = make_stream(seed, MC_STREAM);
            match wishart_stieltjes_mc(lambda_eff, mu, delta, cfg.mp_n, &mut stream) {
                Ok(r) => SweepRow {
                    delta,
                    n: Some(cfg.mp_n),
                    kind: Some(RowKind::MpTrial),
                    trial: Some(trial),
                    r_star: Some(r),
                    seed: Some(seed),
                    ms: cfg.record_timings.then(|| start.elapsed().as_secs_f64() * 1e3),
                    ..SweepRow::default()
                },
                Err(e) => failed_row(delta, Some(cfg.mp_n), trial, seed, &e),
            }
        }
    }
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
}

/// Run every requested mode over the grid.
///
/// Trials run on a pool of `workers` threads; results are collected in
/// (grid point, trial) order, so the output does not depend on scheduling.
/// Per-trial failures become `failed` rows. Errors in the theory itself
/// abort the sweep.
pub fn run_sweep(cfg: &ExperimentConfig, workers: usize) -> Result<SweepOutcome> {
    let plan = plan_sweep(cfg)?;
    let mut tasks = Vec::new();
    for point in 0..plan.deltas.len() {
        for trial in 0..cfg.trials {
            if cfg.modes.simulate {
                tasks.push(Task::Kernel { point, trial });
            }
        }
        for trial in 0..cfg.trials {
            if cfg.modes.ge {
                tasks.push(Task::Surrogate { point, trial });
            }
        }
        for trial in 0..cfg.trials {
            if cfg.modes.mp_check {
                tasks.push(Task::Mp { point, trial });
            }
        }
    }
    let pool = build_pool(workers)?;
    let results: Vec<SweepRow> = pool.install(|| tasks.par_iter().map(|&t| run_task(cfg, &plan, t)).collect());

    let attempted_trials = results.len();
    let failed_trials = results.iter().filter(|r| r.kind() == RowKind::Failed).count();
    let mut rows = Vec::new();
    let mut cursor = results.into_iter().zip(tasks.iter()).peekable();
    for (point, &delta) in plan.deltas.iter().enumerate() {
        if cfg.modes.theory {
            if let Some(table) = &plan.tables[point] {
                rows.push(theory_row(cfg, table, delta)?);
            }
        }
        if cfg.modes.ridgeless {
            rows.push(ridgeless_row(cfg, &plan, delta));
        }
        if cfg.modes.mp_check {
            let (lambda_eff, mu) = mp_inputs(&plan, point, cfg);
            rows.push(SweepRow {
                delta,
                n: Some(cfg.mp_n),
                kind: Some(RowKind::MpTheory),
                r_star: Some(stieltjes_mp(lambda_eff, mu, delta)?),
                ..SweepRow::default()
            });
        }
        let mut kernel = Vec::new();
        let mut surrogate = Vec::new();
        let mut mp = Vec::new();
        while let Some((row, task)) = cursor.next_if(|(_, t)| t.point() == point) {
            match (task, row.kind()) {
                (_, RowKind::Failed) => {}
                (Task::Kernel { .. }, _) => kernel.push(row.clone()),
                (Task::Surrogate { .. }, _) => surrogate.push(row.clone()),
                (Task::Mp { .. }, _) => mp.push(row.clone()),
            }
            rows.push(row);
        }
        rows.extend(aggregate_row(&kernel, RowKind::Aggregate, delta));
        rows.extend(aggregate_row(&surrogate, RowKind::AggregateSurrogate, delta));
        rows.extend(aggregate_row(&mp, RowKind::MpAggregate, delta));
    }
    Ok(SweepOutcome {
        rows,
        attempted_trials,
        failed_trials,
    })
}

/// Recompute one empirical row from its recorded seed.
pub fn replay_row(cfg: &ExperimentConfig, row: &SweepRow) -> Result<SweepRow> {
    let seed = row
        .seed
        .ok_or_else(|| Error::InvalidArgument("row has no seed to replay".into()))?;
    let trial = row.trial.unwrap_or(0);
    let plan = plan_sweep(cfg)?;
    let point = plan
        .deltas
        .iter()
        .position(|d| d.to_bits() == row.delta.to_bits())
        .ok_or_else(|| Error::InvalidArgument(format!("delta {} not on the grid", row.delta)))?;
    if trial_seed(cfg.master_seed, point, trial) != seed {
        return Err(Error::InvalidArgument("seed does not belong to this config".into()));
    }
    let task = match row.kind() {
        RowKind::Kernel => Task::Kernel { point, trial },
        RowKind::Surrogate => Task::Surrogate { point, trial },
        RowKind::MpTrial => Task::Mp { point, trial },
        other => return Err(Error::InvalidArgument(format!("{} rows are not replayable", other.as_str()))),
    };
    Ok(run_task(cfg, &plan, task))
}
