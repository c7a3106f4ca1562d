use crate::asymptotics::Mode;
use crate::error::{Error, Result};
use crate::spectral::{KernelDescriptor, TeacherDescriptor};

use super::config::{DeltaGrid, ExperimentConfig, Modes, OutputSpec, Truncation};

pub const RECIPE_NAMES: [&str; 3] = ["fig1-k1", "fig1-k2", "fig1-k3"];

/// `0.1` followed by `2^{i/3}` for `i = -9..=6`: spans `[0.1, 4]` with a
/// constant log step and contains `delta = 1` exactly.
pub fn recipe_grid() -> Vec<f64> {
    let mut g = vec![0.1];
    g.extend((-9..=6).map(|i| 2f64.powf(i as f64 / 3.0)));
    g
}

/// The three hierarchical-transition experiments: kernel
/// `z^3/30 + z^2/2 + z + 1`, teacher `x^4/20 + x^3/2 + x^2 + x`, noise 0.5,
/// ridge `1e-4`. The dimensions are desk-scale choices.
pub fn figure_recipe(name: &str) -> Result<ExperimentConfig> {
    let (phase, dimension, trials) = match name {
        "fig1-k1" => (1, 500, 10),
        "fig1-k2" => (2, 60, 2),
        "fig1-k3" => (3, 12, 10),
        other => return Err(Error::UnknownRecipe(other.to_string())),
    };
    Ok(ExperimentConfig {
        recipe: Some(name.to_string()),
        kernel: KernelDescriptor::Taylor {
            coefficients: vec![1.0, 1.0, 0.5, 1.0 / 30.0],
            f_one: None,
        },
        teacher: TeacherDescriptor::Polynomial {
            coefficients: vec![0.0, 1.0, 1.0, 0.5, 0.05],
            noise_sigma: 0.5,
        },
        phase,
        dimension,
        lambda: Some(1e-4),
        deltas: DeltaGrid::List(recipe_grid()),
        trials,
        truncation: Truncation::Auto,
        m_test: None,
        master_seed: 20_240_601,
        modes: Modes {
            theory: true,
            simulate: true,
            ..Modes::default()
        },
        theory_mode: Mode::Limit,
        mp_n: 1500,
        surrogate_cap: crate::simulator::DEFAULT_SURROGATE_CAP,
        record_timings: false,
        output: OutputSpec::default(),
        note: Some(format!("desk-scale dimension d = {dimension} chosen for phase K = {phase}")),
    })
}
