//! Config parsing, sweeps over the sample-size grid, and output.

mod config;
mod output;
mod recipes;
mod sweep;

pub use config::{parse_config, DeltaGrid, ExperimentConfig, Modes, OutputFormat, OutputSpec, Truncation};
pub use output::{read_json_output, render, render_csv, render_json, write_output, OutputDocument, CSV_HEADER};
pub use recipes::{figure_recipe, recipe_grid, RECIPE_NAMES};
pub use sweep::{
    mean_se, plan_sweep, replay_row, run_sweep, theory_row, trial_seed, RowKind, SweepOutcome, SweepPlan, SweepRow,
};
