use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use krr_core::harness::{figure_recipe, parse_config, render, run_sweep, ExperimentConfig, OutputFormat, RECIPE_NAMES};
use krr_core::spectral::{build_table, sample_size, KernelSpec, TableRequest, TeacherSpec};
use krr_core::Error;

#[derive(Parser, Debug)]
#[command(name = "krr", version, about = "Kernel ridge regression learning curves: theory, coefficients and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file (stdout when absent and the config names none).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for trials (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// No progress or summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Asymptotic predictions over the grid.
    Theory,
    /// Expansion coefficient table (JSON) at the first grid point.
    Coeffs,
    /// Kernel ridge regression trials with theory rows alongside.
    Simulate,
    /// Run every mode enabled in the config.
    Sweep,
    /// Stieltjes fixed point against sampled Wishart resolvents.
    MpCheck,
    /// Kernel trials paired with Gaussian-equivalent surrogate trials.
    GeCheck,
    /// Run a built-in figure recipe (fig1-k1, fig1-k2, fig1-k3).
    Recipe {
        name: String,
        /// Print the recipe config instead of running it.
        #[arg(long)]
        show: bool,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config {
        path: "<cli>".into(),
        message: "--config <path> is required for this subcommand".into(),
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

fn emit(cli: &Cli, cfg: &ExperimentConfig, text: &str) -> Result<(), Error> {
    let target = cli.out.clone().or_else(|| cfg.output.path.clone().map(PathBuf::from));
    match target {
        Some(path) => std::fs::write(&path, text).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn coeffs(cli: &Cli, cfg: &ExperimentConfig) -> Result<(), Error> {
    let kernel = KernelSpec::from_descriptor(&cfg.kernel)?;
    let teacher = TeacherSpec::from_descriptor(&cfg.teacher)?;
    let delta = cfg.grid()[0];
    let finite = cfg.dimension > 0;
    let req = TableRequest {
        phase: cfg.phase,
        dimension: cfg.dimension,
        n: finite.then(|| sample_size(delta, cfg.dimension, cfg.phase).max(1)),
        delta_phase: (!finite).then_some(delta),
        lambda: cfg.lambda.unwrap_or(1.0),
        truncation: cfg.truncation.degree(),
    };
    let table = build_table(&kernel, &teacher, &req)?;
    let mut text = table.to_json();
    text.push('\n');
    emit(cli, cfg, &text)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let mut cfg = match &cli.command {
        Command::Recipe { name, .. } => {
            if !RECIPE_NAMES.contains(&name.as_str()) {
                return Err(Error::UnknownRecipe(name.clone()));
            }
            figure_recipe(name)?
        }
        _ => load_config(cli)?,
    };
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(f) = cli.format {
        cfg.output.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    match &cli.command {
        Command::Coeffs => return coeffs(cli, &cfg).map(|_| 0),
        Command::Recipe { show: true, .. } => {
            let text = serde_json::to_string_pretty(&cfg).expect("config serializes") + "\n";
            return emit(cli, &cfg, &text).map(|_| 0);
        }
        Command::Theory => {
            cfg.modes.theory = true;
            cfg.modes.simulate = false;
            cfg.modes.ge = false;
            cfg.modes.mp_check = false;
        }
        Command::Simulate => {
            cfg.modes.theory = true;
            cfg.modes.simulate = true;
        }
        Command::MpCheck => {
            cfg.modes = krr_core::harness::Modes {
                theory: false,
                mp_check: true,
                ..Default::default()
            };
        }
        Command::GeCheck => {
            cfg.modes.simulate = true;
            cfg.modes.ge = true;
        }
        Command::Sweep | Command::Recipe { .. } => {}
    }
    cfg.validate()?;
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if !cli.quiet {
        eprintln!(
            "running {} grid points, {} trials, {} workers",
            cfg.grid().len(),
            cfg.planned_trials(),
            workers
        );
    }
    let outcome = run_sweep(&cfg, workers)?;
    let text = render(&outcome.rows, cfg.output.format, Some(&cfg))?;
    emit(cli, &cfg, &text)?;
    if !cli.quiet {
        eprintln!(
            "{} rows, {} of {} trials failed",
            outcome.rows.len(),
            outcome.failed_trials,
            outcome.attempted_trials
        );
    }
    Ok(if outcome.is_partial_failure() { 3 } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
