//! Command-line front end.

mod commands;
mod format;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_classical_bound, cmd_curve, cmd_di_bound, cmd_info, cmd_membership, cmd_rac, cmd_seesaw, SearchArgs,
};
pub use format::{csv_table, g12, parse_grid};

use crate::dibound::CURVE_TOL;
use crate::error::{Error, Result};
use crate::model::{hmin, Behavior, QuantumEnsemble, Scenario, Witness, WitnessFile};

#[derive(Debug, Parser)]
#[command(name = "infocorr", version, about = "Information-restricted prepare-and-measure correlations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads for parallel stages.
    #[arg(long, env = "INFOCORR_WORKERS")]
    pub workers: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Re-verify the result against independent checks.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long)]
    pub witness: PathBuf,
    #[arg(long)]
    pub scenario: PathBuf,
}

#[derive(Debug, Args)]
pub struct SearchFlags {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classical maximum of a witness at an information budget.
    ClassicalBound {
        #[command(flatten)]
        input: WitnessArgs,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Information carried by an ensemble.
    Info {
        #[arg(long)]
        ensemble: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Classical, quantum and theory-independent witness values over alpha.
    Curve {
        #[command(flatten)]
        input: WitnessArgs,
        /// `a,b,c` or `start:stop:count`; `max` is H_min(X).
        #[arg(long, default_value = "0:max:11")]
        grid: String,
        #[command(flatten)]
        search: SearchFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Minimal information needed for a behavior.
    Membership {
        #[arg(long)]
        behavior: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Theory-independent witness ceiling, or least alpha for given values.
    DiBound {
        #[command(flatten)]
        input: WitnessArgs,
        #[arg(long, conflicts_with = "grid")]
        alpha: Option<f64>,
        #[arg(long)]
        grid: Option<String>,
        /// Comma-separated witness values to invert.
        #[arg(long, conflicts_with_all = ["alpha", "grid"])]
        values: Option<String>,
        #[arg(long, default_value_t = CURVE_TOL)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Random access code score table.
    Rac {
        #[command(flatten)]
        common: Common,
    },
    /// Seesaw search for quantum witness values.
    Seesaw {
        #[command(flatten)]
        input: WitnessArgs,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        search: SearchFlags,
        #[command(flatten)]
        common: Common,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    parse_json(path)
}

pub fn load_witness(witness: &Path, scenario: &Path) -> Result<Witness> {
    let file: WitnessFile = parse_json(witness)?;
    file.into_witness(load_scenario(scenario)?)
}

pub fn load_ensemble(path: &Path) -> Result<QuantumEnsemble> {
    parse_json(path)
}

pub fn load_behavior(path: &Path) -> Result<Behavior> {
    parse_json(path)
}

fn search_args(flags: &SearchFlags, default_restarts: usize) -> SearchArgs {
    SearchArgs {
        dim: flags.dim,
        restarts: flags.restarts.unwrap_or(default_restarts),
        seed: flags.seed,
    }
}

fn parse_values(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad value '{t}'"))))
        .collect()
}

fn execute(command: &Command) -> Result<String> {
    match command {
        Command::ClassicalBound { input, alpha, common } => {
            cmd_classical_bound(&load_witness(&input.witness, &input.scenario)?, *alpha, common.check)
        }
        Command::Info { ensemble, common } => cmd_info(&load_ensemble(ensemble)?, common.check),
        Command::Curve { input, grid, search, common } => {
            let w = load_witness(&input.witness, &input.scenario)?;
            let alphas = parse_grid(grid, hmin(w.scenario().prior())?)?;
            cmd_curve(&w, &alphas, &search_args(search, 0), common.check)
        }
        Command::Membership { behavior, common } => cmd_membership(&load_behavior(behavior)?, common.check),
        Command::DiBound { input, alpha, grid, values, tol, common } => {
            let w = load_witness(&input.witness, &input.scenario)?;
            let top = hmin(w.scenario().prior())?;
            let alphas = match (alpha, grid) {
                (Some(a), _) => vec![*a],
                (None, Some(g)) => parse_grid(g, top)?,
                (None, None) => parse_grid("0:max:11", top)?,
            };
            let values = values.as_deref().map(parse_values).transpose()?;
            cmd_di_bound(&w, &alphas, values.as_deref(), *tol, common.check)
        }
        Command::Rac { common } => cmd_rac(common.check),
        Command::Seesaw { input, alpha, search, common } => {
            let w = load_witness(&input.witness, &input.scenario)?;
            cmd_seesaw(&w, *alpha, &search_args(search, 50), common.check)
        }
    }
}

fn common(command: &Command) -> &Common {
    match command {
        Command::ClassicalBound { common, .. }
        | Command::Info { common, .. }
        | Command::Curve { common, .. }
        | Command::Membership { common, .. }
        | Command::DiBound { common, .. }
        | Command::Rac { common }
        | Command::Seesaw { common, .. } => common,
    }
}

/// Run a parsed command, writing its output to `--out` or stdout.
pub fn run(cli: &Cli) -> Result<()> {
    let c = common(&cli.command);
    let output = match c.workers {
        Some(0) => return Err(Error::invalid("--workers must be positive")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start {n} workers: {e}")))?
            .install(|| execute(&cli.command))?,
        None => execute(&cli.command)?,
    };
    match &c.out {
        Some(path) => fs::write(path, output)?,
        None => print!("{output}"),
    }
    Ok(())
}
