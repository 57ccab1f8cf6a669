//! `robsched` command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 model error,
//! 3 radius search exhausted.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use robsched::optim::{Algorithm, ScenarioKind};
use robsched::Error;

use commands::MetricArg;
use config::ScenarioFile;

#[derive(Debug, Parser)]
#[command(name = "robsched", version, about = "Robust server count and speed configuration for M/M/m platforms")]
pub struct Cli {
    /// Scenario file (TOML); defaults to the bundled reference scenario.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the primary CSV here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the effective scenario and exit.
    #[arg(long)]
    pub dump_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact and closed-form queue and profit figures at one point.
    Eval {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        s: f64,
    },
    /// Closed-form profit or mean wait over a grid of the search box.
    Surface {
        #[arg(long, value_enum)]
        metric: MetricArg,
        #[arg(long, default_value_t = 21)]
        grid: usize,
    },
    /// Trace a requirement curve column by column.
    Trace {
        #[arg(long, value_enum)]
        metric: MetricArg,
        /// Curve level; defaults to the single-requirement threshold.
        #[arg(long, allow_hyphen_values = true)]
        level: Option<f64>,
        #[arg(long, default_value_t = 101)]
        columns: usize,
    },
    /// Robustness radius from a working point to one requirement curve.
    Radius {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        s: f64,
        #[arg(long, value_enum)]
        metric: MetricArg,
        #[arg(long, allow_hyphen_values = true)]
        level: Option<f64>,
        /// Also report the traced-polyline distance.
        #[arg(long)]
        oracle: bool,
    },
    /// Search for the most robust working point.
    Optimize {
        /// profit_only, deadline_only or joint; defaults to the file's kind.
        #[arg(long)]
        scenario: Option<String>,
        /// dbo, de or pso; defaults to the file's algorithm.
        #[arg(long)]
        algo: Option<String>,
        /// Write the convergence trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Repeated runs of several optimizers with consecutive seeds.
    Compare {
        #[arg(long)]
        scenario: Option<String>,
        /// Comma-separated list, e.g. dbo,de,pso.
        #[arg(long, default_value = "dbo,de,pso")]
        algos: String,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        /// Write per-algorithm statistics CSV here.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Write one convergence trace per run into this directory.
        #[arg(long)]
        traces_dir: Option<PathBuf>,
    },
    /// Discrete-event simulation of the queue at one point.
    Simulate {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        arrivals: Option<u64>,
        #[arg(long)]
        warmup: Option<u64>,
        /// Write per-request `arrival_time,wait` CSV here.
        #[arg(long)]
        waits: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Usage(String),
    Io(String),
    Model(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Model(Error::NoContactWithinRMax { .. }) => 3,
            CliError::Model(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Model(e) => write!(f, "model error: {e}"),
        }
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioFile, CliError> {
    let mut file = match &cli.config {
        Some(path) => ScenarioFile::load(path).map_err(CliError::Config)?,
        None => ScenarioFile::paper(),
    };
    if let Some(seed) = cli.seed {
        file.seed = seed;
    }
    Ok(file)
}

fn scenario_kind(arg: &Option<String>, file: &ScenarioFile) -> Result<ScenarioKind, CliError> {
    match arg {
        Some(s) => s.parse().map_err(|e: Error| CliError::Usage(e.to_string())),
        None => Ok(file.scenario.kind),
    }
}

fn algorithm(arg: &Option<String>, file: &ScenarioFile) -> Result<Algorithm, CliError> {
    match arg {
        Some(s) => s.parse().map_err(|e: Error| CliError::Usage(e.to_string())),
        None => Ok(file.optimizer.algorithm),
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let file = load_config(cli)?;
    if cli.dump_config {
        return Ok(file.to_toml());
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Usage("no subcommand given (try --help)".into()));
    };
    match command {
        Command::Eval { m, s } => commands::eval(&file, *m, *s),
        Command::Surface { metric, grid } => commands::surface(&file, *metric, *grid),
        Command::Trace { metric, level, columns } => commands::trace_cmd(&file, *metric, *level, *columns),
        Command::Radius { m, s, metric, level, oracle } => commands::radius(&file, *m, *s, *metric, *level, *oracle),
        Command::Optimize { scenario, algo, trace } => {
            commands::optimize_cmd(&file, scenario_kind(scenario, &file)?, algorithm(algo, &file)?, trace.as_deref())
        }
        Command::Compare { scenario, algos, runs, stats, traces_dir } => {
            let list = algos
                .split(',')
                .map(|a| a.parse::<Algorithm>().map_err(|e| CliError::Usage(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            commands::compare_cmd(&file, scenario_kind(scenario, &file)?, &list, *runs, stats.as_deref(), traces_dir.as_deref())
        }
        Command::Simulate { m, s, arrivals, warmup, waits } => {
            commands::simulate(&file, *m, *s, *arrivals, *warmup, waits.as_deref())
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let result = execute(&cli).and_then(|text| match &cli.out {
        Some(path) => commands::write_file(path, &text),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "robsched: {e}");
            e.exit_code()
        }
    }
}
