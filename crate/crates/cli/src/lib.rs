//! Command-line front end for the `kronbf` simulator.
//!
//! Subcommands write CSV to `--out` (or stdout). The first row is a header.
//! Errors end the process with one `error[Class]: message` line on stderr and
//! the exit code of [`CliError::exit_code`].

pub mod commands;
pub mod config;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use kronbf::sim::{preset, ExperimentSpec};

pub use config::{apply_settings, default_spec, parse_config, parse_override, parse_settings, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}", .0.join("; "))]
    Parse(Vec<String>),
    #[error(transparent)]
    Lib(#[from] kronbf::Error),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

/// Exit codes by error class.
pub mod exit {
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const INVALID_CONFIG: i32 = 4;
    pub const INSUFFICIENT_FACTORS: i32 = 5;
    pub const DEGENERATE: i32 = 6;
    pub const PILOTS: i32 = 7;
    pub const UNKNOWN_PRESET: i32 = 8;
    pub const IO: i32 = 9;
    pub const NUMERIC: i32 = 10;
}

impl CliError {
    pub fn class(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "ParseError",
            CliError::Lib(e) => e.class(),
            CliError::Io(_) => "IoError",
            CliError::Usage(_) => "UsageError",
        }
    }

    pub fn exit_code(&self) -> i32 {
        use kronbf::Error as E;
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Parse(_) => exit::PARSE,
            CliError::Io(_) => exit::IO,
            CliError::Lib(e) => match e {
                E::InvalidConfig(_) | E::InvalidArgument(_) => exit::INVALID_CONFIG,
                E::InsufficientFactors { .. } => exit::INSUFFICIENT_FACTORS,
                E::DegenerateScenario | E::TargetInNullSet | E::ZeroSeparation => exit::DEGENERATE,
                E::TooManyUsers { .. } | E::UnsupportedPilotLength { .. } => exit::PILOTS,
                E::UnknownPreset(_) => exit::UNKNOWN_PRESET,
                _ => exit::NUMERIC,
            },
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "kronbf", version, about = "Kronecker hybrid beamforming simulator")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Experiment file (INI).
    #[arg(long, global = true, env = "KRONBF_CONFIG")]
    pub config: Option<PathBuf>,
    /// Named experiment used as the base spec.
    #[arg(long, global = true, env = "KRONBF_PRESET")]
    pub preset: Option<String>,
    /// Override one setting, `section.key=value` or `key=value`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long, global = true, env = "KRONBF_SEED")]
    pub seed: Option<u64>,
    /// Output file; stdout when absent. Notes go to `<out>.meta`.
    #[arg(long, global = true, env = "KRONBF_OUT")]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, env = "KRONBF_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// AoA spectrum of one user's despread training signal.
    Spectrum {
        #[arg(long, default_value_t = 0)]
        user: usize,
    },
    /// Beamformer weights, nulling residuals and rates for one scenario.
    Beamform,
    /// Two-stage channel estimate for one scenario.
    Estimate,
    /// Monte Carlo sweep of a preset or experiment file.
    Sweep,
    /// Construction-time sweep (defaults to the fig7 preset).
    Bench,
    /// List presets.
    Presets,
}

/// The spec selected by the global flags: preset (or `fallback`), then the
/// file, then `--set` overrides, then `--seed`.
pub fn resolve_spec(global: &GlobalArgs, fallback: Option<&str>) -> Result<ExperimentSpec, CliError> {
    let mut spec = match global.preset.as_deref().or(fallback) {
        Some(name) => preset(name)?,
        None => default_spec(),
    };
    let mut settings = match &global.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            parse_settings(&text)?
        }
        None => Settings::default(),
    };
    let mut errors = Vec::new();
    for s in &global.set {
        match parse_override(s) {
            Ok(s) => settings.set(s),
            Err(CliError::Parse(e)) => errors.extend(e),
            Err(e) => return Err(e),
        }
    }
    if !errors.is_empty() {
        return Err(CliError::Parse(errors));
    }
    apply_settings(&mut spec, &settings)?;
    if let Some(seed) = global.seed {
        spec.seed = seed;
    }
    Ok(spec)
}

/// Output of one subcommand.
pub struct Output {
    pub csv: String,
    pub meta: Vec<String>,
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Spectrum { user } => commands::spectrum(&resolve_spec(g, None)?, *user),
        Command::Beamform => commands::beamform(&resolve_spec(g, None)?),
        Command::Estimate => commands::estimate(&resolve_spec(g, None)?),
        Command::Sweep => {
            if g.preset.is_none() && g.config.is_none() {
                return Err(CliError::Usage("sweep needs --preset or --config".into()));
            }
            commands::sweep(&resolve_spec(g, None)?)
        }
        Command::Bench => commands::sweep(&resolve_spec(g, Some("fig7"))?),
        Command::Presets => Ok(commands::presets()),
    }
}

/// Runs the parsed command line and writes its output.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(t) = cli.global.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let out = execute(cli)?;
    match &cli.global.out {
        Some(path) => {
            fs::write(path, &out.csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut meta = path.clone().into_os_string();
            meta.push(".meta");
            let body: String = out.meta.iter().map(|l| format!("{l}\n")).collect();
            fs::write(&meta, body).map_err(|e| CliError::Io(format!("{}: {e}", PathBuf::from(&meta).display())))?;
        }
        None => io::stdout().lock().write_all(out.csv.as_bytes())?,
    }
    Ok(())
}
