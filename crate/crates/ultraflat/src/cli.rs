//! Argument parsing and dispatch.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::commands::{self, Overrides, VerifySpec};
use crate::error::{CliError, CliResult};
use crate::io::{input_hash, Output};

/// Bundled input of `verify-all`, used when `--config` is absent.
pub const DEFAULT_VERIFY_CONFIG: &str = include_str!("../configs/verify_all.json");

#[derive(Debug, Parser)]
#[command(
    name = "ultraflat",
    version,
    about = "Flat functions, moment kernels and extension operators for ultraholomorphic classes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON input for the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for CSV and JSON outputs.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    pub tol_abs: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    /// Default prefix length of weight sequences.
    #[arg(long, global = true)]
    pub prefix_n: Option<usize>,
    /// Number of points of the main sampling grid.
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    /// Write JSON reports (both formats when neither flag is given).
    #[arg(long, global = true)]
    pub json: bool,
    /// Write CSV tables (both formats when neither flag is given).
    #[arg(long, global = true)]
    pub csv: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Terms, quotients, property certificates and growth index.
    Sequence,
    /// Associated functions on a grid.
    Assoc,
    /// Harmonic extension of omega and the Langenbruch fit.
    Harmonic,
    /// Flat function and its fitted flatness constants.
    Flat,
    /// Kernel moments and the equivalence band.
    Moments,
    /// Extension operator and asymptotic verification.
    Extend,
    /// Run the acceptance suite.
    VerifyAll,
    /// Convolution of two sequences.
    Convolve,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Self::Sequence => "sequence",
            Self::Assoc => "assoc",
            Self::Harmonic => "harmonic",
            Self::Flat => "flat",
            Self::Moments => "moments",
            Self::Extend => "extend",
            Self::VerifyAll => "verify-all",
            Self::Convolve => "convolve",
        }
    }
}

fn parse<T: DeserializeOwned>(text: &str, path: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|source| CliError::Parse { path: path.into(), source })
}

fn load<T: DeserializeOwned>(path: Option<&Path>, command: Command) -> CliResult<T> {
    let path = path.ok_or_else(|| CliError::Usage(format!("{} needs --config <path>", command.name())))?;
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}

#[derive(Serialize)]
struct Resolved<'a, T> {
    command: &'a str,
    input: &'a T,
    overrides: &'a Overrides,
}

fn output<T: Serialize>(cli: &Cli, ov: &Overrides, input: &T) -> CliResult<Output> {
    fs::create_dir_all(&cli.out)?;
    let both = !cli.json && !cli.csv;
    let hash = input_hash(&Resolved { command: cli.command.name(), input, overrides: ov });
    Ok(Output { dir: cli.out.clone(), json: both || cli.json, csv: both || cli.csv, hash })
}

macro_rules! dispatch {
    ($cli:expr, $ov:expr, $spec:ty, $f:path) => {{
        let spec: $spec = load($cli.config.as_deref(), $cli.command)?;
        let out = output($cli, &$ov, &spec)?;
        $f(&spec, &$ov, &out)
    }};
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    let ov =
        Overrides { tol_abs: cli.tol_abs, tol_rel: cli.tol_rel, prefix_n: cli.prefix_n, grid_points: cli.grid_points };
    ov.validate()?;
    use crate::inputs::*;
    match cli.command {
        Command::Sequence => dispatch!(cli, ov, SequenceCommandSpec, commands::sequence),
        Command::Assoc => dispatch!(cli, ov, SequenceCommandSpec, commands::assoc),
        Command::Harmonic => dispatch!(cli, ov, SequenceCommandSpec, commands::harmonic),
        Command::Flat => dispatch!(cli, ov, FlatCommandSpec, commands::flat),
        Command::Moments => dispatch!(cli, ov, MomentsSpec, commands::moments),
        Command::Extend => dispatch!(cli, ov, ExtendSpec, commands::extend),
        Command::Convolve => dispatch!(cli, ov, ConvolveSpec, commands::convolve_cmd),
        Command::VerifyAll => {
            let spec: VerifySpec = match cli.config.as_deref() {
                Some(p) => load(Some(p), cli.command)?,
                None => parse(DEFAULT_VERIFY_CONFIG, "<bundled verify_all.json>")?,
            };
            let out = output(cli, &ov, &spec)?;
            commands::verify_all(&spec, &out).map(|_| ())
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit
/// code: 0 success, 1 verification failure or refusal, 2 usage or config
/// error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ultraflat {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
