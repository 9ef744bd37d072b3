//! Command-line front end: spec files, generators, result documents and
//! SVG scenes.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod generate;
pub mod report;
pub mod scene;
pub mod spec;

/// Exit status 0.
pub const EXIT_OK: i32 = 0;
/// Validation failure or other failed command.
pub const EXIT_INVALID: i32 = 1;
/// The requested resolution cannot answer the question.
pub const EXIT_RESOLUTION: i32 = 2;
/// Unknown command or bad usage.
pub const EXIT_USAGE: i32 = 64;
/// Spec file missing or unparsable.
pub const EXIT_UNREADABLE: i32 = 66;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("unreadable spec: {0}")]
    Unreadable(String),
    #[error("invalid: {0}")]
    Invalid(String),
    #[error("{0}")]
    Resolution(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Unreadable(_) => EXIT_UNREADABLE,
            CliError::Invalid(_) | CliError::Failure(_) => EXIT_INVALID,
            CliError::Resolution(_) => EXIT_RESOLUTION,
        }
    }
}

impl From<schottky_lab::Error> for CliError {
    fn from(e: schottky_lab::Error) -> Self {
        use schottky_lab::Error as E;
        match e {
            E::InvalidConfig(_) => CliError::Invalid(e.to_string()),
            E::ResolutionInsufficient(_) | E::BudgetExceeded { .. } => CliError::Resolution(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "schottky-lab", version, about = "Circle domains, Whitney cubes and Schottky groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by all commands.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Domain spec file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Result document path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG scene path.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Finest dyadic level of the Whitney decomposition.
    #[arg(long)]
    pub max_level: Option<u32>,
    /// Word length or generator depth.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tangency tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct QhArgs {
    #[command(flatten)]
    pub common: Common,
    /// Start point, `x0` for the basepoint.
    #[arg(long, default_value = "x0")]
    pub from: String,
    /// End point, e.g. `0.5+0i` or `0.5,0`.
    #[arg(long)]
    pub to: String,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub common: Common,
    /// Start of an optional segment to decompose into a chain.
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub to: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub common: Common,
    /// `random_packing` or `sierpinski_type`.
    #[arg(long)]
    pub kind: String,
    /// Number of disks (`random_packing`).
    #[arg(long)]
    pub count: Option<usize>,
    /// Disks per ring (`sierpinski_type`).
    #[arg(long)]
    pub ring: Option<usize>,
    /// Outer radius R.
    #[arg(long)]
    pub outer_radius: Option<f64>,
    /// Smallest disk radius.
    #[arg(long)]
    pub min_radius: Option<f64>,
    /// Largest disk radius.
    #[arg(long)]
    pub max_radius: Option<f64>,
    /// Smallest gap between closed disks.
    #[arg(long)]
    pub min_gap: Option<f64>,
    /// Central disk radius as a fraction of R.
    #[arg(long)]
    pub central_radius: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a spec and report violations.
    Validate(Common),
    /// Whitney decomposition and its properties.
    Whitney(Common),
    /// Quasihyperbolic distance and geodesic between two points.
    Qh(QhArgs),
    /// Layer functional, shadows and geodesic tails.
    Shadows(Common),
    /// Transboundary chains and chain estimates.
    Chains(ChainArgs),
    /// Reflected disks, nesting and the reflection extension.
    Schottky(Common),
    /// Moduli, Grötzsch function, dilatation, distortion and fatness.
    Modulus(Common),
    /// Beltrami coefficients, pullbacks and invariance.
    Beltrami(Common),
    /// Generate a domain spec.
    Generate(GenerateArgs),
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub document: String,
    pub scene: Option<String>,
    pub exit_code: i32,
}

/// Parses arguments, runs the command and writes its outputs; returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let common = cli.command.common().clone();
    match commands::execute(&cli.command).and_then(|o| write_outputs(&common, &o).map(|_| o.exit_code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Validate(c)
            | Command::Whitney(c)
            | Command::Schottky(c)
            | Command::Modulus(c)
            | Command::Beltrami(c)
            | Command::Shadows(c) => c,
            Command::Qh(a) => &a.common,
            Command::Chains(a) => &a.common,
            Command::Generate(a) => &a.common,
        }
    }
}

fn write_outputs(common: &Common, outcome: &Outcome) -> Result<(), CliError> {
    match &common.out {
        Some(path) => std::fs::write(path, &outcome.document)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{}", outcome.document),
    }
    if let (Some(path), Some(svg)) = (&common.scene, &outcome.scene) {
        std::fs::write(path, svg).map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
