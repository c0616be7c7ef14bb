//! `bergman`: command-line front end for expansion coefficients, geometry
//! reports and oracle validation sweeps.

mod commands;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bergman_core::io::{to_pretty, VERSION};
use bergman_core::{Error, Model};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Environment variable naming the directory for outputs written without `--output`.
pub const OUTPUT_DIR_ENV: &str = "BERGMAN_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "bergman", version, about = "Bergman kernel expansion coefficients and validation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for b_0 … b_N and write them as JSON.
    Expand(ExpandArgs),
    /// Compare B_k^(N)(0) with a finite-k oracle over a range of k; writes CSV.
    Validate(ValidateArgs),
    /// Curvature, Levi form and structural identities of a potential.
    Geometry(Common),
    /// Matrix coefficients for a potential twisted by a bundle metric.
    Twist(TwistArgs),
    /// Sample the good-contour inequality.
    ContourCheck(ContourArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Built-in potential: flat, fubini-study or radial-quartic[:c].
    #[arg(long, conflicts_with = "file")]
    pub model: Option<Model>,
    /// Potential file (JSON with "dimension" and "terms").
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Complex dimension for built-in models.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Expansion order N.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Output degree D_out of each coefficient jet.
    #[arg(long, default_value_t = 0)]
    pub degree: u32,
    /// Arithmetic; quadrature-based commands accept only float.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Output path; defaults to $BERGMAN_OUTPUT_DIR/<command>.<ext>, else stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Seed for randomized inputs and sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Radius within which off-diagonal values are trusted.
    #[arg(long, default_value_t = 0.3)]
    pub radius: f64,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also evaluate B_k^(N) at --point for this k.
    #[arg(long)]
    pub k: Option<f64>,
    /// Evaluation point as re,im pairs, one per coordinate.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: Common,
    /// k values as start:end:step.
    #[arg(long, default_value = "10:40:10")]
    pub k_range: String,
    /// JSON summary path; defaults to the CSV path with a .json extension.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TwistArgs {
    #[command(flatten)]
    pub common: Common,
    /// Bundle metric file (JSON with "dimension", "rank" and "entries").
    #[arg(long, conflicts_with = "rank")]
    pub bundle: Option<PathBuf>,
    /// Rank of a seeded random bundle metric.
    #[arg(long)]
    pub rank: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ContourArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Curvature margin δ; defaults to half the smallest Levi eigenvalue.
    #[arg(long)]
    pub delta: Option<f64>,
}

/// Failure with its exit status.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Config(String),
    Io { path: PathBuf, message: String },
    /// The command ran but its check did not hold.
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) | Failure::Io { .. } => 2,
            Failure::Validation(_) => 3,
            Failure::Core(e) => match e {
                Error::DegreeBudget { .. } => 4,
                Error::Parse { .. }
                | Error::InvalidInput(_)
                | Error::Unsupported(_)
                | Error::NotReal { .. }
                | Error::NotPositive(_)
                | Error::VarCountMismatch { .. }
                | Error::TooManyVariables(_)
                | Error::DegreeTooLarge(_)
                | Error::DimensionMismatch(_)
                | Error::NotExact(_) => 2,
                _ => 3,
            },
        }
    }

    fn to_json(&self) -> Value {
        let (code, message, details) = match self {
            Failure::Core(e) => {
                let details = match e {
                    Error::DegreeBudget { required, available } => {
                        json!({"required_working_degree": required, "available": available})
                    }
                    Error::Parse { line, column, .. } => json!({"line": line, "column": column}),
                    Error::NotReal { x_exp, xbar_exp } => json!({"x_exp": x_exp, "xbar_exp": xbar_exp}),
                    Error::QuadratureUnresolved { drift, tolerance } => {
                        json!({"drift": drift, "tolerance": tolerance})
                    }
                    _ => Value::Null,
                };
                (e.code(), e.to_string(), details)
            }
            Failure::Config(m) => ("config", m.clone(), Value::Null),
            Failure::Io { path, message } => ("io", message.clone(), json!({"path": path.display().to_string()})),
            Failure::Validation(m) => ("validation_failed", m.clone(), Value::Null),
        };
        json!({
            "version": VERSION,
            "error": {
                "code": code,
                "exit_code": self.exit_code(),
                "message": message,
                "details": details,
            }
        })
    }
}

/// Where an artifact goes: an explicit path, the output directory, or stdout.
pub fn resolve_output(explicit: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|d| PathBuf::from(d).join(default_name))
}

pub fn write_artifact(path: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match path {
        None => {
            print!("{contents}");
            Ok(())
        }
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Failure::Io {
                    path: dir.to_path_buf(),
                    message: e.to_string(),
                })?;
            }
            std::fs::write(p, contents).map_err(|e| Failure::Io {
                path: p.to_path_buf(),
                message: e.to_string(),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let f = Failure::Config(e.render().to_string().trim().to_string());
            eprint!("{}", to_pretty(&f.to_json()));
            return ExitCode::from(f.exit_code());
        }
    };
    let result = match cli.command {
        Command::Expand(a) => commands::expand(&a),
        Command::Validate(a) => commands::validate(&a),
        Command::Geometry(a) => commands::geometry(&a),
        Command::Twist(a) => commands::twist(&a),
        Command::ContourCheck(a) => commands::contour_check(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprint!("{}", to_pretty(&f.to_json()));
            ExitCode::from(f.exit_code())
        }
    }
}
