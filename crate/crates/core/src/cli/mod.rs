//! The `campbell` command line: argument parsing, model resolution and exit codes.
//!
//! Exit code 0 is success, 1 a usage error (bad flags, unreadable model, unknown node,
//! unwritable output) and 2 a numerical failure.

mod commands;
mod table;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::model::{example_6dof, shaft_model, RotorModel};

pub use table::{format_f64, Cell, Format, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Bundled model names accepted by `--model`.
pub const BUNDLED_MODELS: [&str; 2] = ["6dof", "shaft"];

#[derive(Parser, Debug)]
#[command(name = "campbell", version, about = "Campbell diagrams, doublet splitting and exceptional points of weakly anisotropic rotors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Bundled model (6dof, shaft) or path to a model JSON file.
    #[arg(long, global = true, default_value = "6dof")]
    pub model: String,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega_max: Option<f64>,
    /// Number of grid points along Ω.
    #[arg(long, global = true)]
    pub omega_steps: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub kappa_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub kappa_max: Option<f64>,
    #[arg(long, global = true)]
    pub kappa_steps: Option<usize>,
    /// Overrides the model's damping scale δ.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Overrides the model's circulatory scale ν.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// Overrides the model's stiffness scale κ.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Node id as listed by `nodes`.
    #[arg(long, global = true)]
    pub node: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Analytic branches of the unperturbed spectrum over an Ω grid.
    Mesh {
        /// Keep branches with negative frequency too.
        #[arg(long)]
        all_branches: bool,
    },
    /// Crossings of the spectral mesh with signature and regime.
    Nodes,
    /// First-order splitting coefficients at each node.
    Local,
    /// Approximate and exact eigenvalue surfaces over (Ω, κ) around one node.
    Surface,
    /// Exceptional points and unfolding class at each node.
    EpAtlas,
    /// Exceptional points of the rotating string.
    StringAtlas {
        #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
        d: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, default_value_t = 10)]
        n_max: i64,
    },
    /// Tracked exact spectrum of the rotating shaft over an Ω grid.
    Shaft {
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 4.0)]
        k1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mu1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mu2: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        beta: f64,
    },
    /// Convergence and two-path checks of the closed-form expansion against exact spectra.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_)
            | Error::InvalidModel(_)
            | Error::InvalidArgument(_)
            | Error::IndexOutOfRange(_)
            | Error::DimensionMismatch(_)
            | Error::NonSquare { .. }
            | Error::NonFinite { .. }
            | Error::TooLarge(_)
            | Error::ZeroPerturbation => Failure::Usage(msg),
            _ => Failure::Numerical(msg),
        }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Loads the model named by `--model` and applies the scale overrides.
pub fn resolve_model(common: &Common) -> Result<RotorModel<f64>, Failure> {
    let model = match common.model.as_str() {
        "6dof" => example_6dof(),
        "shaft" => shaft_model(1.0, 4.0, 0.0, 0.0, 0.0, 0.0)?,
        path => RotorModel::load(path).map_err(|e| usage(format!("cannot load model '{path}': {e}")))?,
    };
    Ok(apply_overrides(model, common))
}

pub(crate) fn apply_overrides(model: RotorModel<f64>, common: &Common) -> RotorModel<f64> {
    let mut sc = model.scales();
    if let Some(d) = common.delta {
        sc.delta = d;
    }
    if let Some(k) = common.kappa {
        sc.kappa = k;
    }
    if let Some(n) = common.nu {
        sc.nu = n;
    }
    model.with_scales(sc)
}

/// Runs a parsed command and writes its table.
pub fn run(cli: &Cli) -> Result<(), Failure> {
    let (table, outcome) = commands::execute(cli)?;
    match &cli.common.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| usage(format!("cannot write '{}': {e}", path.display())))?;
            let mut w = BufWriter::new(f);
            table.write(cli.common.format, &mut w)?;
            w.flush().map_err(Error::from)?;
        }
        None => {
            let stdout = io::stdout();
            table.write(cli.common.format, stdout.lock())?;
        }
    }
    outcome
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("campbell: {}", f.message());
            f.exit_code()
        }
    }
}
