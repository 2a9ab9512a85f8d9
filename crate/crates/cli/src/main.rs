mod commands;
mod json;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Schmidt ranks, bi-linear map witnesses and entanglement certification.
#[derive(Debug, Parser)]
#[command(name = "triwit", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Relative rank threshold for singular values.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_rank: f64,
    /// Absolute slack for Hermiticity and positivity checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_psd: f64,
    /// Slack for closed-form inequalities.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_ineq: f64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schmidt rank (α,β,γ) of a vector file.
    Sr {
        input: PathBuf,
        /// Reinterpret the vector with these dims.
        #[arg(long, value_parser = parse_triple)]
        dims: Option<[usize; 3]>,
    },
    /// Classify a member of the anti-diagonal qubit witness family.
    Classify {
        #[command(flatten)]
        family: FamilyArgs,
        /// Log-spaced radii in [1e-3, 1e3] for the (1,1,1) scan.
        #[arg(long, default_value_t = 64)]
        grid_radii: usize,
        /// Angles in [0, 2π) for the (1,1,1) scan.
        #[arg(long, default_value_t = 64)]
        grid_angles: usize,
    },
    /// Pairing <ϱ, φ> = Tr(C_φ ϱᵗ) of a state and a map.
    Pair {
        /// State: a matrix file, or a vector file read as its projector.
        state: PathBuf,
        /// Choi matrix file; omit to use the family flags.
        map: Option<PathBuf>,
        #[command(flatten)]
        family: FamilyArgs,
        /// Dims for matrix files that do not carry them.
        #[arg(long, value_parser = parse_triple)]
        dims: Option<[usize; 3]>,
    },
    /// See-saw search for a vector of bounded Schmidt rank with negative expectation.
    Search {
        /// Hermitian matrix file; omit to use the family flags.
        map: Option<PathBuf>,
        #[command(flatten)]
        family: FamilyArgs,
        /// Dims for matrix files that do not carry them.
        #[arg(long, value_parser = parse_triple)]
        dims: Option<[usize; 3]>,
        /// Schmidt-rank bound p,q,r.
        #[arg(long, value_parser = parse_triple)]
        sr: [usize; 3],
        #[command(flatten)]
        seesaw: SeesawArgs,
    },
    /// Write a vector of given Schmidt rank, or a sampled state.
    Gen {
        /// Target Schmidt rank (or bound, with --sample).
        #[arg(long, value_parser = parse_triple)]
        sr: [usize; 3],
        /// Defaults to the --sr triplet.
        #[arg(long, value_parser = parse_triple)]
        dims: Option<[usize; 3]>,
        /// Sample a mixed state with Schmidt number at most --sr.
        #[arg(long)]
        sample: bool,
        /// Number of projectors mixed into a sampled state.
        #[arg(long, default_value_t = 1, requires = "sample")]
        terms: usize,
        /// Sampler seed.
        #[arg(long, env = "TRIWIT_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    /// s1,s2,s3,s4 (nonnegative).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_reals)]
    pub s: Option<[f64; 4]>,
    /// t1,t2,t3,t4 (nonnegative).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_reals)]
    pub t: Option<[f64; 4]>,
    /// u1,...,u4 as re:im (or re); defaults to zero.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complexes)]
    pub u: Option<[[f64; 2]; 4]>,
}

#[derive(Debug, Clone, Args)]
pub struct SeesawArgs {
    /// Independent random starts.
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Maximum sweeps per start.
    #[arg(long, default_value_t = 200)]
    pub sweeps: usize,
    /// Stop a start once a sweep improves the objective by less than this.
    #[arg(long, default_value_t = 1e-10)]
    pub eps: f64,
    /// Base seed; start k uses seed + k.
    #[arg(long, env = "TRIWIT_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    NotHermitian(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::NotHermitian(_) => 3,
        }
    }
}

fn parse_list<T, const N: usize>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<[T; N], String> {
    let items = s.split(',').map(|x| item(x.trim())).collect::<Result<Vec<T>, _>>()?;
    let len = items.len();
    items.try_into().map_err(|_| format!("expected {N} comma-separated values, got {len}"))
}

fn parse_triple(s: &str) -> Result<[usize; 3], String> {
    parse_list(s, |x| x.parse::<usize>().map_err(|e| format!("{x:?}: {e}")))
}

fn parse_real(x: &str) -> Result<f64, String> {
    let v: f64 = x.parse().map_err(|e| format!("{x:?}: {e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{x:?} is not finite"))
    }
}

fn parse_reals(s: &str) -> Result<[f64; 4], String> {
    parse_list(s, parse_real)
}

fn parse_complexes(s: &str) -> Result<[[f64; 2]; 4], String> {
    parse_list(s, |x| match x.split_once(':') {
        Some((re, im)) => Ok([parse_real(re)?, parse_real(im)?]),
        None => Ok([parse_real(x)?, 0.0]),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().skip(1).collect();
    match commands::run(&cli, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
