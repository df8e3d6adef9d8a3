use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "ckn", version, about = "Numerics for second-order weighted CKN inequalities")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    /// Output format [default: json]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Plain-text `key = value` file with numeric defaults.
    #[arg(long, global = true, env = "CKN_CONFIG")]
    pub config: Option<PathBuf>,
    /// Seed for randomized suites [default: 42]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads [default: available cores]
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Grid nodes, odd [default: 4001]
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Grid half-width in ln r [default: 14]
    #[arg(long, global = true)]
    pub span: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Point {
    /// Dimension N ≥ 5
    #[arg(short = 'N', long = "dim", allow_negative_numbers = true)]
    pub n: u32,
    #[arg(short = 'a', long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(short = 'b', long, allow_negative_numbers = true)]
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Ode,
    Identities,
    Linearized,
    Equivalence,
    RellichLimit,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived scalars and closed-form constants at one point.
    Constants(Point),
    /// Run a named verification suite; exit 1 if any check fails.
    Verify(VerifyArgs),
    /// Lowest eigenvalues of the linearized problem, mode by mode.
    Spectrum {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = 3)]
        kmax: u32,
    },
    /// Region classification over an (α, β) lattice, α outer.
    RegionMap(RegionArgs),
    /// Descend the radial quotient and compare with the closed form.
    Minimize(MinimizeArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(short = 'N', long = "dim")]
    pub n: u32,
    #[arg(short = 'a', long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(short = 'b', long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// ε values for rellich-limit, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.1, 0.03, 0.01])]
    pub eps: Vec<f64>,
    /// Kernel for the linearized suite: 0 or 1
    #[arg(long, default_value_t = 0)]
    pub which: u32,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(short = 'N', long = "dim")]
    pub n: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_max: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_max: f64,
    /// Lattice points per axis
    #[arg(long, default_value_t = 41)]
    pub resolution: usize,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    #[command(flatten)]
    pub point: Point,
    /// Amplitude t of the mode-1 perturbation to evaluate at ±t
    #[arg(long)]
    pub perturb: Option<f64>,
    /// Initial profile: lines of `r value`, `#` comments
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// [default: 2000]
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// [default: 1e-7]
    #[arg(long)]
    pub tol: Option<f64>,
}
