use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use paving::Seed;

#[derive(Parser, Debug)]
#[command(name = "paving", version, about = "Random paving and moment-inequality laboratory")]
#[command(args_override_self = true)]
pub struct Cli {
    /// File of `key = value` defaults; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a test matrix.
    Gen(GenArgs),
    /// Search for a paving of a matrix.
    Pave(PaveArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Sweep a restricted-norm moment over a grid and compare with bounds.
    Scan(ScanArgs),
    /// Evaluate a closed-form bound.
    Bound(BoundArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// sign-normalized, hadamard, hadamard-hollow, bounded-random, diagonal-free-random
    pub kind: String,
    pub n: usize,
    /// Entry bound for bounded-random.
    #[arg(long)]
    pub mu: Option<f64>,
    /// γ used when reporting whether the theorem's hypotheses hold.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = Seed(0))]
    pub seed: Seed,
    /// Output file; the matrix goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PaveArgs {
    pub input: PathBuf,
    /// Number of blocks.
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = Seed(0))]
    pub seed: Seed,
    /// Moment target ε; the report checks quality against 3ε and 6ε.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Enumerate all partitions instead of sampling.
    #[arg(long)]
    pub exhaustive: bool,
    /// With --exhaustive, allow unbalanced partitions.
    #[arg(long)]
    pub unbalanced: bool,
    /// Partition output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Size {
    Smoke,
    Tiny,
    Small,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// all, an inequality id (e.g. DECOUPLING), MARKOV or SANDWICH
    pub suite: String,
    #[arg(long, value_enum, default_value_t = Size::Tiny)]
    pub size: Size,
    /// Overrides the manifest seed.
    #[arg(long)]
    pub seed: Option<Seed>,
    /// Overrides the manifest instance count.
    #[arg(long)]
    pub count: Option<u64>,
    /// Report file; reports also go to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Vary {
    Rho,
    Delta,
    P,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Exact when the pattern space is small enough, Monte Carlo otherwise.
    Auto,
    Exact,
    Mc,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub vary: Vary,
    /// Comma-separated grid values.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub grid: Vec<f64>,
    /// Moment order when varying a rate.
    #[arg(long, default_value_t = 4.0)]
    pub p: f64,
    /// Selection rate when varying p.
    #[arg(long, default_value_t = 0.5)]
    pub rate: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = Seed(0))]
    pub seed: Seed,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Reference rate ϱ for the extrapolation bound.
    #[arg(long, default_value_t = 0.1)]
    pub rho_ref: f64,
    /// Exponent λ for the extrapolation bound.
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundName {
    PavingSize,
    Step3,
    Khintchine,
    Haagerup,
    Rudelson,
    Pipeline,
    Mu,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(value_enum)]
    pub name: BoundName,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Pipeline target rate δ (default 0.5 unless --m is given).
    #[arg(long, conflicts_with = "m")]
    pub delta: Option<f64>,
    /// Pipeline block count; sets δ = 1/m.
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub col_norm: Option<f64>,
    #[arg(long)]
    pub spec_norm: Option<f64>,
}
