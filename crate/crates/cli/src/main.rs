mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "dpskit", version, about = "Symmetric-extension separability tests and bounds")]
pub struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps; output order does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Extension membership verdicts for a state over a range of N.
    Membership(MembershipArgs),
    /// Closed-form bounds table.
    Bounds(BoundsArgs),
    /// State-estimation fidelity bounds.
    Fidelity(FidelityArgs),
    /// Channel output-purity bounds.
    Purity(PurityArgs),
    /// Geometric entanglement bounds for tripartite pure states.
    Geometric(GeometricArgs),
    /// Entangled / separable / undecided verdict with evidence.
    Certify(CertifyArgs),
    /// Required N and log operation counts for a target accuracy.
    Complexity(ComplexityArgs),
}

#[derive(Args, Debug)]
pub struct MembershipArgs {
    /// Operator JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// `N` or `A..B` (inclusive).
    #[arg(long = "N", alias = "n", default_value = "2")]
    pub n: String,
    #[arg(long)]
    pub ppt: bool,
    #[arg(long, value_enum, default_value_t = Cuts::Half)]
    pub cuts: Cuts,
    /// Interior-point stopping tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Cuts {
    Half,
    All,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long = "dA", alias = "da", default_value_t = 2)]
    pub d_a: usize,
    #[arg(long = "dB", alias = "db", default_value_t = 2)]
    pub d_b: usize,
    #[arg(long = "N", alias = "n", default_value = "1..20")]
    pub n: String,
    /// Adds required-N and complexity columns for this accuracy.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long = "N", alias = "n", default_value = "1..3")]
    pub n: String,
    /// Only the PPT-constrained hierarchy; both are swept otherwise.
    #[arg(long)]
    pub ppt: bool,
}

#[derive(Args, Debug)]
pub struct FidelityArgs {
    #[arg(long, conflicts_with_all = ["qutrit_grid", "input"])]
    pub bb84: Option<f64>,
    #[arg(long, conflicts_with = "input")]
    pub qutrit_grid: Option<f64>,
    /// Estimation problem JSON: `{"ensemble": [{"p", "encoded", "source"}]}`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Args, Debug)]
pub struct PurityArgs {
    /// Depolarizing channel with this probability.
    #[arg(long, conflicts_with_all = ["identity_qubit", "input"])]
    pub depolarizing: Option<f64>,
    /// Local dimension for `--depolarizing`.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, conflicts_with = "input")]
    pub identity_qubit: bool,
    /// Choi operator JSON, input factor first.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum NamedState {
    Ghz,
    W,
    Product,
}

#[derive(Args, Debug)]
pub struct GeometricArgs {
    #[arg(long, value_enum, conflicts_with = "input")]
    pub state: Option<NamedState>,
    /// Tripartite pure-state operator JSON.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long = "max-N", alias = "max-n", default_value_t = 3)]
    pub max_n: usize,
    /// Relative eigenvalue threshold for ranks.
    #[arg(long, default_value_t = 1e-7)]
    pub delta: f64,
}

#[derive(Args, Debug)]
pub struct ComplexityArgs {
    #[arg(long = "dA", alias = "da", default_value_t = 2)]
    pub d_a: usize,
    #[arg(long = "dB", alias = "db", default_value_t = 2)]
    pub d_b: usize,
    #[arg(long)]
    pub delta: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Breakdown(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}
