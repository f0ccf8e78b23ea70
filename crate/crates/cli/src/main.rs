//! `l0lap` command-line tool: detect, simulate, eval, bench.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "l0lap",
    version,
    about = "Community detection by L0-penalized graph Laplacian"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect communities in an edge list.
    Detect(DetectArgs),
    /// Sample a planted-partition network with ground truth.
    Simulate(SimulateArgs),
    /// Compare a detection result with ground truth.
    Eval(EvalArgs),
    /// Sweep the out-in ratio or the mean degree over simulated networks.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
pub struct DetectionFlags {
    /// Number of nonzero penalty grid steps (c).
    #[arg(long, default_value_t = 10)]
    pub eta_grid_c: usize,
    /// Penalty grid scale (B); the grid is k*B/n for k = 0..=c.
    #[arg(long, default_value_t = 1.0)]
    pub eta_grid_b: f64,
    /// Communities smaller than this go through the permutation test.
    #[arg(long, default_value_t = 20)]
    pub small_m: usize,
    /// Null graphs in the permutation test.
    #[arg(long, default_value_t = 100)]
    pub n_perm: usize,
    /// Filter tested communities whose permutation p-value is at least this.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Skip the permutation filter and keep every extracted community.
    #[arg(long)]
    pub no_filter: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args)]
pub struct DetectArgs {
    /// Whitespace-separated edge list, one `u v` pair per line.
    pub edges: PathBuf,
    #[command(flatten)]
    pub detection: DetectionFlags,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Sbm,
    Dcsbm,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Sbm => "sbm",
            Model::Dcsbm => "dcsbm",
        }
    }
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = Model::Sbm)]
    pub model: Model,
    /// Community sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    /// Out-in ratio: between over within connection probability.
    #[arg(long)]
    pub beta: f64,
    /// Expected mean degree.
    #[arg(long)]
    pub lambda_deg: f64,
    /// Extra nodes in an outlier block wired at the between-community rate.
    #[arg(long, default_value_t = 0)]
    pub outlier_n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct EvalArgs {
    /// `node,community,status` CSV from `detect`.
    pub result: PathBuf,
    /// `node,true_community` CSV from `simulate`.
    pub truth: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    Beta,
    Lambda,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Design {
    /// 5 x 100, 6 x 50 and 10 x 20 nodes.
    Standard,
    /// 5 x 100, 6 x 50 and 5 x 20 nodes plus 100 outliers.
    Outlier,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Sweep::Beta)]
    pub sweep: Sweep,
    /// Grid values of the swept parameter, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Model::Sbm)]
    pub model: Model,
    #[arg(long, value_enum, default_value_t = Design::Standard)]
    pub design: Design,
    /// Out-in ratio when sweeping the mean degree.
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    /// Mean degree when sweeping beta (default: 50 times --scale).
    #[arg(long)]
    pub lambda_deg: Option<f64>,
    /// Multiplies every block size (and the outlier count).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 10)]
    pub replicates: usize,
    #[command(flatten)]
    pub detection: DetectionFlags,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Detect(a) => commands::detect(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Eval(a) => commands::eval(&a),
        Command::Bench(a) => commands::bench(&a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
