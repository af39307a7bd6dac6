mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "qwoa", version, about = "Quantum walk optimisation experiments")]
struct Cli {
    /// Upper bound on data-parallel workers.
    #[arg(long, env = "QWOA_WORKERS", default_value_t = 1, global = true)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded problem instance.
    Generate(GenerateArgs),
    /// Prepare the amplified state, measure it and write diagnostics.
    Run(RunArgs),
    /// Tune schedule parameters for an instance.
    Tune(TuneArgs),
    /// Fit the subset-mean condition at every distance.
    Analyze(AnalyzeArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub n: usize,
    /// Alphabet size (clusters or locations); ignored by maxcut, MIS and QAP.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output instance file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConventionArg {
    PhaseFree,
    Exact,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisArg {
    Auto,
    Ratio,
    Value,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub beta: f64,
    /// Phase-objective penalties, comma separated; defaults to the instance's fixed penalties.
    #[arg(long, value_delimiter = ',')]
    pub lambda_t: Option<Vec<f64>>,
    /// Phase normalisation; exact objective standard deviation by default.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub shots: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Target error of the permutation mixer.
    #[arg(long, default_value_t = qwoa::mixers::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value_t = ConventionArg::PhaseFree)]
    pub convention: ConventionArg,
    /// Rank measured solutions by the unpenalised objective.
    #[arg(long)]
    pub raw: bool,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
    #[arg(long, value_enum, default_value_t = AxisArg::Auto)]
    pub axis: AxisArg,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveArg {
    Expectation,
    Cvar,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Exact,
    Shots,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizerArg {
    NelderMead,
    Bfgs,
}

#[derive(Args, Debug)]
pub struct TuneArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub p: usize,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Expectation)]
    pub objective: ObjectiveArg,
    /// Tail fraction for CVaR.
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Measurements per evaluation in shot mode.
    #[arg(long, default_value_t = 1000)]
    pub shots: usize,
    /// Maximum objective evaluations.
    #[arg(long, default_value_t = 400)]
    pub budget: usize,
    #[arg(long, value_enum, default_value_t = OptimizerArg::NelderMead)]
    pub optimizer: OptimizerArg,
    /// Also tune the phase-objective penalties.
    #[arg(long)]
    pub tune_lambda: bool,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub convergence: f64,
    #[arg(long, default_value_t = qwoa::mixers::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitArg {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = FitArg::Exhaustive)]
    pub fit: FitArg,
    #[arg(long, default_value_t = qwoa::analysis::DEFAULT_REFERENCES)]
    pub references: usize,
    #[arg(long, default_value_t = qwoa::analysis::DEFAULT_MEMBERS)]
    pub members: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate with every penalty switched off.
    #[arg(long)]
    pub raw: bool,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = if cli.workers == 0 {
        Err(Failure::usage("--workers must be at least 1"))
    } else {
        match cli.command {
            Command::Generate(a) => commands::generate(&a),
            Command::Run(a) => commands::run(&a),
            Command::Tune(a) => commands::tune(&a),
            Command::Analyze(a) => commands::analyze(&a),
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
