use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "attrition", version, about = "Combat models for RTS games: datasets, learning, evaluation and match play")]
pub struct Cli {
    /// Unit-type catalog (JSON). Defaults to the bundled StarCraft catalog.
    #[arg(long, global = true, env = "ATTRITION_CATALOG")]
    pub catalog: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true, env = "ATTRITION_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one combat through a model.
    Simulate(SimulateArgs),
    /// Extract combats from unit-event traces.
    Detect(DetectArgs),
    /// Learn DPF and target-selection scores from a dataset.
    Learn(LearnArgs),
    /// Score models on a dataset, or cross-validate them.
    Evaluate(EvaluateArgs),
    /// Time the models on a batch of combats.
    Bench(BenchArgs),
    /// Play matches on a region map.
    Play(PlayArgs),
    /// Summarize a dataset.
    Stats(StatsArgs),
    /// Generate seeded combats (or a trace) with the tick simulator.
    GenSynthetic(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    DestroyScore,
    Random,
    Borda,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Model file with learned DPF and Borda scores; static DPF from the catalog otherwise.
    #[arg(long)]
    pub model_file: Option<PathBuf>,
    /// Target selection; defaults to borda with a model file, destroy-score without.
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Combat state (JSON with army_a and army_b).
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, default_value = "decreasing")]
    pub model: String,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Trace files (JSON lines); combats from all of them are concatenated.
    #[arg(long = "trace", required = true)]
    pub traces: Vec<PathBuf>,
    #[arg(long, default_value_t = attrition_data::DEFAULT_PEACE_WINDOW)]
    pub peace_window: u64,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Let units that never fought count as damage dealers.
    #[arg(long)]
    pub include_passive: bool,
    /// Keep records the training filter would drop.
    #[arg(long)]
    pub no_filter: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Comma-separated model kinds.
    #[arg(long, default_value = "ts_lanchester,sustained,decreasing", value_delimiter = ',')]
    pub models: Vec<String>,
    /// Cross-validate with this many folds instead of using fixed parameters.
    #[arg(long)]
    pub cv: Option<usize>,
    /// With --cv: use the catalog's static DPF instead of learning it per fold.
    #[arg(long)]
    pub static_dpf: bool,
    #[arg(long)]
    pub no_filter: bool,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Dataset whose initial states are simulated; synthetic combats otherwise.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, default_value_t = 6000)]
    pub combats: usize,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value = "ts_lanchester,sustained,decreasing,tick_oracle", value_delimiter = ',')]
    pub models: Vec<String>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    /// Region map (JSON); the bundled six-region ring otherwise.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Initial placements (JSON); the bundled ring skirmish otherwise.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, default_value = "mcts")]
    pub a: String,
    #[arg(long, default_value = "random")]
    pub b: String,
    #[arg(long, default_value_t = 1)]
    pub games: usize,
    /// Combat model used as the forward model.
    #[arg(long, default_value = "decreasing")]
    pub model: String,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    #[arg(long, default_value_t = 2880)]
    pub playout_length: u64,
    #[arg(long, default_value_t = 400)]
    pub plan_interval: u64,
    #[arg(long, default_value_t = 28_800)]
    pub max_frames: u64,
    /// Write per-cycle logs of every game here (JSON lines).
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub dataset: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Dataset,
    Trace,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 2000)]
    pub records: usize,
    #[arg(long, value_enum, default_value_t = GenKind::Dataset)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 3)]
    pub max_types: usize,
    #[arg(long, default_value_t = 12)]
    pub max_units: usize,
    /// Generating DPF is the static DPF times a per-pair factor drawn from [dpf_lo, dpf_hi).
    #[arg(long, default_value_t = 0.6)]
    pub dpf_lo: f64,
    #[arg(long, default_value_t = 1.0)]
    pub dpf_hi: f64,
    /// Use the static DPF as is.
    #[arg(long)]
    pub static_dpf: bool,
    /// Target selection of the simulated armies (borda is not available here).
    #[arg(long, value_enum, default_value_t = PolicyArg::DestroyScore)]
    pub policy: PolicyArg,
    /// Frames between consecutive combats of a trace.
    #[arg(long, default_value_t = 400)]
    pub gap: u64,
    /// Also write the generating parameters as a model file.
    #[arg(long)]
    pub truth_out: Option<PathBuf>,
}
