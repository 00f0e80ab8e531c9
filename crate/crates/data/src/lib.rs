//! Combat datasets: unit-event traces, combat detection, training filters,
//! parameter learning, cross-validation and model evaluation.

pub mod detect;
pub mod error;
pub mod eval;
pub mod filter;
pub mod folds;
pub mod learn;
pub mod model_file;
pub mod record;
pub mod stats;
pub mod synth;
pub mod trace;

pub use detect::{detect_combats, DetectConfig, DEFAULT_PEACE_WINDOW};
pub use error::{Error, Result};
pub use record::{CombatDataset, CombatRecord, EndReason, DATASET_FORMAT_VERSION};
pub use trace::{EventKind, Trace, TraceEvent, TraceHeader, TRACE_FORMAT_VERSION};
pub use eval::{
    benchmark_models, bucket_by_heterogeneity, cross_validate, evaluate, final_state_similarity, predict_winner_accuracy, write_report_csv,
    BenchRow, Bucket, CvConfig, CvRow, DpfSource, EvalReport, PolicySource, RecordEval, ReportRow,
};
pub use filter::{filter_for_training, FilterConfig};
pub use folds::{make_folds, train_eval_split, FoldSplit};
pub use learn::{learn_borda_policy, learn_borda_scores, learn_dpf, BordaTally, DpfAccumulators, LearnConfig, LearnedDpf};
pub use model_file::{ModelFile, ModelProvenance, MODEL_FORMAT_VERSION};
pub use stats::{dataset_stats, DatasetStats, Summary};
