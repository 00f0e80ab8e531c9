//! Scoring combat models against recorded combats: winner accuracy, final-state
//! similarity, heterogeneity buckets, cross-validation and timing.

use std::collections::HashSet;
use std::fmt;
use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use attrition_core::{CombatModel, CombatState, DpfTable, ModelKind, TargetSelectionPolicy, Uid, Unit, UnitCatalog, Winner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::folds::{make_folds, train_eval_split};
use crate::learn::LearnConfig;
use crate::model_file::ModelFile;
use crate::record::{CombatDataset, CombatRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bucket {
    #[serde(rename = "1vs1")]
    OneVsOne,
    #[serde(rename = "1vsN")]
    OneVsN,
    #[serde(rename = "NvsN")]
    NVsN,
}

impl Bucket {
    pub const ALL: [Bucket; 3] = [Bucket::OneVsOne, Bucket::OneVsN, Bucket::NVsN];

    pub fn name(self) -> &'static str {
        match self {
            Bucket::OneVsOne => "1vs1",
            Bucket::OneVsN => "1vsN",
            Bucket::NVsN => "NvsN",
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn distinct_types(army: &[Unit]) -> usize {
    army.iter().map(|u| u.type_id).collect::<HashSet<_>>().len()
}

/// An army is homogeneous when all its units share one type.
pub fn bucket_by_heterogeneity(r: &CombatRecord) -> Bucket {
    match (distinct_types(&r.a0) <= 1, distinct_types(&r.b0) <= 1) {
        (true, true) => Bucket::OneVsOne,
        (false, false) => Bucket::NVsN,
        _ => Bucket::OneVsN,
    }
}

/// `1 - ||S ∩ F| - |S ∩ F'|| / |S|`, counting units by uid.
pub fn final_state_similarity(initial: &[Uid], predicted: &[Uid], actual: &[Uid]) -> Result<f64> {
    let s: HashSet<Uid> = initial.iter().copied().collect();
    if s.is_empty() {
        return Err(Error::Invalid("similarity of an empty initial state".into()));
    }
    let count = |f: &[Uid]| f.iter().copied().collect::<HashSet<_>>().intersection(&s).count() as f64;
    Ok(1.0 - (count(actual) - count(predicted)).abs() / s.len() as f64)
}

/// A draw is right only when both armies really died; a stalemate is never right.
pub fn winner_correct(predicted: Winner, actual: Winner) -> bool {
    predicted == actual && predicted != Winner::Stalemate
}

fn uids<'a>(units: impl IntoIterator<Item = &'a Unit>) -> Vec<Uid> {
    units.into_iter().map(|u| u.uid).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordEval {
    pub index: usize,
    pub bucket: Bucket,
    pub actual: Winner,
    pub predicted: Winner,
    pub correct: bool,
    pub similarity: f64,
    pub predicted_frames: f64,
    pub actual_frames: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: ModelKind,
    pub dpf_source: String,
    pub policy: String,
    pub records: usize,
    pub winner_accuracy: f64,
    pub mean_similarity: f64,
    /// Mean similarity per bucket, in [`Bucket::ALL`] order; `None` for empty buckets.
    pub bucket_similarity: [Option<f64>; 3],
    pub bucket_counts: [usize; 3],
    /// Wall time spent inside the model, seconds.
    pub total_sim_time: f64,
    pub per_record: Vec<RecordEval>,
}

/// Runs `model` on every record's initial state and scores the predictions.
pub fn evaluate(model: &CombatModel, ds: &CombatDataset, catalog: &UnitCatalog, dpf_source: &str) -> Result<EvalReport> {
    if ds.is_empty() {
        return Err(Error::Invalid("cannot evaluate on an empty dataset".into()));
    }
    let states = ds.records.iter().map(CombatRecord::initial_state).collect::<Result<Vec<_>>>()?;
    for s in &states {
        s.validate(catalog)?;
    }
    let start = Instant::now();
    let outcomes: Vec<_> = states.iter().map(|s| model.simulate(catalog, s)).collect();
    let total_sim_time = start.elapsed().as_secs_f64();

    let mut per_record = Vec::with_capacity(ds.len());
    let (mut sums, mut counts) = ([0.0; 3], [0usize; 3]);
    for (index, (r, o)) in ds.records.iter().zip(&outcomes).enumerate() {
        let initial = uids(r.a0.iter().chain(&r.b0));
        let similarity = final_state_similarity(&initial, &uids(o.survivors_a.iter().chain(&o.survivors_b)), &uids(r.af.iter().chain(&r.bf)))?;
        let actual = r.actual_winner();
        let bucket = bucket_by_heterogeneity(r);
        sums[bucket as usize] += similarity;
        counts[bucket as usize] += 1;
        per_record.push(RecordEval {
            index,
            bucket,
            actual,
            predicted: o.winner,
            correct: winner_correct(o.winner, actual),
            similarity,
            predicted_frames: o.duration_frames,
            actual_frames: r.length(),
        });
    }
    let n = per_record.len() as f64;
    Ok(EvalReport {
        model: model.kind,
        dpf_source: dpf_source.to_string(),
        policy: model.policy.name().to_string(),
        records: per_record.len(),
        winner_accuracy: per_record.iter().filter(|e| e.correct).count() as f64 / n,
        mean_similarity: per_record.iter().map(|e| e.similarity).sum::<f64>() / n,
        bucket_similarity: std::array::from_fn(|b| (counts[b] > 0).then(|| sums[b] / counts[b] as f64)),
        bucket_counts: counts,
        total_sim_time,
        per_record,
    })
}

pub fn predict_winner_accuracy(model: &CombatModel, ds: &CombatDataset, catalog: &UnitCatalog) -> Result<f64> {
    Ok(evaluate(model, ds, catalog, "")?.winner_accuracy)
}

/// Where the target selection policy comes from during cross-validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicySource {
    /// Borda scores learned on each training fold.
    Learned,
    Fixed(TargetSelectionPolicy),
}

/// Where DPF comes from during cross-validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DpfSource {
    /// Learned on each training fold.
    Learned,
    Fixed(DpfTable),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub seed: u64,
    pub learn: LearnConfig,
    pub dpf: DpfSource,
    pub policy: PolicySource,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig { folds: 10, seed: 0, learn: LearnConfig::default(), dpf: DpfSource::Learned, policy: PolicySource::Learned }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub model: ModelKind,
    pub dpf_source: String,
    pub policy: String,
    pub fold_accuracy: Vec<f64>,
    pub fold_similarity: Vec<f64>,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub similarity_mean: f64,
    pub similarity_std: f64,
    /// Per-bucket similarity pooled over all test records.
    pub bucket_similarity: [Option<f64>; 3],
    pub sim_time_s: f64,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (mean, (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt())
}

/// k-fold cross-validation: for each fold, parameters come from the other
/// folds and every model is scored on the held-out one.
pub fn cross_validate(ds: &CombatDataset, catalog: &UnitCatalog, kinds: &[ModelKind], cfg: &CvConfig) -> Result<Vec<CvRow>> {
    let split = make_folds(ds.len(), cfg.folds, cfg.seed)?;
    let mut reports: Vec<Vec<EvalReport>> = vec![Vec::new(); kinds.len()];
    for fold in 0..cfg.folds {
        let (train, test) = train_eval_split(ds, &split, fold)?;
        let learned = match (&cfg.dpf, &cfg.policy) {
            (DpfSource::Fixed(_), PolicySource::Fixed(_)) => None,
            _ => Some(ModelFile::learn(&train, catalog, &cfg.learn)?),
        };
        let table = match &cfg.dpf {
            DpfSource::Learned => learned.as_ref().expect("learned").dpf_matrix.clone(),
            DpfSource::Fixed(t) => t.clone(),
        };
        let policy = match &cfg.policy {
            PolicySource::Learned => learned.as_ref().expect("learned").policy()?,
            PolicySource::Fixed(p) => p.clone(),
        };
        let label = if matches!(cfg.dpf, DpfSource::Learned) { "learned" } else { "static" };
        for (i, &kind) in kinds.iter().enumerate() {
            let model = CombatModel::new(kind, table.clone(), policy.clone());
            reports[i].push(evaluate(&model, &test, catalog, label)?);
        }
    }
    Ok(kinds
        .iter()
        .zip(reports)
        .map(|(&kind, rs)| {
            let acc: Vec<f64> = rs.iter().map(|r| r.winner_accuracy).collect();
            let sim: Vec<f64> = rs.iter().map(|r| r.mean_similarity).collect();
            let (accuracy_mean, accuracy_std) = mean_std(&acc);
            let (similarity_mean, similarity_std) = mean_std(&sim);
            let bucket_similarity = std::array::from_fn(|b| {
                let v: Vec<f64> = rs.iter().flat_map(|r| &r.per_record).filter(|e| e.bucket as usize == b).map(|e| e.similarity).collect();
                (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
            });
            CvRow {
                model: kind,
                dpf_source: rs[0].dpf_source.clone(),
                policy: rs[0].policy.clone(),
                accuracy_mean,
                accuracy_std,
                similarity_mean,
                similarity_std,
                bucket_similarity,
                sim_time_s: rs.iter().map(|r| r.total_sim_time).sum(),
                fold_accuracy: acc,
                fold_similarity: sim,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub name: String,
    pub median_s: f64,
    pub reps: Vec<f64>,
    /// Slowest median divided by this one.
    pub ratio_vs_slowest: f64,
}

/// Median wall time of simulating every state once, per model.
pub fn benchmark_models(models: &[(String, CombatModel)], states: &[CombatState], catalog: &UnitCatalog, repetitions: usize) -> Result<Vec<BenchRow>> {
    if repetitions < 3 {
        return Err(Error::Invalid(format!("benchmarks need at least 3 repetitions, got {repetitions}")));
    }
    let mut rows: Vec<BenchRow> = models
        .iter()
        .map(|(name, m)| {
            let reps: Vec<f64> = (0..repetitions)
                .map(|_| {
                    let start = Instant::now();
                    for s in states {
                        black_box(m.simulate(catalog, black_box(s)));
                    }
                    start.elapsed().as_secs_f64()
                })
                .collect();
            let mut sorted = reps.clone();
            sorted.sort_by(f64::total_cmp);
            let median_s = sorted[sorted.len() / 2];
            BenchRow { name: name.clone(), median_s, reps, ratio_vs_slowest: 1.0 }
        })
        .collect();
    let slowest = rows.iter().map(|r| r.median_s).fold(0.0, f64::max);
    for r in &mut rows {
        r.ratio_vs_slowest = if r.median_s > 0.0 { slowest / r.median_s } else { f64::INFINITY };
    }
    Ok(rows)
}

/// One CSV line of a report table. Column names are a stable interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub model: String,
    pub dpf_source: String,
    pub policy: String,
    pub accuracy: f64,
    pub similarity: f64,
    pub sim_time_s: f64,
    pub sim_1vs1: Option<f64>,
    #[serde(rename = "sim_1vsN")]
    pub sim_1vs_n: Option<f64>,
    #[serde(rename = "sim_NvsN")]
    pub sim_nvs_n: Option<f64>,
}

impl From<&EvalReport> for ReportRow {
    fn from(r: &EvalReport) -> Self {
        ReportRow {
            model: r.model.name().into(),
            dpf_source: r.dpf_source.clone(),
            policy: r.policy.clone(),
            accuracy: r.winner_accuracy,
            similarity: r.mean_similarity,
            sim_time_s: r.total_sim_time,
            sim_1vs1: r.bucket_similarity[0],
            sim_1vs_n: r.bucket_similarity[1],
            sim_nvs_n: r.bucket_similarity[2],
        }
    }
}

impl From<&CvRow> for ReportRow {
    fn from(r: &CvRow) -> Self {
        ReportRow {
            model: r.model.name().into(),
            dpf_source: r.dpf_source.clone(),
            policy: r.policy.clone(),
            accuracy: r.accuracy_mean,
            similarity: r.similarity_mean,
            sim_time_s: r.sim_time_s,
            sim_1vs1: r.bucket_similarity[0],
            sim_1vs_n: r.bucket_similarity[1],
            sim_nvs_n: r.bucket_similarity[2],
        }
    }
}

pub fn write_report_csv(rows: &[ReportRow], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if rows.is_empty() {
        out.write_record(["model", "dpf_source", "policy", "accuracy", "similarity", "sim_time_s", "sim_1vs1", "sim_1vsN", "sim_NvsN"])?;
    }
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
