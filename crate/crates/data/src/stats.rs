//! Dataset summary statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::record::{CombatDataset, EndReason};

/// Mean, min and max of a quantity over records. All zero for an empty dataset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let (mut n, mut sum, mut min, mut max) = (0usize, 0.0, f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            n += 1;
            sum += v;
            min = min.min(v);
            max = max.max(v);
        }
        if n == 0 {
            Summary::default()
        } else {
            Summary { mean: sum / n as f64, min, max }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub records: usize,
    /// Keyed by end-reason name; every reason is present.
    pub by_reason: BTreeMap<String, usize>,
    /// Frames.
    pub length: Summary,
    pub units: Summary,
    pub types: Summary,
}

pub fn dataset_stats(ds: &CombatDataset) -> DatasetStats {
    let mut by_reason: BTreeMap<String, usize> = EndReason::ALL.iter().map(|r| (r.name().to_string(), 0)).collect();
    for r in &ds.records {
        *by_reason.get_mut(r.reason.name()).expect("all reasons present") += 1;
    }
    DatasetStats {
        records: ds.len(),
        by_reason,
        length: Summary::of(ds.records.iter().map(|r| r.length() as f64)),
        units: Summary::of(ds.records.iter().map(|r| r.unit_count() as f64)),
        types: Summary::of(ds.records.iter().map(|r| r.type_count() as f64)),
    }
}
