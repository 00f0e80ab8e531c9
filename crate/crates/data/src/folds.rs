//! k-fold splits for cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::CombatDataset;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub fold_count: usize,
    /// Fold id of each record, by record index.
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldSplit {
    pub fn fold_size(&self, fold: usize) -> usize {
        self.assignments.iter().filter(|&&f| f == fold).count()
    }
}

/// Shuffles record indices with `seed` and deals them round-robin into folds.
pub fn make_folds(records: usize, fold_count: usize, seed: u64) -> Result<FoldSplit> {
    if fold_count < 2 {
        return Err(Error::Invalid(format!("need at least 2 folds, got {fold_count}")));
    }
    if records < fold_count {
        return Err(Error::Invalid(format!("{records} records cannot fill {fold_count} folds")));
    }
    let mut order: Vec<usize> = (0..records).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignments = vec![0; records];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % fold_count;
    }
    Ok(FoldSplit { fold_count, assignments, seed })
}

/// `(train, test)` for one fold. Record order is preserved within each part.
pub fn train_eval_split(ds: &CombatDataset, split: &FoldSplit, fold: usize) -> Result<(CombatDataset, CombatDataset)> {
    if fold >= split.fold_count {
        return Err(Error::Invalid(format!("fold {fold} out of range 0..{}", split.fold_count)));
    }
    if split.assignments.len() != ds.len() {
        return Err(Error::Invalid(format!("split covers {} records, dataset has {}", split.assignments.len(), ds.len())));
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (r, &f) in ds.records.iter().zip(&split.assignments) {
        if f == fold { &mut test } else { &mut train }.push(r.clone());
    }
    Ok((ds.with_records(train), ds.with_records(test)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_by_ten() {
        let s = make_folds(10, 10, 3).unwrap();
        assert!((0..10).all(|f| s.fold_size(f) == 1));
    }

    #[test]
    fn same_seed_same_split() {
        assert_eq!(make_folds(57, 10, 9).unwrap(), make_folds(57, 10, 9).unwrap());
        assert_ne!(make_folds(57, 10, 9).unwrap(), make_folds(57, 10, 10).unwrap());
    }

    #[test]
    fn bad_arguments() {
        assert!(make_folds(10, 1, 0).is_err());
        assert!(make_folds(3, 4, 0).is_err());
        let ds = CombatDataset::new("x", "", vec![]);
        let s = FoldSplit { fold_count: 2, assignments: vec![], seed: 0 };
        assert!(train_eval_split(&ds, &s, 2).is_err());
    }
}
