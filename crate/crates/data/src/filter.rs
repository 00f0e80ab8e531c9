//! Training-set filtering.

use std::collections::HashSet;

use attrition_core::{TypeId, Uid, UnitCatalog};
use serde::{Deserialize, Serialize};

use crate::record::{CombatDataset, CombatRecord, EndReason};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Records containing any of these types are dropped.
    pub excluded_types: Vec<TypeId>,
}

impl FilterConfig {
    /// Excludes the catalog's mine-like types.
    pub fn for_catalog(catalog: &UnitCatalog) -> Self {
        FilterConfig { excluded_types: catalog.mine_types() }
    }
}

/// Whether one side is made up entirely of passive units.
pub fn has_passive_side(r: &CombatRecord) -> bool {
    let passive: HashSet<Uid> = r.passive.iter().copied().collect();
    let all_passive = |army: &[attrition_core::Unit]| !army.is_empty() && army.iter().all(|u| passive.contains(&u.uid));
    all_passive(&r.a0) || all_passive(&r.b0)
}

pub fn keep_for_training(r: &CombatRecord, cfg: &FilterConfig) -> bool {
    r.reason == EndReason::ArmyDestroyed
        && !r.a0.iter().chain(&r.b0).any(|u| cfg.excluded_types.contains(&u.type_id))
        && !has_passive_side(r)
}

/// Keeps only records that ended with an army destroyed, contain no excluded
/// type and where both sides fought.
pub fn filter_for_training(ds: &CombatDataset, cfg: &FilterConfig) -> CombatDataset {
    ds.with_records(ds.records.iter().filter(|r| keep_for_training(r, cfg)).cloned().collect())
}
