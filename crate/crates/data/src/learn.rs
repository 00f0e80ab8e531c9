//! Learning effective DPF and a Borda-count target selection policy from combat records.
//!
//! DPF: every kill spreads the victim's initial health evenly over the enemy
//! units able to hit it, and each of them is charged the time since the
//! previous kill on the victim's side. `DPF(i, j)` is the damage credited to
//! type `i` against type `j` over the time charged for that pair.
//!
//! Borda: in every combat each defending army ranks its types by the order in
//! which their first unit died. Of `n` types, the first to lose a unit scores
//! `n - 1`, the next `n - 2`, and so on; types that lost nothing score 0.

use std::collections::HashSet;

use attrition_core::policy::BordaScores;
use attrition_core::{ArmyComposition, DpfTable, Provenance, TargetSelectionPolicy, TypeId, Uid, Unit, UnitCatalog};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::{CombatDataset, CombatRecord};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnConfig {
    /// Count passive units as potential attackers.
    pub include_passive: bool,
}

/// Running sums behind the learned DPF matrix, row-major `k × k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpfAccumulators {
    pub k: usize,
    pub damage_to_type: Vec<f64>,
    pub time_attacking_type: Vec<f64>,
}

/// A learned table plus the attackable pairs it never observed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnedDpf {
    pub table: DpfTable,
    pub unobserved: Vec<(TypeId, TypeId)>,
}

impl DpfAccumulators {
    pub fn new(k: usize) -> Self {
        DpfAccumulators { k, damage_to_type: vec![0.0; k * k], time_attacking_type: vec![0.0; k * k] }
    }

    pub fn add_record(&mut self, r: &CombatRecord, catalog: &UnitCatalog, cfg: &LearnConfig) {
        let passive: HashSet<Uid> = if cfg.include_passive { HashSet::new() } else { r.passive.iter().copied().collect() };
        let fighters = |army: &[Unit]| -> Vec<TypeId> { army.iter().filter(|u| !passive.contains(&u.uid)).map(|u| u.type_id).collect() };
        let (fa, fb) = (fighters(&r.a0), fighters(&r.b0));
        let mut prev = [r.t0, r.t0];
        for &(frame, uid) in &r.kills {
            let (side, victim) = match r.a0.iter().find(|u| u.uid == uid) {
                Some(v) => (0, v),
                None => match r.b0.iter().find(|u| u.uid == uid) {
                    Some(v) => (1, v),
                    None => continue,
                },
            };
            let dt = frame.saturating_sub(prev[side]) as f64;
            prev[side] = frame;
            let enemies = if side == 0 { &fb } else { &fa };
            let eligible: Vec<TypeId> = enemies.iter().copied().filter(|&t| catalog.can_hit(t, victim.type_id)).collect();
            if eligible.is_empty() {
                continue;
            }
            let d_split = victim.health() / eligible.len() as f64;
            for t in eligible {
                let ij = t * self.k + victim.type_id;
                self.damage_to_type[ij] += d_split;
                self.time_attacking_type[ij] += dt;
            }
        }
    }

    pub fn merge(&mut self, other: &DpfAccumulators) {
        for (a, b) in self.damage_to_type.iter_mut().zip(&other.damage_to_type) {
            *a += b;
        }
        for (a, b) in self.time_attacking_type.iter_mut().zip(&other.time_attacking_type) {
            *a += b;
        }
    }

    pub fn to_table(&self, catalog: &UnitCatalog) -> Result<LearnedDpf> {
        let k = self.k;
        let observed: Vec<bool> = self.time_attacking_type.iter().map(|&t| t > 0.0).collect();
        let per_pair =
            self.damage_to_type.iter().zip(&self.time_attacking_type).map(|(&d, &t)| if t > 0.0 { d / t } else { 0.0 }).collect();
        let table = DpfTable::from_pairs(catalog, per_pair, observed.clone(), Provenance::Learned)?;
        let unobserved =
            (0..k * k).filter(|&ij| !observed[ij] && catalog.can_hit(ij / k, ij % k)).map(|ij| (ij / k, ij % k)).collect();
        Ok(LearnedDpf { table, unobserved })
    }
}

pub fn learn_dpf(ds: &CombatDataset, catalog: &UnitCatalog, cfg: &LearnConfig) -> Result<LearnedDpf> {
    if ds.is_empty() {
        return Err(Error::Invalid("cannot learn from an empty dataset".into()));
    }
    ds.validate(catalog)?;
    let mut acc = DpfAccumulators::new(catalog.len());
    for r in &ds.records {
        acc.add_record(r, catalog, cfg);
    }
    acc.to_table(catalog)
}

/// Points and appearance counts per type, one pair of vectors per attacker composition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BordaTally {
    pub k: usize,
    /// Indexed by [`ArmyComposition::index`].
    pub points: [Vec<f64>; 3],
    pub appearances: [Vec<u64>; 3],
}

impl BordaTally {
    pub fn new(k: usize) -> Self {
        BordaTally { k, points: std::array::from_fn(|_| vec![0.0; k]), appearances: std::array::from_fn(|_| vec![0; k]) }
    }

    pub fn add_record(&mut self, r: &CombatRecord, catalog: &UnitCatalog) {
        for (defenders, attackers) in [(&r.a0, &r.b0), (&r.b0, &r.a0)] {
            if defenders.is_empty() {
                continue;
            }
            let c = ArmyComposition::of(attackers, catalog).index();
            let mut present: Vec<TypeId> = defenders.iter().map(|u| u.type_id).collect();
            present.sort_unstable();
            present.dedup();
            let n = present.len();
            let mut ranked: Vec<TypeId> = Vec::new();
            for (_, uid) in &r.kills {
                if let Some(v) = defenders.iter().find(|u| u.uid == *uid) {
                    if !ranked.contains(&v.type_id) {
                        ranked.push(v.type_id);
                    }
                }
            }
            for (i, &t) in ranked.iter().enumerate() {
                self.points[c][t] += (n - 1 - i) as f64;
            }
            for t in present {
                self.appearances[c][t] += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &BordaTally) {
        for c in 0..3 {
            for t in 0..self.k {
                self.points[c][t] += other.points[c][t];
                self.appearances[c][t] += other.appearances[c][t];
            }
        }
    }

    /// Average points per appearance; 0 for types never seen.
    pub fn scores(&self) -> BordaScores {
        let avg = |c: usize| -> Vec<f64> {
            (0..self.k)
                .map(|t| if self.appearances[c][t] > 0 { self.points[c][t] / self.appearances[c][t] as f64 } else { 0.0 })
                .collect()
        };
        BordaScores { ground_only: avg(0), air_only: avg(1), mixed: avg(2) }
    }
}

pub fn learn_borda_scores(ds: &CombatDataset, catalog: &UnitCatalog) -> Result<BordaScores> {
    if !ds.records.iter().any(|r| !r.kills.is_empty()) {
        return Err(Error::Invalid("no kills in any record; cannot rank target types".into()));
    }
    ds.validate(catalog)?;
    let mut tally = BordaTally::new(catalog.len());
    for r in &ds.records {
        tally.add_record(r, catalog);
    }
    Ok(tally.scores())
}

pub fn learn_borda_policy(ds: &CombatDataset, catalog: &UnitCatalog) -> Result<TargetSelectionPolicy> {
    Ok(TargetSelectionPolicy::borda(learn_borda_scores(ds, catalog)?)?)
}
