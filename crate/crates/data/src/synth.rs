//! Synthetic combats, datasets and traces generated with the tick simulator.
//!
//! These stand in for replay data: the generating DPF matrix and targeting rule
//! are known, so learning and evaluation can be checked against them.

use std::collections::HashMap;

use attrition_core::models::oracle::OracleHit;
use attrition_core::models::{tick_oracle_run, OracleConfig};
use attrition_core::{static_dpf, CombatState, DpfTable, Position, Provenance, TargetSelectionPolicy, TypeId, Uid, Unit, UnitCatalog, Winner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::record::{CombatDataset, CombatRecord, EndReason};
use crate::trace::{Trace, TraceEvent};

/// Armed, non-worker, non-building, non-mine types.
pub fn default_pool(catalog: &UnitCatalog) -> Vec<TypeId> {
    catalog
        .types()
        .iter()
        .filter(|t| (t.hits_ground() || t.hits_air()) && !t.is_worker && !t.is_building && !t.is_mine)
        .map(|t| t.type_id)
        .collect()
}

/// Static DPF with every attackable entry scaled by an independent factor drawn from `[lo, hi)`.
pub fn planted_dpf(catalog: &UnitCatalog, seed: u64, lo: f64, hi: f64) -> DpfTable {
    let base = static_dpf(catalog);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_pair = base.per_pair.iter().map(|&v| v * rng.gen_range(lo..hi)).collect();
    DpfTable::from_pairs(catalog, per_pair, base.valid.clone(), Provenance::Static).expect("same shape as the static table")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub records: usize,
    pub seed: u64,
    pub type_pool: Vec<TypeId>,
    pub max_types_per_army: usize,
    pub max_units_per_army: usize,
    pub oracle: OracleConfig,
}

impl SynthConfig {
    pub fn new(catalog: &UnitCatalog, records: usize, seed: u64) -> Self {
        SynthConfig { records, seed, type_pool: default_pool(catalog), max_types_per_army: 3, max_units_per_army: 12, oracle: OracleConfig::default() }
    }
}

/// Grid placement tight enough that every unit is within melee range of every other.
fn slot(i: usize, player: u8, origin: f64) -> Position {
    let row = (i / 5) as f64 + if player == 0 { 0.0 } else { 3.0 };
    Position::new(origin + (i % 5) as f64 * 2.0, row * 2.0)
}

/// An army of `n` full-health units whose types cycle through `types`.
pub fn army(types: &[TypeId], n: usize, first_uid: Uid, player: u8, origin: f64, catalog: &UnitCatalog) -> Vec<Unit> {
    (0..n).map(|i| Unit::full(first_uid + i as Uid, types[i % types.len()], catalog).at(slot(i, player, origin))).collect()
}

/// A random combat: each side picks 1..=max_types types from the pool and 1..=max_units units.
pub fn random_state(rng: &mut impl Rng, catalog: &UnitCatalog, cfg: &SynthConfig, first_uid: Uid, origin: f64) -> CombatState {
    let mut side = |player: u8, first: Uid| {
        let nt = rng.gen_range(1..=cfg.max_types_per_army.min(cfg.type_pool.len()));
        let types: Vec<TypeId> = cfg.type_pool.choose_multiple(rng, nt).copied().collect();
        let n = rng.gen_range(nt..=cfg.max_units_per_army.max(nt));
        army(&types, n, first, player, origin, catalog)
    };
    let a = side(0, first_uid);
    let b = side(1, first_uid + 1000);
    CombatState::new(a, b).expect("generated armies are valid")
}

/// Runs the tick simulator from frame `t0` and records the result, along with every hit.
pub fn simulate_record(
    state: &CombatState,
    rates: &DpfTable,
    policy: &TargetSelectionPolicy,
    catalog: &UnitCatalog,
    oracle: &OracleConfig,
    t0: u64,
) -> (CombatRecord, Vec<OracleHit>) {
    let mut hits = Vec::new();
    let run = tick_oracle_run(state, rates, policy, catalog, oracle, |h| hits.push(*h));
    let o = run.outcome;
    let reason = match o.winner {
        Winner::Stalemate if (o.duration_frames as u64) < oracle.max_frames => EndReason::Peace,
        Winner::Stalemate => EndReason::GameEnd,
        _ => EndReason::ArmyDestroyed,
    };
    let mut attacked: Vec<Uid> = hits.iter().map(|h| h.attacker).collect();
    attacked.sort_unstable();
    attacked.dedup();
    let passive = state.army_a.iter().chain(&state.army_b).map(|u| u.uid).filter(|u| attacked.binary_search(u).is_err()).collect();
    let record = CombatRecord {
        t0,
        tf: t0 + o.duration_frames as u64,
        reason,
        a0: state.army_a.clone(),
        b0: state.army_b.clone(),
        af: o.survivors_a,
        bf: o.survivors_b,
        kills: run.kills.into_iter().map(|(f, u)| (t0 + f, u)).collect(),
        passive,
    };
    (record, hits)
}

/// `cfg.records` random combats simulated under `rates` and `policy`.
pub fn generate_dataset(catalog: &UnitCatalog, rates: &DpfTable, policy: &TargetSelectionPolicy, cfg: &SynthConfig, source: &str) -> CombatDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let records = (0..cfg.records)
        .map(|_| {
            let s = random_state(&mut rng, catalog, cfg, 1, 0.0);
            simulate_record(&s, rates, policy, catalog, &cfg.oracle, 0).0
        })
        .collect();
    CombatDataset::new(catalog.catalog_id.clone(), source, records)
}

/// Trace events for one simulated combat starting at `t0`: spawns one frame
/// earlier, an attack order whenever a unit starts on a new target, one damage
/// event per attacker, target and frame, and deaths.
pub fn combat_events(state: &CombatState, record: &CombatRecord, hits: &[OracleHit]) -> Vec<TraceEvent> {
    let t0 = record.t0;
    let mut events: Vec<TraceEvent> = Vec::new();
    for (player, army) in [(0u8, &state.army_a), (1u8, &state.army_b)] {
        for u in army {
            let pos = u.pos.unwrap_or(Position::new(0.0, 0.0));
            events.push(TraceEvent::spawn(t0.saturating_sub(1), u.uid, player, u.type_id, pos).with_health(u.hp, u.shield));
        }
    }
    let death: HashMap<Uid, u64> = record.kills.iter().map(|&(f, u)| (u, f)).collect();
    let mut current: HashMap<Uid, Uid> = HashMap::new();
    // (landing frame, attacker, target) -> damage, in first-seen order.
    let mut landed: Vec<((u64, Uid, Uid), f64)> = Vec::new();
    let mut index: HashMap<(u64, Uid, Uid), usize> = HashMap::new();
    let mut timeline: Vec<(u64, u8, TraceEvent)> = Vec::new();
    for h in hits {
        let at = t0 + h.frame;
        let needs_order = match current.get(&h.attacker) {
            None => true,
            Some(t) => death.get(t).is_some_and(|&f| f <= at),
        };
        if needs_order {
            current.insert(h.attacker, h.target);
            timeline.push((at, 0, TraceEvent::order_attack(at, h.attacker, h.target)));
        }
        let key = (at + 1, h.attacker, h.target);
        match index.get(&key) {
            Some(&i) => landed[i].1 += h.damage,
            None => {
                index.insert(key, landed.len());
                landed.push((key, h.damage));
            }
        }
    }
    for ((f, a, t), d) in landed {
        timeline.push((f, 1, TraceEvent::damage(f, a, t, d)));
    }
    for &(f, u) in &record.kills {
        timeline.push((f, 2, TraceEvent::death(f, u)));
    }
    timeline.sort_by_key(|(f, phase, _)| (*f, *phase));
    events.extend(timeline.into_iter().map(|(_, _, e)| e));
    events
}

/// A trace holding `n` random combats, one after another and far apart, plus
/// the records the simulator produced for them.
pub fn generate_trace(
    catalog: &UnitCatalog,
    rates: &DpfTable,
    policy: &TargetSelectionPolicy,
    cfg: &SynthConfig,
    gap_frames: u64,
) -> (Trace, Vec<CombatRecord>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut events = Vec::new();
    let mut records = Vec::new();
    let mut t0 = 1;
    for i in 0..cfg.records {
        let s = random_state(&mut rng, catalog, cfg, 1 + 2000 * i as Uid, 10_000.0 * i as f64);
        let (r, hits) = simulate_record(&s, rates, policy, catalog, &cfg.oracle, t0);
        events.extend(combat_events(&s, &r, &hits));
        t0 = r.tf + gap_frames;
        records.push(r);
    }
    if let Some(last) = events.last().map(|e| e.frame) {
        events.push(TraceEvent::game_end(last + gap_frames));
    }
    (Trace::new(catalog.catalog_id.clone(), events), records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use attrition_core::models::OracleTargeting;

    #[test]
    fn planted_entries_within_band() {
        let c = UnitCatalog::starcraft();
        let s = static_dpf(&c);
        let p = planted_dpf(&c, 1, 0.6, 1.0);
        for ij in 0..s.per_pair.len() {
            assert!(p.per_pair[ij] >= 0.6 * s.per_pair[ij] - 1e-15 && p.per_pair[ij] <= s.per_pair[ij]);
        }
    }

    #[test]
    fn dataset_is_reproducible_and_valid() {
        let c = UnitCatalog::starcraft();
        let cfg = SynthConfig { oracle: OracleConfig { targeting: OracleTargeting::Spread, ..OracleConfig::default() }, ..SynthConfig::new(&c, 40, 5) };
        let d1 = generate_dataset(&c, &static_dpf(&c), &TargetSelectionPolicy::DestroyScore, &cfg, "t");
        let d2 = generate_dataset(&c, &static_dpf(&c), &TargetSelectionPolicy::DestroyScore, &cfg, "t");
        assert_eq!(d1, d2);
        d1.validate(&c).unwrap();
        assert!(d1.records.iter().any(|r| r.reason == EndReason::ArmyDestroyed));
    }
}
