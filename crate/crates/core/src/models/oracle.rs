//! Discrete reference simulator: one-frame ticks, every living unit hits its
//! chosen target each frame and all damage lands at the end of the frame.

use serde::{Deserialize, Serialize};

use crate::catalog::UnitCatalog;
use crate::dpf::DamageRates;
use crate::models::{CombatOutcome, ModelKind, Winner};
use crate::policy::TargetSelectionPolicy;
use crate::unit::{CombatState, Unit};
use crate::Uid;

/// How each attacker picks its target for the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleTargeting {
    /// Everyone hits the first living enemy in policy order that it can hurt.
    #[default]
    Focus,
    /// Every attacker splits its damage evenly over all living enemies it can hurt.
    Spread,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub max_frames: u64,
    #[serde(default)]
    pub targeting: OracleTargeting,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_frames: 100_000, targeting: OracleTargeting::Focus }
    }
}

/// One attacker hitting one target during one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleHit {
    pub frame: u64,
    pub attacker: Uid,
    pub target: Uid,
    pub damage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRun {
    pub outcome: CombatOutcome,
    /// `(frame, uid)` in death order; the frame is the end of the tick that killed it.
    pub kills: Vec<(u64, Uid)>,
    /// Damage that went past zero health on killed units.
    pub overkill: f64,
}

/// A unit is dead once its health drops to this fraction of its starting health.
const DEATH_FRACTION: f64 = 1e-9;

struct Side {
    units: Vec<Unit>,
    initial: Vec<f64>,
    alive: Vec<bool>,
    /// Target order of this side's units, as indices into `units`.
    order: Vec<usize>,
    pending: Vec<f64>,
}

impl Side {
    fn new(army: &[Unit], order: Vec<usize>) -> Self {
        Side {
            units: army.to_vec(),
            initial: army.iter().map(Unit::health).collect(),
            alive: vec![true; army.len()],
            order,
            pending: vec![0.0; army.len()],
        }
    }

    fn living(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    fn survivors(&self) -> Vec<Unit> {
        self.units.iter().zip(&self.alive).filter(|(_, &a)| a).map(|(u, _)| u.clone()).collect()
    }
}

/// Queues this frame's damage from `attackers` onto `defenders.pending`.
fn queue_damage<R: DamageRates>(
    attackers: &Side,
    defenders: &mut Side,
    rates: &R,
    targeting: OracleTargeting,
    frame: u64,
    observer: &mut impl FnMut(&OracleHit),
) -> bool {
    let mut any = false;
    // Targets per attacker type, rebuilt every frame.
    let mut cache: Vec<(usize, Vec<usize>)> = Vec::new();
    for (ai, attacker) in attackers.units.iter().enumerate() {
        if !attackers.alive[ai] {
            continue;
        }
        let t = attacker.type_id;
        let slot = match cache.iter().position(|(ty, _)| *ty == t) {
            Some(s) => s,
            None => {
                let hittable = defenders.order.iter().copied().filter(|&d| defenders.alive[d] && rates.rate(t, defenders.units[d].type_id) > 0.0);
                let list = match targeting {
                    OracleTargeting::Focus => hittable.take(1).collect(),
                    OracleTargeting::Spread => hittable.collect(),
                };
                cache.push((t, list));
                cache.len() - 1
            }
        };
        let list = &cache[slot].1;
        if list.is_empty() {
            continue;
        }
        let share = 1.0 / list.len() as f64;
        for &d in list {
            let damage = rates.rate(t, defenders.units[d].type_id) * share;
            defenders.pending[d] += damage;
            observer(&OracleHit { frame, attacker: attacker.uid, target: defenders.units[d].uid, damage });
        }
        any = true;
    }
    any
}

/// Lands queued damage and records deaths.
fn resolve(side: &mut Side, kills: &mut Vec<(u64, Uid)>, overkill: &mut f64, frame_end: u64) {
    for i in 0..side.units.len() {
        let dmg = std::mem::take(&mut side.pending[i]);
        if dmg == 0.0 || !side.alive[i] {
            continue;
        }
        side.units[i].apply_damage(dmg);
        let h = side.units[i].health();
        if h <= DEATH_FRACTION * side.initial[i] {
            side.alive[i] = false;
            *overkill += (-h).max(0.0);
            kills.push((frame_end, side.units[i].uid));
        }
    }
}

/// Runs the tick simulation, reporting every hit to `observer`.
pub fn tick_oracle_run<R: DamageRates>(
    state: &CombatState,
    rates: &R,
    policy: &TargetSelectionPolicy,
    catalog: &UnitCatalog,
    cfg: &OracleConfig,
    mut observer: impl FnMut(&OracleHit),
) -> OracleRun {
    let mut a = Side::new(&state.army_a, policy.order(&state.army_a, &state.army_b, catalog));
    let mut b = Side::new(&state.army_b, policy.order(&state.army_b, &state.army_a, catalog));
    let mut kills = Vec::new();
    let mut overkill = 0.0;
    let mut frame = 0u64;
    let (mut living_a, mut living_b) = (a.living(), b.living());

    while living_a > 0 && living_b > 0 && frame < cfg.max_frames {
        let hit_b = queue_damage(&a, &mut b, rates, cfg.targeting, frame, &mut observer);
        let hit_a = queue_damage(&b, &mut a, rates, cfg.targeting, frame, &mut observer);
        if !hit_a && !hit_b {
            break;
        }
        frame += 1;
        // Deaths within a frame are listed A first, then B, each in army order.
        resolve(&mut a, &mut kills, &mut overkill, frame);
        resolve(&mut b, &mut kills, &mut overkill, frame);
        living_a = a.living();
        living_b = b.living();
    }

    let winner = match (living_a == 0, living_b == 0) {
        (true, true) => Winner::Draw,
        (true, false) => Winner::B,
        (false, true) => Winner::A,
        (false, false) => Winner::Stalemate,
    };
    OracleRun {
        outcome: CombatOutcome {
            survivors_a: a.survivors(),
            survivors_b: b.survivors(),
            duration_frames: frame as f64,
            winner,
            model: ModelKind::TickOracle,
            radicand_clamped: false,
        },
        kills,
        overkill,
    }
}

pub fn tick_oracle_simulate<R: DamageRates>(
    state: &CombatState,
    rates: &R,
    policy: &TargetSelectionPolicy,
    catalog: &UnitCatalog,
    max_frames: u64,
) -> CombatOutcome {
    let cfg = OracleConfig { max_frames, ..OracleConfig::default() };
    tick_oracle_run(state, rates, policy, catalog, &cfg, |_| {}).outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpf::{static_dpf, DpfTable, Provenance};
    use crate::models::fixtures;

    #[test]
    fn ten_dpf_kills_hundred_hp_at_frame_ten() {
        let c = fixtures::catalog();
        let table = static_dpf(&c);
        // melee deals 10/frame; the depot has 500 hp, so use a 100 hp one.
        let s = CombatState::new(vec![Unit::full(1, 0, &c)], vec![Unit::new(2, 4, 100.0)]).unwrap();
        let run = tick_oracle_run(&s, &table, &TargetSelectionPolicy::DestroyScore, &c, &OracleConfig::default(), |_| {});
        assert_eq!(run.outcome.winner, Winner::A);
        assert_eq!(run.outcome.duration_frames, 10.0);
        assert_eq!(run.kills, vec![(10, 2)]);
        assert_eq!(run.overkill, 0.0);
    }

    #[test]
    fn mutual_one_shot_is_draw() {
        let c = fixtures::catalog();
        let table = static_dpf(&c);
        let s = CombatState::new(vec![Unit::new(1, 0, 5.0)], vec![Unit::new(2, 0, 10.0)]).unwrap();
        let out = tick_oracle_simulate(&s, &table, &TargetSelectionPolicy::DestroyScore, &c, 100);
        assert_eq!(out.winner, Winner::Draw);
        assert_eq!(out.duration_frames, 1.0);
    }

    #[test]
    fn frame_limit_gives_partial_stalemate() {
        let c = fixtures::catalog();
        let table = static_dpf(&c);
        let s = CombatState::new(vec![Unit::full(1, 0, &c)], vec![Unit::full(2, 4, &c)]).unwrap();
        let out = tick_oracle_simulate(&s, &table, &TargetSelectionPolicy::DestroyScore, &c, 7);
        assert_eq!(out.winner, Winner::Stalemate);
        assert_eq!(out.duration_frames, 7.0);
        assert_eq!(out.survivors_b[0].hp, 430.0);
    }

    #[test]
    fn nobody_can_hit_is_immediate_stalemate() {
        let c = fixtures::catalog();
        let table = static_dpf(&c);
        let s = CombatState::new(vec![Unit::full(1, 3, &c)], vec![Unit::full(2, 0, &c)]).unwrap();
        let out = tick_oracle_simulate(&s, &table, &TargetSelectionPolicy::DestroyScore, &c, 100);
        assert_eq!(out.winner, Winner::Stalemate);
        assert_eq!(out.duration_frames, 0.0);
    }

    #[test]
    fn overkill_is_wasted() {
        // Two attackers at 10/frame on a 15 hp target and a 100 hp one: focus fire
        // kills the first in one frame with 5 wasted.
        let c = fixtures::catalog();
        let table = static_dpf(&c);
        let a = vec![Unit::full(1, 0, &c), Unit::full(2, 0, &c)];
        let b = vec![Unit::new(3, 4, 15.0), Unit::new(4, 4, 100.0)];
        let run = tick_oracle_run(&CombatState::new(a, b).unwrap(), &table, &TargetSelectionPolicy::DestroyScore, &c, &OracleConfig::default(), |_| {});
        assert_eq!(run.kills, vec![(1, 3), (6, 4)]);
        assert_eq!(run.overkill, 5.0);
    }

    #[test]
    fn spread_splits_damage_evenly() {
        let c = fixtures::catalog();
        let table = DpfTable::from_vector(&c, &[1.0, 1.0, 1.0, 1.0, 0.0], Provenance::Static).unwrap();
        let a = vec![Unit::full(1, 0, &c)];
        let b = vec![Unit::new(2, 4, 10.0), Unit::new(3, 4, 10.0)];
        let cfg = OracleConfig { max_frames: 4, targeting: OracleTargeting::Spread };
        let mut hits = Vec::new();
        let run = tick_oracle_run(&CombatState::new(a, b).unwrap(), &table, &TargetSelectionPolicy::DestroyScore, &c, &cfg, |h| hits.push((h.target, h.damage)));
        assert_eq!(&hits[..2], &[(2, 0.5), (3, 0.5)]);
        assert_eq!(hits.len(), 8);
        assert_eq!(run.outcome.survivors_b.iter().map(|u| u.hp).collect::<Vec<_>>(), vec![8.0, 8.0]);
    }
}
