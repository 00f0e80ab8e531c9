//! Decreasing DPF model.
//!
//! Both armies are sorted by the target selection policy. Each round, every
//! living unit of an army focuses the opponent's current target; whichever
//! target dies first is removed, the other current target takes the damage
//! dealt in the meantime, and the loop repeats. Army DPF therefore drops as
//! units die.

use crate::catalog::UnitCatalog;
use crate::dpf::DamageRates;
use crate::models::{CombatOutcome, ModelKind, Winner};
use crate::nearly_equal;
use crate::policy::TargetSelectionPolicy;
use crate::unit::{CombatState, Unit};
use crate::TypeId;

/// One army in destruction order, with living-unit counts per type.
struct Side {
    units: Vec<Unit>,
    /// Index of each sorted unit in the caller's army.
    origin: Vec<usize>,
    alive: Vec<bool>,
    living: usize,
    counts: Vec<u32>,
    present: Vec<TypeId>,
}

impl Side {
    fn new(army: &[Unit], order: Vec<usize>, k: usize) -> Self {
        let mut counts = vec![0u32; k];
        let mut present = Vec::new();
        for u in army {
            if counts[u.type_id] == 0 {
                present.push(u.type_id);
            }
            counts[u.type_id] += 1;
        }
        Side {
            units: order.iter().map(|&i| army[i].clone()).collect(),
            origin: order,
            alive: vec![true; army.len()],
            living: army.len(),
            counts,
            present,
        }
    }

    /// Summed DPF of this side's living units against one target type.
    fn dpf_against<R: DamageRates>(&self, target: TypeId, rates: &R) -> f64 {
        self.present
            .iter()
            .filter(|&&t| self.counts[t] > 0)
            .map(|&t| f64::from(self.counts[t]) * rates.rate(t, target))
            .sum()
    }

    fn erase(&mut self, i: usize) {
        self.alive[i] = false;
        self.living -= 1;
        self.counts[self.units[i].type_id] -= 1;
    }

    fn survivors(&self) -> Vec<Unit> {
        let mut kept: Vec<(usize, Unit)> =
            (0..self.units.len()).filter(|&i| self.alive[i]).map(|i| (self.origin[i], self.units[i].clone())).collect();
        kept.sort_by_key(|(o, _)| *o);
        kept.into_iter().map(|(_, u)| u).collect()
    }
}

/// Time for `attackers` to kill `target`; infinite if none of them can hurt it.
fn time_to_kill_unit<R: DamageRates>(target: &Unit, attackers: &Side, rates: &R) -> f64 {
    let dpf = attackers.dpf_against(target.type_id, rates);
    if dpf > 0.0 {
        target.health() / dpf
    } else {
        f64::INFINITY
    }
}

/// Advances `idx` past dead units and units `attackers` cannot kill; returns the
/// new index and the kill time of the unit there (infinite past the end).
///
/// Attackers only ever die, so a unit skipped once can never become killable.
fn next_target<R: DamageRates>(side: &Side, mut idx: usize, attackers: &Side, rates: &R) -> (usize, f64) {
    while idx < side.units.len() {
        if side.alive[idx] {
            let t = time_to_kill_unit(&side.units[idx], attackers, rates);
            if t.is_finite() {
                return (idx, t);
            }
        }
        idx += 1;
    }
    (idx, f64::INFINITY)
}

pub fn decreasing_simulate<R: DamageRates>(state: &CombatState, rates: &R, policy: &TargetSelectionPolicy, catalog: &UnitCatalog) -> CombatOutcome {
    let k = catalog.len();
    let mut a = Side::new(&state.army_a, policy.order(&state.army_a, &state.army_b, catalog), k);
    let mut b = Side::new(&state.army_b, policy.order(&state.army_b, &state.army_a, catalog), k);
    let (mut i, mut j) = (0usize, 0usize);
    let mut elapsed = 0.0;

    while a.living > 0 && b.living > 0 {
        // t_b: time for A to kill B[j]; t_a: time for B to kill A[i].
        let (nj, t_b) = next_target(&b, j, &a, rates);
        let (ni, t_a) = next_target(&a, i, &b, rates);
        j = nj;
        i = ni;
        if t_a.is_infinite() && t_b.is_infinite() {
            break;
        }
        if nearly_equal(t_a, t_b) {
            elapsed += t_a.min(t_b);
            a.erase(i);
            b.erase(j);
        } else if t_b < t_a {
            elapsed += t_b;
            if i < a.units.len() {
                let dmg = b.dpf_against(a.units[i].type_id, rates) * t_b;
                a.units[i].apply_damage(dmg);
            }
            b.erase(j);
        } else {
            elapsed += t_a;
            if j < b.units.len() {
                let dmg = a.dpf_against(b.units[j].type_id, rates) * t_a;
                b.units[j].apply_damage(dmg);
            }
            a.erase(i);
        }
    }

    let winner = match (a.living == 0, b.living == 0) {
        (true, true) => Winner::Draw,
        (true, false) => Winner::B,
        (false, true) => Winner::A,
        (false, false) => Winner::Stalemate,
    };
    CombatOutcome {
        survivors_a: a.survivors(),
        survivors_b: b.survivors(),
        duration_frames: elapsed,
        winner,
        model: ModelKind::Decreasing,
        radicand_clamped: false,
    }
}
