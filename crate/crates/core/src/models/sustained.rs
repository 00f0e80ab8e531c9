//! Sustained DPF model: each army keeps dealing its initial DPF for the whole
//! fight, split by what its weapons can reach.

use crate::catalog::UnitCatalog;
use crate::models::{spend_budget, spend_on, ArmyAggregates, CombatOutcome, ModelKind, Winner};
use crate::nearly_equal;
use crate::policy::TargetSelectionPolicy;
use crate::unit::{CombatState, Unit};

/// How an attacker's DPF is split between the defender's two domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSplit {
    pub vs_air: f64,
    pub vs_ground: f64,
    /// DPF that can go to either domain; non-zero only when neither domain is
    /// reachable by single-domain weapons.
    pub shared: f64,
}

/// Air and ground are killed in parallel by the air-only and ground-only
/// weapons; the DPF of units with both weapons goes to whichever domain would
/// otherwise take longer.
pub fn split_dpf(defender: &ArmyAggregates, attacker: &ArmyAggregates) -> DomainSplit {
    let t_air = domain_time(defender.hp_air, attacker.dpf_air);
    let t_ground = domain_time(defender.hp_ground, attacker.dpf_ground);
    if t_air.is_infinite() && t_ground.is_infinite() {
        return DomainSplit { vs_air: 0.0, vs_ground: 0.0, shared: attacker.dpf_both };
    }
    if t_air > t_ground {
        DomainSplit { vs_air: attacker.dpf_air + attacker.dpf_both, vs_ground: attacker.dpf_ground, shared: 0.0 }
    } else {
        DomainSplit { vs_air: attacker.dpf_air, vs_ground: attacker.dpf_ground + attacker.dpf_both, shared: 0.0 }
    }
}

fn domain_time(hp: f64, dpf: f64) -> f64 {
    if hp <= 0.0 {
        0.0
    } else if dpf <= 0.0 {
        f64::INFINITY
    } else {
        hp / dpf
    }
}

/// Frames `attacker` needs to destroy every unit of `defender`.
pub fn time_to_destroy(defender: &ArmyAggregates, attacker: &ArmyAggregates) -> f64 {
    let split = split_dpf(defender, attacker);
    if split.shared > 0.0 || (split.vs_air == 0.0 && split.vs_ground == 0.0) {
        // Only dual-weapon units can contribute to either domain.
        return domain_time(defender.hp_air + defender.hp_ground, split.shared);
    }
    domain_time(defender.hp_air, split.vs_air).max(domain_time(defender.hp_ground, split.vs_ground))
}

pub fn sustained_simulate(state: &CombatState, dpf: &[f64], policy: &TargetSelectionPolicy, catalog: &UnitCatalog) -> CombatOutcome {
    let model = ModelKind::Sustained;
    let agg_a = ArmyAggregates::of(&state.army_a, dpf, catalog);
    let agg_b = ArmyAggregates::of(&state.army_b, dpf, catalog);
    let t_kill_a = time_to_destroy(&agg_a, &agg_b);
    let t_kill_b = time_to_destroy(&agg_b, &agg_a);
    if t_kill_a.is_infinite() && t_kill_b.is_infinite() {
        return CombatOutcome::stalemate(state, model, 0.0);
    }
    if nearly_equal(t_kill_a, t_kill_b) {
        return CombatOutcome::draw(model, t_kill_a.min(t_kill_b));
    }
    if t_kill_b < t_kill_a {
        CombatOutcome {
            survivors_a: winner_losses(&state.army_a, &state.army_b, &agg_a, &agg_b, t_kill_b, policy, catalog),
            survivors_b: Vec::new(),
            duration_frames: t_kill_b,
            winner: Winner::A,
            model,
            radicand_clamped: false,
        }
    } else {
        CombatOutcome {
            survivors_a: Vec::new(),
            survivors_b: winner_losses(&state.army_b, &state.army_a, &agg_b, &agg_a, t_kill_a, policy, catalog),
            duration_frames: t_kill_a,
            winner: Winner::B,
            model,
            radicand_clamped: false,
        }
    }
}

/// The damage the loser deals over the fight, spent on the winner's units in
/// the loser's target order. Each domain gets only the DPF assigned to it.
fn winner_losses(
    winner: &[Unit],
    loser: &[Unit],
    winner_agg: &ArmyAggregates,
    loser_agg: &ArmyAggregates,
    t: f64,
    policy: &TargetSelectionPolicy,
    catalog: &UnitCatalog,
) -> Vec<Unit> {
    let order = policy.order(winner, loser, catalog);
    let split = split_dpf(winner_agg, loser_agg);
    if split.shared > 0.0 {
        return spend_budget(winner, &order, split.shared * t, |_| true);
    }
    let flyer = |u: &Unit| catalog.stats(u.type_id).is_flyer;
    let mut alive: Vec<Option<Unit>> = winner.iter().cloned().map(Some).collect();
    spend_on(&mut alive, &order, split.vs_air * t, |u| flyer(u));
    spend_on(&mut alive, &order, split.vs_ground * t, |u| !flyer(u));
    alive.into_iter().flatten().collect()
}
