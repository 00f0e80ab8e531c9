//! Square-law model with target selection (TS-Lanchester²).
//!
//! Army sizes follow `d|A|/dt = -α|B|`, `d|B|/dt = -β|A|`. The winner is
//! decided by comparing `|A0|/|B0|` with the relative effectiveness
//! `R_α = sqrt(α/β)`, the duration and surviving count come from the closed
//! form solution, and a target selection policy decides which concrete units
//! make up the surviving count.

use serde::{Deserialize, Serialize};

use crate::catalog::UnitCatalog;
use crate::models::sustained::sustained_simulate;
use crate::models::{ArmyAggregates, CombatOutcome, ModelKind, Winner};
use crate::policy::TargetSelectionPolicy;
use crate::unit::{CombatState, Unit};
use crate::{nearly_equal, TIE_TOLERANCE};

/// Attrition rates: `alpha` is A's units lost per frame per B unit, `beta` the converse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanchesterParams {
    pub alpha: f64,
    pub beta: f64,
    /// `sqrt(alpha * beta)`.
    pub intensity: f64,
    /// `sqrt(alpha / beta)`; infinite when `beta == 0`.
    pub r_alpha: f64,
    /// `sqrt(beta / alpha)`; infinite when `alpha == 0`.
    pub r_beta: f64,
}

impl LanchesterParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        LanchesterParams {
            alpha,
            beta,
            intensity: (alpha * beta).sqrt(),
            r_alpha: (alpha / beta).sqrt(),
            r_beta: (beta / alpha).sqrt(),
        }
    }

    /// `alpha = avgDPF(B, A) / mean_hp(A)` and `beta = avgDPF(A, B) / mean_hp(B)`.
    pub fn from_state(state: &CombatState, dpf: &[f64], catalog: &UnitCatalog) -> Self {
        let a = ArmyAggregates::of(&state.army_a, dpf, catalog);
        let b = ArmyAggregates::of(&state.army_b, dpf, catalog);
        LanchesterParams::new(attrition_rate(&a, &b), attrition_rate(&b, &a))
    }
}

/// Average DPF that `attacker` deals to `defender`, blending the per-domain
/// means by the defender's air/ground health split.
pub fn avg_dpf(attacker: &ArmyAggregates, defender: &ArmyAggregates) -> f64 {
    let total = defender.hp_air + defender.hp_ground;
    if total <= 0.0 {
        return 0.0;
    }
    attacker.mean_dpf_air * (defender.hp_air / total) + attacker.mean_dpf_ground * (defender.hp_ground / total)
}

fn attrition_rate(defender: &ArmyAggregates, attacker: &ArmyAggregates) -> f64 {
    if defender.avg_hp <= 0.0 {
        return 0.0;
    }
    avg_dpf(attacker, defender) / defender.avg_hp
}

/// Closed-form end of a square-law fight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareLawEnd {
    pub winner: Winner,
    /// Infinite for a draw or when neither side takes losses.
    pub duration: f64,
    /// Continuous count of the winner's surviving units.
    pub survivors: f64,
    pub radicand_clamped: bool,
}

/// Predicts winner, duration and surviving count from initial counts and rates.
pub fn square_law_end(count_a: f64, count_b: f64, p: &LanchesterParams) -> SquareLawEnd {
    let (alpha, beta) = (p.alpha, p.beta);
    if alpha == 0.0 && beta == 0.0 {
        return SquareLawEnd { winner: Winner::Stalemate, duration: f64::INFINITY, survivors: 0.0, radicand_clamped: false };
    }
    // |A0|/|B0| against R_α, compared as β|A0|² against α|B0|² so the test is
    // exactly mirrored when the armies are swapped.
    let strength_a = beta * count_a * count_a;
    let strength_b = alpha * count_b * count_b;
    if nearly_equal(strength_a, strength_b) {
        return SquareLawEnd { winner: Winner::Draw, duration: f64::INFINITY, survivors: 0.0, radicand_clamped: false };
    }
    if strength_a > strength_b {
        winner_side(Winner::A, count_a, count_b, alpha, beta)
    } else {
        winner_side(Winner::B, count_b, count_a, beta, alpha)
    }
}

// Everything from the winner's point of view: `w` winner units, `l` loser
// units, `k_w` the rate at which the winner loses units, `k_l` the loser's.
fn winner_side(winner: Winner, w: f64, l: f64, k_w: f64, k_l: f64) -> SquareLawEnd {
    let intensity = (k_w * k_l).sqrt();
    let duration = if k_w == 0.0 {
        l / (k_l * w)
    } else {
        let x = (l / w) * (k_w / k_l).sqrt();
        // (1 / 2I) ln((1 + x) / (1 - x))
        x.atanh() / intensity
    };
    let radicand = w * w - (k_w / k_l) * l * l;
    let mut survivors = radicand.max(0.0).sqrt();
    let nearest = survivors.round();
    if (survivors - nearest).abs() <= 1e-9 * w.max(1.0) {
        survivors = nearest;
    }
    SquareLawEnd { winner, duration, survivors, radicand_clamped: radicand < 0.0 }
}

/// Continuous army sizes `(|A_t|, |B_t|)` after `t` frames.
///
/// Past the end of the fight the loser stays at zero and the winner at its
/// surviving count.
pub fn lanchester_state_at(state: &CombatState, params: &LanchesterParams, t: f64) -> (f64, f64) {
    state_at_counts(state.army_a.len() as f64, state.army_b.len() as f64, params, t)
}

pub fn state_at_counts(count_a: f64, count_b: f64, p: &LanchesterParams, t: f64) -> (f64, f64) {
    let end = square_law_end(count_a, count_b, p);
    let t = t.max(0.0);
    if end.duration.is_finite() && t >= end.duration {
        return match end.winner {
            Winner::A => (end.survivors, 0.0),
            Winner::B => (0.0, end.survivors),
            _ => (0.0, 0.0),
        };
    }
    let (a, b) = closed_form_counts(count_a, count_b, p, t);
    (a.max(0.0), b.max(0.0))
}

/// The raw solution of the square-law equations at time `t`, with no clamping
/// at the end of the fight (counts go negative past it).
pub fn closed_form_counts(count_a: f64, count_b: f64, p: &LanchesterParams, t: f64) -> (f64, f64) {
    if p.alpha == 0.0 || p.beta == 0.0 {
        // One side takes no losses: linear decline of the other.
        return (count_a - p.alpha * count_b * t, count_b - p.beta * count_a * t);
    }
    let grow = (p.intensity * t).exp();
    let decay = (-p.intensity * t).exp();
    (
        0.5 * ((count_a - p.r_alpha * count_b) * grow + (count_a + p.r_alpha * count_b) * decay),
        0.5 * ((count_b - p.r_beta * count_a) * grow + (count_b + p.r_beta * count_a) * decay),
    )
}

pub fn lanchester_simulate(state: &CombatState, dpf: &[f64], policy: &TargetSelectionPolicy, catalog: &UnitCatalog) -> CombatOutcome {
    let params = LanchesterParams::from_state(state, dpf, catalog);
    let end = square_law_end(state.army_a.len() as f64, state.army_b.len() as f64, &params);
    let model = ModelKind::TsLanchester;
    match end.winner {
        Winner::Stalemate => CombatOutcome::stalemate(state, model, 0.0),
        Winner::Draw => {
            // The continuous tie never ends; take the duration from Sustained.
            let fallback = sustained_simulate(state, dpf, policy, catalog);
            if fallback.winner == Winner::Stalemate {
                CombatOutcome::stalemate(state, model, 0.0)
            } else {
                CombatOutcome::draw(model, fallback.duration_frames)
            }
        }
        Winner::A => CombatOutcome {
            survivors_a: realize_survivors(&state.army_a, &state.army_b, end.survivors, policy, catalog),
            survivors_b: Vec::new(),
            duration_frames: end.duration,
            winner: Winner::A,
            model,
            radicand_clamped: end.radicand_clamped,
        },
        Winner::B => CombatOutcome {
            survivors_a: Vec::new(),
            survivors_b: realize_survivors(&state.army_b, &state.army_a, end.survivors, policy, catalog),
            duration_frames: end.duration,
            winner: Winner::B,
            model,
            radicand_clamped: end.radicand_clamped,
        },
    }
}

/// Keeps the last `ceil(s)` winner units in destruction order; the first kept
/// unit is left with `frac(s)` of its health.
fn realize_survivors(winner: &[Unit], loser: &[Unit], s: f64, policy: &TargetSelectionPolicy, catalog: &UnitCatalog) -> Vec<Unit> {
    let order = policy.order(winner, loser, catalog);
    let keep = (s.ceil() as usize).min(winner.len());
    let killed = winner.len() - keep;
    let frac = s - s.floor();
    let mut kept = vec![false; winner.len()];
    for &i in &order[killed..] {
        kept[i] = true;
    }
    let partial = (frac > TIE_TOLERANCE && keep > 0).then(|| order[killed]);
    winner
        .iter()
        .enumerate()
        .filter(|(i, _)| kept[*i])
        .map(|(i, u)| {
            let mut u = u.clone();
            if partial == Some(i) {
                u.scale_health(frac);
            }
            u
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::fixtures;

    #[test]
    fn hand_evaluated_three_vs_two() {
        let p = LanchesterParams::new(0.1, 0.1);
        let end = square_law_end(3.0, 2.0, &p);
        assert_eq!(end.winner, Winner::A);
        assert!((end.survivors - 5f64.sqrt()).abs() < 1e-12);
        // (1/0.2) ln((1 + 2/3) / (1 - 2/3)) = 5 ln 5
        assert!((end.duration - 5.0 * 5f64.ln()).abs() < 1e-9);
        assert!((end.duration - 8.047).abs() < 1e-3);
    }

    #[test]
    fn mirror_is_draw() {
        let end = square_law_end(4.0, 4.0, &LanchesterParams::new(0.05, 0.05));
        assert_eq!(end.winner, Winner::Draw);
    }

    #[test]
    fn state_at_end_matches_survivor_formula() {
        let p = LanchesterParams::new(0.1, 0.1);
        let end = square_law_end(3.0, 2.0, &p);
        let (a, b) = state_at_counts(3.0, 2.0, &p, end.duration * (1.0 - 1e-12));
        assert!((a - 5f64.sqrt()).abs() < 1e-6);
        assert!(b.abs() < 1e-6);
    }

    #[test]
    fn state_at_zero_is_initial() {
        let p = LanchesterParams::new(0.03, 0.07);
        assert_eq!(state_at_counts(7.0, 5.0, &p, 0.0), (7.0, 5.0));
    }

    #[test]
    fn symmetric_armies_stay_equal() {
        let p = LanchesterParams::new(0.02, 0.02);
        for t in [0.0, 1.0, 10.0, 100.0] {
            let (a, b) = state_at_counts(6.0, 6.0, &p, t);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn one_sided_rates() {
        let p = LanchesterParams::new(0.0, 0.1);
        let end = square_law_end(2.0, 4.0, &p);
        assert_eq!(end.winner, Winner::A);
        assert_eq!(end.survivors, 2.0);
        assert!((end.duration - 4.0 / (0.1 * 2.0)).abs() < 1e-12);
    }

    #[test]
    fn survivors_realized_by_policy() {
        let c = fixtures::catalog();
        // 3 melee vs 2 melee, identical units: alpha = beta, A wins with sqrt(5) left.
        let a: Vec<Unit> = (1..=3).map(|u| Unit::full(u, 0, &c)).collect();
        let b: Vec<Unit> = (10..=11).map(|u| Unit::full(u, 0, &c)).collect();
        let s = CombatState::new(a, b).unwrap();
        let out = lanchester_simulate(&s, &[10.0, 0.4, 0.3, 0.9, 0.0], &TargetSelectionPolicy::DestroyScore, &c);
        assert_eq!(out.winner, Winner::A);
        assert!(out.survivors_b.is_empty());
        assert_eq!(out.survivors_a.len(), 3);
        // uid 1 would die next: it carries the fractional remainder.
        let partial = out.survivors_a.iter().find(|u| u.uid == 1).unwrap();
        assert!((partial.hp - 100.0 * (5f64.sqrt() - 2.0)).abs() < 1e-9);
    }

    #[test]
    fn draw_takes_sustained_duration() {
        let c = fixtures::catalog();
        let s = CombatState::new(vec![Unit::full(1, 0, &c)], vec![Unit::full(2, 0, &c)]).unwrap();
        let out = lanchester_simulate(&s, &[10.0, 0.0, 0.0, 0.0, 0.0], &TargetSelectionPolicy::DestroyScore, &c);
        assert_eq!(out.winner, Winner::Draw);
        assert_eq!(out.duration_frames, 10.0);
        assert!(out.survivors_a.is_empty() && out.survivors_b.is_empty());
    }

    #[test]
    fn no_effective_damage_is_stalemate() {
        let c = fixtures::catalog();
        let s = CombatState::new(vec![Unit::full(1, 0, &c)], vec![Unit::full(2, 3, &c)]).unwrap();
        let out = lanchester_simulate(&s, &[1.0, 1.0, 1.0, 1.0, 0.0], &TargetSelectionPolicy::DestroyScore, &c);
        assert_eq!(out.winner, Winner::Stalemate);
        assert_eq!(out.survivors_a.len(), 1);
        assert_eq!(out.survivors_b.len(), 1);
    }

    #[test]
    fn avg_dpf_blend_by_health_split() {
        let c = fixtures::catalog();
        let dpf = [1.0, 0.5, 0.3, 0.9, 0.0];
        // attacker: one melee (ground only, 1.0) and one interceptor (air only, 0.9)
        let att = ArmyAggregates::of(&[Unit::full(1, 0, &c), Unit::full(2, 3, &c)], &dpf, &c);
        // defender: one flyer (120) and one ranged ground unit (40)
        let def = ArmyAggregates::of(&[Unit::full(3, 2, &c), Unit::full(4, 1, &c)], &dpf, &c);
        let expected = (0.9 / 2.0) * (120.0 / 160.0) + (1.0 / 2.0) * (40.0 / 160.0);
        assert!((avg_dpf(&att, &def) - expected).abs() < 1e-15);
        // all-ground defender degenerates to the ground mean
        let ground = ArmyAggregates::of(&[Unit::full(4, 1, &c)], &dpf, &c);
        assert_eq!(avg_dpf(&att, &ground), 0.5);
    }
}
