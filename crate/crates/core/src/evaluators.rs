//! Static evaluators that need no simulation.

use crate::catalog::UnitTypeStats;
use crate::unit::{CombatState, Unit};

/// `2 * minerals + 4 * gas`, unless the type overrides it.
pub fn destroy_score(t: &UnitTypeStats) -> f64 {
    t.destroy_score_override.unwrap_or(2.0 * t.mineral_cost + 4.0 * t.gas_cost)
}

/// Life Time Damage: `sum_A hp*dpf - sum_B hp*dpf`. Positive favors A.
pub fn ltd(state: &CombatState, dpf: &[f64]) -> f64 {
    side_sum(&state.army_a, dpf, |h| h) - side_sum(&state.army_b, dpf, |h| h)
}

/// Life Time Damage 2: `sum_A sqrt(hp)*dpf - sum_B sqrt(hp)*dpf`. Positive favors A.
pub fn ltd2(state: &CombatState, dpf: &[f64]) -> f64 {
    side_sum(&state.army_a, dpf, f64::sqrt) - side_sum(&state.army_b, dpf, f64::sqrt)
}

fn side_sum(army: &[Unit], dpf: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    army.iter().map(|u| f(u.health()) * dpf[u.type_id]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn destroy_score_formula() {
        let t = UnitTypeStats { mineral_cost: 50.0, ..UnitTypeStats::new(0, "m", 40.0) };
        assert_eq!(destroy_score(&t), 100.0);
        assert_eq!(destroy_score(&UnitTypeStats::new(0, "free", 1.0)), 0.0);
        let o = UnitTypeStats { mineral_cost: 50.0, destroy_score_override: Some(700.0), ..UnitTypeStats::new(0, "o", 1.0) };
        assert_eq!(destroy_score(&o), 700.0);
    }

    #[test]
    fn ltd2_hand_value() {
        let s = CombatState::new(vec![Unit::new(1, 0, 100.0)], vec![Unit::new(2, 0, 25.0)]).unwrap();
        assert_eq!(ltd2(&s, &[1.0]), 5.0);
        assert_eq!(ltd(&s, &[1.0]), 75.0);
    }

    #[test]
    fn ltd2_mirror_is_zero() {
        let a = vec![Unit::new(1, 0, 40.0), Unit::new(2, 1, 90.0)];
        let b = vec![Unit::new(3, 0, 40.0), Unit::new(4, 1, 90.0)];
        assert_eq!(ltd2(&CombatState { army_a: a, army_b: b }, &[0.4, 0.7]), 0.0);
    }

    #[test]
    fn ltd2_empty_opponent_positive() {
        let s = CombatState { army_a: vec![Unit::new(1, 0, 4.0)], army_b: vec![] };
        assert_eq!(ltd2(&s, &[0.5]), 1.0);
    }

    fn arb_army(uid0: u32) -> impl Strategy<Value = Vec<Unit>> {
        prop::collection::vec((0usize..3, 1u32..200), 1..8).prop_map(move |v| {
            v.into_iter().enumerate().map(|(i, (t, hp))| Unit::new(uid0 + i as u32, t, f64::from(hp))).collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn ltd2_antisymmetric(a in arb_army(0), b in arb_army(100)) {
            let dpf = [0.4, 0.25, 0.9];
            let s = CombatState { army_a: a, army_b: b };
            prop_assert_eq!(ltd2(&s, &dpf), -ltd2(&s.swapped(), &dpf));
            prop_assert_eq!(ltd(&s, &dpf), -ltd(&s.swapped(), &dpf));
        }

        // Perfect-square health and power-of-two DPF keep every step exact.
        #[test]
        fn ltd2_scales_with_sqrt_of_health_scale(roots_a in prop::collection::vec((0usize..3, 1u32..40), 1..8),
                                                 roots_b in prop::collection::vec((0usize..3, 1u32..40), 1..8),
                                                 c in 1u32..8) {
            let dpf = [0.5, 0.25, 2.0];
            let build = |v: &[(usize, u32)], uid0: u32, scale: f64| -> Vec<Unit> {
                v.iter().enumerate().map(|(i, &(t, r))| Unit::new(uid0 + i as u32, t, scale * f64::from(r * r))).collect()
            };
            let c = f64::from(c);
            let s = CombatState { army_a: build(&roots_a, 0, 1.0), army_b: build(&roots_b, 100, 1.0) };
            let scaled = CombatState { army_a: build(&roots_a, 0, c * c), army_b: build(&roots_b, 100, c * c) };
            prop_assert_eq!(ltd2(&scaled, &dpf), c * ltd2(&s, &dpf));
        }

        #[test]
        fn destroy_score_monotone(m in 0.0f64..1000.0, g in 0.0f64..1000.0, dm in 0.0f64..100.0, dg in 0.0f64..100.0) {
            let t = |m, g| UnitTypeStats { mineral_cost: m, gas_cost: g, ..UnitTypeStats::new(0, "x", 1.0) };
            prop_assert!(destroy_score(&t(m + dm, g)) >= destroy_score(&t(m, g)));
            prop_assert!(destroy_score(&t(m, g + dg)) >= destroy_score(&t(m, g)));
        }
    }
}
