use std::collections::HashMap;

use attrition_core::models::lanchester::square_law_end;
use attrition_core::models::{
    decreasing_simulate, lanchester_simulate, sustained_simulate, tick_oracle_run, LanchesterParams, OracleConfig,
};
use attrition_core::policy::BordaScores;
use attrition_core::{
    project_min_dpf, static_dpf, CombatModel, CombatOutcome, CombatState, DpfTable, ModelKind, PerUnitDpf, Provenance,
    TargetSelectionPolicy, Unit, UnitCatalog, Winner,
};
use proptest::prelude::*;

// Armed and unarmed, ground and air, with and without shields.
const POOL: [usize; 14] = [0, 1, 2, 3, 4, 5, 7, 9, 11, 12, 16, 17, 18, 19];

fn catalog() -> UnitCatalog {
    UnitCatalog::starcraft()
}

fn arb_army(uid0: u32, max_len: usize) -> impl Strategy<Value = Vec<Unit>> {
    prop::collection::vec((prop::sample::select(POOL.to_vec()), 0.05f64..=1.0, 0.0f64..=1.0), 1..=max_len).prop_map(move |v| {
        let c = catalog();
        v.into_iter()
            .enumerate()
            .map(|(i, (t, hp_frac, sh_frac))| {
                let s = c.stats(t);
                Unit::new(uid0 + i as u32, t, (s.max_hp * hp_frac).max(1.0)).with_shield(s.max_shield * sh_frac)
            })
            .collect()
    })
}

fn arb_state() -> impl Strategy<Value = CombatState> {
    (arb_army(1, 12), arb_army(1000, 12)).prop_map(|(a, b)| CombatState::new(a, b).unwrap())
}

fn arb_policy() -> impl Strategy<Value = TargetSelectionPolicy> {
    prop_oneof![
        any::<u64>().prop_map(|seed| TargetSelectionPolicy::Random { seed }),
        Just(TargetSelectionPolicy::DestroyScore),
        prop::collection::vec(0.0f64..25.0, 26).prop_map(|v| TargetSelectionPolicy::borda(BordaScores::uniform(v)).unwrap()),
    ]
}

fn arb_kind() -> impl Strategy<Value = ModelKind> {
    prop::sample::select(ModelKind::ALL.to_vec())
}

fn model(kind: ModelKind, policy: TargetSelectionPolicy) -> CombatModel {
    CombatModel::new(kind, static_dpf(&catalog()), policy).with_oracle(OracleConfig { max_frames: 20_000, ..OracleConfig::default() })
}

fn uid_hp(army: &[Unit]) -> HashMap<u32, f64> {
    army.iter().map(|u| (u.uid, u.health())).collect()
}

fn check_subset(initial: &[Unit], survivors: &[Unit]) -> Result<(), TestCaseError> {
    let before = uid_hp(initial);
    for u in survivors {
        let h0 = before.get(&u.uid).copied();
        prop_assert!(h0.is_some(), "survivor {} not in initial army", u.uid);
        prop_assert!(u.health() <= h0.unwrap() + 1e-9);
        prop_assert!(u.health() > 0.0);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn swapping_players_mirrors_outcome(state in arb_state(), policy in arb_policy(), kind in arb_kind()) {
        let m = model(kind, policy);
        let c = catalog();
        let out = m.simulate(&c, &state);
        let mirrored = m.simulate(&c, &state.swapped());
        prop_assert_eq!(out.swapped(), mirrored);
    }

    #[test]
    fn survivors_come_from_initial_armies(state in arb_state(), policy in arb_policy(), kind in arb_kind()) {
        let out = model(kind, policy).simulate(&catalog(), &state);
        check_subset(&state.army_a, &out.survivors_a)?;
        check_subset(&state.army_b, &out.survivors_b)?;
        prop_assert!(out.duration_frames.is_finite() && out.duration_frames >= 0.0);
        if out.winner != Winner::Stalemate {
            prop_assert!(out.survivors_a.is_empty() || out.survivors_b.is_empty());
        }
        match out.winner {
            Winner::A => prop_assert!(!out.survivors_a.is_empty() && out.survivors_b.is_empty()),
            Winner::B => prop_assert!(out.survivors_a.is_empty() && !out.survivors_b.is_empty()),
            Winner::Draw => prop_assert!(out.survivors_a.is_empty() && out.survivors_b.is_empty()),
            Winner::Stalemate => {}
        }
    }

    #[test]
    fn simulation_is_deterministic(state in arb_state(), policy in arb_policy(), kind in arb_kind()) {
        let m = model(kind, policy);
        let c = catalog();
        let first = serde_json::to_string(&m.simulate(&c, &state)).unwrap();
        let second = serde_json::to_string(&m.simulate(&c, &state)).unwrap();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn constant_matrix_matches_per_unit_vector(state in arb_state(), policy in arb_policy(),
                                               values in prop::collection::vec(0.01f64..2.0, 26)) {
        let c = catalog();
        let table = DpfTable::from_vector(&c, &values, Provenance::Learned).unwrap();
        let per_unit = PerUnitDpf { values: &values, catalog: &c };
        prop_assert_eq!(decreasing_simulate(&state, &table, &policy, &c), decreasing_simulate(&state, &per_unit, &policy, &c));
    }

    // One side cannot hurt the other at all.
    #[test]
    fn one_sided_combats_agree_on_winner(attackers in arb_army(1, 8), n_def in 1usize..6, building in prop::sample::select(vec![7usize, 8, 10, 14, 21]),
                                         policy in arb_policy()) {
        let c = catalog();
        prop_assume!(attackers.iter().any(|u| c.stats(u.type_id).hits_ground()));
        let defenders: Vec<Unit> = (0..n_def).map(|i| Unit::full(500 + i as u32, building, &c)).collect();
        let state = CombatState::new(attackers, defenders).unwrap();
        let table = static_dpf(&c);
        let v = project_min_dpf(&table).values;
        let oracle = tick_oracle_run(&state, &table, &policy, &c, &OracleConfig { max_frames: 1_000_000, ..OracleConfig::default() }, |_| {}).outcome;
        prop_assert_eq!(oracle.winner, Winner::A);
        prop_assert_eq!(lanchester_simulate(&state, &v, &policy, &c).winner, Winner::A);
        prop_assert_eq!(sustained_simulate(&state, &v, &policy, &c).winner, Winner::A);
        prop_assert_eq!(decreasing_simulate(&state, &table, &policy, &c).winner, Winner::A);
    }

    #[test]
    fn square_law_winner_is_mirrored(a in 1u32..40, b in 1u32..40, alpha in 0.0f64..1.0, beta in 0.0f64..1.0) {
        let p = LanchesterParams::new(alpha, beta);
        let q = LanchesterParams::new(beta, alpha);
        let e = square_law_end(f64::from(a), f64::from(b), &p);
        let f = square_law_end(f64::from(b), f64::from(a), &q);
        prop_assert_eq!(e.winner, f.winner.swapped());
        prop_assert_eq!(e.survivors, f.survivors);
        prop_assert!(e.duration == f.duration || (e.duration.is_nan() && f.duration.is_nan()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, max_global_rejects: 200_000, ..ProptestConfig::default() })]

    // When every kill lands exactly on a frame boundary the tick simulation and
    // the continuous model take identical steps.
    #[test]
    fn oracle_matches_decreasing_at_integer_times(n_a in 1usize..8, n_b in 1usize..8, hp_a in 1u32..40, hp_b in 1u32..40,
                                                   d_a in 1u32..4, d_b in 1u32..4) {
        let c = two_type_catalog();
        let table = DpfTable::from_vector(&c, &[f64::from(d_a), f64::from(d_b)], Provenance::Static).unwrap();
        let a = (0..n_a).map(|i| Unit::new(i as u32, 0, f64::from(hp_a))).collect();
        let b = (0..n_b).map(|i| Unit::new(100 + i as u32, 1, f64::from(hp_b))).collect();
        let state = CombatState::new(a, b).unwrap();
        let policy = TargetSelectionPolicy::DestroyScore;
        let run = tick_oracle_run(&state, &table, &policy, &c, &OracleConfig::default(), |_| {});
        prop_assume!(run.overkill == 0.0);
        let dec = decreasing_simulate(&state, &table, &policy, &c);
        prop_assert_eq!(dec.winner, run.outcome.winner);
        prop_assert_eq!(dec.duration_frames, run.outcome.duration_frames);
        prop_assert_eq!(dec.survivors_a, run.outcome.survivors_a);
        prop_assert_eq!(dec.survivors_b, run.outcome.survivors_b);
    }
}

fn two_type_catalog() -> UnitCatalog {
    use attrition_core::UnitTypeStats;
    let t = |id: usize| UnitTypeStats { weapon_damage_ground: 1.0, cooldown_ground: 1.0, ..UnitTypeStats::new(id, format!("g{id}"), 40.0) };
    UnitCatalog::new("two", vec![t(0), t(1)]).unwrap()
}

#[test]
fn outcome_round_trips_through_json() {
    let c = catalog();
    let state = CombatState::new(vec![Unit::full(1, 0, &c), Unit::full(2, 12, &c)], vec![Unit::full(3, 17, &c), Unit::full(4, 19, &c)]).unwrap();
    for kind in ModelKind::ALL {
        let out = model(kind, TargetSelectionPolicy::DestroyScore).simulate(&c, &state);
        let back: CombatOutcome = serde_json::from_str(&serde_json::to_string(&out).unwrap()).unwrap();
        assert_eq!(back, out);
    }
}
