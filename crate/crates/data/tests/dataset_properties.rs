use std::collections::HashSet;

use attrition_core::models::{OracleConfig, OracleTargeting};
use attrition_core::{static_dpf, CombatModel, ModelKind, TargetSelectionPolicy, Unit, UnitCatalog, Winner};
use attrition_data::synth::{combat_events, generate_dataset, generate_trace, planted_dpf, simulate_record, SynthConfig};
use attrition_data::*;
use proptest::prelude::*;

fn catalog() -> UnitCatalog {
    UnitCatalog::starcraft()
}

fn small_cfg(c: &UnitCatalog, records: usize, seed: u64) -> SynthConfig {
    SynthConfig { max_units_per_army: 5, max_types_per_army: 2, ..SynthConfig::new(c, records, seed) }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn same_units(x: &[Unit], y: &[Unit]) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(u, v)| u.uid == v.uid && u.type_id == v.type_id && close(u.health(), v.health()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn dataset_json_round_trip(seed in any::<u64>(), n in 0usize..4) {
        let c = catalog();
        let ds = generate_dataset(&c, &static_dpf(&c), &TargetSelectionPolicy::DestroyScore, &small_cfg(&c, n, seed), "prop");
        prop_assert_eq!(CombatDataset::from_json(&ds.to_json()).unwrap(), ds);
    }

    #[test]
    fn trace_round_trip_and_detection_recovers_combats(seed in any::<u64>(), n in 1usize..4) {
        let c = catalog();
        let (trace, expected) = generate_trace(&c, &static_dpf(&c), &TargetSelectionPolicy::DestroyScore, &small_cfg(&c, n, seed), 400);
        let mut buf = Vec::new();
        trace.write(&mut buf).unwrap();
        prop_assert_eq!(&Trace::read(&buf[..]).unwrap(), &trace);

        let found = detect_combats(&trace.events, &c, &DetectConfig::default()).unwrap();
        prop_assert_eq!(&found, &detect_combats(&trace.events, &c, &DetectConfig::default()).unwrap());
        // Every simulated combat that did not stall shows up with the same armies and kill log.
        let fought: Vec<_> = expected.iter().filter(|r| r.reason == EndReason::ArmyDestroyed).collect();
        for r in fought {
            let d = found.iter().find(|d| d.t0 == r.t0).expect("combat detected");
            prop_assert_eq!(d.reason, EndReason::ArmyDestroyed);
            prop_assert_eq!(d.tf, r.tf);
            prop_assert!(same_units(&d.a0, &r.a0) && same_units(&d.b0, &r.b0));
            prop_assert!(same_units(&d.af, &r.af) && same_units(&d.bf, &r.bf));
            prop_assert_eq!(&d.kills, &r.kills);
        }
    }

    #[test]
    fn concatenated_traces_give_union_of_records(seed in any::<u64>()) {
        let c = catalog();
        let t = static_dpf(&c);
        let p = TargetSelectionPolicy::DestroyScore;
        let (first, _) = generate_trace(&c, &t, &p, &small_cfg(&c, 2, seed), 400);
        let (mut second, _) = generate_trace(&c, &t, &p, &small_cfg(&c, 2, seed ^ 0x9e37), 400);
        let shift = first.events.last().unwrap().frame + 1;
        for e in &mut second.events {
            e.frame += shift;
            if e.kind != EventKind::GameEnd {
                e.uid += 100_000;
            }
            e.target_uid = e.target_uid.map(|u| u + 100_000);
        }
        let cfg = DetectConfig::default();
        let mut expected = detect_combats(&first.events, &c, &cfg).unwrap();
        let later = detect_combats(&second.events, &c, &cfg).unwrap();
        expected.extend(later);
        let mut all = first.events.clone();
        all.extend(second.events);
        prop_assert_eq!(detect_combats(&all, &c, &cfg).unwrap(), expected);
    }

    #[test]
    fn passive_units_never_ordered_an_attack(seed in any::<u64>()) {
        let c = catalog();
        let (trace, _) = generate_trace(&c, &static_dpf(&c), &TargetSelectionPolicy::Random { seed }, &small_cfg(&c, 3, seed), 400);
        for r in detect_combats(&trace.events, &c, &DetectConfig::default()).unwrap() {
            r.validate(&c).unwrap();
            let passive: HashSet<u32> = r.passive.iter().copied().collect();
            let ordered = trace.events.iter().any(|e| {
                e.kind == EventKind::OrderAttack && e.frame >= r.t0 && e.frame <= r.tf && passive.contains(&e.uid)
            });
            prop_assert!(!ordered);
        }
    }

    #[test]
    fn learning_ignores_record_order_and_duplication(seed in any::<u64>(), rot in 0usize..10) {
        let c = catalog();
        let ds = generate_dataset(&c, &planted_dpf(&c, seed, 0.6, 1.0), &TargetSelectionPolicy::DestroyScore, &small_cfg(&c, 10, seed), "p");
        let ds = filter_for_training(&ds, &FilterConfig::for_catalog(&c));
        prop_assume!(ds.records.iter().any(|r| !r.kills.is_empty()));
        let cfg = LearnConfig::default();
        let base = learn_dpf(&ds, &c, &cfg).unwrap();
        let borda = learn_borda_scores(&ds, &c).unwrap();

        let mut rotated = ds.records.clone();
        rotated.rotate_left(rot % ds.len());
        rotated.reverse();
        let mut doubled = ds.records.clone();
        doubled.extend(ds.records.iter().cloned());
        for variant in [ds.with_records(rotated), ds.with_records(doubled)] {
            let l = learn_dpf(&variant, &c, &cfg).unwrap();
            prop_assert_eq!(&l.unobserved, &base.unobserved);
            for (x, y) in l.table.per_pair.iter().zip(&base.table.per_pair) {
                prop_assert!(close(*x, *y), "{} vs {}", x, y);
            }
            let b = learn_borda_scores(&variant, &c).unwrap();
            for (u, v) in b.as_array().iter().zip(borda.as_array()) {
                for (x, y) in u.iter().zip(v) {
                    prop_assert!(close(*x, *y));
                }
            }
        }
        let k = c.len();
        for i in 0..k {
            for j in 0..k {
                let v = base.table.get(i, j);
                prop_assert!(v >= 0.0);
                if !c.can_hit(i, j) {
                    prop_assert_eq!(v, 0.0);
                }
            }
        }
        for v in borda.as_array() {
            prop_assert!(v.iter().all(|&s| (0.0..=(k - 1) as f64).contains(&s)));
        }
    }

    #[test]
    fn folds_partition_the_dataset(n in 2usize..200, folds in 2usize..12, seed in any::<u64>()) {
        prop_assume!(n >= folds);
        let s = make_folds(n, folds, seed).unwrap();
        let sizes: Vec<usize> = (0..folds).map(|f| s.fold_size(f)).collect();
        prop_assert_eq!(sizes.iter().sum::<usize>(), n);
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        prop_assert_eq!(&s, &make_folds(n, folds, seed).unwrap());
    }

    #[test]
    fn similarity_symmetric_bounded_and_relabel_invariant(
        s in prop::collection::btree_set(0u32..500, 1..40),
        pick_f in prop::collection::vec(any::<bool>(), 40),
        pick_g in prop::collection::vec(any::<bool>(), 40),
        offset in 1u32..10_000,
    ) {
        let s: Vec<u32> = s.into_iter().collect();
        let f: Vec<u32> = s.iter().zip(&pick_f).filter(|(_, &k)| k).map(|(u, _)| *u).collect();
        let g: Vec<u32> = s.iter().zip(&pick_g).filter(|(_, &k)| k).map(|(u, _)| *u).collect();
        let x = final_state_similarity(&s, &f, &g).unwrap();
        prop_assert_eq!(x, final_state_similarity(&s, &g, &f).unwrap());
        prop_assert!((0.0..=1.0).contains(&x));
        let shift = |v: &[u32]| v.iter().map(|u| u + offset).collect::<Vec<_>>();
        prop_assert_eq!(x, final_state_similarity(&shift(&s), &shift(&f), &shift(&g)).unwrap());
    }

    #[test]
    fn evaluation_is_permutation_invariant(seed in any::<u64>(), rot in 0usize..8) {
        let c = catalog();
        let ds = generate_dataset(&c, &static_dpf(&c), &TargetSelectionPolicy::DestroyScore, &small_cfg(&c, 8, seed), "p");
        let model = CombatModel::new(ModelKind::Sustained, static_dpf(&c), TargetSelectionPolicy::DestroyScore);
        let a = evaluate(&model, &ds, &c, "static").unwrap();
        let mut shuffled = ds.records.clone();
        shuffled.rotate_left(rot);
        shuffled.reverse();
        let b = evaluate(&model, &ds.with_records(shuffled), &c, "static").unwrap();
        prop_assert!(close(a.winner_accuracy, b.winner_accuracy));
        prop_assert!(close(a.mean_similarity, b.mean_similarity));
        for (bucket, mean) in a.bucket_similarity.iter().enumerate() {
            if let Some(m) = mean {
                let v: Vec<f64> = a.per_record.iter().filter(|e| e.bucket as usize == bucket).map(|e| e.similarity).collect();
                let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
                prop_assert!(*m >= lo - 1e-12 && *m <= hi + 1e-12);
            }
        }
    }
}

#[test]
fn oracle_scores_perfectly_on_its_own_data() {
    let c = catalog();
    let rates = planted_dpf(&c, 4, 0.6, 1.0);
    let policy = TargetSelectionPolicy::DestroyScore;
    let ds = generate_dataset(&c, &rates, &policy, &SynthConfig::new(&c, 200, 4), "self");
    let ds = filter_for_training(&ds, &FilterConfig::for_catalog(&c));
    let model = CombatModel::new(ModelKind::TickOracle, rates, policy);
    let r = evaluate(&model, &ds, &c, "planted").unwrap();
    assert_eq!(r.winner_accuracy, 1.0);
    assert_eq!(r.mean_similarity, 1.0);
}

#[test]
fn always_a_predictor_on_balanced_labels() {
    // Mirror every record so exactly half the labels are A.
    let c = catalog();
    let ds = generate_dataset(&c, &static_dpf(&c), &TargetSelectionPolicy::DestroyScore, &SynthConfig::new(&c, 100, 8), "b");
    let ds = filter_for_training(&ds, &FilterConfig::for_catalog(&c));
    let decided: Vec<_> = ds.records.iter().filter(|r| matches!(r.actual_winner(), Winner::A | Winner::B)).cloned().collect();
    let mirrored: Vec<_> = decided
        .iter()
        .map(|r| CombatRecord { a0: r.b0.clone(), b0: r.a0.clone(), af: r.bf.clone(), bf: r.af.clone(), ..r.clone() })
        .collect();
    let labels: Vec<Winner> = decided.iter().chain(&mirrored).map(CombatRecord::actual_winner).collect();
    let acc = labels.iter().filter(|w| attrition_data::eval::winner_correct(Winner::A, **w)).count() as f64 / labels.len() as f64;
    assert_eq!(acc, 0.5);
}

#[test]
fn fixed_priority_is_recovered_by_borda() {
    let c = catalog();
    // Goliaths (outside the pool, so their own losses score nothing) against
    // defenders holding every pool type.
    let pool = [0usize, 1, 3, 11, 12, 17, 18];
    let priority: Vec<f64> = {
        let mut v = vec![0.0; c.len()];
        for (rank, &t) in pool.iter().enumerate() {
            v[t] = (pool.len() - rank) as f64;
        }
        v
    };
    let policy = TargetSelectionPolicy::borda(attrition_core::policy::BordaScores::uniform(priority)).unwrap();
    let oracle = OracleConfig { targeting: OracleTargeting::Focus, ..OracleConfig::default() };
    let mut records = Vec::new();
    for i in 0..40u32 {
        let defenders = attrition_data::synth::army(&pool, pool.len(), 1000, 1, 0.0, &c);
        let attackers = attrition_data::synth::army(&[4], 6 + (i as usize % 10), 1, 0, 0.0, &c);
        let s = attrition_core::CombatState::new(attackers, defenders).unwrap();
        records.push(simulate_record(&s, &static_dpf(&c), &policy, &c, &oracle, 0).0);
    }
    let scores = learn_borda_scores(&CombatDataset::new("x", "", records), &c).unwrap();
    let mut learned = pool.to_vec();
    learned.sort_by(|a, b| scores.ground_only[*b].total_cmp(&scores.ground_only[*a]));
    assert_eq!(learned, pool.to_vec());
}

#[test]
fn trace_events_are_frame_ordered() {
    let c = catalog();
    let s = attrition_core::CombatState::new(
        attrition_data::synth::army(&[0], 3, 1, 0, 0.0, &c),
        attrition_data::synth::army(&[17], 4, 100, 1, 0.0, &c),
    )
    .unwrap();
    let (r, hits) = simulate_record(&s, &static_dpf(&c), &TargetSelectionPolicy::DestroyScore, &c, &OracleConfig::default(), 10);
    let ev = combat_events(&s, &r, &hits);
    assert!(ev.windows(2).all(|w| w[0].frame <= w[1].frame));
    assert_eq!(ev.iter().filter(|e| e.kind == EventKind::Death).count(), r.kills.len());
}
