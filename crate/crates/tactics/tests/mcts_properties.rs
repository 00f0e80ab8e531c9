use attrition_core::{static_dpf, CombatModel, ModelKind, TargetSelectionPolicy, UnitCatalog};
use attrition_tactics::*;
use proptest::prelude::*;

const MARINE: usize = 0;
const TANK: usize = 3;
const WRAITH: usize = 5;
const CC: usize = 7;
const BARRACKS: usize = 8;
const TURRET: usize = 9;
const ZEALOT: usize = 11;
const HYDRA: usize = 18;

fn ring_game() -> Game {
    let c = UnitCatalog::starcraft();
    let model = CombatModel::new(ModelKind::Decreasing, static_dpf(&c), TargetSelectionPolicy::DestroyScore);
    Game::new(c, RegionGraph::build(&MapFile::ring6(), false).unwrap(), model)
}

fn group(player: Player, type_id: usize, size: u32, avg_hp: f64, region: RegionId) -> Group {
    let building = UnitCatalog::starcraft().stats(type_id).is_building;
    Group {
        player,
        type_id,
        size,
        avg_hp,
        region,
        action: if building { GroupAction::NA } else { GroupAction::Idle },
        target_region: None,
        end_frame: 0,
    }
}

fn state(groups: Vec<Group>) -> HighLevelState {
    HighLevelState::new(0, Abstraction::RMa, groups)
}

fn small(budget: usize, seed: u64) -> MctsConfig {
    MctsConfig { playout_budget: budget, seed, ..MctsConfig::default() }
}

#[test]
fn evaluation_examples() {
    let c = UnitCatalog::starcraft();
    let even = state(vec![group(Player::A, MARINE, 2, 40.0, 0), group(Player::B, MARINE, 2, 40.0, 5)]);
    assert_eq!(evaluate_state(&even, &c, Player::A), 0.0);
    // Marines score 2 * 50 = 100 each: 2 * 300 / 400 - 1.
    let ahead = state(vec![group(Player::A, MARINE, 3, 40.0, 0), group(Player::B, MARINE, 1, 40.0, 5)]);
    assert!((evaluate_state(&ahead, &c, Player::A) - 0.5).abs() < 1e-12);
    assert!((evaluate_state(&ahead, &c, Player::B) + 0.5).abs() < 1e-12);
    let won = state(vec![group(Player::A, MARINE, 1, 40.0, 0)]);
    assert_eq!(evaluate_state(&won, &c, Player::A), 1.0);
    assert_eq!(evaluate_state(&state(vec![]), &c, Player::A), 0.0);
}

#[test]
fn zero_budget_is_an_error_and_terminal_root_returns_nothing() {
    let game = ring_game();
    let s = state(vec![group(Player::A, MARINE, 1, 40.0, 0), group(Player::B, CC, 1, 1500.0, 5)]);
    assert!(matches!(search(&game, &s, Player::A, &small(0, 1)), Err(Error::Config(_))));
    assert!(search(&game, &s, Player::A, &MctsConfig { epsilon: 1.5, ..small(5, 1) }).is_err());
    let over = state(vec![group(Player::A, MARINE, 1, 40.0, 0)]);
    assert!(search(&game, &over, Player::A, &small(10, 1)).unwrap().is_empty());
}

#[test]
fn budget_one_returns_the_single_expanded_child() {
    let game = ring_game();
    let s = Scenario::ring6_skirmish().initial_state(&game.graph, &game.catalog).unwrap().state;
    let tree = search_tree(&game, &s, Player::A, &small(1, 3)).unwrap();
    assert_eq!(tree.iterations, 1);
    assert_eq!(tree.nodes[0].children.len(), 1);
    let only = tree.nodes[tree.nodes[0].children[0]].edge.clone().unwrap();
    assert_eq!(tree.best(), only);
    assert!(game.legal_actions(&s, Player::A).contains(&only));
}

#[test]
fn finds_the_eliminating_attack() {
    let game = ring_game();
    let s = state(vec![group(Player::A, HYDRA, 6, 80.0, 1), group(Player::B, CC, 1, 1500.0, 1)]);
    let chosen = search(&game, &s, Player::A, &small(300, 9)).unwrap();
    assert_eq!(chosen.choices, vec![(0, Action::Attack)]);
}

#[test]
fn greedy_search_picks_the_best_one_ply_child() {
    let game = ring_game();
    let s = state(vec![
        group(Player::A, HYDRA, 3, 80.0, 1),
        group(Player::A, MARINE, 2, 40.0, 2),
        group(Player::B, CC, 1, 1500.0, 1),
        group(Player::B, TURRET, 1, 200.0, 2),
        group(Player::B, BARRACKS, 1, 1000.0, 3),
    ]);
    let cfg = MctsConfig { epsilon: 0.0, max_tree_depth: 1, playout_length: 400, playout_budget: 64, ..MctsConfig::default() };
    let forced_b = game.legal_actions(&s, Player::B).nth(0);
    let legal = game.legal_actions(&s, Player::A);
    let value = |x: &PlayerActionSet| {
        let mut t = s.clone();
        game.play_segment(&mut t, x, &forced_b, 400).unwrap();
        game.evaluate_state(&t, Player::A)
    };
    let best_value = legal.enumerate().iter().map(value).fold(f64::NEG_INFINITY, f64::max);
    let chosen = search(&game, &s, Player::A, &cfg).unwrap();
    assert_eq!(value(&chosen), best_value);
    assert_eq!(chosen.choices, vec![(0, Action::Attack), (1, Action::Attack)]);
}

#[test]
fn search_is_deterministic_per_seed() {
    let game = ring_game();
    let s = Scenario::ring6_skirmish().initial_state(&game.graph, &game.catalog).unwrap().state;
    let a = search_tree(&game, &s, Player::B, &small(400, 21)).unwrap();
    let b = search_tree(&game, &s, Player::B, &small(400, 21)).unwrap();
    assert_eq!(a.best(), b.best());
    assert_eq!(a.root_children(), b.root_children());
}

#[test]
fn scripted_beats_a_base_with_no_army() {
    let game = ring_game();
    let s = state(vec![group(Player::A, TANK, 2, 150.0, 0), group(Player::A, MARINE, 4, 40.0, 0), group(Player::B, CC, 1, 1500.0, 5)]);
    let cfg = MatchConfig::default();
    let r = play_match(&game, &s, &Agent::Scripted, &Agent::Random, &cfg, 4).unwrap();
    assert_eq!(r.winner, Some(Player::A));
    assert!(!r.timed_out);
    assert!(r.length < cfg.max_frames);
    assert_eq!(r.final_eval, 1.0);
}

#[test]
fn matches_are_reproducible_and_logged() {
    let game = ring_game();
    let s = Scenario::ring6_skirmish().initial_state(&game.graph, &game.catalog).unwrap().state;
    let mcts = Agent::Mcts(small(100, 0));
    let cfg = MatchConfig { max_frames: 4000, plan_interval: 400 };
    let r1 = play_match(&game, &s, &mcts, &Agent::Random, &cfg, 11).unwrap();
    let r2 = play_match(&game, &s, &mcts, &Agent::Random, &cfg, 11).unwrap();
    assert_eq!(r1, r2);
    assert_eq!(r1.log, r2.log);
    assert!(r1.log.iter().all(|c| c.frame % 400 == 0));
    assert!(r1.log.iter().any(|c| c.root_visits_a.is_some()));
    let mut out = Vec::new();
    write_log(&r1.log, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), r1.log.len());
    let first: CycleLog = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first, r1.log[0]);
    let summary = summarize("mcts", "random", "decreasing", &[r1]);
    assert_eq!(summary.games, 1);
}

#[test]
fn agents_parse_by_name() {
    let m = MctsConfig::default();
    assert_eq!(Agent::parse("MCTS", &m).unwrap(), Agent::Mcts(m.clone()));
    assert_eq!(Agent::parse("random", &m).unwrap(), Agent::Random);
    assert_eq!(Agent::parse("scripted", &m).unwrap().name(), "scripted");
    assert!(Agent::parse("human", &m).is_err());
}

const POOL: [usize; 7] = [MARINE, TANK, WRAITH, ZEALOT, HYDRA, CC, TURRET];

fn arb_state() -> impl Strategy<Value = HighLevelState> {
    let arb_group = (any::<bool>(), 0..POOL.len(), 1u32..6, 0.1f64..1.0, 0..6usize).prop_map(|(a, t, size, frac, region)| {
        let type_id = POOL[t];
        let max = UnitCatalog::starcraft().stats(type_id).max_health();
        group(if a { Player::A } else { Player::B }, type_id, size, max * frac, region)
    });
    prop::collection::vec(arb_group, 2..7).prop_map(|groups| {
        let mut s = state(groups);
        s.normalize();
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn evaluation_is_antisymmetric_and_bounded(s in arb_state()) {
        let c = UnitCatalog::starcraft();
        let a = evaluate_state(&s, &c, Player::A);
        let b = evaluate_state(&s, &c, Player::B);
        prop_assert!((-1.0..=1.0).contains(&a));
        prop_assert!((a + b).abs() < 1e-12);
    }

    #[test]
    fn trees_respect_their_invariants(s in arb_state(), seed in any::<u64>(), budget in 1usize..40, depth in 1usize..6, me in any::<bool>()) {
        let game = ring_game();
        let player = if me { Player::A } else { Player::B };
        let cfg = MctsConfig { playout_budget: budget, max_tree_depth: depth, playout_length: 800, seed, ..MctsConfig::default() };
        let tree = search_tree(&game, &s, player, &cfg).unwrap();
        if game.is_terminal(&s) {
            prop_assert_eq!(tree.iterations, 0);
            return Ok(());
        }
        prop_assert_eq!(tree.nodes[0].visits, budget as u64);
        for n in &tree.nodes {
            let child_visits: u64 = n.children.iter().map(|&c| tree.nodes[c].visits).sum();
            prop_assert_eq!(n.visits, child_visits + n.leaf_visits);
            prop_assert!(n.depth <= depth);
            let expected = if n.depth % 2 == 0 { player } else { player.other() };
            prop_assert_eq!(n.mover, expected);
            if n.visits > 0 {
                prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&n.mean()));
            }
            for &c in &n.children {
                prop_assert_eq!(tree.nodes[c].depth, n.depth + 1);
                prop_assert!(game.legal_actions(&n.state, n.mover).contains(tree.nodes[c].edge.as_ref().unwrap()));
            }
        }
        prop_assert!(game.legal_actions(&s, player).contains(&tree.best()));
    }
}
