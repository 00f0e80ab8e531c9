//! Baseline players.

use rand::Rng;

use crate::actions::{Action, PlayerActionSet};
use crate::game::Game;
use crate::map::RegionId;
use crate::state::{HighLevelState, Player};

/// Each group picks uniformly among its legal actions.
pub fn random_policy<R: Rng + ?Sized>(game: &Game, state: &HighLevelState, player: Player, rng: &mut R) -> PlayerActionSet {
    game.legal_actions(state, player).sample(rng)
}

/// A fixed script: attack whatever shares the region, otherwise gather at
/// the region holding most of the army, and once gathered march one hop
/// toward the nearest enemy-occupied region.
pub fn scripted_policy(game: &Game, state: &HighLevelState, player: Player) -> PlayerActionSet {
    let legal = game.legal_actions(state, player);
    let g = &game.graph;
    let rally = rally_region(game, state, player);
    let massed = state.groups_of(player).filter(|(_, grp)| is_mobile(game, grp.type_id)).all(|(_, grp)| Some(grp.region) == rally);
    let enemy_regions: Vec<RegionId> = state.groups.iter().filter(|grp| grp.player != player).map(|grp| grp.region).collect();
    let choices = legal
        .per_group
        .iter()
        .map(|(i, acts)| {
            let grp = &state.groups[*i];
            let pick = if acts.len() == 1 {
                acts[0]
            } else if acts.contains(&Action::Attack) {
                Action::Attack
            } else {
                let goal = if massed {
                    enemy_regions.iter().copied().min_by_key(|&r| (g.hops(grp.region, r), r))
                } else {
                    rally.filter(|&r| r != grp.region)
                };
                goal.and_then(|goal| step_toward(game, grp.region, goal, acts)).unwrap_or(Action::Idle)
            };
            (*i, pick)
        })
        .collect();
    PlayerActionSet { choices }
}

fn is_mobile(game: &Game, type_id: usize) -> bool {
    let t = game.catalog.stats(type_id);
    !t.is_building && t.top_speed > 0.0
}

/// Region with the largest mobile army of `player`; ties go to the lower id.
fn rally_region(game: &Game, state: &HighLevelState, player: Player) -> Option<RegionId> {
    let mut size = vec![0u32; game.graph.len()];
    for (_, grp) in state.groups_of(player) {
        if is_mobile(game, grp.type_id) {
            size[grp.region] += grp.size;
        }
    }
    let best = *size.iter().max()?;
    (best > 0).then(|| size.iter().position(|&s| s == best).expect("max exists"))
}

fn step_toward(game: &Game, from: RegionId, goal: RegionId, acts: &[Action]) -> Option<Action> {
    let g = &game.graph;
    let here = g.hops(from, goal);
    acts.iter()
        .filter_map(|a| match a {
            Action::Move(r) if g.hops(*r, goal) < here => Some((*r, *a)),
            _ => None,
        })
        .min_by_key(|(r, _)| *r)
        .map(|(_, a)| a)
}
