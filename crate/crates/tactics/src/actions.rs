//! Legal actions and action sets.

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::map::{RegionGraph, RegionId};
use crate::state::{Group, GroupAction, HighLevelState, Player};

/// An order for one group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "action", content = "target", rename_all = "snake_case")]
pub enum Action {
    #[serde(rename = "na")]
    NA,
    Move(RegionId),
    Attack,
    Idle,
}

impl Action {
    /// The order a busy group keeps following.
    pub fn continuing(g: &Group) -> Action {
        match g.action {
            GroupAction::NA => Action::NA,
            GroupAction::Move => Action::Move(g.target_region.unwrap_or(g.region)),
            GroupAction::Attack => Action::Attack,
            GroupAction::Idle => Action::Idle,
        }
    }
}

/// One choice per group of a player, indexed into `HighLevelState::groups`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PlayerActionSet {
    pub choices: Vec<(usize, Action)>,
}

impl PlayerActionSet {
    pub fn action_for(&self, group: usize) -> Option<Action> {
        self.choices.iter().find(|(g, _)| *g == group).map(|(_, a)| *a)
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }
}

/// The legal actions of every group of one player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegalActions {
    pub player: Player,
    pub per_group: Vec<(usize, Vec<Action>)>,
}

impl LegalActions {
    /// Number of distinct action sets: the product of the per-group counts.
    pub fn branching_factor(&self) -> BigUint {
        self.per_group.iter().fold(BigUint::from(1u32), |acc, (_, a)| acc * BigUint::from(a.len()))
    }

    /// The branching factor if it fits in a `u64`.
    pub fn count(&self) -> Option<u64> {
        self.per_group.iter().try_fold(1u64, |acc, (_, a)| acc.checked_mul(a.len() as u64))
    }

    /// The `index`-th action set in mixed-radix order (first group varies slowest).
    pub fn nth(&self, mut index: u64) -> PlayerActionSet {
        let mut choices = vec![(0, Action::Idle); self.per_group.len()];
        for (slot, (g, acts)) in self.per_group.iter().enumerate().rev() {
            let n = acts.len() as u64;
            choices[slot] = (*g, acts[(index % n) as usize]);
            index /= n;
        }
        PlayerActionSet { choices }
    }

    /// Every action set, in [`nth`](Self::nth) order. Only sensible for small factors.
    pub fn enumerate(&self) -> Vec<PlayerActionSet> {
        let n = self.count().expect("branching factor fits in u64");
        (0..n).map(|i| self.nth(i)).collect()
    }

    /// Uniform over action sets: each group picks uniformly and independently.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PlayerActionSet {
        PlayerActionSet { choices: self.per_group.iter().map(|(g, a)| (*g, a[rng.gen_range(0..a.len())])).collect() }
    }

    pub fn contains(&self, set: &PlayerActionSet) -> bool {
        set.choices.len() == self.per_group.len()
            && set.choices.iter().zip(&self.per_group).all(|((g, a), (lg, la))| g == lg && la.contains(a))
    }
}

/// Legal actions of `player`'s groups.
///
/// Buildings may only do `NA`; busy groups only continue; free groups may
/// move to any adjacent region, idle, or attack when an enemy shares the region.
pub fn legal_actions(state: &HighLevelState, graph: &RegionGraph, player: Player) -> LegalActions {
    let per_group = state
        .groups_of(player)
        .map(|(i, g)| {
            let acts = if !g.is_free(state.frame) {
                vec![Action::continuing(g)]
            } else {
                let mut acts: Vec<Action> = graph.neighbors(g.region).iter().map(|&r| Action::Move(r)).collect();
                if state.enemy_in(player, g.region) {
                    acts.push(Action::Attack);
                }
                acts.push(Action::Idle);
                acts
            };
            (i, acts)
        })
        .collect();
    LegalActions { player, per_group }
}

pub fn branching_factor(state: &HighLevelState, graph: &RegionGraph, player: Player) -> BigUint {
    legal_actions(state, graph, player).branching_factor()
}
