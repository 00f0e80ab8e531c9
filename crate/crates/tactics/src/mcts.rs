//! Monte Carlo tree search over high-level states.
//!
//! Simultaneous moves are serialized with the Alt rule: the searching player
//! moves at even depths and the opponent at odd depths. An odd-depth node
//! shares its parent's state and remembers the parent's choice; once both
//! sets are known the child advances the game by one planning interval.
//!
//! Every node stores its total reward from the point of view of the player
//! who chose the edge leading into it (the root uses the searching player),
//! so a parent simply maximizes the mean of its children.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::actions::{LegalActions, PlayerActionSet};
use crate::error::{Error, Result};
use crate::game::{release_idle, Game};
use crate::players::random_policy;
use crate::state::{HighLevelState, Player};

/// Nodes with at most this many action sets are expanded exhaustively;
/// larger ones draw new children by sampling.
pub const ENUMERATION_LIMIT: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimultaneousPolicy {
    #[default]
    Alt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MctsConfig {
    pub epsilon: f64,
    pub max_tree_depth: usize,
    /// Frames simulated by a playout past its leaf.
    pub playout_length: u64,
    /// Iterations (playouts) per search.
    pub playout_budget: usize,
    pub simultaneous_policy: SimultaneousPolicy,
    pub plan_interval: u64,
    pub seed: u64,
}

impl Default for MctsConfig {
    fn default() -> Self {
        MctsConfig {
            epsilon: 0.2,
            max_tree_depth: 10,
            playout_length: 2880,
            playout_budget: 10_000,
            simultaneous_policy: SimultaneousPolicy::Alt,
            plan_interval: 400,
            seed: 0,
        }
    }
}

impl MctsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Config(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        if self.playout_budget == 0 {
            return Err(Error::Config("playout_budget must be > 0".into()));
        }
        if self.max_tree_depth == 0 || self.playout_length == 0 || self.plan_interval == 0 {
            return Err(Error::Config("max_tree_depth, playout_length and plan_interval must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Frontier {
    Unopened,
    /// Untried action sets, in the order they will be expanded.
    Enumerated(Vec<PlayerActionSet>),
    Sampled(LegalActions),
}

#[derive(Debug, Clone)]
pub struct SearchNode {
    pub state: HighLevelState,
    /// The other player's choice at this state, when this node is the second mover.
    pub pending: Option<PlayerActionSet>,
    pub mover: Player,
    pub depth: usize,
    pub visits: u64,
    pub total_reward: f64,
    /// The action set that led here.
    pub edge: Option<PlayerActionSet>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Iterations whose expansion stopped at this node.
    pub leaf_visits: u64,
    frontier: Frontier,
}

impl SearchNode {
    pub fn mean(&self) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.total_reward / self.visits as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootChild {
    pub actions: PlayerActionSet,
    pub visits: u64,
    pub mean_reward: f64,
}

#[derive(Debug, Clone)]
pub struct SearchTree {
    pub player: Player,
    pub nodes: Vec<SearchNode>,
    pub iterations: usize,
}

impl SearchTree {
    /// Most visited root child; ties go to the first expanded.
    pub fn best(&self) -> PlayerActionSet {
        let mut best: Option<&SearchNode> = None;
        for &c in &self.nodes[0].children {
            let n = &self.nodes[c];
            if best.map_or(true, |b| n.visits > b.visits) {
                best = Some(n);
            }
        }
        best.and_then(|n| n.edge.clone()).unwrap_or_default()
    }

    pub fn root_children(&self) -> Vec<RootChild> {
        self.nodes[0]
            .children
            .iter()
            .map(|&c| {
                let n = &self.nodes[c];
                RootChild { actions: n.edge.clone().unwrap_or_default(), visits: n.visits, mean_reward: n.mean() }
            })
            .collect()
    }
}

/// Runs a search for `player` and returns the chosen action set.
pub fn search(game: &Game, root: &HighLevelState, player: Player, cfg: &MctsConfig) -> Result<PlayerActionSet> {
    Ok(search_tree(game, root, player, cfg)?.best())
}

pub fn search_tree(game: &Game, root: &HighLevelState, player: Player, cfg: &MctsConfig) -> Result<SearchTree> {
    cfg.validate()?;
    let mut search = Search { game, cfg, player, rng: ChaCha8Rng::seed_from_u64(cfg.seed), nodes: Vec::new() };
    let mut state = root.clone();
    release_idle(&mut state);
    search.nodes.push(SearchNode {
        state,
        pending: None,
        mover: player,
        depth: 0,
        visits: 0,
        total_reward: 0.0,
        edge: None,
        parent: None,
        children: Vec::new(),
        leaf_visits: 0,
        frontier: Frontier::Unopened,
    });
    let mut iterations = 0;
    if !game.is_terminal(&search.nodes[0].state) {
        for _ in 0..cfg.playout_budget {
            search.iterate()?;
            iterations += 1;
        }
    }
    Ok(SearchTree { player, nodes: search.nodes, iterations })
}

struct Search<'a> {
    game: &'a Game,
    cfg: &'a MctsConfig,
    player: Player,
    rng: ChaCha8Rng,
    nodes: Vec<SearchNode>,
}

impl Search<'_> {
    fn iterate(&mut self) -> Result<()> {
        let leaf = self.select()?;
        let reward = self.rollout(leaf)?;
        self.nodes[leaf].leaf_visits += 1;
        let mut at = Some(leaf);
        while let Some(i) = at {
            let n = &mut self.nodes[i];
            n.visits += 1;
            // Stored from the view of whoever chose the edge into `n`.
            let chooser = if n.parent.is_some() { n.mover.other() } else { self.player };
            n.total_reward += if chooser == self.player { reward } else { -reward };
            at = n.parent;
        }
        Ok(())
    }

    fn select(&mut self) -> Result<usize> {
        let mut at = 0;
        loop {
            let node = &self.nodes[at];
            if node.depth >= self.cfg.max_tree_depth || (node.pending.is_none() && self.game.is_terminal(&node.state)) {
                return Ok(at);
            }
            if matches!(node.frontier, Frontier::Unopened) {
                let legal = self.game.legal_actions(&node.state, node.mover);
                self.nodes[at].frontier = match legal.count() {
                    Some(n) if n <= ENUMERATION_LIMIT => {
                        let mut all = legal.enumerate();
                        all.shuffle(&mut self.rng);
                        Frontier::Enumerated(all)
                    }
                    _ => Frontier::Sampled(legal),
                };
            }
            let explore = self.rng.gen::<f64>() < self.cfg.epsilon;
            let no_children = self.nodes[at].children.is_empty();
            let sampled = match &mut self.nodes[at].frontier {
                Frontier::Enumerated(untried) => match untried.pop() {
                    Some(x) => return self.expand(at, x),
                    None => None,
                },
                Frontier::Sampled(legal) if explore || no_children => Some(legal.sample(&mut self.rng)),
                Frontier::Sampled(_) => None,
                Frontier::Unopened => unreachable!("opened above"),
            };
            let next = match sampled {
                Some(x) => match self.nodes[at].children.iter().copied().find(|&c| self.nodes[c].edge.as_ref() == Some(&x)) {
                    Some(c) => c,
                    None => return self.expand(at, x),
                },
                None if explore => *self.nodes[at].children.choose(&mut self.rng).expect("expanded node has children"),
                None => self.best_child(at),
            };
            at = next;
        }
    }

    fn best_child(&self, at: usize) -> usize {
        let mut best = self.nodes[at].children[0];
        for &c in &self.nodes[at].children[1..] {
            if self.nodes[c].mean() > self.nodes[best].mean() {
                best = c;
            }
        }
        best
    }

    fn expand(&mut self, at: usize, x: PlayerActionSet) -> Result<usize> {
        let parent = &self.nodes[at];
        let (state, pending) = match &parent.pending {
            None => (parent.state.clone(), Some(x.clone())),
            Some(p) => {
                let mut s = parent.state.clone();
                let (a, b) = if parent.mover == Player::A { (&x, p) } else { (p, &x) };
                let until = s.frame + self.cfg.plan_interval;
                self.game.play_segment(&mut s, a, b, until)?;
                (s, None)
            }
        };
        let child = SearchNode {
            state,
            pending,
            mover: parent.mover.other(),
            depth: parent.depth + 1,
            visits: 0,
            total_reward: 0.0,
            edge: Some(x),
            parent: Some(at),
            children: Vec::new(),
            leaf_visits: 0,
            frontier: Frontier::Unopened,
        };
        let id = self.nodes.len();
        self.nodes.push(child);
        self.nodes[at].children.push(id);
        Ok(id)
    }

    fn rollout(&mut self, leaf: usize) -> Result<f64> {
        let game = self.game;
        let node = &self.nodes[leaf];
        let mut s = node.state.clone();
        let horizon = s.frame + self.cfg.playout_length;
        if let Some(p) = &node.pending {
            let x = random_policy(game, &s, node.mover, &mut self.rng);
            let (a, b) = if node.mover == Player::A { (&x, p) } else { (p, &x) };
            let until = (s.frame + self.cfg.plan_interval).min(horizon);
            game.play_segment(&mut s, a, b, until)?;
        }
        while !game.is_terminal(&s) && s.frame < horizon {
            let a = random_policy(game, &s, Player::A, &mut self.rng);
            let b = random_policy(game, &s, Player::B, &mut self.rng);
            let until = (s.frame + self.cfg.plan_interval).min(horizon);
            game.play_segment(&mut s, &a, &b, until)?;
        }
        Ok(game.evaluate_state(&s, self.player))
    }
}
