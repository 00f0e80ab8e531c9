//! Full games between two agents.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::actions::PlayerActionSet;
use crate::error::{Error, Result};
use crate::game::{release_idle, Game};
use crate::mcts::{search_tree, MctsConfig, RootChild};
use crate::players::{random_policy, scripted_policy};
use crate::state::{HighLevelState, Player};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Agent {
    Mcts(MctsConfig),
    Scripted,
    Random,
}

impl Agent {
    pub fn name(&self) -> &'static str {
        match self {
            Agent::Mcts(_) => "mcts",
            Agent::Scripted => "scripted",
            Agent::Random => "random",
        }
    }

    /// `mcts`, `scripted` or `random`; MCTS agents use `mcts`.
    pub fn parse(name: &str, mcts: &MctsConfig) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "mcts" => Ok(Agent::Mcts(mcts.clone())),
            "scripted" => Ok(Agent::Scripted),
            "random" => Ok(Agent::Random),
            other => Err(Error::Config(format!("unknown agent '{other}' (expected mcts, scripted or random)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub max_frames: u64,
    pub plan_interval: u64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig { max_frames: 28_800, plan_interval: 400 }
    }
}

/// One planning cycle of a match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleLog {
    pub frame: u64,
    pub actions_a: PlayerActionSet,
    pub actions_b: PlayerActionSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_visits_a: Option<Vec<RootChild>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_visits_b: Option<Vec<RootChild>>,
    /// Evaluation from A's side at the start of the cycle.
    pub eval: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    /// `None` on a timeout or when both sides died together.
    pub winner: Option<Player>,
    pub timed_out: bool,
    /// Evaluation of the final state from A's side.
    pub final_eval: f64,
    /// Frame at which the match ended.
    pub length: u64,
    pub seed: u64,
    #[serde(skip)]
    pub log: Vec<CycleLog>,
}

/// Plays one match from `initial`, querying both agents every `plan_interval` frames.
pub fn play_match(game: &Game, initial: &HighLevelState, a: &Agent, b: &Agent, cfg: &MatchConfig, seed: u64) -> Result<MatchResult> {
    if cfg.plan_interval == 0 {
        return Err(Error::Config("plan_interval must be > 0".into()));
    }
    for agent in [a, b] {
        if let Agent::Mcts(m) = agent {
            m.validate()?;
        }
    }
    let mut state = initial.clone();
    release_idle(&mut state);
    let mut rngs = [ChaCha8Rng::seed_from_u64(seed), ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15)];
    let mut log = Vec::new();
    while !game.is_terminal(&state) && state.frame < cfg.max_frames {
        let eval = game.evaluate_state(&state, Player::A);
        let (actions_a, root_visits_a) = decide(game, &state, Player::A, a, &mut rngs[0])?;
        let (actions_b, root_visits_b) = decide(game, &state, Player::B, b, &mut rngs[1])?;
        let until = (state.frame + cfg.plan_interval).min(cfg.max_frames);
        let frame = state.frame;
        game.play_segment(&mut state, &actions_a, &actions_b, until)?;
        log.push(CycleLog { frame, actions_a, actions_b, root_visits_a, root_visits_b, eval });
    }
    let terminal = game.is_terminal(&state);
    Ok(MatchResult {
        winner: game.eliminator(&state),
        timed_out: !terminal,
        final_eval: game.evaluate_state(&state, Player::A),
        length: state.frame,
        seed,
        log,
    })
}

fn decide(game: &Game, state: &HighLevelState, player: Player, agent: &Agent, rng: &mut ChaCha8Rng) -> Result<(PlayerActionSet, Option<Vec<RootChild>>)> {
    Ok(match agent {
        Agent::Random => (random_policy(game, state, player, rng), None),
        Agent::Scripted => (scripted_policy(game, state, player), None),
        Agent::Mcts(cfg) => {
            let seed = rng.gen();
            let legal = game.legal_actions(state, player);
            if legal.count() == Some(1) {
                // Forced: every search would return this set.
                (legal.nth(0), None)
            } else {
                let tree = search_tree(game, state, player, &MctsConfig { seed, ..cfg.clone() })?;
                (tree.best(), Some(tree.root_children()))
            }
        }
    })
}

/// Writes one JSON object per planning cycle.
pub fn write_log<W: Write>(log: &[CycleLog], mut w: W) -> Result<()> {
    for c in log {
        serde_json::to_writer(&mut w, c)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Aggregate over a series of matches, from A's side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchSummary {
    pub agent_a: String,
    pub agent_b: String,
    pub model: String,
    pub games: usize,
    pub avg_eval: f64,
    pub win_pct: f64,
    pub loss_pct: f64,
    pub avg_length: f64,
}

pub fn summarize(agent_a: &str, agent_b: &str, model: &str, results: &[MatchResult]) -> MatchSummary {
    let n = results.len().max(1) as f64;
    let count = |p: Player| results.iter().filter(|r| r.winner == Some(p)).count() as f64;
    MatchSummary {
        agent_a: agent_a.to_string(),
        agent_b: agent_b.to_string(),
        model: model.to_string(),
        games: results.len(),
        avg_eval: results.iter().map(|r| r.final_eval).sum::<f64>() / n,
        win_pct: 100.0 * count(Player::A) / n,
        loss_pct: 100.0 * count(Player::B) / n,
        avg_length: results.iter().map(|r| r.length as f64).sum::<f64>() / n,
    }
}
