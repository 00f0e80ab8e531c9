//! A high-level RTS game on a region graph, and planners for it.
//!
//! Units are abstracted into groups (one per player, unit type and region)
//! that can move to adjacent regions, attack co-located enemies or idle.
//! Combats inside a region are resolved by any forward model from
//! `attrition-core`, which is what makes the game cheap enough to search.
//! [`mcts`] plans over this game; [`matches`] plays full games between
//! MCTS, scripted and random agents.

pub mod actions;
pub mod error;
pub mod game;
pub mod map;
pub mod matches;
pub mod mcts;
pub mod players;
pub mod scenario;
pub mod state;

pub use actions::{branching_factor, legal_actions, Action, LegalActions, PlayerActionSet};
pub use error::{Error, Result};
pub use game::{evaluate_state, release_idle, CombatReport, Game, IDLE_FRAMES};
pub use map::{MapFile, RegionGraph, RegionId, RegionKind, RegionSpec, MAP_FORMAT_VERSION};
pub use matches::{play_match, summarize, write_log, Agent, CycleLog, MatchConfig, MatchResult, MatchSummary};
pub use mcts::{search, search_tree, MctsConfig, RootChild, SearchNode, SearchTree, SimultaneousPolicy};
pub use players::{random_policy, scripted_policy};
pub use scenario::{Placement, Scenario, TypeRef, SCENARIO_FORMAT_VERSION};
pub use state::{abstract_from_units, expand_groups, Abstracted, Abstraction, Group, GroupAction, HighLevelState, Player};
