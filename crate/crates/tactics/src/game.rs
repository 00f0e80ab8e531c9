//! Forward stepping of the high-level game.

use attrition_core::{destroy_score, CombatModel, CombatState, Unit, UnitCatalog};

use crate::actions::{legal_actions, Action, LegalActions, PlayerActionSet};
use crate::error::{Error, Result};
use crate::map::{RegionGraph, RegionId};
use crate::state::{group_unit, GroupAction, HighLevelState, Player};

pub const IDLE_FRAMES: u64 = 400;

/// Everything the rules need besides the state: units, map and the combat model.
#[derive(Debug, Clone)]
pub struct Game {
    pub catalog: UnitCatalog,
    pub graph: RegionGraph,
    pub model: CombatModel,
    pub idle_frames: u64,
}

/// How a combat in one region went.
#[derive(Debug, Clone, PartialEq)]
pub struct CombatReport {
    pub region: RegionId,
    /// Frames of the military phase plus the clean-up phase.
    pub duration_frames: f64,
    pub survivors_a: u32,
    pub survivors_b: u32,
}

impl Game {
    pub fn new(catalog: UnitCatalog, graph: RegionGraph, model: CombatModel) -> Self {
        Game { catalog, graph, model, idle_frames: IDLE_FRAMES }
    }

    pub fn legal_actions(&self, state: &HighLevelState, player: Player) -> LegalActions {
        legal_actions(state, &self.graph, player)
    }

    /// Frames a group of `type_id` needs to walk between two region centers.
    pub fn travel_frames(&self, type_id: usize, from: RegionId, to: RegionId) -> u64 {
        let speed = self.catalog.stats(type_id).top_speed;
        let d = self.graph.distance(from, to);
        if speed > 0.0 {
            ((d / speed).ceil() as u64).max(1)
        } else {
            u64::MAX / 4
        }
    }

    fn describe(&self, state: &HighLevelState, i: usize) -> String {
        let g = &state.groups[i];
        format!("#{i} ({} {} in region {})", g.player, self.catalog.stats(g.type_id).name, g.region)
    }

    /// Validates `set` against the legal actions of `player` and issues the orders of free groups.
    pub fn apply_actions(&self, state: &mut HighLevelState, player: Player, set: &PlayerActionSet) -> Result<()> {
        let legal = self.legal_actions(state, player);
        if set.choices.len() != legal.per_group.len() {
            return Err(Error::IllegalAction {
                group: format!("set of player {player}"),
                message: format!("expected {} choices, got {}", legal.per_group.len(), set.choices.len()),
            });
        }
        for ((g, a), (lg, la)) in set.choices.iter().zip(&legal.per_group) {
            if g != lg {
                let who = if *g < state.groups.len() { self.describe(state, *g) } else { format!("#{g}") };
                return Err(Error::IllegalAction { group: who, message: format!("expected a choice for group #{lg} at this position") });
            }
            if !la.contains(a) {
                return Err(Error::IllegalAction { group: self.describe(state, *g), message: format!("{a:?} is not among {la:?}") });
            }
        }
        let frame = state.frame;
        for &(i, a) in &set.choices {
            let g = &mut state.groups[i];
            if !g.is_free(frame) {
                continue;
            }
            match a {
                Action::NA => {}
                Action::Move(r) => {
                    let t = self.travel_frames(g.type_id, g.region, r);
                    g.action = GroupAction::Move;
                    g.target_region = Some(r);
                    g.end_frame = frame.saturating_add(t);
                }
                Action::Attack => {
                    // Pending until the combat is resolved in `settle`.
                    g.action = GroupAction::Attack;
                    g.target_region = None;
                    g.end_frame = frame;
                }
                Action::Idle => {
                    g.action = GroupAction::Idle;
                    g.target_region = None;
                    g.end_frame = frame + self.idle_frames;
                }
            }
        }
        Ok(())
    }

    /// Applies both players' sets and advances to the next action-completion boundary.
    pub fn step(&self, state: &HighLevelState, a: &PlayerActionSet, b: &PlayerActionSet) -> Result<HighLevelState> {
        let mut next = state.clone();
        self.apply_actions(&mut next, Player::A, a)?;
        self.apply_actions(&mut next, Player::B, b)?;
        self.settle(&mut next);
        if self.is_terminal(&next) {
            return Ok(next);
        }
        let until = next.groups.iter().map(|g| g.end_frame).filter(|&f| f > next.frame).min().unwrap_or(next.frame + self.idle_frames);
        self.advance(&mut next, until);
        Ok(next)
    }

    /// One planning segment: apply both sets, run to `until`, then free idle groups for re-planning.
    pub fn play_segment(&self, state: &mut HighLevelState, a: &PlayerActionSet, b: &PlayerActionSet, until: u64) -> Result<()> {
        self.apply_actions(state, Player::A, a)?;
        self.apply_actions(state, Player::B, b)?;
        self.advance(state, until);
        release_idle(state);
        Ok(())
    }

    /// Runs events up to and including frame `until`, stopping early when a player is eliminated.
    pub fn advance(&self, state: &mut HighLevelState, until: u64) {
        loop {
            self.settle(state);
            if self.is_terminal(state) {
                return;
            }
            match state.groups.iter().map(|g| g.end_frame).filter(|&f| f > state.frame).min() {
                Some(t) if t <= until => state.frame = t,
                _ => {
                    state.frame = state.frame.max(until);
                    return;
                }
            }
        }
    }

    /// Resolves pending attacks, completes finished actions and merges groups, all at the current frame.
    pub fn settle(&self, state: &mut HighLevelState) -> Vec<CombatReport> {
        let frame = state.frame;
        let mut regions: Vec<RegionId> = state
            .groups
            .iter()
            .filter(|g| g.action == GroupAction::Attack && g.end_frame <= frame && state.enemy_in(g.player, g.region))
            .map(|g| g.region)
            .collect();
        regions.sort_unstable();
        regions.dedup();
        let reports: Vec<CombatReport> = regions.into_iter().map(|r| self.resolve_combat(state, r)).collect();
        for g in &mut state.groups {
            if g.end_frame > frame {
                continue;
            }
            match g.action {
                GroupAction::Move => {
                    g.region = g.target_region.take().unwrap_or(g.region);
                    g.action = GroupAction::Idle;
                }
                GroupAction::Attack => g.action = GroupAction::Idle,
                _ => {}
            }
        }
        state.normalize();
        reports
    }

    /// Fights it out in `region`: every group there joins.
    ///
    /// Units that cannot hurt any enemy present (harmless) or cannot be hurt by
    /// one (invincible) sit out the first phase. The second phase pits
    /// everything still standing against each other, which is how the winner
    /// cleans up harmless units and buildings.
    pub fn resolve_combat(&self, state: &mut HighLevelState, region: RegionId) -> CombatReport {
        let c = &self.catalog;
        let members: Vec<usize> = (0..state.groups.len()).filter(|&i| state.groups[i].region == region).collect();
        let mut side: [Vec<Unit>; 2] = [Vec::new(), Vec::new()];
        let mut uid = 0u32;
        for &i in &members {
            let g = &state.groups[i];
            for _ in 0..g.size {
                side[g.player.index()].push(group_unit(g, uid, c));
                uid += 1;
            }
        }
        let hurts = |attackers: &[Unit], u: &Unit| attackers.iter().any(|v| c.can_hit(u.type_id, v.type_id));
        let hurt_by = |attackers: &[Unit], u: &Unit| attackers.iter().any(|v| c.can_hit(v.type_id, u.type_id));
        let fighting = |me: &[Unit], them: &[Unit]| -> (Vec<Unit>, Vec<Unit>) {
            me.iter().cloned().partition(|u| hurts(them, u) && hurt_by(them, u))
        };
        let (a1, a_rest) = fighting(&side[0], &side[1]);
        let (b1, b_rest) = fighting(&side[1], &side[0]);
        let mut duration = 0.0;
        let (mut a, mut b) = (a_rest, b_rest);
        if !a1.is_empty() && !b1.is_empty() {
            let out = self.model.simulate(c, &CombatState { army_a: a1, army_b: b1 });
            duration += out.duration_frames;
            a.extend(out.survivors_a);
            b.extend(out.survivors_b);
        } else {
            a.extend(a1);
            b.extend(b1);
        }
        let anyone_hurts = a.iter().any(|u| hurts(&b, u)) || b.iter().any(|u| hurts(&a, u));
        if !a.is_empty() && !b.is_empty() && anyone_hurts {
            let out = self.model.simulate(c, &CombatState { army_a: a, army_b: b });
            duration += out.duration_frames;
            a = out.survivors_a;
            b = out.survivors_b;
        }
        let survivors = [a, b];
        let frames = (duration.ceil() as u64).max(1);
        let end = state.frame + frames;
        for &i in &members {
            let g = &mut state.groups[i];
            let (n, total) = survivors[g.player.index()]
                .iter()
                .filter(|u| u.type_id == g.type_id)
                .fold((0u32, 0.0), |(n, t), u| (n + 1, t + u.health()));
            g.size = n.min(g.size);
            if n > 0 {
                g.avg_hp = (total / n as f64).min(g.avg_hp);
            }
            if g.action == GroupAction::Attack && g.end_frame <= state.frame {
                g.end_frame = end;
            }
        }
        state.groups.retain(|g| g.size > 0);
        CombatReport {
            region,
            duration_frames: duration,
            survivors_a: survivors[0].len() as u32,
            survivors_b: survivors[1].len() as u32,
        }
    }

    pub fn is_terminal(&self, state: &HighLevelState) -> bool {
        !state.has_groups(Player::A) || !state.has_groups(Player::B)
    }

    /// The eliminating player, if any; `None` with both eliminated or both alive.
    pub fn eliminator(&self, state: &HighLevelState) -> Option<Player> {
        match (state.has_groups(Player::A), state.has_groups(Player::B)) {
            (true, false) => Some(Player::A),
            (false, true) => Some(Player::B),
            _ => None,
        }
    }

    /// `2 * score(me) / (score(me) + score(enemy)) - 1`, with score the sum of `size * destroy_score`.
    pub fn evaluate_state(&self, state: &HighLevelState, player: Player) -> f64 {
        evaluate_state(state, &self.catalog, player)
    }
}

/// Frees groups sitting out an idle order so they can be re-planned.
pub fn release_idle(state: &mut HighLevelState) {
    for g in &mut state.groups {
        if g.action == GroupAction::Idle {
            g.end_frame = g.end_frame.min(state.frame);
        }
    }
}

pub fn army_score(state: &HighLevelState, catalog: &UnitCatalog, player: Player) -> f64 {
    state.groups_of(player).map(|(_, g)| g.size as f64 * destroy_score(catalog.stats(g.type_id))).sum()
}

/// Reward in `[-1, 1]` from `player`'s point of view; 0 when neither side scores.
pub fn evaluate_state(state: &HighLevelState, catalog: &UnitCatalog, player: Player) -> f64 {
    let me = army_score(state, catalog, player);
    let them = army_score(state, catalog, player.other());
    if me + them <= 0.0 {
        0.0
    } else {
        2.0 * me / (me + them) - 1.0
    }
}
