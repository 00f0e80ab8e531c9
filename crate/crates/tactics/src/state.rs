//! Groups and high-level game states.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use attrition_core::{TypeId, Unit, UnitCatalog, UnitTypeStats};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{RegionGraph, RegionId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    A,
    B,
}

impl Player {
    pub fn other(self) -> Self {
        match self {
            Player::A => Player::B,
            Player::B => Player::A,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::A => "A",
            Player::B => "B",
        })
    }
}

/// Which regions and buildings a high-level state keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Abstraction {
    /// Regions only, bases are the only buildings.
    #[serde(rename = "R-MB")]
    RMb,
    /// Regions only, all buildings.
    #[serde(rename = "R-MA")]
    RMa,
    /// Regions and chokepoints, bases only.
    #[serde(rename = "RC-MB")]
    RcMb,
    /// Regions and chokepoints, all buildings.
    #[serde(rename = "RC-MA")]
    RcMa,
}

impl Abstraction {
    pub const ALL: [Abstraction; 4] = [Abstraction::RMb, Abstraction::RMa, Abstraction::RcMb, Abstraction::RcMa];

    pub fn with_chokepoints(self) -> bool {
        matches!(self, Abstraction::RcMb | Abstraction::RcMa)
    }

    pub fn all_buildings(self) -> bool {
        matches!(self, Abstraction::RMa | Abstraction::RcMa)
    }

    pub fn name(self) -> &'static str {
        match self {
            Abstraction::RMb => "R-MB",
            Abstraction::RMa => "R-MA",
            Abstraction::RcMb => "RC-MB",
            Abstraction::RcMa => "RC-MA",
        }
    }

    /// Workers never count; buildings count if they are bases or the variant keeps all of them.
    pub fn keeps(self, t: &UnitTypeStats) -> bool {
        if t.is_worker {
            return false;
        }
        if t.is_building {
            return t.is_base || self.all_buildings();
        }
        t.is_military()
    }
}

impl fmt::Display for Abstraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Abstraction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Abstraction::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s) || a.name().replace('-', "_").eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown abstraction '{s}' (expected R-MB, R-MA, RC-MB or RC-MA)"))
    }
}

/// What a group is currently doing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupAction {
    /// Buildings; they never act.
    #[serde(rename = "na")]
    NA,
    Move,
    Attack,
    Idle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub player: Player,
    pub type_id: TypeId,
    pub size: u32,
    /// Mean hp + shield.
    pub avg_hp: f64,
    pub region: RegionId,
    pub action: GroupAction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_region: Option<RegionId>,
    pub end_frame: u64,
}

impl Group {
    /// Whether the group needs a new order at `frame`.
    pub fn is_free(&self, frame: u64) -> bool {
        self.action != GroupAction::NA && self.end_frame <= frame
    }

    fn key(&self) -> (Player, RegionId, TypeId) {
        (self.player, self.region, self.type_id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighLevelState {
    pub frame: u64,
    pub abstraction: Abstraction,
    /// Sorted by (player, region, type); at most one group per key.
    pub groups: Vec<Group>,
}

impl HighLevelState {
    pub fn new(frame: u64, abstraction: Abstraction, mut groups: Vec<Group>) -> Self {
        groups.sort_by_key(Group::key);
        HighLevelState { frame, abstraction, groups }
    }

    /// Re-establishes the ordering and merges groups that share a key.
    ///
    /// A merged group takes the size-weighted mean health and the order of
    /// whichever part finishes last, so an ongoing move or attack carries on.
    pub fn normalize(&mut self) {
        self.groups.sort_by_key(Group::key);
        let mut out: Vec<Group> = Vec::with_capacity(self.groups.len());
        for g in self.groups.drain(..) {
            match out.last_mut() {
                Some(last) if last.key() == g.key() => {
                    let n = last.size + g.size;
                    last.avg_hp = (last.avg_hp * last.size as f64 + g.avg_hp * g.size as f64) / n as f64;
                    last.size = n;
                    if g.end_frame > last.end_frame {
                        last.action = g.action;
                        last.target_region = g.target_region;
                        last.end_frame = g.end_frame;
                    }
                }
                _ => out.push(g),
            }
        }
        self.groups = out;
    }

    pub fn groups_of(&self, player: Player) -> impl Iterator<Item = (usize, &Group)> + '_ {
        self.groups.iter().enumerate().filter(move |(_, g)| g.player == player)
    }

    pub fn has_groups(&self, player: Player) -> bool {
        self.groups.iter().any(|g| g.player == player)
    }

    pub fn enemy_in(&self, player: Player, region: RegionId) -> bool {
        self.groups.iter().any(|g| g.player != player && g.region == region)
    }

    pub fn total_size(&self, player: Player) -> u32 {
        self.groups_of(player).map(|(_, g)| g.size).sum()
    }

    /// Checks the structural invariants against a graph and catalog.
    pub fn validate(&self, graph: &RegionGraph, catalog: &UnitCatalog) -> Result<()> {
        for w in self.groups.windows(2) {
            if w[0].key() >= w[1].key() {
                return Err(Error::Scenario("groups are unsorted or share a (player, region, type) key".into()));
            }
        }
        for g in &self.groups {
            let t = catalog
                .get(g.type_id)
                .ok_or_else(|| Error::Scenario(format!("group has unknown type {}", g.type_id)))?;
            if g.size == 0 {
                return Err(Error::Scenario(format!("empty {} group", t.name)));
            }
            if !(g.avg_hp > 0.0) || g.avg_hp > t.max_health() + 1e-9 {
                return Err(Error::Scenario(format!("{} group avg_hp {} outside (0, {}]", t.name, g.avg_hp, t.max_health())));
            }
            if !graph.is_active(g.region) {
                return Err(Error::Scenario(format!("{} group in unknown region {}", t.name, g.region)));
            }
            if (g.action == GroupAction::NA) != t.is_building {
                return Err(Error::Scenario(format!("{} group: only buildings have action NA", t.name)));
            }
        }
        Ok(())
    }
}

/// Result of abstracting a low-level unit list.
#[derive(Debug, Clone, PartialEq)]
pub struct Abstracted {
    pub state: HighLevelState,
    /// Units that fell outside every region polygon and were assigned to the nearest one.
    pub warnings: Vec<String>,
}

/// Filters units per `variant` and groups them by (player, type, region).
///
/// Every group starts free: `Idle` ending at `frame`, or `NA` for buildings.
pub fn abstract_from_units(
    units: &[(Player, Unit)],
    graph: &RegionGraph,
    variant: Abstraction,
    catalog: &UnitCatalog,
    frame: u64,
) -> Result<Abstracted> {
    let mut acc: BTreeMap<(Player, RegionId, TypeId), (u32, f64)> = BTreeMap::new();
    let mut warnings = Vec::new();
    for (player, u) in units {
        let t = catalog
            .get(u.type_id)
            .ok_or_else(|| Error::Scenario(format!("unit {} has unknown type {}", u.uid, u.type_id)))?;
        if !variant.keeps(t) || !(u.health() > 0.0) {
            continue;
        }
        let pos = u.pos.ok_or_else(|| Error::Scenario(format!("unit {} has no position", u.uid)))?;
        let (region, exact) = graph.locate(pos);
        if !exact {
            warnings.push(format!("unit {} at ({}, {}) is outside every region; assigned to region {region}", u.uid, pos.x, pos.y));
        }
        let e = acc.entry((*player, region, u.type_id)).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += u.health();
    }
    let groups = acc
        .into_iter()
        .map(|((player, region, type_id), (size, total))| Group {
            player,
            type_id,
            size,
            avg_hp: total / size as f64,
            region,
            action: if catalog.stats(type_id).is_building { GroupAction::NA } else { GroupAction::Idle },
            target_region: None,
            end_frame: frame,
        })
        .collect();
    Ok(Abstracted { state: HighLevelState::new(frame, variant, groups), warnings })
}

/// One unit of `g`, health split as hit points first and shield for the rest.
pub fn group_unit(g: &Group, uid: u32, catalog: &UnitCatalog) -> Unit {
    let t = catalog.stats(g.type_id);
    let hp = g.avg_hp.min(t.max_hp);
    Unit::new(uid, g.type_id, hp).with_shield(g.avg_hp - hp)
}

/// Expands every group into `size` identical units standing on its region center.
pub fn expand_groups(state: &HighLevelState, graph: &RegionGraph, catalog: &UnitCatalog) -> Vec<(Player, Unit)> {
    let mut out = Vec::new();
    let mut uid = 0u32;
    for g in &state.groups {
        for _ in 0..g.size {
            out.push((g.player, group_unit(g, uid, catalog).at(graph.center(g.region))));
            uid += 1;
        }
    }
    out
}
