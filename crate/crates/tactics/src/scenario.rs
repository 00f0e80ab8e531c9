//! Scenario files: initial unit placements for a match.
//!
//! ```json
//! { "format_version": 1, "name": "duel", "abstraction": "R-MB",
//!   "units": [ { "player": "a", "unit_type": "Marine", "x": 10, "y": 20, "count": 4 } ] }
//! ```
//!
//! `unit_type` is a catalog name or type id; `hp` and `shield` default to full.

use std::fs;
use std::path::Path;

use attrition_core::{Position, TypeId, Unit, UnitCatalog};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::RegionGraph;
use crate::state::{abstract_from_units, Abstracted, Abstraction, Player};

pub const SCENARIO_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TypeRef {
    Id(TypeId),
    Name(String),
}

impl TypeRef {
    pub fn resolve(&self, catalog: &UnitCatalog) -> Result<TypeId> {
        match self {
            TypeRef::Id(id) => catalog.get(*id).map(|t| t.type_id),
            TypeRef::Name(name) => catalog.by_name(name).map(|t| t.type_id),
        }
        .ok_or_else(|| Error::Scenario(format!("unknown unit type {self:?}")))
    }
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub player: Player,
    pub unit_type: TypeRef,
    pub x: f64,
    pub y: f64,
    #[serde(default = "one")]
    pub count: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shield: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub format_version: u32,
    pub name: String,
    pub abstraction: Abstraction,
    #[serde(default)]
    pub frame: u64,
    pub units: Vec<Placement>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        if s.format_version != SCENARIO_FORMAT_VERSION {
            return Err(Error::FormatVersion { found: s.format_version, expected: SCENARIO_FORMAT_VERSION });
        }
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Two identical Terran armies with a Command Center each, on the bases of [`MapFile::ring6`](crate::map::MapFile::ring6).
    pub fn ring6_skirmish() -> Self {
        Self::from_json(include_str!("../data/ring6_skirmish.json")).expect("bundled scenario is valid")
    }

    /// Expands placements into units with sequential uids.
    pub fn units(&self, catalog: &UnitCatalog) -> Result<Vec<(Player, Unit)>> {
        let mut out = Vec::new();
        for (i, p) in self.units.iter().enumerate() {
            let type_id = p.unit_type.resolve(catalog)?;
            let t = catalog.stats(type_id);
            let hp = p.hp.unwrap_or(t.max_hp);
            let shield = p.shield.unwrap_or(t.max_shield);
            if !(hp > 0.0) || hp > t.max_hp || !(0.0..=t.max_shield).contains(&shield) {
                return Err(Error::Scenario(format!("placement {i}: health outside the {} limits", t.name)));
            }
            if p.count == 0 || !p.x.is_finite() || !p.y.is_finite() {
                return Err(Error::Scenario(format!("placement {i}: count must be >= 1 and coordinates finite")));
            }
            for _ in 0..p.count {
                let uid = out.len() as u32;
                out.push((p.player, Unit::new(uid, type_id, hp).with_shield(shield).at(Position::new(p.x, p.y))));
            }
        }
        Ok(out)
    }

    pub fn initial_state(&self, graph: &RegionGraph, catalog: &UnitCatalog) -> Result<Abstracted> {
        let abstracted = abstract_from_units(&self.units(catalog)?, graph, self.abstraction, catalog, self.frame)?;
        for player in [Player::A, Player::B] {
            if !abstracted.state.has_groups(player) {
                return Err(Error::Scenario(format!("player {player} has nothing the {} abstraction keeps", self.abstraction)));
            }
        }
        Ok(abstracted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::MapFile;

    #[test]
    fn skirmish_is_mirrored() {
        let c = UnitCatalog::starcraft();
        let sc = Scenario::ring6_skirmish();
        let g = RegionGraph::build(&MapFile::ring6(), sc.abstraction.with_chokepoints()).unwrap();
        let s = sc.initial_state(&g, &c).unwrap().state;
        let side = |p: Player| {
            let mut v: Vec<_> = s.groups_of(p).map(|(_, grp)| (grp.type_id, grp.size, if p == Player::A { grp.region } else { 5 - grp.region })).collect();
            v.sort();
            v
        };
        assert_eq!(side(Player::A), side(Player::B));
        assert_eq!(s.total_size(Player::A), 15);
        assert_eq!(Scenario::from_json(&sc.to_json()).unwrap(), sc);
    }

    #[test]
    fn bad_placements_are_rejected() {
        let c = UnitCatalog::starcraft();
        let mut sc = Scenario::ring6_skirmish();
        sc.units[1].unit_type = TypeRef::Name("Ultralisk".into());
        assert!(sc.units(&c).is_err());
        let mut sc = Scenario::ring6_skirmish();
        sc.units[1].hp = Some(1000.0);
        assert!(sc.units(&c).is_err());
        let mut sc = Scenario::ring6_skirmish();
        sc.units.retain(|p| p.player == Player::A);
        let g = RegionGraph::build(&MapFile::ring6(), false).unwrap();
        assert!(matches!(sc.initial_state(&g, &c), Err(Error::Scenario(_))));
    }
}
