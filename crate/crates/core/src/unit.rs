use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::catalog::UnitCatalog;
use crate::error::{Error, Result};
use crate::{TypeId, Uid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// One unit instance. Energy is carried through but no model reads it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unit {
    pub uid: Uid,
    pub type_id: TypeId,
    pub hp: f64,
    #[serde(default)]
    pub shield: f64,
    #[serde(default)]
    pub energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<Position>,
}

impl Unit {
    pub fn new(uid: Uid, type_id: TypeId, hp: f64) -> Self {
        Unit { uid, type_id, hp, shield: 0.0, energy: 0.0, pos: None }
    }

    /// A unit at full hit points and shield.
    pub fn full(uid: Uid, type_id: TypeId, catalog: &UnitCatalog) -> Self {
        let t = catalog.stats(type_id);
        Unit { uid, type_id, hp: t.max_hp, shield: t.max_shield, energy: t.max_energy, pos: None }
    }

    pub fn with_shield(mut self, shield: f64) -> Self {
        self.shield = shield;
        self
    }

    pub fn at(mut self, pos: Position) -> Self {
        self.pos = Some(pos);
        self
    }

    /// Hit points plus shield; what every model treats as the unit's health.
    pub fn health(&self) -> f64 {
        self.hp + self.shield
    }

    /// Shields absorb damage first.
    pub fn apply_damage(&mut self, amount: f64) {
        let absorbed = amount.min(self.shield);
        self.shield -= absorbed;
        self.hp -= amount - absorbed;
    }

    /// Scales hp and shield by `fraction` in `[0, 1]`.
    pub fn scale_health(&mut self, fraction: f64) {
        self.hp *= fraction;
        self.shield *= fraction;
    }
}

/// An attrition-game combat: army A against army B.
///
/// The edge set of the attrition game is implicit: a unit can attack any enemy
/// whose domain (air/ground) its weapons cover, and everything is in range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombatState {
    pub army_a: Vec<Unit>,
    pub army_b: Vec<Unit>,
}

impl CombatState {
    /// Checks that both armies are non-empty and uids are unique across them.
    pub fn new(army_a: Vec<Unit>, army_b: Vec<Unit>) -> Result<Self> {
        if army_a.is_empty() || army_b.is_empty() {
            return Err(Error::State("both armies must be non-empty".into()));
        }
        let mut seen = HashSet::with_capacity(army_a.len() + army_b.len());
        for u in army_a.iter().chain(&army_b) {
            if !seen.insert(u.uid) {
                return Err(Error::State(format!("duplicate uid {}", u.uid)));
            }
        }
        Ok(CombatState { army_a, army_b })
    }

    /// Checks unit types and health bounds against a catalog.
    pub fn validate(&self, catalog: &UnitCatalog) -> Result<()> {
        for u in self.army_a.iter().chain(&self.army_b) {
            let t = catalog
                .get(u.type_id)
                .ok_or_else(|| Error::State(format!("unit {} has unknown type {}", u.uid, u.type_id)))?;
            if !(u.hp > 0.0) || u.hp > t.max_hp + 1e-9 {
                return Err(Error::State(format!("unit {} hp {} outside (0, {}]", u.uid, u.hp, t.max_hp)));
            }
            if !(u.shield >= 0.0) {
                return Err(Error::State(format!("unit {} has negative shield", u.uid)));
            }
        }
        Ok(())
    }

    pub fn swapped(&self) -> Self {
        CombatState { army_a: self.army_b.clone(), army_b: self.army_a.clone() }
    }

    pub fn unit_count(&self) -> usize {
        self.army_a.len() + self.army_b.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shield_absorbs_first() {
        let mut u = Unit::new(1, 0, 100.0).with_shield(60.0);
        u.apply_damage(70.0);
        assert_eq!(u.shield, 0.0);
        assert_eq!(u.hp, 90.0);
        assert_eq!(u.health(), 90.0);
    }

    #[test]
    fn duplicate_uid_across_armies_rejected() {
        assert!(CombatState::new(vec![Unit::new(1, 0, 1.0)], vec![Unit::new(1, 0, 1.0)]).is_err());
    }

    #[test]
    fn empty_army_rejected() {
        assert!(CombatState::new(vec![], vec![Unit::new(1, 0, 1.0)]).is_err());
    }
}
