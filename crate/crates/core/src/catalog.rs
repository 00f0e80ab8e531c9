//! Unit-type catalogs.
//!
//! On disk a catalog is a JSON object:
//!
//! ```json
//! { "format_version": 1, "catalog_id": "starcraft-bw", "types": [ { "type_id": 0, "name": "Marine", ... } ] }
//! ```
//!
//! `type_id`s must be dense (`0..k`). Every optional field defaults to zero / `false`.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::TypeId;

pub const CATALOG_FORMAT_VERSION: u32 = 1;

/// Static properties shared by every unit of one type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitTypeStats {
    pub type_id: TypeId,
    pub name: String,
    pub max_hp: f64,
    #[serde(default)]
    pub max_shield: f64,
    #[serde(default)]
    pub max_energy: f64,
    #[serde(default)]
    pub mineral_cost: f64,
    #[serde(default)]
    pub gas_cost: f64,
    #[serde(default)]
    pub weapon_damage_ground: f64,
    #[serde(default)]
    pub weapon_damage_air: f64,
    #[serde(default)]
    pub cooldown_ground: f64,
    #[serde(default)]
    pub cooldown_air: f64,
    /// Attack range against ground targets, in pixels.
    #[serde(default)]
    pub range_ground: f64,
    /// Attack range against air targets, in pixels.
    #[serde(default)]
    pub range_air: f64,
    /// Pixels per frame.
    #[serde(default)]
    pub top_speed: f64,
    #[serde(default)]
    pub is_flyer: bool,
    #[serde(default)]
    pub is_building: bool,
    #[serde(default = "default_true")]
    pub can_attack: bool,
    #[serde(default)]
    pub is_worker: bool,
    /// Resource depots (Command Center, Nexus, Hatchery...).
    #[serde(default)]
    pub is_base: bool,
    #[serde(default)]
    pub is_detector: bool,
    #[serde(default)]
    pub is_transport: bool,
    /// Mine-like units, excluded from training data by default.
    #[serde(default)]
    pub is_mine: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub destroy_score_override: Option<f64>,
}

fn default_true() -> bool {
    true
}

impl UnitTypeStats {
    /// A minimal ground unit with no weapons; fill in the rest with struct update syntax.
    pub fn new(type_id: TypeId, name: impl Into<String>, max_hp: f64) -> Self {
        UnitTypeStats {
            type_id,
            name: name.into(),
            max_hp,
            max_shield: 0.0,
            max_energy: 0.0,
            mineral_cost: 0.0,
            gas_cost: 0.0,
            weapon_damage_ground: 0.0,
            weapon_damage_air: 0.0,
            cooldown_ground: 0.0,
            cooldown_air: 0.0,
            range_ground: 0.0,
            range_air: 0.0,
            top_speed: 0.0,
            is_flyer: false,
            is_building: false,
            can_attack: true,
            is_worker: false,
            is_base: false,
            is_detector: false,
            is_transport: false,
            is_mine: false,
            destroy_score_override: None,
        }
    }

    pub fn hits_ground(&self) -> bool {
        self.can_attack && self.weapon_damage_ground > 0.0
    }

    pub fn hits_air(&self) -> bool {
        self.can_attack && self.weapon_damage_air > 0.0
    }

    /// Attackability predicate: ground weapons hit non-flyers, air weapons hit flyers.
    pub fn can_hit(&self, target: &UnitTypeStats) -> bool {
        if target.is_flyer {
            self.hits_air()
        } else {
            self.hits_ground()
        }
    }

    pub fn range_against(&self, target: &UnitTypeStats) -> f64 {
        if !self.can_hit(target) {
            return 0.0;
        }
        if target.is_flyer {
            self.range_air
        } else {
            self.range_ground
        }
    }

    pub fn max_health(&self) -> f64 {
        self.max_hp + self.max_shield
    }

    /// Can deal damage, detect, or transport.
    pub fn is_military(&self) -> bool {
        self.hits_ground() || self.hits_air() || self.is_detector || self.is_transport
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Catalog(format!("type {} ({}): {msg}", self.type_id, self.name)));
        if !(self.max_hp > 0.0) {
            return bad("max_hp must be > 0");
        }
        let fields = [
            self.max_shield,
            self.max_energy,
            self.mineral_cost,
            self.gas_cost,
            self.weapon_damage_ground,
            self.weapon_damage_air,
            self.cooldown_ground,
            self.cooldown_air,
            self.range_ground,
            self.range_air,
            self.top_speed,
        ];
        if fields.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return bad("numeric fields must be finite and >= 0");
        }
        if self.weapon_damage_ground > 0.0 && !(self.cooldown_ground > 0.0) {
            return bad("ground weapon without a positive cooldown");
        }
        if self.weapon_damage_air > 0.0 && !(self.cooldown_air > 0.0) {
            return bad("air weapon without a positive cooldown");
        }
        if let Some(s) = self.destroy_score_override {
            if !s.is_finite() {
                return bad("destroy_score_override must be finite");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitCatalog {
    pub format_version: u32,
    pub catalog_id: String,
    types: Vec<UnitTypeStats>,
}

impl UnitCatalog {
    /// Validates and indexes a list of types. Input order does not matter.
    pub fn new(catalog_id: impl Into<String>, mut types: Vec<UnitTypeStats>) -> Result<Self> {
        if types.is_empty() {
            return Err(Error::Catalog("catalog is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for t in &types {
            if !seen.insert(t.type_id) {
                return Err(Error::Catalog(format!("duplicate type_id {}", t.type_id)));
            }
            t.validate()?;
        }
        types.sort_by_key(|t| t.type_id);
        if let Some((i, t)) = types.iter().enumerate().find(|(i, t)| t.type_id != *i) {
            return Err(Error::Catalog(format!("type_ids must be dense 0..k; expected {i}, found {}", t.type_id)));
        }
        Ok(UnitCatalog {
            format_version: CATALOG_FORMAT_VERSION,
            catalog_id: catalog_id.into(),
            types,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: UnitCatalog = serde_json::from_str(text)?;
        if raw.format_version != CATALOG_FORMAT_VERSION {
            return Err(Error::FormatVersion { found: raw.format_version, expected: CATALOG_FORMAT_VERSION });
        }
        UnitCatalog::new(raw.catalog_id, raw.types)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serializes")
    }

    /// The bundled StarCraft: Brood War catalog (a representative subset of unit types).
    pub fn starcraft() -> Self {
        Self::from_json(include_str!("../data/starcraft.json")).expect("bundled catalog is valid")
    }

    /// Number of types, `k`.
    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn get(&self, type_id: TypeId) -> Option<&UnitTypeStats> {
        self.types.get(type_id)
    }

    /// Panics on an unknown id; states are validated against the catalog before simulation.
    pub fn stats(&self, type_id: TypeId) -> &UnitTypeStats {
        &self.types[type_id]
    }

    pub fn types(&self) -> &[UnitTypeStats] {
        &self.types
    }

    pub fn by_name(&self, name: &str) -> Option<&UnitTypeStats> {
        self.types.iter().find(|t| t.name.eq_ignore_ascii_case(name))
    }

    pub fn can_hit(&self, attacker: TypeId, target: TypeId) -> bool {
        self.stats(attacker).can_hit(self.stats(target))
    }

    pub fn mine_types(&self) -> Vec<TypeId> {
        self.types.iter().filter(|t| t.is_mine).map(|t| t.type_id).collect()
    }
}
