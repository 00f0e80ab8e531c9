//! Combat records and datasets.
//!
//! A dataset file is JSON:
//!
//! ```json
//! { "format_version": 1, "catalog_ref": "starcraft-bw", "source": "...",
//!   "records": [ { "t0": 0, "tf": 120, "reason": "army_destroyed",
//!                  "a0": [...], "b0": [...], "af": [...], "bf": [...],
//!                  "kills": [[35, 7], ...], "passive": [12] } ] }
//! ```
//!
//! Units are serialized as `{uid, type_id, hp, shield, energy, pos?}`.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use attrition_core::{CombatState, Uid, Unit, UnitCatalog, Winner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DATASET_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    /// One of the two armies was totally destroyed.
    ArmyDestroyed,
    /// Nobody attacked for the peace window.
    Peace,
    /// Units from outside the combat started taking part.
    Reinforcement,
    GameEnd,
}

impl EndReason {
    pub const ALL: [EndReason; 4] = [EndReason::ArmyDestroyed, EndReason::Peace, EndReason::Reinforcement, EndReason::GameEnd];

    pub fn name(self) -> &'static str {
        match self {
            EndReason::ArmyDestroyed => "army_destroyed",
            EndReason::Peace => "peace",
            EndReason::Reinforcement => "reinforcement",
            EndReason::GameEnd => "game_end",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombatRecord {
    pub t0: u64,
    pub tf: u64,
    pub reason: EndReason,
    pub a0: Vec<Unit>,
    pub b0: Vec<Unit>,
    pub af: Vec<Unit>,
    pub bf: Vec<Unit>,
    /// `(frame, uid)`, ordered by frame.
    pub kills: Vec<(u64, Uid)>,
    #[serde(default)]
    pub passive: Vec<Uid>,
}

impl CombatRecord {
    pub fn initial_state(&self) -> Result<CombatState> {
        Ok(CombatState::new(self.a0.clone(), self.b0.clone())?)
    }

    pub fn length(&self) -> u64 {
        self.tf - self.t0
    }

    pub fn unit_count(&self) -> usize {
        self.a0.len() + self.b0.len()
    }

    /// Distinct unit types over both armies.
    pub fn type_count(&self) -> usize {
        self.a0.iter().chain(&self.b0).map(|u| u.type_id).collect::<HashSet<_>>().len()
    }

    /// Who actually won: the side with survivors. Both empty is a draw; both
    /// non-empty (a record that did not end in destruction) is a stalemate.
    pub fn actual_winner(&self) -> Winner {
        match (self.af.is_empty(), self.bf.is_empty()) {
            (false, true) => Winner::A,
            (true, false) => Winner::B,
            (true, true) => Winner::Draw,
            (false, false) => Winner::Stalemate,
        }
    }

    /// Checks the structural invariants of a record.
    pub fn validate(&self, catalog: &UnitCatalog) -> Result<()> {
        if self.tf < self.t0 {
            return Err(Error::Invalid(format!("tf {} before t0 {}", self.tf, self.t0)));
        }
        let a0: HashSet<Uid> = self.a0.iter().map(|u| u.uid).collect();
        let b0: HashSet<Uid> = self.b0.iter().map(|u| u.uid).collect();
        if a0.len() != self.a0.len() || b0.len() != self.b0.len() || !a0.is_disjoint(&b0) {
            return Err(Error::Invalid("duplicate uid in record".into()));
        }
        for u in self.a0.iter().chain(&self.b0).chain(&self.af).chain(&self.bf) {
            if catalog.get(u.type_id).is_none() {
                return Err(Error::Invalid(format!("unit {} has unknown type {}", u.uid, u.type_id)));
            }
        }
        if !self.af.iter().all(|u| a0.contains(&u.uid)) || !self.bf.iter().all(|u| b0.contains(&u.uid)) {
            return Err(Error::Invalid("final army has a unit missing from the initial army".into()));
        }
        if !self.kills.iter().all(|(_, uid)| a0.contains(uid) || b0.contains(uid)) {
            return Err(Error::Invalid("kill of a unit outside the combat".into()));
        }
        if self.kills.windows(2).any(|w| w[0].0 > w[1].0) {
            return Err(Error::Invalid("kills not ordered by frame".into()));
        }
        if self.reason == EndReason::ArmyDestroyed && !self.af.is_empty() && !self.bf.is_empty() {
            return Err(Error::Invalid("army_destroyed record with both armies alive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombatDataset {
    pub format_version: u32,
    pub catalog_ref: String,
    #[serde(default)]
    pub source: String,
    pub records: Vec<CombatRecord>,
}

impl CombatDataset {
    pub fn new(catalog_ref: impl Into<String>, source: impl Into<String>, records: Vec<CombatRecord>) -> Self {
        CombatDataset { format_version: DATASET_FORMAT_VERSION, catalog_ref: catalog_ref.into(), source: source.into(), records }
    }

    /// Same metadata, different records.
    pub fn with_records(&self, records: Vec<CombatRecord>) -> Self {
        CombatDataset { records, ..self.clone_meta() }
    }

    fn clone_meta(&self) -> Self {
        CombatDataset { format_version: self.format_version, catalog_ref: self.catalog_ref.clone(), source: self.source.clone(), records: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn validate(&self, catalog: &UnitCatalog) -> Result<()> {
        for (i, r) in self.records.iter().enumerate() {
            r.validate(catalog).map_err(|e| Error::Invalid(format!("record {i}: {e}")))?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ds: CombatDataset = serde_json::from_str(text)?;
        if ds.format_version != DATASET_FORMAT_VERSION {
            return Err(Error::FormatVersion { found: ds.format_version, expected: DATASET_FORMAT_VERSION });
        }
        Ok(ds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("dataset serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}
