//! Learned parameter files.
//!
//! ```json
//! { "format_version": 1, "catalog_ref": "starcraft-bw",
//!   "dpf_matrix": { "k": 26, "per_pair": [...], ... },
//!   "borda_scores": { "ground_only": [...], "air_only": [...], "mixed": [...] },
//!   "provenance": { "dataset_source": "...", "records": 2000, "include_passive": false, "unobserved_pairs": [[0, 5]] } }
//! ```

use std::fs;
use std::path::Path;

use attrition_core::policy::BordaScores;
use attrition_core::{DpfTable, TargetSelectionPolicy, TypeId, UnitCatalog};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::{learn_borda_scores, learn_dpf, LearnConfig};
use crate::record::CombatDataset;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelProvenance {
    pub dataset_source: String,
    pub records: usize,
    pub include_passive: bool,
    pub unobserved_pairs: Vec<(TypeId, TypeId)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub catalog_ref: String,
    pub dpf_matrix: DpfTable,
    pub borda_scores: BordaScores,
    pub provenance: ModelProvenance,
}

impl ModelFile {
    /// Learns both DPF and Borda scores from a (filtered) training set.
    pub fn learn(ds: &CombatDataset, catalog: &UnitCatalog, cfg: &LearnConfig) -> Result<Self> {
        let dpf = learn_dpf(ds, catalog, cfg)?;
        let borda = learn_borda_scores(ds, catalog)?;
        Ok(ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            catalog_ref: catalog.catalog_id.clone(),
            dpf_matrix: dpf.table,
            borda_scores: borda,
            provenance: ModelProvenance {
                dataset_source: ds.source.clone(),
                records: ds.len(),
                include_passive: cfg.include_passive,
                unobserved_pairs: dpf.unobserved,
            },
        })
    }

    pub fn policy(&self) -> Result<TargetSelectionPolicy> {
        Ok(TargetSelectionPolicy::borda(self.borda_scores.clone())?)
    }

    pub fn check(&self, catalog: &UnitCatalog) -> Result<()> {
        self.dpf_matrix.check_shape(catalog)?;
        if self.borda_scores.as_array().iter().any(|v| v.len() != catalog.len()) {
            return Err(Error::Invalid(format!("Borda vectors must have length {}", catalog.len())));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: ModelFile = serde_json::from_str(text)?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::FormatVersion { found: m.format_version, expected: MODEL_FORMAT_VERSION });
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}
