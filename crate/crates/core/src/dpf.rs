//! Damage-per-frame parameters.
//!
//! A [`DpfTable`] is the k×k matrix `DPF(i, j)` (damage per frame a type-`i`
//! unit deals to a type-`j` unit), plus per-domain projections. The per-type
//! vector used by the aggregate models is obtained with [`project_min_dpf`].

use serde::{Deserialize, Serialize};

use crate::catalog::UnitCatalog;
use crate::error::{Error, Result};
use crate::TypeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Static,
    Learned,
}

/// Anything that can answer "how much damage per frame does type `a` deal to type `t`".
pub trait DamageRates {
    fn rate(&self, attacker: TypeId, target: TypeId) -> f64;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpfTable {
    pub k: usize,
    /// Row-major, `per_pair[i * k + j]`.
    pub per_pair: Vec<f64>,
    pub per_unit_ground: Vec<f64>,
    pub per_unit_air: Vec<f64>,
    /// Entries that carry information: structurally attackable and, for learned
    /// tables, actually observed.
    pub valid: Vec<bool>,
    pub provenance: Provenance,
}

impl DpfTable {
    /// Builds a table from a raw matrix. Entries for pairs the catalog says are
    /// unattackable are forced to zero and marked invalid.
    pub fn from_pairs(catalog: &UnitCatalog, mut per_pair: Vec<f64>, mut valid: Vec<bool>, provenance: Provenance) -> Result<Self> {
        let k = catalog.len();
        if per_pair.len() != k * k || valid.len() != k * k {
            return Err(Error::Catalog(format!("DPF matrix must be {k}x{k}")));
        }
        if per_pair.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Catalog("DPF entries must be finite and >= 0".into()));
        }
        for i in 0..k {
            for j in 0..k {
                if !catalog.can_hit(i, j) {
                    per_pair[i * k + j] = 0.0;
                    valid[i * k + j] = false;
                }
            }
        }
        let domain_min = |flyer: bool| -> Vec<f64> {
            (0..k)
                .map(|i| {
                    (0..k)
                        .filter(|&j| catalog.stats(j).is_flyer == flyer && valid[i * k + j])
                        .map(|j| per_pair[i * k + j])
                        .fold(f64::INFINITY, f64::min)
                })
                .map(|v| if v.is_finite() { v } else { 0.0 })
                .collect()
        };
        let per_unit_ground = domain_min(false);
        let per_unit_air = domain_min(true);
        Ok(DpfTable { k, per_pair, per_unit_ground, per_unit_air, valid, provenance })
    }

    /// Table whose row `i` is the constant `values[i]` on every attackable pair.
    pub fn from_vector(catalog: &UnitCatalog, values: &[f64], provenance: Provenance) -> Result<Self> {
        let k = catalog.len();
        if values.len() != k {
            return Err(Error::Catalog(format!("DPF vector must have length {k}")));
        }
        let per_pair = (0..k * k).map(|ij| values[ij / k]).collect();
        DpfTable::from_pairs(catalog, per_pair, vec![true; k * k], provenance)
    }

    pub fn get(&self, attacker: TypeId, target: TypeId) -> f64 {
        self.per_pair[attacker * self.k + target]
    }

    pub fn is_valid(&self, attacker: TypeId, target: TypeId) -> bool {
        self.valid[attacker * self.k + target]
    }

    pub fn row(&self, attacker: TypeId) -> &[f64] {
        &self.per_pair[attacker * self.k..(attacker + 1) * self.k]
    }

    /// Checks shape after deserialization.
    pub fn check_shape(&self, catalog: &UnitCatalog) -> Result<()> {
        let k = catalog.len();
        if self.k != k
            || self.per_pair.len() != k * k
            || self.valid.len() != k * k
            || self.per_unit_air.len() != k
            || self.per_unit_ground.len() != k
        {
            return Err(Error::Catalog(format!("DPF table shape does not match a catalog of {k} types")));
        }
        Ok(())
    }
}

impl DamageRates for DpfTable {
    fn rate(&self, attacker: TypeId, target: TypeId) -> f64 {
        self.get(attacker, target)
    }
}

/// A per-type DPF vector viewed as damage rates: type `i` deals `values[i]` to
/// anything it can hit.
#[derive(Debug, Clone, Copy)]
pub struct PerUnitDpf<'a> {
    pub values: &'a [f64],
    pub catalog: &'a UnitCatalog,
}

impl DamageRates for PerUnitDpf<'_> {
    fn rate(&self, attacker: TypeId, target: TypeId) -> f64 {
        if self.catalog.can_hit(attacker, target) {
            self.values[attacker]
        } else {
            0.0
        }
    }
}

/// Static DPF straight from weapon stats: `damage / cooldown` for the target's domain.
pub fn static_dpf(catalog: &UnitCatalog) -> DpfTable {
    let k = catalog.len();
    let mut per_pair = vec![0.0; k * k];
    for (i, a) in catalog.types().iter().enumerate() {
        for (j, t) in catalog.types().iter().enumerate() {
            if a.can_hit(t) {
                per_pair[i * k + j] = if t.is_flyer {
                    a.weapon_damage_air / a.cooldown_air
                } else {
                    a.weapon_damage_ground / a.cooldown_ground
                };
            }
        }
    }
    DpfTable::from_pairs(catalog, per_pair, vec![true; k * k], Provenance::Static)
        .expect("static table from a validated catalog")
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinProjection {
    pub values: Vec<f64>,
    /// Types with no valid target at all; their entry is 0.
    pub unarmed: Vec<TypeId>,
}

/// `DPF(i) = min_j DPF(i, j)` over the targets type `i` can actually attack.
pub fn project_min_dpf(table: &DpfTable) -> MinProjection {
    let mut unarmed = Vec::new();
    let values = (0..table.k)
        .map(|i| {
            let m = (0..table.k)
                .filter(|&j| table.is_valid(i, j))
                .map(|j| table.get(i, j))
                .fold(f64::INFINITY, f64::min);
            if m.is_finite() {
                m
            } else {
                unarmed.push(i);
                0.0
            }
        })
        .collect();
    MinProjection { values, unarmed }
}
