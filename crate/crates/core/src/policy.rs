//! Target selection policies: given an army about to be attacked, the order in
//! which its units are destroyed.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::UnitCatalog;
use crate::error::{Error, Result};
use crate::evaluators::destroy_score;
use crate::unit::Unit;

/// Which of the three Borda score vectors applies depends on what the attacking army is made of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmyComposition {
    GroundOnly,
    AirOnly,
    Mixed,
}

impl ArmyComposition {
    pub const ALL: [ArmyComposition; 3] = [ArmyComposition::GroundOnly, ArmyComposition::AirOnly, ArmyComposition::Mixed];

    /// An empty army counts as ground-only.
    pub fn of(army: &[Unit], catalog: &UnitCatalog) -> Self {
        Self::of_types(army.iter().map(|u| u.type_id), catalog)
    }

    pub fn of_types(types: impl IntoIterator<Item = usize>, catalog: &UnitCatalog) -> Self {
        let (mut air, mut ground) = (false, false);
        for t in types {
            if catalog.stats(t).is_flyer {
                air = true;
            } else {
                ground = true;
            }
        }
        match (ground, air) {
            (true, true) => ArmyComposition::Mixed,
            (false, true) => ArmyComposition::AirOnly,
            _ => ArmyComposition::GroundOnly,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Average Borda score per unit type, one vector per attacker composition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BordaScores {
    pub ground_only: Vec<f64>,
    pub air_only: Vec<f64>,
    pub mixed: Vec<f64>,
}

impl BordaScores {
    pub fn uniform(scores: Vec<f64>) -> Self {
        BordaScores { ground_only: scores.clone(), air_only: scores.clone(), mixed: scores }
    }

    pub fn for_composition(&self, c: ArmyComposition) -> &[f64] {
        match c {
            ArmyComposition::GroundOnly => &self.ground_only,
            ArmyComposition::AirOnly => &self.air_only,
            ArmyComposition::Mixed => &self.mixed,
        }
    }

    pub fn as_array(&self) -> [&[f64]; 3] {
        [&self.ground_only, &self.air_only, &self.mixed]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSelectionPolicy {
    /// Uniformly shuffled order, reproducible from the seed and the set of uids.
    Random { seed: u64 },
    /// Highest destroy score first.
    DestroyScore,
    /// Highest average Borda score first.
    BordaCount { scores: BordaScores },
}

impl TargetSelectionPolicy {
    pub fn borda(scores: BordaScores) -> Result<Self> {
        if scores.as_array().iter().any(|v| v.iter().any(|s| !s.is_finite())) {
            return Err(Error::Catalog("Borda scores must be finite".into()));
        }
        Ok(TargetSelectionPolicy::BordaCount { scores })
    }

    pub fn name(&self) -> &'static str {
        match self {
            TargetSelectionPolicy::Random { .. } => "random",
            TargetSelectionPolicy::DestroyScore => "destroy_score",
            TargetSelectionPolicy::BordaCount { .. } => "borda",
        }
    }

    /// Destruction order of `targets` when attacked by `attackers`, as indices into `targets`.
    pub fn order(&self, targets: &[Unit], attackers: &[Unit], catalog: &UnitCatalog) -> Vec<usize> {
        self.order_against(targets, ArmyComposition::of(attackers, catalog), catalog)
    }

    pub fn order_against(&self, targets: &[Unit], attacker: ArmyComposition, catalog: &UnitCatalog) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..targets.len()).collect();
        idx.sort_by_key(|&i| targets[i].uid);
        match self {
            TargetSelectionPolicy::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_uids(*seed, idx.iter().map(|&i| targets[i].uid)));
                idx.shuffle(&mut rng);
            }
            TargetSelectionPolicy::DestroyScore => {
                sort_desc_by(&mut idx, |i| destroy_score(catalog.stats(targets[i].type_id)));
            }
            TargetSelectionPolicy::BordaCount { scores } => {
                let s = scores.for_composition(attacker);
                sort_desc_by(&mut idx, |i| s.get(targets[i].type_id).copied().unwrap_or(0.0));
            }
        }
        idx
    }

    /// Returns `targets` reordered by [`order`](Self::order).
    pub fn sorted(&self, targets: &[Unit], attackers: &[Unit], catalog: &UnitCatalog) -> Vec<Unit> {
        self.order(targets, attackers, catalog).into_iter().map(|i| targets[i].clone()).collect()
    }
}

// `idx` arrives sorted by uid; a stable sort keeps that as the tie-break.
fn sort_desc_by(idx: &mut [usize], key: impl Fn(usize) -> f64) {
    idx.sort_by(|&a, &b| key(b).partial_cmp(&key(a)).unwrap_or(Ordering::Equal));
}

fn mix_uids(seed: u64, uids: impl Iterator<Item = u32>) -> u64 {
    let mut h = splitmix(seed);
    for u in uids {
        h = splitmix(h ^ u64::from(u));
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
