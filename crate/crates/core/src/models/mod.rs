//! Forward combat models: `<A0, B0>` in, `<Af, Bf, t>` out.

pub mod decreasing;
pub mod lanchester;
pub mod oracle;
pub mod sustained;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::UnitCatalog;
use crate::dpf::{project_min_dpf, DpfTable};
use crate::policy::TargetSelectionPolicy;
use crate::unit::{CombatState, Unit};

pub use decreasing::decreasing_simulate;
pub use lanchester::{lanchester_simulate, lanchester_state_at, LanchesterParams};
pub use oracle::{tick_oracle_run, tick_oracle_simulate, OracleConfig, OracleRun, OracleTargeting};
pub use sustained::sustained_simulate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    A,
    B,
    Draw,
    /// Neither side can finish the other.
    Stalemate,
}

impl Winner {
    pub fn swapped(self) -> Self {
        match self {
            Winner::A => Winner::B,
            Winner::B => Winner::A,
            w => w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    TsLanchester,
    Sustained,
    Decreasing,
    TickOracle,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::TsLanchester, ModelKind::Sustained, ModelKind::Decreasing, ModelKind::TickOracle];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::TsLanchester => "ts_lanchester",
            ModelKind::Sustained => "sustained",
            ModelKind::Decreasing => "decreasing",
            ModelKind::TickOracle => "tick_oracle",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ts_lanchester" | "lanchester" | "ts_lanchester2" => Ok(ModelKind::TsLanchester),
            "sustained" => Ok(ModelKind::Sustained),
            "decreasing" => Ok(ModelKind::Decreasing),
            "tick_oracle" | "oracle" => Ok(ModelKind::TickOracle),
            other => Err(format!("unknown model '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombatOutcome {
    pub survivors_a: Vec<Unit>,
    pub survivors_b: Vec<Unit>,
    /// Always finite; a stalemate reports the time simulated before it was detected.
    pub duration_frames: f64,
    pub winner: Winner,
    pub model: ModelKind,
    /// A survivor radicand came out negative through rounding and was clamped to zero.
    #[serde(default)]
    pub radicand_clamped: bool,
}

impl CombatOutcome {
    pub(crate) fn stalemate(state: &CombatState, model: ModelKind, duration_frames: f64) -> Self {
        CombatOutcome {
            survivors_a: state.army_a.clone(),
            survivors_b: state.army_b.clone(),
            duration_frames,
            winner: Winner::Stalemate,
            model,
            radicand_clamped: false,
        }
    }

    pub(crate) fn draw(model: ModelKind, duration_frames: f64) -> Self {
        CombatOutcome {
            survivors_a: Vec::new(),
            survivors_b: Vec::new(),
            duration_frames,
            winner: Winner::Draw,
            model,
            radicand_clamped: false,
        }
    }

    /// The same outcome seen from the other side.
    pub fn swapped(&self) -> Self {
        CombatOutcome {
            survivors_a: self.survivors_b.clone(),
            survivors_b: self.survivors_a.clone(),
            winner: self.winner.swapped(),
            ..self.clone()
        }
    }
}

/// Per-army aggregates shared by the Lanchester and Sustained models.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ArmyAggregates {
    /// Summed health (hp + shield) of flyers.
    pub hp_air: f64,
    /// Summed health of everything else.
    pub hp_ground: f64,
    /// DPF of units that can hit air only.
    pub dpf_air: f64,
    /// DPF of units that can hit ground only.
    pub dpf_ground: f64,
    /// DPF of units that can hit both.
    pub dpf_both: f64,
    pub avg_hp: f64,
    pub n_units: usize,
    /// Mean over all units of the DPF each can deal to air (zero for those that cannot).
    pub mean_dpf_air: f64,
    pub mean_dpf_ground: f64,
}

impl ArmyAggregates {
    pub fn of(army: &[Unit], dpf: &[f64], catalog: &UnitCatalog) -> Self {
        let mut a = ArmyAggregates { n_units: army.len(), ..Default::default() };
        for u in army {
            let t = catalog.stats(u.type_id);
            if t.is_flyer {
                a.hp_air += u.health();
            } else {
                a.hp_ground += u.health();
            }
            let d = dpf[u.type_id];
            match (t.hits_ground(), t.hits_air()) {
                (true, true) => a.dpf_both += d,
                (true, false) => a.dpf_ground += d,
                (false, true) => a.dpf_air += d,
                (false, false) => {}
            }
        }
        if a.n_units > 0 {
            let n = a.n_units as f64;
            a.avg_hp = (a.hp_air + a.hp_ground) / n;
            a.mean_dpf_air = (a.dpf_air + a.dpf_both) / n;
            a.mean_dpf_ground = (a.dpf_ground + a.dpf_both) / n;
        }
        a
    }

    pub fn total_dpf(&self) -> f64 {
        self.dpf_air + self.dpf_ground + self.dpf_both
    }
}

/// A configured forward model: kind, DPF parameters and target selection policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombatModel {
    pub kind: ModelKind,
    pub table: DpfTable,
    /// Per-type vector used by the aggregate models, `min_j DPF(i, j)`.
    pub vector: Vec<f64>,
    pub policy: TargetSelectionPolicy,
    pub oracle: OracleConfig,
}

impl CombatModel {
    pub fn new(kind: ModelKind, table: DpfTable, policy: TargetSelectionPolicy) -> Self {
        let vector = project_min_dpf(&table).values;
        CombatModel { kind, table, vector, policy, oracle: OracleConfig::default() }
    }

    pub fn with_oracle(mut self, oracle: OracleConfig) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn simulate(&self, catalog: &UnitCatalog, state: &CombatState) -> CombatOutcome {
        match self.kind {
            ModelKind::TsLanchester => lanchester_simulate(state, &self.vector, &self.policy, catalog),
            ModelKind::Sustained => sustained_simulate(state, &self.vector, &self.policy, catalog),
            ModelKind::Decreasing => decreasing_simulate(state, &self.table, &self.policy, catalog),
            ModelKind::TickOracle => tick_oracle_run(state, &self.table, &self.policy, catalog, &self.oracle, |_| {}).outcome,
        }
    }
}

/// Spends `budget` damage on `victims` in `order`, skipping the ones `can_hit`
/// rejects. Returns the survivors in their original order.
pub(crate) fn spend_budget(victims: &[Unit], order: &[usize], budget: f64, can_hit: impl Fn(&Unit) -> bool) -> Vec<Unit> {
    let mut alive: Vec<Option<Unit>> = victims.iter().cloned().map(Some).collect();
    spend_on(&mut alive, order, budget, can_hit);
    alive.into_iter().flatten().collect()
}

/// Like [`spend_budget`], in place; killed units become `None`.
pub(crate) fn spend_on(alive: &mut [Option<Unit>], order: &[usize], mut budget: f64, can_hit: impl Fn(&Unit) -> bool) {
    for &i in order {
        if budget <= 0.0 {
            break;
        }
        let Some(u) = alive[i].as_mut() else { continue };
        if !can_hit(u) {
            continue;
        }
        let h = u.health();
        if budget >= h * (1.0 - crate::TIE_TOLERANCE) {
            budget -= h;
            alive[i] = None;
        } else {
            u.apply_damage(budget);
            budget = 0.0;
        }
    }
}
