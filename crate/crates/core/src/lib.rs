//! Core types and forward models for two-player attrition games.
//!
//! A combat is two armies of immobile units that damage each other until one
//! side is destroyed. This crate holds the shared domain types (unit-type
//! catalogs, units, combat states, damage-per-frame tables, target selection
//! policies), the static evaluators that need no simulation (`ltd`, `ltd2`,
//! destroy score), and four forward models that map an initial combat state to
//! a predicted final state and duration:
//!
//! - [`models::lanchester`]: closed-form square-law model with target selection,
//! - [`models::sustained`]: constant-DPF kill-time model split by air/ground,
//! - [`models::decreasing`]: unit-by-unit model where army DPF decays as units die,
//! - [`models::oracle`]: a discrete one-frame tick simulator used as a reference.

pub mod catalog;
pub mod dpf;
pub mod error;
pub mod evaluators;
pub mod models;
pub mod policy;
pub mod unit;

pub use catalog::{UnitCatalog, UnitTypeStats, CATALOG_FORMAT_VERSION};
pub use dpf::{project_min_dpf, static_dpf, DamageRates, DpfTable, MinProjection, PerUnitDpf, Provenance};
pub use error::{Error, Result};
pub use evaluators::{destroy_score, ltd, ltd2};
pub use models::{CombatModel, CombatOutcome, ModelKind, Winner};
pub use policy::{ArmyComposition, TargetSelectionPolicy};
pub use unit::{CombatState, Position, Unit};

/// Type indices are dense, `0..k`.
pub type TypeId = usize;
/// Unit identifiers, unique across both armies of a combat.
pub type Uid = u32;

/// Relative tolerance used when two kill times (or force ratios) are compared for a tie.
pub const TIE_TOLERANCE: f64 = 1e-9;

pub(crate) fn nearly_equal(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
}
