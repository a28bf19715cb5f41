//! Dynamic muscle fatigue model.
//!
//! - [`model`]: capacity decay, fatigue index and maximum endurance time
//! - [`met_bank`]: published static endurance-time models
//! - [`validation`] and [`stats`]: agreement of the dynamic MET curve with
//!   the static models (Pearson r, one-way ICC)
//! - [`reference`]: motor-unit and reservoir fatigue models used for
//!   dynamic comparisons
//! - [`numerics`]: fixed-step RK4 and finite differences
//! - [`io`] and [`config`]: CSV formats and JSON run configuration

pub mod config;
pub mod error;
pub mod io;
pub mod met_bank;
pub mod model;
pub mod numerics;
pub mod reference;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};
pub use met_bank::{static_met, Group, HuijgensVariant, MetBank, StaticMetModel};
pub use model::{
    capacity_at, cumulative_normalized_load, fatigue_index_at, fatigue_index_rate, met, trajectory,
    FatigueTrajectory, LoadProfile, MuscleParams, NormalizedLoad, Segment,
};
pub use validation::{default_grid, run_static_validation, FmvcGrid, ValidationReport};
