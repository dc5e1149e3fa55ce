//! Excitation-energy transfer on dipole-coupled aggregates, computed three
//! ways: exact one-exciton quantum dynamics, coupled classical oscillators,
//! and the truncated second-order ("rotating") classical dynamics.
//!
//! Energies cross the API in cm⁻¹. Internally ħ = 1 and every model carries a
//! [`TimeBase`] that fixes the time unit (fs, or chain time τ = 2Vt).

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analytics;
pub mod classical;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod hamiltonian;
pub mod model;
pub mod quantum;
pub mod rca;
pub mod scenarios;
pub mod trajectory;
pub mod units;

pub use error::{Error, Result};
pub use hamiltonian::{CouplingMatrix, SiteModel};
pub use model::{AggregateSpec, ClassicalState, QuantumState};
pub use rca::{compare, DeviationReport};
pub use scenarios::{run_chain, run_fmo, ChainScenario, FmoScenario};
pub use trajectory::{DynamicsKind, Trajectory};
pub use units::{TimeBase, TimeUnit};
