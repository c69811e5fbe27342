//! Energy-optimal allocation of active time slots, active antennas and
//! per-antenna transmit power for a multi-antenna OFDM base station.
//!
//! The crate is `no_std` (it needs `alloc`) and splits into:
//!
//! * [`power_model`]: the parametric base-station consumption model, its
//!   derivation from hardware sub-components, and the built-in presets.
//! * [`link_model`]: zero-forcing downlink quantities under i.i.d. Rayleigh
//!   fading (per-user power, per-antenna power, delivered rate).
//! * [`feasibility`]: the feasible domain in the `(x, y) = (N/N_a, M_a)`
//!   plane, minimal resource counts and the maximal rate scaling.
//! * [`cost`] and [`solver`]: the continuous relaxation, the Newton-based
//!   region dispatch and the integer finalization.
//! * [`strategies`] and [`oracle`]: single-domain benchmarks and an
//!   exhaustive discrete optimizer used as ground truth.
//! * [`scenario`]: seeded scenario generation.
//!
//! Enable the `serde` feature to (de)serialize the public data types.

#![no_std]
// `!(a <= b)` is how NaN inputs get rejected throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

mod error;
mod math;

pub mod cost;
pub mod feasibility;
pub mod link_model;
pub mod newton;
pub mod oracle;
pub mod power_model;
pub mod scenario;
pub mod solver;
pub mod strategies;

pub use error::{Error, Result};
pub use feasibility::{DomainPoint, Region};
pub use link_model::{Allocation, Scenario};
pub use power_model::{ComponentParams, Configuration, ConsumptionParams, PaParams, TdSavings};
pub use scenario::{ScenarioConfig, SnrDistribution};
pub use solver::{FinalizeMode, SolverConfig, SolverReport};
pub use strategies::Strategy;

/// Relative slack on the per-antenna power cap `P_a <= P_max`.
///
/// Every discrete feasibility decision in the crate (minimal resource counts,
/// integer finalization, brute force) goes through this one tolerance so that
/// points sitting exactly on the constraint boundary are classified the same
/// way everywhere.
pub const FEASIBILITY_RTOL: f64 = 1e-9;
