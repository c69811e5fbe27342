//! Experiment harness around [`bsopt_core`]: load sweeps, Monte Carlo CDFs,
//! oracle comparisons, JSON inputs and CSV outputs.

pub mod config;
pub mod csv_io;
pub mod error;
pub mod harness;

pub use error::{HarnessError, Result};
pub use harness::{
    monte_carlo_cdf, oracle_check, sweep_load, CdfLabels, CdfResult, CdfRow, OracleGaps, SweepResult, SweepRow,
};
