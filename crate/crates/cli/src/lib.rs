//! Driver layer for the `uwqkd` binary: TOML configuration with unit-aware
//! values, parallel distance sweeps with a fixed CSV layout, and the
//! secure-distance solvers.

pub mod config;
pub mod error;
pub mod sweep;
pub mod thresholds;
pub mod units;

pub use config::{load_config, parse_config, RunConfig};
pub use error::CliError;
pub use sweep::{read_csv, run_sweep, write_csv, McSettings, Row, SweepSpec, CSV_HEADER};
pub use thresholds::{solve_thresholds, Crossing, SearchRange, ThresholdReport};
