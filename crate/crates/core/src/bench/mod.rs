//! Reproducible experiment runs: configuration, the three pipelines, sweeps
//! over K and S, and their CSV/PGM/weight outputs.

pub mod config;
pub mod pipeline;
pub mod record;
pub mod sweep;

pub use config::{ExperimentConfig, Pipeline, Settings};
pub use pipeline::{execute, run_cell, run_spi_blind, run_spi_known, run_trpe_attack, CellOutput};
pub use record::{ResultRecord, ResultRow, RESULTS_HEADER};
pub use sweep::{expand_grid, run_sweep, with_workers};
