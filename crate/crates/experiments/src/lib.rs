//! Experiment layer for the spin-bath simulator: TOML configs, one-leap and
//! two-leap schedulers, reference comparisons, oscillation fits and CSV
//! output.

pub mod analysis;
pub mod compare;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod runner;

pub use compare::{benchmark_compare, Comparison};
pub use config::{emit_config, parse_config, ExperimentConfig};
pub use error::{ExperimentError, Result};
pub use runner::{run, run_one_leap, run_two_leap, RunReport};
