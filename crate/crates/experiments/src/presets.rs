//! Named benchmark geometries.

use crate::config::{CompareConfig, ExperimentConfig, ModelConfig, Schedule};
use crate::error::{ExperimentError, Result};

pub const PRESET_NAMES: [&str; 8] = [
    "table1-test1",
    "table1-test2",
    "table1-test3",
    "table2-test4",
    "table2-test5",
    "table3-test6",
    "table3-test7",
    "table3-test8",
];

fn one_leap(time_unit: f64, leap: u64, steps: u64) -> Schedule {
    Schedule::OneLeap { time_unit, leap, steps }
}

fn two_leap(long_leap: u64) -> Schedule {
    Schedule::TwoLeap { time_unit: 0.02, long_leap, short_leap: 1, short_count: 21, repeats: 8 }
}

/// The named preset with a full comparison triple. The time unit is the
/// Trotter step of the benchmark; the bath has 16 spins.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let oscillation = ModelConfig::default();
    let pointer = ModelConfig::Pointer { bath_spins: 16, j: 0.1, h: 0.1, u_max: 0.013, a_range: [-0.5, 0.0], seed: 1 };
    let (model, schedule) = match name {
        "table1-test1" => (oscillation, one_leap(0.035, 200, 8)),
        "table1-test2" => (oscillation, one_leap(0.035, 8, 200)),
        "table1-test3" => (oscillation, one_leap(0.035, 2, 800)),
        "table2-test4" => (oscillation, two_leap(150)),
        "table2-test5" => (oscillation, two_leap(300)),
        "table3-test6" => (pointer, one_leap(0.14, 100, 500)),
        "table3-test7" => (pointer, one_leap(0.14, 10, 5000)),
        "table3-test8" => (pointer, one_leap(0.14, 1000, 50)),
        _ => {
            return Err(ExperimentError::invalid(
                "preset",
                format!("unknown preset `{name}`; known: {}", PRESET_NAMES.join(", ")),
            ))
        }
    };
    let mut cfg = ExperimentConfig::new(model);
    cfg.schedule = schedule;
    cfg.compare = Some(CompareConfig::default());
    Ok(cfg)
}
