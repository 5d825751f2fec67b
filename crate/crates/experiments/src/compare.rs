//! Reference / candidate / baseline comparisons over one scenario.

use std::time::Instant;

use serde::Serialize;
use spinbath_core::observables::delta_metric;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::runner::{build_scenario, run_scenario, RunReport};

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub reference: RunReport,
    pub candidate: RunReport,
    pub baseline: RunReport,
    /// Baseline native operations per unit time over candidate native
    /// operations per unit time (term exponentials over `G` applications
    /// for the default triple).
    pub count_ratio: Option<f64>,
    /// The same ratio in single-term operations.
    pub work_ratio: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Runs the three propagators of `cfg.compare` (defaults if absent) on one
/// sampled scenario and fills in `delta` for the candidate and baseline.
pub fn benchmark_compare(cfg: &ExperimentConfig) -> Result<Comparison> {
    let triple = cfg.compare.clone().unwrap_or_default();
    let mut cfg = cfg.clone();
    cfg.compare = Some(triple.clone());
    cfg.validate()?;

    let setup_start = Instant::now();
    let scenario = build_scenario(&cfg)?;
    let sampling = setup_start.elapsed();
    let run = |p| {
        // each run is charged the shared sampling time plus its own plans
        let start = Instant::now().checked_sub(sampling).unwrap_or_else(Instant::now);
        run_scenario(&cfg, &scenario, p, start)
    };
    let reference = run(&triple.reference)?;
    let mut candidate = run(&triple.candidate)?;
    let mut baseline = run(&triple.baseline)?;
    candidate.delta = Some(delta_metric(&reference.series, &candidate.series)?);
    baseline.delta = Some(delta_metric(&reference.series, &baseline.series)?);

    // all three cover the same total time, so per-unit-time rates cancel
    let count_ratio = ratio(baseline.counts.native(), candidate.counts.native());
    let work_ratio = ratio(baseline.counts.term_operations(), candidate.counts.term_operations());
    Ok(Comparison { reference, candidate, baseline, count_ratio, work_ratio })
}
