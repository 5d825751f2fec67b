//! One-leap and two-leap schedulers.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::Serialize;
use spinbath_core::chebyshev::ChebyshevPropagator;
use spinbath_core::hilbert::{product_state, random_bath_state};
use spinbath_core::model::{oscillation_preset_in, pointer_preset_in, CouplingRange};
use spinbath_core::observables::{
    pointer_analysis, record_from_rho, reduced_density_matrix, ObservableRecord, ReducedDensityMatrix,
};
use spinbath_core::trotter::{propagate_steps, TrotterPlan};
use spinbath_core::{SpinModel, StateVector};

use crate::analysis::{fit_oscillation, OscillationFit};
use crate::config::{ExperimentConfig, ModelConfig, PropagatorConfig, Schedule, SystemState};
use crate::error::{ExperimentError, Result};

/// Model and initial state of one physical scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub model: SpinModel,
    pub initial: StateVector,
    /// `Σ A_n²` for the pointer preset.
    pub coupling_b: Option<f64>,
}

fn range(r: [f64; 2]) -> CouplingRange {
    CouplingRange { lo: r[0], hi: r[1] }
}

/// Samples couplings and the bath state as the config dictates.
pub fn build_scenario(cfg: &ExperimentConfig) -> Result<Scenario> {
    cfg.validate()?;
    let (model, coupling_b) = match cfg.model {
        ModelConfig::Oscillation { bath_spins, j, a_range, seed } => {
            (oscillation_preset_in(bath_spins, j, range(a_range), seed)?, None)
        }
        ModelConfig::Pointer { bath_spins, j, h, u_max, a_range, seed } => {
            let p = pointer_preset_in(bath_spins, j, h, u_max, range(a_range), seed)?;
            (p.model, Some(p.b))
        }
        ModelConfig::Custom { central_spins, bath_spins, ref terms } => {
            (SpinModel::from_terms(spinbath_core::Basis::new(central_spins, bath_spins)?, terms.iter().cloned())?, None)
        }
    };
    let basis = model.basis();
    let system = system_state(cfg, basis.central())?;
    let bath = if basis.bath() == 0 {
        StateVector::basis_state(1, 0)?
    } else {
        random_bath_state(basis.bath(), cfg.initial.bath_seed)?
    };
    let initial = product_state(&system, &bath)?;
    Ok(Scenario { model, initial, coupling_b })
}

fn system_state(cfg: &ExperimentConfig, central: usize) -> Result<StateVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // bit m set means spin m is down: |↑↓⟩ = 0b10, |↓↑⟩ = 0b01
    let mut amps = vec![C64::new(0.0, 0.0); 1 << central];
    match cfg.system_state() {
        SystemState::UpDown => amps[0b10] = C64::new(1.0, 0.0),
        SystemState::Singlet => {
            amps[0b10] = C64::new(h, 0.0);
            amps[0b01] = C64::new(-h, 0.0);
        }
        SystemState::Custom => {
            let given =
                cfg.initial.amplitudes.as_ref().ok_or_else(|| {
                    ExperimentError::invalid("initial.amplitudes", "required when system = \"custom\"")
                })?;
            for (slot, [re, im]) in amps.iter_mut().zip(given) {
                *slot = C64::new(*re, *im);
            }
        }
    }
    let mut s = StateVector::new(amps)?;
    s.normalize()?;
    Ok(s)
}

/// Work done by a propagator over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OperationCounts {
    pub leaps: u64,
    /// Chebyshev applications of the rescaled Hamiltonian.
    pub g_applications: u64,
    pub trotter_steps: u64,
    /// Single-term exponentials applied by Trotter steps.
    pub term_exponentials: u64,
    /// Hamiltonian terms, i.e. the single-term work in one `G` application.
    pub terms: u64,
}

impl OperationCounts {
    /// The method's own unit of work: `G` applications or term exponentials.
    pub fn native(&self) -> u64 {
        self.g_applications + self.term_exponentials
    }

    /// Work in single-term operations, comparable across methods.
    pub fn term_operations(&self) -> u64 {
        self.g_applications * self.terms + self.term_exponentials
    }
}

/// Chebyshev order data for one leap length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeapSummary {
    pub units: u64,
    pub length: f64,
    pub tau: f64,
    pub order: usize,
    pub tail_coefficient: f64,
    pub g_applications: usize,
}

/// Worst departures of `ρ_S` from a density matrix over a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoHealth {
    pub max_hermiticity_error: f64,
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
}

impl Default for RhoHealth {
    fn default() -> Self {
        Self { max_hermiticity_error: 0.0, max_trace_error: 0.0, min_eigenvalue: f64::INFINITY }
    }
}

impl RhoHealth {
    fn update(&mut self, rho: &ReducedDensityMatrix) {
        self.max_hermiticity_error = self.max_hermiticity_error.max(rho.hermiticity_error());
        self.max_trace_error = self.max_trace_error.max((rho.trace() - 1.0).norm());
        let weights = pointer_analysis(rho).weights;
        self.min_eigenvalue = self.min_eigenvalue.min(weights.last().copied().unwrap_or(0.0));
    }

    /// Hermitian, unit trace and positive semidefinite within `tol`.
    pub fn within(&self, tol: f64) -> bool {
        self.max_hermiticity_error <= tol && self.max_trace_error <= tol && self.min_eigenvalue >= -tol
    }
}

/// Fit of the first central spin's `2⟨S^z⟩` over one two-leap burst.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BurstFit {
    pub start: f64,
    pub end: f64,
    pub fit: Option<OscillationFit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    /// The config as run, defaults filled.
    pub config: ExperimentConfig,
    /// The model with every sampled coupling written out.
    pub resolved_model: ModelConfig,
    pub coupling_b: Option<f64>,
    pub propagator: PropagatorConfig,
    #[serde(skip)]
    pub series: Vec<ObservableRecord>,
    /// Error metric against a reference series, filled by comparisons.
    pub delta: Option<f64>,
    pub counts: OperationCounts,
    pub leaps: Vec<LeapSummary>,
    /// Largest `|‖Ψ‖ − 1|` after any leap.
    pub max_norm_drift: f64,
    /// Largest change of `‖Ψ‖` across a single leap.
    pub max_leap_norm_change: f64,
    pub rho_health: RhoHealth,
    pub final_rho: ReducedDensityMatrix,
    pub bursts: Vec<BurstFit>,
    /// Model sampling, state construction and propagator plans.
    pub setup_seconds: f64,
    /// Propagation only.
    pub propagate_seconds: f64,
    /// Reduced density matrices and observables.
    pub measure_seconds: f64,
    pub warnings: Vec<String>,
}

enum Engine {
    Chebyshev { propagator: ChebyshevPropagator, unit: f64 },
    Trotter { plan: TrotterPlan, steps: BTreeMap<u64, u64> },
}

impl Engine {
    fn new(model: &SpinModel, propagator: &PropagatorConfig, schedule: &Schedule) -> Result<(Self, Vec<LeapSummary>)> {
        let unit = schedule.time_unit();
        if let PropagatorConfig::Trotter { order, .. } = *propagator {
            let dt = propagator.trotter_dt(schedule).expect("Trotter config has a step");
            let plan = TrotterPlan::with_order(model, dt, order)?;
            let mut steps = BTreeMap::new();
            for units in schedule.distinct_leaps() {
                steps.insert(units, plan.steps_for(units as f64 * unit)?);
            }
            return Ok((Self::Trotter { plan, steps }, vec![]));
        }
        let epsilon = propagator.epsilon().expect("non-Trotter propagators carry a cutoff");
        let mut prop = ChebyshevPropagator::new(model, epsilon)?;
        let bound = prop.bound();
        let mut summaries = Vec::new();
        for units in schedule.distinct_leaps() {
            let length = units as f64 * unit;
            let plan = prop.plan(length)?;
            summaries.push(LeapSummary {
                units,
                length,
                tau: bound.tau(length),
                order: plan.order,
                tail_coefficient: plan.tail_coefficient(),
                g_applications: plan.order.saturating_sub(1),
            });
        }
        Ok((Self::Chebyshev { propagator: prop, unit }, summaries))
    }

    fn advance(&mut self, state: &mut StateVector, units: u64, counts: &mut OperationCounts) -> Result<()> {
        counts.leaps += 1;
        match self {
            Self::Chebyshev { propagator, unit } => {
                let d = propagator.propagate(state, units as f64 * *unit)?;
                counts.g_applications += d.g_applications as u64;
            }
            Self::Trotter { plan, steps } => {
                let d = propagate_steps(state, plan, steps[&units])?;
                counts.trotter_steps += d.steps;
                counts.term_exponentials += d.term_exponentials;
            }
        }
        Ok(())
    }
}

/// Runs the configured schedule with the configured propagator.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    run_with(cfg, &cfg.propagator)
}

/// `steps` leaps of one length, recording after each.
pub fn run_one_leap(cfg: &ExperimentConfig) -> Result<RunReport> {
    match cfg.schedule {
        Schedule::OneLeap { .. } => run(cfg),
        Schedule::TwoLeap { .. } => Err(ExperimentError::invalid("schedule.kind", "expected \"one-leap\"")),
    }
}

/// Long leap plus a burst of short leaps, repeated; every leap is recorded
/// and each burst gets an oscillation fit.
pub fn run_two_leap(cfg: &ExperimentConfig) -> Result<RunReport> {
    match cfg.schedule {
        Schedule::TwoLeap { .. } => run(cfg),
        Schedule::OneLeap { .. } => Err(ExperimentError::invalid("schedule.kind", "expected \"two-leap\"")),
    }
}

/// Runs `cfg`'s scenario and schedule with an explicit propagator.
pub fn run_with(cfg: &ExperimentConfig, propagator: &PropagatorConfig) -> Result<RunReport> {
    let setup_start = Instant::now();
    let scenario = build_scenario(cfg)?;
    run_scenario(cfg, &scenario, propagator, setup_start)
}

/// Runs a prebuilt scenario, so that comparisons share one sampling.
pub fn run_scenario(
    cfg: &ExperimentConfig,
    scenario: &Scenario,
    propagator: &PropagatorConfig,
    setup_start: Instant,
) -> Result<RunReport> {
    let mut probe = cfg.clone();
    probe.propagator = propagator.clone();
    probe.validate()?;

    let model = &scenario.model;
    let basis = model.basis();
    let schedule = &cfg.schedule;
    let unit = schedule.time_unit();
    let (mut engine, leaps) = Engine::new(model, propagator, schedule)?;
    let mut state = scenario.initial.clone();
    let mut counts = OperationCounts { terms: model.term_count() as u64, ..Default::default() };
    let warnings = schedule.warnings();
    for w in &warnings {
        log::warn!("{w}");
    }
    let setup_seconds = setup_start.elapsed().as_secs_f64();

    let mut series = Vec::new();
    let mut health = RhoHealth::default();
    let mut final_rho = reduced_density_matrix(&state, basis.central())?;
    let mut elapsed_units = 0u64;
    let mut norm = state.norm();
    let mut max_norm_drift = (norm - 1.0).abs();
    let mut max_leap_norm_change = 0.0f64;
    let (mut propagate_seconds, mut measure_seconds) = (0.0, 0.0);

    for units in schedule.leaps() {
        let t0 = Instant::now();
        engine.advance(&mut state, units, &mut counts)?;
        propagate_seconds += t0.elapsed().as_secs_f64();
        elapsed_units += units;
        let next = state.norm();
        max_leap_norm_change = max_leap_norm_change.max((next - norm).abs());
        max_norm_drift = max_norm_drift.max((next - 1.0).abs());
        norm = next;

        let t1 = Instant::now();
        final_rho = reduced_density_matrix(&state, basis.central())?;
        health.update(&final_rho);
        series.push(record_from_rho(&final_rho, basis.central(), elapsed_units as f64 * unit, &cfg.observables));
        measure_seconds += t1.elapsed().as_secs_f64();
    }
    debug_assert_eq!(elapsed_units, schedule.total_units());

    let bursts = burst_fits(schedule, &series, cfg.model.exchange());
    Ok(RunReport {
        config: cfg.clone(),
        resolved_model: ModelConfig::pinned(model),
        coupling_b: scenario.coupling_b,
        propagator: propagator.clone(),
        series,
        delta: None,
        counts,
        leaps,
        max_norm_drift,
        max_leap_norm_change,
        rho_health: health,
        final_rho,
        bursts,
        setup_seconds,
        propagate_seconds,
        measure_seconds,
        warnings,
    })
}

fn burst_fits(schedule: &Schedule, series: &[ObservableRecord], omega: Option<f64>) -> Vec<BurstFit> {
    let Schedule::TwoLeap { long_leap, short_count, .. } = *schedule else {
        return vec![];
    };
    let per = short_count as usize + usize::from(long_leap > 0);
    series
        .chunks(per)
        .map(|burst| {
            let times: Vec<f64> = burst.iter().map(|r| r.time).collect();
            let values: Vec<f64> = burst.iter().map(|r| r.spin[0][2]).collect();
            BurstFit { start: times[0], end: times[times.len() - 1], fit: fit_oscillation(&times, &values, omega) }
        })
        .collect()
}

/// Times and `2⟨S^z⟩` of the first central spin.
pub fn first_spin_z(series: &[ObservableRecord]) -> (Vec<f64>, Vec<f64>) {
    series.iter().map(|r| (r.time, r.spin[0][2])).unzip()
}
