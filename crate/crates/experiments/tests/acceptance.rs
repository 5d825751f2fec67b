//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Heavy runs are shared between criteria.

mod common;

use std::cell::Cell;
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use spinbath_core::chebyshev::{expansion_order, ChebyshevPlan, ChebyshevPropagator};
use spinbath_core::hilbert::random_state;
use spinbath_core::trotter::{apply_term_exponential, trotter_step, TrotterPlan};
use spinbath_core::{Axis, Basis, HamiltonianTerm, SpinModel};
use spinbath_experiments::analysis::{burst_averaged_amplitudes, fit_oscillation};
use spinbath_experiments::config::{ModelConfig, PropagatorConfig, Schedule};
use spinbath_experiments::output::csv_string;
use spinbath_experiments::presets::preset;
use spinbath_experiments::runner::{build_scenario, first_spin_z, run_with};
use spinbath_experiments::{benchmark_compare, run, Comparison, ExperimentConfig, RunReport};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

const POINTER_J: [f64; 3] = [0.1, 0.4, 1.0];
const SWEEP_LEAPS: [u64; 4] = [2, 10, 100, 1000];
const SWEEP_TOTAL: u64 = 2000;

fn test3_config() -> ExperimentConfig {
    let mut cfg = preset("table1-test3").unwrap();
    cfg.model.set_bath_spins(12);
    cfg
}

fn pointer_config(j: f64) -> ExperimentConfig {
    let mut cfg = preset("table3-test6").unwrap();
    cfg.model.set_bath_spins(10);
    if let ModelConfig::Pointer { j: ref mut exchange, .. } = cfg.model {
        *exchange = j;
    }
    // the reference cutoff keeps Tr ρ_S within the 1e-9 health bound
    cfg.propagator = PropagatorConfig::Reference;
    cfg.compare = None;
    cfg
}

/// Pointer physics at N=8 over a fixed total time, one leap length per entry.
fn sweep_config(leap: u64) -> ExperimentConfig {
    let mut cfg = pointer_config(0.1);
    cfg.model.set_bath_spins(8);
    cfg.schedule = Schedule::OneLeap { time_unit: 0.14, leap, steps: SWEEP_TOTAL / leap };
    cfg
}

struct Runs {
    test3: Comparison,
    pointer: Vec<RunReport>,
    sweep: Vec<(RunReport, RunReport)>,
}

fn sweep_pair(leap: u64) -> (RunReport, RunReport) {
    let cfg = sweep_config(leap);
    let cheb = run_with(&cfg, &PropagatorConfig::Chebyshev { epsilon: 1e-6 }).unwrap();
    let trot = run_with(&cfg, &PropagatorConfig::Trotter { dt: None, order: Default::default() }).unwrap();
    (cheb, trot)
}

fn all_runs() -> Runs {
    let test3 = benchmark_compare(&test3_config()).unwrap();
    let pointer = POINTER_J.iter().map(|&j| run(&pointer_config(j)).unwrap()).collect();
    let sweep = SWEEP_LEAPS.iter().map(|&l| sweep_pair(l)).collect();
    Runs { test3, pointer, sweep }
}

impl Runs {
    fn reports(&self) -> Vec<&RunReport> {
        let mut out = vec![&self.test3.reference, &self.test3.candidate, &self.test3.baseline];
        out.extend(&self.pointer);
        for (c, t) in &self.sweep {
            out.extend([c, t]);
        }
        out
    }

    fn csvs(&self) -> Vec<String> {
        self.reports().into_iter().map(|r| csv_string(r).unwrap()).collect()
    }
}

fn model_strategy() -> impl Strategy<Value = (SpinModel, u64, f64)> {
    (2usize..=6)
        .prop_flat_map(|spins| {
            let term = (0..3usize, any::<bool>(), 0..spins, 1..spins, -2.0f64..2.0);
            (Just(spins), 1..spins, vec(term, 1..=3 * spins), any::<u64>(), 0.01f64..3.0)
        })
        .prop_map(|(spins, central, raw, seed, t)| {
            let terms = raw.into_iter().map(|(axis, field, a, shift, strength)| {
                let axis = Axis::ALL[axis];
                if field {
                    HamiltonianTerm::field(axis, a, strength)
                } else {
                    HamiltonianTerm::two_spin(axis, a, (a + shift) % spins, strength)
                }
            });
            let model = SpinModel::from_terms(Basis::new(central, spins - central).unwrap(), terms).unwrap();
            (model, seed, t)
        })
}

fn term_strategy() -> impl Strategy<Value = (HamiltonianTerm, u64, f64)> {
    (0..3usize, 0..3usize, -20.0f64..20.0, any::<u64>(), -1.0f64..1.0).prop_map(|(axis, kind, strength, seed, dt)| {
        let axis = Axis::ALL[axis];
        let term = match kind {
            0 => HamiltonianTerm::two_spin(axis, 0, 1, strength),
            1 => HamiltonianTerm::field(axis, 0, strength),
            _ => HamiltonianTerm::field(axis, 1, strength),
        };
        (term, seed, dt)
    })
}

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config { failure_persistence: None, ..Config::with_cases(50) },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn oracle_equivalence() -> Outcome {
    let worst_cheb = Cell::new(0.0f64);
    let cheb = runner().run(&model_strategy(), |(model, seed, t)| {
        let psi = random_state(model.basis().dim(), seed).unwrap();
        let mut out = psi.clone();
        ChebyshevPropagator::new(&model, 1e-12).unwrap().propagate(&mut out, t).unwrap();
        let err = out.distance(&dense_evolve(&model, &psi, t)).unwrap();
        worst_cheb.set(worst_cheb.get().max(err));
        prop_assert!(err <= 1e-10, "error {err}");
        Ok(())
    });
    let worst_term = Cell::new(0.0f64);
    let term = runner().run(&term_strategy(), |(term, seed, dt)| {
        let psi = random_state(4, seed).unwrap();
        let out = apply_term_exponential(&psi, &term, dt).unwrap();
        let exact = dense_apply(&dense_expm(&dense_term(2, &term), dt), &psi);
        let err = out.distance(&exact).unwrap();
        worst_term.set(worst_term.get().max(err));
        prop_assert!(err <= 1e-13, "error {err}");
        Ok(())
    });
    let detail = format!(
        "50 models, worst Chebyshev error {:.2e} (<= 1e-10); 50 terms, worst 4x4 exponential error {:.2e} (<= 1e-13)",
        worst_cheb.get(),
        worst_term.get()
    );
    match (cheb, term) {
        (Ok(()), Ok(())) => Outcome::new(true, detail),
        (c, t) => Outcome::new(false, format!("{detail}; failures: {:?} {:?}", c.err(), t.err())),
    }
}

fn unitarity(runs: &Runs) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let (mut ref_drift, mut leap_ratio, mut trotter_per_step) = (0.0f64, 0.0f64, 0.0f64);
    for r in runs.reports() {
        match r.propagator {
            PropagatorConfig::Trotter { .. } => {
                let per_leap = (r.counts.trotter_steps / r.counts.leaps.max(1)).max(1);
                trotter_per_step = trotter_per_step.max(r.max_leap_norm_change / per_leap as f64);
            }
            _ => {
                let eps = r.propagator.epsilon().unwrap();
                if eps <= 1e-12 {
                    ref_drift = ref_drift.max(r.max_norm_drift);
                }
                leap_ratio = leap_ratio.max(r.max_leap_norm_change / eps);
            }
        }
    }
    pass &= ref_drift <= 1e-9 && leap_ratio <= 10.0 && trotter_per_step <= 1e-12;
    notes.push(format!("reference-cutoff drift {ref_drift:.1e} (<= 1e-9)"));
    notes.push(format!("worst per-leap change {leap_ratio:.2} eps (<= 10 eps)"));
    notes.push(format!("Trotter per-step change {trotter_per_step:.1e} (<= 1e-12)"));

    // single steps on the table1-test3 model
    let scenario = build_scenario(&test3_config()).unwrap();
    let plan = TrotterPlan::new(&scenario.model, 0.035).unwrap();
    let mut psi = scenario.initial.clone();
    let mut worst_step = 0.0f64;
    for _ in 0..200 {
        let before = psi.norm();
        trotter_step(&mut psi, &plan).unwrap();
        worst_step = worst_step.max((psi.norm() - before).abs());
    }
    pass &= worst_step <= 1e-12;
    notes.push(format!("200 single N=12 steps {worst_step:.1e}"));
    Outcome::new(pass, notes.join("; "))
}

fn test3_errors(runs: &Runs) -> Outcome {
    let cand = runs.test3.candidate.delta.unwrap();
    let base = runs.test3.baseline.delta.unwrap();
    let pass = cand <= 5e-3 && (5e-4..=5e-2).contains(&base);
    Outcome::new(
        pass,
        format!(
            "N=12 Chebyshev eps=1e-6 delta {cand:.3e} (<= 5e-3), Trotter dt=0.035 delta {base:.3e} (in [5e-4, 5e-2]), count ratio {:.1}, work ratio {:.3}",
            runs.test3.count_ratio.unwrap(),
            runs.test3.work_ratio.unwrap()
        ),
    )
}

fn oscillation_physics(runs: &Runs) -> Outcome {
    let (t, z) = first_spin_z(&runs.test3.reference.series);
    let Some(fit) = fit_oscillation(&t, &z, Some(16.0)) else {
        return Outcome::new(false, "no oscillation found");
    };
    let rel = (fit.omega - 16.0).abs() / 16.0;
    let profile = burst_averaged_amplitudes(&t, &z, 16.0, 8);
    let monotone = profile.len() == 8 && profile.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = profile.iter().map(|a| format!("{a:.3}")).collect();
    Outcome::new(
        rel <= 0.02 && monotone,
        format!(
            "frequency {:.3} ({:.2}% off 16); burst-averaged amplitudes [{}]",
            fit.omega,
            100.0 * rel,
            shown.join(", ")
        ),
    )
}

fn k_selection() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for tau in [10.0, 50.0, 100.0, 300.0] {
        let k5 = expansion_order(tau, 1e-5).unwrap();
        let k6 = expansion_order(tau, 1e-6).unwrap();
        pass &= k6 > k5;
        if tau >= 50.0 {
            for k in [k5, k6] {
                let r = k as f64 / tau;
                pass &= r > 1.0 && r < 1.6;
            }
        }
        for (k, eps) in [(k5, 1e-5), (k6, 1e-6)] {
            let plan = ChebyshevPlan::new(tau, eps).unwrap();
            pass &= plan.order == k && plan.tail_coefficient() < eps;
            // independent check of the whole tail
            pass &= (k..k + 40).all(|n| 2.0 * bessel_by_quadrature(n, tau).abs() < eps);
        }
        notes.push(format!("tau {tau}: K5 {k5}, K6 {k6}"));
    }
    Outcome::new(pass, notes.join("; "))
}

fn trotter_order() -> Outcome {
    let mut cfg = ExperimentConfig::new(ModelConfig::default());
    cfg.model.set_bath_spins(4);
    let scenario = build_scenario(&cfg).unwrap();
    let t = 2.8;
    let exact = dense_evolve(&scenario.model, &scenario.initial, t);
    let error = |dt: f64| {
        let plan = TrotterPlan::new(&scenario.model, dt).unwrap();
        let (out, _) = spinbath_core::trotter::propagate(&scenario.initial, &plan, t).unwrap();
        out.distance(&exact).unwrap()
    };
    let (coarse, fine) = (error(0.035), error(0.0175));
    let ratio = coarse / fine;
    Outcome::new(
        (ratio - 4.0).abs() <= 0.8,
        format!("N=4 error {coarse:.3e} at dt=0.035, {fine:.3e} at dt=0.0175, ratio {ratio:.3} (4 +- 20%)"),
    )
}

fn cost_trend(runs: &Runs) -> Outcome {
    let mut ratios = Vec::new();
    for (cheb, trot) in &runs.sweep {
        ratios.push(trot.counts.term_exponentials as f64 / cheb.counts.term_operations() as f64);
    }
    let monotone = ratios.windows(2).all(|w| w[1] > w[0]);
    let (cheb, trot) = runs.sweep.last().unwrap();
    let leap = &cheb.leaps[0];
    let steps = trot.counts.trotter_steps / trot.counts.leaps;
    let bound = 1.6 * leap.tau + 40.0;
    let shown: Vec<String> = SWEEP_LEAPS.iter().zip(&ratios).map(|(l, r)| format!("{l}dt: {r:.3}")).collect();
    Outcome::new(
        monotone && leap.g_applications as f64 <= bound && steps == 1000,
        format!(
            "term-exponential / term-operation ratio [{}]; at 1000dt tau {:.1}, {} G applications per leap (<= {:.1}) vs {steps} steps",
            shown.join(", "),
            leap.tau,
            leap.g_applications,
            bound
        ),
    )
}

fn pointer_structure(runs: &Runs) -> Outcome {
    let mut notes = Vec::new();
    let mut rho12 = Vec::new();
    let mut healthy = true;
    for (j, r) in POINTER_J.iter().zip(&runs.pointer) {
        let tail = &r.series[r.series.len() * 3 / 4..];
        // diagonal index 1 is |↓↑⟩, index 2 is |↑↓⟩
        let diff = tail.iter().map(|s| (s.rho_diag[2] - s.rho_diag[1]).abs()).fold(0.0, f64::max);
        let mean12 = tail.iter().map(|s| s.rho12.unwrap().norm()).sum::<f64>() / tail.len() as f64;
        healthy &= r.rho_health.within(1e-9);
        rho12.push(mean12);
        notes.push(format!(
            "J={j}: J/b {:.3}, max diagonal difference {diff:.3}, mean |rho12| {mean12:.3}",
            j / r.coupling_b.unwrap()
        ));
    }
    let first = &runs.pointer[0];
    let tail = &first.series[first.series.len() * 3 / 4..];
    let diff = tail.iter().map(|s| (s.rho_diag[2] - s.rho_diag[1]).abs()).fold(0.0, f64::max);
    let monotone = rho12.windows(2).all(|w| w[1] > w[0]);
    let checks = [
        ("diagonal difference < 0.05", diff < 0.05),
        ("rho healthy within 1e-9", healthy),
        ("|rho12| < 0.05 at J=0.1", rho12[0] < 0.05),
        ("|rho12| increases with J", monotone),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    if !failed.is_empty() {
        notes.push(format!("failed: {}", failed.join(", ")));
    }
    Outcome::new(failed.is_empty(), notes.join("; "))
}

fn determinism(runs: &Runs) -> Outcome {
    let single = runs.csvs();
    let mut notes = Vec::new();
    let mut pass = true;
    for threads in [2, 8] {
        let again = in_pool(threads, all_runs).csvs();
        let same = again.iter().zip(&single).filter(|(a, b)| a == b).count();
        pass &= same == single.len() && again.len() == single.len();
        notes.push(format!("{threads} threads: {same}/{} CSVs identical", single.len()));
    }
    Outcome::new(pass, notes.join("; "))
}

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() -> ExitCode {
    let started = Instant::now();
    let runs = in_pool(1, all_runs);
    eprintln!("shared runs finished in {:.0} s", started.elapsed().as_secs_f64());

    let criteria: [(&str, Check); 9] = [
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("unitarity", Box::new(|| unitarity(&runs))),
        ("table1-test3 error orders", Box::new(|| test3_errors(&runs))),
        ("oscillation physics", Box::new(|| oscillation_physics(&runs))),
        ("K-selection", Box::new(k_selection)),
        ("Trotter order", Box::new(trotter_order)),
        ("cost-ratio trend", Box::new(|| cost_trend(&runs))),
        ("pointer-state structure", Box::new(|| pointer_structure(&runs))),
        ("determinism across 1, 2, 8 threads", Box::new(|| determinism(&runs))),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        failures += usize::from(!outcome.pass);
        println!("criterion {} {name}: {} ({})", i + 1, if outcome.pass { "PASS" } else { "FAIL" }, outcome.detail);
    }
    println!("acceptance: {}/9 criteria passed in {:.0} s", 9 - failures, started.elapsed().as_secs_f64());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
