//! Second-order (Strang) Suzuki-Trotter propagator over individual terms.
//!
//! One step of length Δt applies `exp(−iΔt/2·h_i)` for every term in plan
//! order, then again in reverse order. Each factor is an exact closed-form
//! rotation `cos θ − i sin θ σ` of a Pauli string σ, so every step is unitary
//! up to rounding.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{HamiltonianTerm, PauliOp, StateVector, CHUNK};
use crate::model::SpinModel;

/// Relative slack when checking `t = n·Δt`.
pub const COMMENSURATE_TOL: f64 = 1e-9;

/// Order in which a step visits the model's terms.
///
/// With `Grouped`, an isotropic exchange inside the system is applied as a
/// block; when it commutes with the total coupling, as in the oscillation
/// preset, the large-exchange error terms cancel and the splitting is far
/// more accurate than the usual axis-wise decomposition `H_x + H_y + H_z`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermOrder {
    /// All x-axis terms, then y, then z; grouped order within an axis.
    #[default]
    ByAxis,
    /// System, coupling, bath; each group sorted by sites, then axis.
    Grouped,
}

#[derive(Debug, Clone)]
pub struct TrotterPlan {
    dt: f64,
    terms: Vec<HamiltonianTerm>,
    ops: Vec<PauliOp>,
}

impl TrotterPlan {
    /// Plan with the default [`TermOrder::ByAxis`].
    pub fn new(model: &SpinModel, dt: f64) -> Result<Self> {
        Self::with_order(model, dt, TermOrder::default())
    }

    pub fn with_order(model: &SpinModel, dt: f64, order: TermOrder) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("Trotter step must be positive, got {dt}")));
        }
        let mut terms = Vec::with_capacity(model.term_count());
        for group in [model.system_terms(), model.coupling_terms(), model.bath_terms()] {
            let mut sorted = group.to_vec();
            sorted.sort_by(|a, b| a.sites().cmp(&b.sites()).then(a.axis().cmp(&b.axis())));
            terms.extend(sorted);
        }
        if order == TermOrder::ByAxis {
            terms.sort_by_key(|t| t.axis());
        }
        let ops = terms.iter().map(|t| t.pauli()).collect();
        Ok(Self { dt, terms, ops })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    /// Term exponentials per step.
    pub fn exponentials_per_step(&self) -> usize {
        2 * self.ops.len()
    }

    /// Number of steps covering `t`, rejecting non-multiples of Δt.
    pub fn steps_for(&self, t: f64) -> Result<u64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
        }
        let n = (t / self.dt).round();
        if (n * self.dt - t).abs() > COMMENSURATE_TOL * t.max(self.dt) {
            return Err(Error::NotCommensurate { time: t, dt: self.dt });
        }
        Ok(n as u64)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrotterDiagnostics {
    pub steps: u64,
    pub term_exponentials: u64,
}

/// `exp(−i·θ·scale·σ)` in place.
fn rotate(amps: &mut [C64], op: &PauliOp, theta: f64) {
    let angle = theta * op.scale;
    let (sin, cos) = angle.sin_cos();
    if op.flip == 0 {
        // diagonal: e^{∓i angle} by parity
        let plus = C64::new(cos, -sin);
        let minus = C64::new(cos, sin);
        amps.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let base = c * CHUNK;
            for (off, a) in chunk.iter_mut().enumerate() {
                *a *= if op.sign(base + off) > 0.0 { plus } else { minus };
            }
        });
        return;
    }

    let top = usize::BITS - 1 - op.flip.leading_zeros();
    let half = 1usize << top;
    let rest = op.flip ^ half;
    let span = if rest == 0 { 1 } else { 1usize << (usize::BITS - rest.leading_zeros()) };
    let sub = span.max(CHUNK).min(half);
    let msin = C64::new(0.0, -sin);
    amps.par_chunks_mut(2 * half).enumerate().for_each(|(bi, block)| {
        let base = bi * 2 * half;
        let (lo, hi) = block.split_at_mut(half);
        lo.par_chunks_mut(sub).zip(hi.par_chunks_mut(sub)).enumerate().for_each(|(q, (l, h))| {
            let off = q * sub;
            #[allow(clippy::needless_range_loop)] // `r` also addresses the partner slice
            for r in 0..l.len() {
                let local = (off + r) ^ rest;
                let i = base + off + r;
                let j = base + half + local;
                let a = l[r];
                let b = h[local - off];
                l[r] = a * cos + msin * op.element(i) * b;
                h[local - off] = b * cos + msin * op.element(j) * a;
            }
        });
    });
}

/// `exp(−i·dt_half·term)·Ψ`.
pub fn apply_term_exponential(state: &StateVector, term: &HamiltonianTerm, dt_half: f64) -> Result<StateVector> {
    term.validate(state.spins())?;
    let mut out = state.clone();
    rotate(out.amplitudes_mut(), &term.pauli(), dt_half);
    Ok(out)
}

/// One symmetric step `Π_i e^{−iΔt/2 h_i} · Π_i^rev e^{−iΔt/2 h_i}`, in place.
pub fn trotter_step(state: &mut StateVector, plan: &TrotterPlan) -> Result<TrotterDiagnostics> {
    for t in &plan.terms {
        t.validate(state.spins())?;
    }
    step_unchecked(state.amplitudes_mut(), plan);
    Ok(TrotterDiagnostics { steps: 1, term_exponentials: plan.exponentials_per_step() as u64 })
}

fn step_unchecked(amps: &mut [C64], plan: &TrotterPlan) {
    let half = 0.5 * plan.dt;
    for op in &plan.ops {
        rotate(amps, op, half);
    }
    for op in plan.ops.iter().rev() {
        rotate(amps, op, half);
    }
}

/// Advances `state` by `steps` Trotter steps in place.
pub fn propagate_steps(state: &mut StateVector, plan: &TrotterPlan, steps: u64) -> Result<TrotterDiagnostics> {
    let spins = state.spins();
    for t in &plan.terms {
        t.validate(spins)?;
    }
    for _ in 0..steps {
        step_unchecked(state.amplitudes_mut(), plan);
    }
    if !state.is_finite() {
        return Err(Error::NonFinite("Trotter propagation"));
    }
    Ok(TrotterDiagnostics { steps, term_exponentials: steps * plan.exponentials_per_step() as u64 })
}

/// `Ψ(t)` for `t = n·Δt`; other times are rejected.
pub fn propagate(state: &StateVector, plan: &TrotterPlan, t: f64) -> Result<(StateVector, TrotterDiagnostics)> {
    let steps = plan.steps_for(t)?;
    let mut out = state.clone();
    let diag = propagate_steps(&mut out, plan, steps)?;
    Ok((out, diag))
}
