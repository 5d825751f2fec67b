//! Chebyshev-series propagator for `exp(−i t H)`.
//!
//! With `G = 2H/E₁` and `τ = E₁ t/2`,
//! `exp(−iτG) = Σ_k c_k T_k(G)` where `c_0 = J_0(τ)` and
//! `c_k = 2(−i)^k J_k(τ)` for `k ≥ 1`. The series is cut at the smallest `K`
//! with `|c_k| < ε` for every `k ≥ K`, and `T_k(G)Ψ` is generated by
//! `T_{k+1} = 2G T_k − T_{k−1}`.

mod bessel;

pub use bessel::bessel_sequence;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{check_dims, MatrixFreeHamiltonian, StateVector};
use crate::model::{energy_bound_e1, SpectralBound, SpinModel};

/// Extra orders past `τ` inspected when checking the coefficient tail.
/// `|J_k(τ)|` is monotone decreasing in `k` beyond this point.
const TAIL_MARGIN: usize = 10;

/// Bessel values cached for the order search.
struct BesselTail {
    tau: f64,
    values: Vec<f64>,
}

impl BesselTail {
    fn new(tau: f64) -> Result<Self> {
        let k_max = (1.6 * tau) as usize + 64;
        Ok(Self { tau, values: bessel_sequence(tau, k_max)? })
    }

    fn coefficient_abs(&mut self, k: usize) -> Result<f64> {
        if k >= self.values.len() {
            self.values = bessel_sequence(self.tau, 2 * k)?;
        }
        let j = self.values[k].abs();
        Ok(if k == 0 { j } else { 2.0 * j })
    }

    /// Whether `|c_k| < ε` for every `k ≥ order`.
    fn truncates_at(&mut self, order: usize, epsilon: f64) -> Result<bool> {
        let top = order.max(self.tau.ceil() as usize + TAIL_MARGIN);
        for k in order..=top {
            if self.coefficient_abs(k)? >= epsilon {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn validate(tau: f64, epsilon: f64) -> Result<()> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::InvalidArgument(format!("τ must be finite and >= 0, got {tau}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("ε must lie in (0, 1), got {epsilon}")));
    }
    Ok(())
}

/// Minimal `K` with `|c_k| < ε` for all `k ≥ K`.
///
/// The search starts at `⌊1.1τ⌋`, walks up in steps of `max(8, K/32)` until
/// the tail condition holds, then bisects back down to the minimum.
pub fn expansion_order(tau: f64, epsilon: f64) -> Result<usize> {
    validate(tau, epsilon)?;
    let mut tail = BesselTail::new(tau)?;
    let start = ((1.1 * tau).floor() as usize).max(1);
    let step = 8usize.max(start / 32);

    // invariant: truncates_at(lo) is false (lo = 0 is never valid), hi is valid
    let (mut lo, mut hi) = if tail.truncates_at(start, epsilon)? {
        (0, start)
    } else {
        let mut lo = start;
        loop {
            let hi = lo + step;
            if tail.truncates_at(hi, epsilon)? {
                break (lo, hi);
            }
            lo = hi;
        }
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail.truncates_at(mid, epsilon)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Truncated expansion for one leap length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevPlan {
    pub tau: f64,
    pub epsilon: f64,
    pub order: usize,
    /// `c_0 … c_K`; only `c_0 … c_{K−1}` enter the sum, `c_K` is kept for
    /// diagnostics.
    pub coefficients: Vec<C64>,
}

impl ChebyshevPlan {
    pub fn new(tau: f64, epsilon: f64) -> Result<Self> {
        let order = expansion_order(tau, epsilon)?;
        let j = bessel_sequence(tau, order)?;
        let coefficients = j
            .iter()
            .enumerate()
            .map(|(k, &jk)| {
                let a = if k == 0 { 1.0 } else { 2.0 };
                minus_i_pow(k) * (a * jk)
            })
            .collect();
        Ok(Self { tau, epsilon, order, coefficients })
    }

    pub fn tail_coefficient(&self) -> f64 {
        self.coefficients[self.order].norm()
    }
}

fn minus_i_pow(k: usize) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

/// Per-leap report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeapDiagnostics {
    pub tau: f64,
    pub order: usize,
    /// `|c_K|`, the first dropped coefficient.
    pub tail_coefficient: f64,
    /// Applications of `G`; equals `K − 1`.
    pub g_applications: usize,
}

/// Reusable propagator: compiled Hamiltonian, bound, cached plans, and the
/// three work vectors of the recursion.
pub struct ChebyshevPropagator {
    hamiltonian: MatrixFreeHamiltonian,
    bound: SpectralBound,
    epsilon: f64,
    plans: Vec<(u64, ChebyshevPlan)>,
    buffers: Option<[StateVector; 3]>,
}

impl ChebyshevPropagator {
    pub fn new(model: &SpinModel, epsilon: f64) -> Result<Self> {
        Self::with_bound(model, energy_bound_e1(model), epsilon)
    }

    pub fn with_bound(model: &SpinModel, bound: SpectralBound, epsilon: f64) -> Result<Self> {
        validate(0.0, epsilon)?;
        if !(bound.e1.is_finite() && bound.e1 >= 0.0) {
            return Err(Error::InvalidArgument(format!("E₁ must be finite and >= 0, got {}", bound.e1)));
        }
        Ok(Self {
            hamiltonian: MatrixFreeHamiltonian::from_model(model)?,
            bound,
            epsilon,
            plans: Vec::new(),
            buffers: None,
        })
    }

    pub fn bound(&self) -> SpectralBound {
        self.bound
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn term_count(&self) -> usize {
        self.hamiltonian.term_count()
    }

    /// Plan for leap `t`, built once per distinct leap length.
    pub fn plan(&mut self, t: f64) -> Result<&ChebyshevPlan> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidArgument(format!("leap length must be finite and >= 0, got {t}")));
        }
        let key = t.to_bits();
        let pos = match self.plans.iter().position(|(k, _)| *k == key) {
            Some(pos) => pos,
            None => {
                let plan = ChebyshevPlan::new(self.bound.tau(t), self.epsilon)?;
                self.plans.push((key, plan));
                self.plans.len() - 1
            }
        };
        Ok(&self.plans[pos].1)
    }

    /// Advances `state` in place by time `t`.
    pub fn propagate(&mut self, state: &mut StateVector, t: f64) -> Result<LeapDiagnostics> {
        check_dims(state.dim(), self.hamiltonian.dim())?;
        let scale = match self.bound.generator_scale() {
            Some(s) if !self.hamiltonian.is_zero() => s,
            _ => {
                if !t.is_finite() || t < 0.0 {
                    return Err(Error::InvalidArgument(format!("leap length must be finite and >= 0, got {t}")));
                }
                return Ok(LeapDiagnostics { tau: 0.0, order: 1, tail_coefficient: 0.0, g_applications: 0 });
            }
        };
        self.plan(t)?;
        let key = t.to_bits();
        let plan = &self.plans.iter().find(|(k, _)| *k == key).expect("plan cached above").1;
        let diagnostics = LeapDiagnostics {
            tau: plan.tau,
            order: plan.order,
            tail_coefficient: plan.tail_coefficient(),
            g_applications: plan.order - 1,
        };
        if plan.order == 1 {
            state.scale(plan.coefficients[0]);
            return Ok(diagnostics);
        }

        let dim = state.dim();
        let [mut acc, mut prev, mut cur] = match self.buffers.take() {
            Some(b) if b[0].dim() == dim => b,
            _ => [StateVector::zeros(dim)?, StateVector::zeros(dim)?, StateVector::zeros(dim)?],
        };

        // acc = c0 ψ + c1 Gψ
        prev.amplitudes_mut().copy_from_slice(state.amplitudes());
        self.hamiltonian.apply_into(state, &mut cur, scale, 0.0)?;
        acc.amplitudes_mut().copy_from_slice(state.amplitudes());
        acc.scale(plan.coefficients[0]);
        acc.axpy(plan.coefficients[1], &cur)?;
        for k in 2..plan.order {
            // prev ← 2G·cur − prev, then rotate
            self.hamiltonian.apply_into(&cur, &mut prev, 2.0 * scale, -1.0)?;
            std::mem::swap(&mut prev, &mut cur);
            acc.axpy(plan.coefficients[k], &cur)?;
        }

        if !acc.is_finite() {
            self.buffers = Some([acc, prev, cur]);
            return Err(Error::NonFinite("Chebyshev propagation"));
        }
        std::mem::swap(state, &mut acc);
        self.buffers = Some([acc, prev, cur]);
        Ok(diagnostics)
    }
}

/// One-shot propagation of `state` by time `t`.
pub fn propagate(
    state: &StateVector,
    model: &SpinModel,
    bound: &SpectralBound,
    t: f64,
    epsilon: f64,
) -> Result<(StateVector, LeapDiagnostics)> {
    if !state.is_finite() {
        return Err(Error::NonFinite("Chebyshev input state"));
    }
    let mut prop = ChebyshevPropagator::with_bound(model, *bound, epsilon)?;
    let mut out = state.clone();
    let diag = prop.propagate(&mut out, t)?;
    Ok((out, diag))
}
