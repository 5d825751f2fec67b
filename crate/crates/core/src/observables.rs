//! Reduced density matrix of the central spins and the quantities derived
//! from it: spin expectations, central-spin correlators, quadratic entropy,
//! pointer states, and the max-abs-deviation error metric between runs.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{apply_term, inner_product, Axis, Basis, HamiltonianTerm, PauliOp, StateVector, CHUNK};

/// Eigenvalues closer than this are treated as one degenerate cluster.
const DEGENERACY_TOL: f64 = 1e-10;

/// `ρ_S = Tr_B |Ψ⟩⟨Ψ|`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedDensityMatrix {
    m_dim: usize,
    elements: Vec<C64>,
}

impl ReducedDensityMatrix {
    pub fn from_elements(m_dim: usize, elements: Vec<C64>) -> Result<Self> {
        if !m_dim.is_power_of_two() || elements.len() != m_dim * m_dim {
            return Err(Error::InvalidArgument(format!(
                "density matrix needs a power-of-two dimension and dim² elements, got {m_dim} and {}",
                elements.len()
            )));
        }
        Ok(Self { m_dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.m_dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.elements[row * self.m_dim + col]
    }

    pub fn elements(&self) -> &[C64] {
        &self.elements
    }

    pub fn trace(&self) -> C64 {
        (0..self.m_dim).map(|a| self.get(a, a)).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.elements.iter().map(|e| e.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.m_dim {
            for b in 0..self.m_dim {
                worst = worst.max((self.get(a, b) - self.get(b, a).conj()).norm());
            }
        }
        worst
    }

    pub fn to_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.m_dim, self.m_dim, &self.elements)
    }

    /// `Tr(ρ·scale·σ)` for a Pauli string acting on central spins only.
    fn expectation(&self, op: &PauliOp) -> f64 {
        let value: C64 = (0..self.m_dim).map(|b| op.element(b) * self.get(b ^ op.flip, b)).sum();
        op.scale * value.re
    }

    /// `⟨↑↓|ρ_S|↓↑⟩` for two central spins, `None` otherwise.
    pub fn rho12(&self) -> Option<C64> {
        // |↑↓⟩ = bit 1 set → index 2, |↓↑⟩ → index 1
        (self.m_dim == 4).then(|| self.get(2, 1))
    }
}

/// Partial trace over the bath, computed straight from `Ψ`.
///
/// Bath indices are processed in fixed blocks whose partial matrices are
/// summed in index order, so the result does not depend on the thread count.
pub fn reduced_density_matrix(state: &StateVector, central: usize) -> Result<ReducedDensityMatrix> {
    if central == 0 || central > state.spins() {
        return Err(Error::InvalidArgument(format!(
            "cannot trace a {}-spin state down to {central} central spins",
            state.spins()
        )));
    }
    let m_dim = 1usize << central;
    let block = CHUNK.max(m_dim);
    let partials: Vec<Vec<C64>> = state
        .amplitudes()
        .par_chunks(block)
        .map(|chunk| {
            let mut rho = vec![C64::new(0.0, 0.0); m_dim * m_dim];
            for row in chunk.chunks_exact(m_dim) {
                for a in 0..m_dim {
                    let pa = row[a];
                    for b in 0..m_dim {
                        rho[a * m_dim + b] += pa * row[b].conj();
                    }
                }
            }
            rho
        })
        .collect();
    let mut elements = vec![C64::new(0.0, 0.0); m_dim * m_dim];
    for p in &partials {
        for (e, v) in elements.iter_mut().zip(p) {
            *e += v;
        }
    }
    Ok(ReducedDensityMatrix { m_dim, elements })
}

/// `S⁽²⁾ = 1 − Tr ρ²`.
pub fn quadratic_entropy(rho: &ReducedDensityMatrix) -> f64 {
    1.0 - rho.purity()
}

/// `⟨Ψ|S^α_site|Ψ⟩` via one operator application and an inner product.
pub fn spin_expectation(state: &StateVector, site: usize, axis: Axis) -> Result<f64> {
    let image = apply_term(state, &HamiltonianTerm::field(axis, site, 1.0))?;
    Ok(inner_product(state, &image)?.re)
}

/// `⟨Ψ|S^α_a S^β_b|Ψ⟩`, symmetrized as `(S^αS^β + S^βS^α)/2` so the
/// observable is Hermitian when `a == b`.
pub fn central_correlator(state: &StateVector, (a, alpha): (usize, Axis), (b, beta): (usize, Axis)) -> Result<f64> {
    let ab = raw_product_expectation(state, (a, alpha), (b, beta))?;
    let ba = raw_product_expectation(state, (b, beta), (a, alpha))?;
    Ok(0.5 * (ab + ba).re)
}

fn raw_product_expectation(state: &StateVector, (a, alpha): (usize, Axis), (b, beta): (usize, Axis)) -> Result<C64> {
    let right = apply_term(state, &HamiltonianTerm::field(beta, b, 1.0))?;
    let left = apply_term(&right, &HamiltonianTerm::field(alpha, a, 1.0))?;
    inner_product(state, &left)
}

/// Which observables a record carries.
///
/// Spin expectations are recorded for every central spin. Correlators are
/// `4⟨S^α_a S^β_b⟩` for all nine axis pairs of `correlator_pair = [a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub correlator_pair: [usize; 2],
}

impl Default for ObservableSpec {
    fn default() -> Self {
        Self { correlator_pair: [0, 1] }
    }
}

impl ObservableSpec {
    pub fn validate(&self, basis: &Basis) -> Result<()> {
        if self.correlator_pair.iter().any(|&s| s >= basis.central()) {
            return Err(Error::InvalidArgument(format!(
                "correlator pair {:?} must index central spins (< {})",
                self.correlator_pair,
                basis.central()
            )));
        }
        Ok(())
    }
}

/// One sampled time point. Spin quantities are normalized to unity:
/// `2⟨S^α_m⟩` and `4⟨S^α_a S^β_b⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub time: f64,
    /// `2⟨S^α_m⟩` for each central spin `m`, axes in x, y, z order.
    pub spin: Vec<[f64; 3]>,
    /// `4⟨S^α_a S^β_b⟩`, row-major over (α, β).
    pub correlators: [f64; 9],
    pub entropy_q: f64,
    /// Diagonal of `ρ_S`.
    pub rho_diag: Vec<f64>,
    pub rho12: Option<C64>,
}

impl ObservableRecord {
    /// Values that enter the error metric, in a fixed order.
    pub fn compared_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.spin.iter().flatten().copied().chain(self.correlators).chain(std::iter::once(self.entropy_q))
    }
}

/// Evaluates every recorded observable from `ρ_S`.
pub fn measure(state: &StateVector, basis: &Basis, time: f64, spec: &ObservableSpec) -> Result<ObservableRecord> {
    let rho = reduced_density_matrix(state, basis.central())?;
    Ok(record_from_rho(&rho, basis.central(), time, spec))
}

pub fn record_from_rho(
    rho: &ReducedDensityMatrix,
    central: usize,
    time: f64,
    spec: &ObservableSpec,
) -> ObservableRecord {
    let spin =
        (0..central).map(|m| Axis::ALL.map(|axis| rho.expectation(&PauliOp::product(&[(m, axis)], 1.0)))).collect();
    let [a, b] = spec.correlator_pair;
    let mut correlators = [0.0; 9];
    for (i, alpha) in Axis::ALL.into_iter().enumerate() {
        for (j, beta) in Axis::ALL.into_iter().enumerate() {
            correlators[3 * i + j] = if a == b {
                // {σ^α, σ^β}/2 = δ_αβ
                if alpha == beta {
                    1.0
                } else {
                    0.0
                }
            } else {
                rho.expectation(&PauliOp::product(&[(a, alpha), (b, beta)], 1.0))
            };
        }
    }
    ObservableRecord {
        time,
        spin,
        correlators,
        entropy_q: quadratic_entropy(rho),
        rho_diag: (0..rho.dim()).map(|i| rho.get(i, i).re).collect(),
        rho12: rho.rho12(),
    }
}

/// Eigen-decomposition of `ρ_S`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerAnalysis {
    /// Eigenvalues, descending.
    pub weights: Vec<f64>,
    /// Matching normalized eigenvectors.
    pub states: Vec<Vec<C64>>,
    pub rho12: Option<C64>,
}

/// Diagonalizes `ρ_S`.
///
/// Eigenvalues are sorted in descending order. Inside a degenerate cluster
/// the eigenvectors are replaced by the Gram-Schmidt orthonormalization of
/// the projected basis vectors `P e_0, P e_1, …`, so the result does not
/// depend on the solver. Each vector is then rotated so that its
/// largest-modulus component (lowest index on ties) is real and positive.
pub fn pointer_analysis(rho: &ReducedDensityMatrix) -> PointerAnalysis {
    let n = rho.dim();
    let eig = SymmetricEigen::new(rho.to_matrix());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let weights: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut states: Vec<DVector<C64>> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (weights[end - 1] - weights[end]).abs() < DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            canonicalize_cluster(&mut states[start..end]);
        }
        start = end;
    }

    let states = states.into_iter().map(fix_phase).collect();
    PointerAnalysis { weights, states, rho12: rho.rho12() }
}

fn canonicalize_cluster(vectors: &mut [DVector<C64>]) {
    let n = vectors[0].len();
    let k = vectors.len();
    let projector = vectors.iter().fold(DMatrix::<C64>::zeros(n, n), |acc, v| acc + v * v.adjoint());
    let mut basis: Vec<DVector<C64>> = Vec::with_capacity(k);
    for e in 0..n {
        if basis.len() == k {
            break;
        }
        let mut w = projector.column(e).into_owned();
        for u in &basis {
            let overlap = u.dotc(&w);
            w -= u * overlap;
        }
        let norm = w.norm();
        if norm > 1e-6 {
            basis.push(w / C64::new(norm, 0.0));
        }
    }
    for (slot, v) in vectors.iter_mut().zip(basis) {
        *slot = v;
    }
}

fn fix_phase(v: DVector<C64>) -> Vec<C64> {
    let max = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let pivot = v.iter().position(|c| c.norm() >= max - 1e-12).unwrap_or(0);
    let p = v[pivot];
    let rot = if p.norm() > 0.0 { p.conj() / p.norm() } else { C64::new(1.0, 0.0) };
    v.iter().map(|c| c * rot).collect()
}

/// Largest absolute difference between matching observables of two series
/// sampled on the same time grid.
pub fn delta_metric(reference: &[ObservableRecord], candidate: &[ObservableRecord]) -> Result<f64> {
    if reference.len() != candidate.len() {
        return Err(Error::MisalignedSeries(format!("{} vs {} records", reference.len(), candidate.len())));
    }
    let mut delta: f64 = 0.0;
    for (r, c) in reference.iter().zip(candidate) {
        if (r.time - c.time).abs() > 1e-9 * r.time.abs().max(1.0) {
            return Err(Error::MisalignedSeries(format!("time {} vs {}", r.time, c.time)));
        }
        if r.spin.len() != c.spin.len() {
            return Err(Error::MisalignedSeries("different central spin counts".into()));
        }
        for (x, y) in r.compared_values().zip(c.compared_values()) {
            delta = delta.max((x - y).abs());
        }
    }
    Ok(delta)
}
