//! Bit-indexed spin-1/2 basis, state vectors, and matrix-free operator
//! application.
//!
//! Basis convention: central spin `m` (0-based) occupies bit `m` of the basis
//! index and bath spin `n` occupies bit `M + n`. A clear bit is |↑⟩
//! (S^z = +1/2), a set bit is |↓⟩ (S^z = −1/2).
//!
//! Every operator here acts in "gather" form: output element `i` is assembled
//! from input elements `i ^ flip`, so the index space can be split across
//! workers with disjoint writes and no reductions. Results are therefore
//! independent of the rayon pool size.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SpinModel;

/// Default cap on `M + N`.
pub const DEFAULT_MAX_SPINS: usize = 26;

/// Work unit for parallel loops and for the fixed-order reductions.
pub(crate) const CHUNK: usize = 4096;

/// Spin counts of the compound system together with the bit layout rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    central: usize,
    bath: usize,
}

impl Basis {
    pub fn new(central: usize, bath: usize) -> Result<Self> {
        Self::with_limit(central, bath, DEFAULT_MAX_SPINS)
    }

    pub fn with_limit(central: usize, bath: usize, limit: usize) -> Result<Self> {
        if central == 0 {
            return Err(Error::InvalidBasis("at least one central spin is required".into()));
        }
        let spins = central + bath;
        if spins > limit || spins >= usize::BITS as usize {
            return Err(Error::DimensionOverflow { spins, limit });
        }
        Ok(Self { central, bath })
    }

    pub fn central(&self) -> usize {
        self.central
    }

    pub fn bath(&self) -> usize {
        self.bath
    }

    pub fn spins(&self) -> usize {
        self.central + self.bath
    }

    pub fn dim(&self) -> usize {
        1 << self.spins()
    }

    /// Global index of bath spin `n`.
    pub fn bath_site(&self, n: usize) -> usize {
        self.central + n
    }

    pub fn is_central(&self, site: usize) -> bool {
        site < self.central
    }
}

/// Number of basis states for `central` + `bath` spins.
///
/// This counts complex amplitudes, i.e. complex ODEs in `i dΨ/dt = HΨ`.
/// The real-valued system is twice as large: M=2, N=20 gives 4 194 304
/// complex equations, or 8 388 608 real ones.
pub fn basis_dimension(central: usize, bath: usize) -> Result<usize> {
    Basis::new(central, bath).map(|b| b.dim())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn label(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

/// One product term of the Hamiltonian, with `ħ = 1`.
///
/// `TwoSpin` is `strength · S^α_a S^α_b`, `Field` is `strength · S^α_site`.
/// Sites are global spin indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HamiltonianTerm {
    TwoSpin { axis: Axis, sites: [usize; 2], strength: f64 },
    Field { axis: Axis, site: usize, strength: f64 },
}

impl HamiltonianTerm {
    pub fn two_spin(axis: Axis, a: usize, b: usize, strength: f64) -> Self {
        HamiltonianTerm::TwoSpin { axis, sites: [a, b], strength }
    }

    pub fn field(axis: Axis, site: usize, strength: f64) -> Self {
        HamiltonianTerm::Field { axis, site, strength }
    }

    pub fn axis(&self) -> Axis {
        match *self {
            HamiltonianTerm::TwoSpin { axis, .. } | HamiltonianTerm::Field { axis, .. } => axis,
        }
    }

    pub fn strength(&self) -> f64 {
        match *self {
            HamiltonianTerm::TwoSpin { strength, .. } | HamiltonianTerm::Field { strength, .. } => strength,
        }
    }

    pub fn sites(&self) -> Vec<usize> {
        match *self {
            HamiltonianTerm::TwoSpin { sites, .. } => sites.to_vec(),
            HamiltonianTerm::Field { site, .. } => vec![site],
        }
    }

    /// Operator-norm contribution: `|J|·(1/2)·(1/2)` or `|h|·(1/2)`.
    pub fn norm_bound(&self) -> f64 {
        match *self {
            HamiltonianTerm::TwoSpin { strength, .. } => strength.abs() / 4.0,
            HamiltonianTerm::Field { strength, .. } => strength.abs() / 2.0,
        }
    }

    pub fn validate(&self, spins: usize) -> Result<()> {
        if !self.strength().is_finite() {
            return Err(Error::InvalidTerm(format!("non-finite strength in {self:?}")));
        }
        if let HamiltonianTerm::TwoSpin { sites: [a, b], .. } = *self {
            if a == b {
                return Err(Error::InvalidTerm(format!("two-spin term on a single site {a}")));
            }
        }
        if let Some(&s) = self.sites().iter().find(|&&s| s >= spins) {
            return Err(Error::InvalidTerm(format!("site {s} outside a basis of {spins} spins")));
        }
        Ok(())
    }

    pub(crate) fn pauli(&self) -> PauliOp {
        let mut op = PauliOp { flip: 0, zmask: 0, phase: C64::new(1.0, 0.0), scale: self.strength() };
        for site in self.sites() {
            op.push_site(site, self.axis());
            op.scale *= 0.5;
        }
        op
    }
}

/// `scale · σ` for a Pauli string σ, stored in gather form:
/// `(σΨ)[i] = phase · (−1)^popcount(i & zmask) · Ψ[i ^ flip]`.
///
/// σ is Hermitian and squares to the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PauliOp {
    pub flip: usize,
    pub zmask: usize,
    pub phase: C64,
    pub scale: f64,
}

impl PauliOp {
    /// Product of Pauli matrices on distinct sites, times `scale`.
    pub fn product(factors: &[(usize, Axis)], scale: f64) -> Self {
        let mut op = PauliOp { flip: 0, zmask: 0, phase: C64::new(1.0, 0.0), scale };
        for &(site, axis) in factors {
            debug_assert_eq!(op.flip & (1 << site) | op.zmask & (1 << site), 0, "repeated site");
            op.push_site(site, axis);
        }
        op
    }

    fn push_site(&mut self, site: usize, axis: Axis) {
        let bit = 1usize << site;
        match axis {
            Axis::X => self.flip |= bit,
            // ⟨b ^ 1|Y|b⟩ = i(−1)^b, seen from the output bit: −i(−1)^b_out.
            Axis::Y => {
                self.flip |= bit;
                self.zmask |= bit;
                self.phase *= C64::new(0.0, -1.0);
            }
            Axis::Z => self.zmask |= bit,
        }
    }

    #[inline]
    pub fn sign(&self, i: usize) -> f64 {
        parity_sign(i & self.zmask)
    }

    /// Matrix element `σ[i, i ^ flip]` (without `scale`).
    #[inline]
    pub fn element(&self, i: usize) -> C64 {
        self.phase * self.sign(i)
    }
}

#[inline]
pub(crate) fn parity_sign(bits: usize) -> f64 {
    if bits.count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Wavefunction of the compound system: `2^(M+N)` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::InvalidBasis(format!("state length {} is not a power of two", amps.len())));
        }
        Ok(Self { amps })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![C64::new(0.0, 0.0); dim])
    }

    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        let mut s = Self::zeros(dim)?;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range for dim {dim}")));
        }
        s.amps[index] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Number of spins encoded, `log2(dim)`.
    pub fn spins(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        inner_product_slices(&self.amps, &self.amps).re
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Scales to unit norm. A zero vector is rejected.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidArgument(format!("cannot normalize a vector of norm {n}")));
        }
        let inv = 1.0 / n;
        self.amps.par_iter_mut().with_min_len(CHUNK).for_each(|a| *a *= inv);
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.amps.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// `self += alpha · other`.
    pub fn axpy(&mut self, alpha: C64, other: &StateVector) -> Result<()> {
        check_dims(self.dim(), other.dim())?;
        self.amps.par_iter_mut().zip(other.amps.par_iter()).with_min_len(CHUNK).for_each(|(a, b)| *a += alpha * b);
        Ok(())
    }

    pub fn scale(&mut self, alpha: C64) {
        self.amps.par_iter_mut().with_min_len(CHUNK).for_each(|a| *a *= alpha);
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        let partials: Vec<f64> = self
            .amps
            .par_chunks(CHUNK)
            .zip(other.amps.par_chunks(CHUNK))
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>())
            .collect();
        Ok(partials.iter().sum::<f64>().sqrt())
    }
}

pub(crate) fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// `⟨a|b⟩`, conjugating `a`.
///
/// Summation order is fixed: each block of 4096 amplitudes is summed
/// sequentially, then the block partials are summed in index order. The
/// result is bit-identical for any thread count.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<C64> {
    check_dims(a.dim(), b.dim())?;
    Ok(inner_product_slices(&a.amps, &b.amps))
}

pub(crate) fn inner_product_slices(a: &[C64], b: &[C64]) -> C64 {
    let partials: Vec<C64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).fold(C64::new(0.0, 0.0), |acc, (p, q)| acc + p.conj() * q))
        .collect();
    partials.into_iter().fold(C64::new(0.0, 0.0), |acc, p| acc + p)
}

/// `term · Ψ`, unnormalized.
pub fn apply_term(state: &StateVector, term: &HamiltonianTerm) -> Result<StateVector> {
    term.validate(state.spins())?;
    let op = term.pauli();
    let input = &state.amps;
    let mut out = vec![C64::new(0.0, 0.0); input.len()];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let base = c * CHUNK;
        for (off, o) in chunk.iter_mut().enumerate() {
            let i = base + off;
            *o = op.element(i) * op.scale * input[i ^ op.flip];
        }
    });
    Ok(StateVector { amps: out })
}

/// `H · Ψ` summed over every term of `model`.
pub fn apply_hamiltonian(state: &StateVector, model: &SpinModel) -> Result<StateVector> {
    check_dims(state.dim(), model.basis().dim())?;
    let h = MatrixFreeHamiltonian::from_model(model)?;
    let mut out = StateVector::zeros(state.dim())?;
    h.apply_into(state, &mut out, 1.0, 0.0)?;
    Ok(out)
}

#[derive(Debug, Clone)]
struct FlipGroup {
    flip: usize,
    // (zmask, phase · scale) pairs sharing one flip mask.
    entries: Vec<(usize, C64)>,
}

/// A Hamiltonian compiled into bit-operation form.
///
/// Diagonal (S^z-only) terms are folded into a precomputed real diagonal;
/// off-diagonal terms are grouped by the bits they flip.
#[derive(Debug, Clone)]
pub struct MatrixFreeHamiltonian {
    spins: usize,
    diagonal: Option<Vec<f64>>,
    groups: Vec<FlipGroup>,
    term_count: usize,
}

impl MatrixFreeHamiltonian {
    pub fn from_model(model: &SpinModel) -> Result<Self> {
        Self::from_terms(model.basis().spins(), model.terms())
    }

    pub fn from_terms<'a>(spins: usize, terms: impl IntoIterator<Item = &'a HamiltonianTerm>) -> Result<Self> {
        let mut diag_terms: BTreeMap<usize, f64> = BTreeMap::new();
        let mut off: BTreeMap<usize, BTreeMap<usize, C64>> = BTreeMap::new();
        let mut term_count = 0;
        for term in terms {
            term.validate(spins)?;
            term_count += 1;
            let op = term.pauli();
            if op.flip == 0 {
                *diag_terms.entry(op.zmask).or_insert(0.0) += op.scale * op.phase.re;
            } else {
                *off.entry(op.flip).or_default().entry(op.zmask).or_insert(C64::new(0.0, 0.0)) += op.phase * op.scale;
            }
        }
        let dim = 1usize << spins;
        let diagonal = if diag_terms.is_empty() {
            None
        } else {
            let entries: Vec<(usize, f64)> = diag_terms.into_iter().collect();
            let mut d = vec![0.0; dim];
            d.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
                let base = c * CHUNK;
                for (off, v) in chunk.iter_mut().enumerate() {
                    let i = base + off;
                    *v = entries.iter().map(|&(z, s)| s * parity_sign(i & z)).sum();
                }
            });
            Some(d)
        };
        let groups =
            off.into_iter().map(|(flip, entries)| FlipGroup { flip, entries: entries.into_iter().collect() }).collect();
        Ok(Self { spins, diagonal, groups, term_count })
    }

    pub fn dim(&self) -> usize {
        1 << self.spins
    }

    pub fn term_count(&self) -> usize {
        self.term_count
    }

    pub fn is_zero(&self) -> bool {
        self.diagonal.is_none() && self.groups.is_empty()
    }

    /// `out ← alpha · H·input + beta · out`. With `beta == 0` the previous
    /// contents of `out` are ignored.
    pub fn apply_into(&self, input: &StateVector, out: &mut StateVector, alpha: f64, beta: f64) -> Result<()> {
        check_dims(input.dim(), self.dim())?;
        check_dims(out.dim(), self.dim())?;
        let input = &input.amps;
        let diag = self.diagonal.as_deref();
        let groups = &self.groups;
        out.amps.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let base = c * CHUNK;
            for (off, o) in chunk.iter_mut().enumerate() {
                let i = base + off;
                let mut acc = match diag {
                    Some(d) => input[i] * d[i],
                    None => C64::new(0.0, 0.0),
                };
                for g in groups {
                    let mut factor = C64::new(0.0, 0.0);
                    for &(z, coeff) in &g.entries {
                        factor += coeff * parity_sign(i & z);
                    }
                    acc += factor * input[i ^ g.flip];
                }
                *o = if beta == 0.0 { acc * alpha } else { acc * alpha + *o * beta };
            }
        });
        Ok(())
    }

    pub fn apply(&self, input: &StateVector) -> Result<StateVector> {
        let mut out = StateVector::zeros(input.dim())?;
        self.apply_into(input, &mut out, 1.0, 0.0)?;
        Ok(out)
    }
}

/// Random bath state: i.i.d. standard complex Gaussian amplitudes,
/// normalized. Reproducible from `seed`.
pub fn random_bath_state(bath: usize, seed: u64) -> Result<StateVector> {
    if bath == 0 {
        return Err(Error::InvalidArgument("random bath state needs at least one spin".into()));
    }
    if bath >= DEFAULT_MAX_SPINS {
        return Err(Error::DimensionOverflow { spins: bath, limit: DEFAULT_MAX_SPINS });
    }
    random_state(1 << bath, seed)
}

/// Normalized complex Gaussian vector of arbitrary power-of-two length.
pub fn random_state(dim: usize, seed: u64) -> Result<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        })
        .collect();
    let mut s = StateVector::new(amps)?;
    s.normalize()?;
    Ok(s)
}

/// `|system⟩ ⊗ |bath⟩` with the central spins in the low bits.
pub fn product_state(system: &StateVector, bath: &StateVector) -> Result<StateVector> {
    let spins = system.spins() + bath.spins();
    if spins >= usize::BITS as usize - 1 {
        return Err(Error::DimensionOverflow { spins, limit: DEFAULT_MAX_SPINS });
    }
    let sys = &system.amps;
    let amps: Vec<C64> = bath.amps.iter().flat_map(|b| sys.iter().map(move |s| s * b)).collect();
    StateVector::new(amps)
}
