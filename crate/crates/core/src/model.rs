//! Hamiltonian data model, the analytic spectral bound, and the two
//! experiment presets (oscillation damping and pointer states).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Axis, Basis, HamiltonianTerm, MatrixFreeHamiltonian, StateVector};

/// `H = H_S + H_B + V`, each a list of axis-aligned product terms.
///
/// Isotropic couplings are stored as three axis terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinModel {
    basis: Basis,
    system_terms: Vec<HamiltonianTerm>,
    bath_terms: Vec<HamiltonianTerm>,
    coupling_terms: Vec<HamiltonianTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermGroup {
    System,
    Bath,
    Coupling,
}

impl SpinModel {
    pub fn new(
        basis: Basis,
        system_terms: Vec<HamiltonianTerm>,
        bath_terms: Vec<HamiltonianTerm>,
        coupling_terms: Vec<HamiltonianTerm>,
    ) -> Result<Self> {
        let model = Self { basis, system_terms, bath_terms, coupling_terms };
        model.validate()?;
        Ok(model)
    }

    /// Sorts arbitrary terms into their groups by the sites they touch.
    pub fn from_terms(basis: Basis, terms: impl IntoIterator<Item = HamiltonianTerm>) -> Result<Self> {
        let mut model = Self { basis, system_terms: vec![], bath_terms: vec![], coupling_terms: vec![] };
        for term in terms {
            term.validate(basis.spins())?;
            match classify(&basis, &term) {
                TermGroup::System => model.system_terms.push(term),
                TermGroup::Bath => model.bath_terms.push(term),
                TermGroup::Coupling => model.coupling_terms.push(term),
            }
        }
        Ok(model)
    }

    pub fn empty(basis: Basis) -> Self {
        Self { basis, system_terms: vec![], bath_terms: vec![], coupling_terms: vec![] }
    }

    pub fn validate(&self) -> Result<()> {
        let groups = [
            (TermGroup::System, &self.system_terms),
            (TermGroup::Bath, &self.bath_terms),
            (TermGroup::Coupling, &self.coupling_terms),
        ];
        for (group, terms) in groups {
            for term in terms {
                term.validate(self.basis.spins())?;
                let actual = classify(&self.basis, term);
                if actual != group {
                    return Err(Error::InvalidTerm(format!("{term:?} listed as {group:?} but acts as {actual:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn system_terms(&self) -> &[HamiltonianTerm] {
        &self.system_terms
    }

    pub fn bath_terms(&self) -> &[HamiltonianTerm] {
        &self.bath_terms
    }

    pub fn coupling_terms(&self) -> &[HamiltonianTerm] {
        &self.coupling_terms
    }

    /// All terms: system, then coupling, then bath.
    pub fn terms(&self) -> impl Iterator<Item = &HamiltonianTerm> {
        self.system_terms.iter().chain(&self.coupling_terms).chain(&self.bath_terms)
    }

    pub fn term_count(&self) -> usize {
        self.system_terms.len() + self.bath_terms.len() + self.coupling_terms.len()
    }

    /// `b = Σ_n A_n²` where `A_n` is the x-axis coupling of the first central
    /// spin to bath spin `n`.
    pub fn coupling_strength_sq(&self) -> f64 {
        self.coupling_terms
            .iter()
            .filter_map(|t| match *t {
                HamiltonianTerm::TwoSpin { axis: Axis::X, sites, strength } if sites.contains(&0) => {
                    Some(strength * strength)
                }
                _ => None,
            })
            .sum()
    }
}

fn classify(basis: &Basis, term: &HamiltonianTerm) -> TermGroup {
    let sites = term.sites();
    let central = sites.iter().filter(|&&s| basis.is_central(s)).count();
    if central == sites.len() {
        TermGroup::System
    } else if central == 0 {
        TermGroup::Bath
    } else {
        TermGroup::Coupling
    }
}

/// Analytic bound `E₁ ≥ 2 max|⟨H⟩|` from the triangle inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBound {
    pub e1: f64,
}

impl SpectralBound {
    /// Dimensionless leap length `τ = E₁·t/2`.
    pub fn tau(&self, t: f64) -> f64 {
        self.e1 * t / 2.0
    }

    /// Scale factor `2/E₁` mapping `H` to `G`. `None` for a zero bound.
    pub fn generator_scale(&self) -> Option<f64> {
        (self.e1 > 0.0).then(|| 2.0 / self.e1)
    }
}

/// `E₁ = Σ|J|/2 over two-spin terms + Σ|h| over field terms`.
///
/// No energy shift is applied (`E_c = 0`).
pub fn energy_bound_e1(model: &SpinModel) -> SpectralBound {
    SpectralBound { e1: model.terms().map(|t| 2.0 * t.norm_bound()).sum() }
}

/// `G·Ψ = (2/E₁)·H·Ψ`. Returns `None` when `E₁ = 0`, meaning the evolution
/// is the identity and no expansion is needed.
pub fn rescaled_apply(state: &StateVector, model: &SpinModel, bound: &SpectralBound) -> Result<Option<StateVector>> {
    let Some(scale) = bound.generator_scale() else {
        return Ok(None);
    };
    let h = MatrixFreeHamiltonian::from_model(model)?;
    let mut out = StateVector::zeros(state.dim())?;
    h.apply_into(state, &mut out, scale, 0.0)?;
    Ok(Some(out))
}

/// Sampling interval for the central–bath couplings `A_n`.
///
/// Samples land in `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingRange {
    pub lo: f64,
    pub hi: f64,
}

impl Default for CouplingRange {
    fn default() -> Self {
        Self { lo: -0.5, hi: 0.0 }
    }
}

impl CouplingRange {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.hi - (self.hi - self.lo) * u
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(Error::InvalidArgument(format!("bad coupling range [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }
}

fn heisenberg(a: usize, b: usize, j: f64) -> impl Iterator<Item = HamiltonianTerm> {
    Axis::ALL.into_iter().map(move |axis| HamiltonianTerm::two_spin(axis, a, b, j))
}

/// Two central spins, `H_S = J S₁·S₂`, `H_B = 0`,
/// `V = Σ_n A_n (S₁ + S₂)·I_n` with `A_n` drawn from `(−0.5, 0]`.
pub fn oscillation_preset(bath: usize, j: f64, seed: u64) -> Result<SpinModel> {
    oscillation_preset_in(bath, j, CouplingRange::default(), seed)
}

pub fn oscillation_preset_in(bath: usize, j: f64, range: CouplingRange, seed: u64) -> Result<SpinModel> {
    if bath == 0 {
        return Err(Error::InvalidArgument("oscillation preset needs at least one bath spin".into()));
    }
    range.validate()?;
    let basis = Basis::new(2, bath)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let system: Vec<_> = heisenberg(0, 1, j).collect();
    let mut coupling = Vec::with_capacity(6 * bath);
    for n in 0..bath {
        let a = range.sample(&mut rng);
        let site = basis.bath_site(n);
        for m in 0..2 {
            coupling.extend(heisenberg(m, site, a));
        }
    }
    SpinModel::new(basis, system, vec![], coupling)
}

/// Pointer-state model together with `b = Σ A_n²` of its sampled couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointerModel {
    pub model: SpinModel,
    pub b: f64,
}

/// `H_S = J S₁·S₂`, `V = Σ_n A_n S₁·I_n`,
/// `H_B = h Σ_n I^z_n + Σ_{n<n'} U_{nn'} I^x_n I^x_{n'}` with
/// `U ~ Uniform(−u_max, u_max)`.
pub fn pointer_preset(bath: usize, j: f64, h: f64, u_max: f64, seed: u64) -> Result<PointerModel> {
    pointer_preset_in(bath, j, h, u_max, CouplingRange::default(), seed)
}

pub fn pointer_preset_in(
    bath: usize,
    j: f64,
    h: f64,
    u_max: f64,
    range: CouplingRange,
    seed: u64,
) -> Result<PointerModel> {
    if bath < 2 {
        return Err(Error::InvalidArgument("pointer preset needs at least two bath spins".into()));
    }
    if !(u_max.is_finite() && u_max >= 0.0) {
        return Err(Error::InvalidArgument(format!("u_max must be finite and non-negative, got {u_max}")));
    }
    range.validate()?;
    let basis = Basis::new(2, bath)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let system: Vec<_> = heisenberg(0, 1, j).collect();

    let mut coupling = Vec::with_capacity(3 * bath);
    let mut b = 0.0;
    for n in 0..bath {
        let a = range.sample(&mut rng);
        b += a * a;
        coupling.extend(heisenberg(0, basis.bath_site(n), a));
    }

    let mut bath_terms: Vec<_> = (0..bath).map(|n| HamiltonianTerm::field(Axis::Z, basis.bath_site(n), h)).collect();
    for n in 0..bath {
        for n2 in n + 1..bath {
            let u: f64 = rng.random();
            let strength = u_max * (2.0 * u - 1.0);
            if u_max > 0.0 {
                bath_terms.push(HamiltonianTerm::two_spin(Axis::X, basis.bath_site(n), basis.bath_site(n2), strength));
            }
        }
    }
    Ok(PointerModel { model: SpinModel::new(basis, system, bath_terms, coupling)?, b })
}
