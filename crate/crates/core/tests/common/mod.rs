//! Dense-matrix reference implementations used as test oracles.
//!
//! Operators are built element by element from the 2×2 spin matrices, without
//! going through the crate's bit-mask machinery.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinbath_core::{Axis, Basis, HamiltonianTerm, SpinModel, StateVector};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Single-spin matrix ⟨out|S^α|in⟩ with index 0 = |↑⟩, 1 = |↓⟩.
pub fn spin_matrix(axis: Axis) -> [[C64; 2]; 2] {
    let h = 0.5;
    match axis {
        Axis::X => [[c(0.0, 0.0), c(h, 0.0)], [c(h, 0.0), c(0.0, 0.0)]],
        Axis::Y => [[c(0.0, 0.0), c(0.0, -h)], [c(0.0, h), c(0.0, 0.0)]],
        Axis::Z => [[c(h, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-h, 0.0)]],
    }
}

/// Dense matrix of `scale · Π_k S^{α_k}_{site_k}` on `spins` spins.
pub fn dense_product(spins: usize, factors: &[(usize, Axis)], scale: f64) -> DMatrix<C64> {
    let dim = 1usize << spins;
    DMatrix::from_fn(dim, dim, |i, j| {
        let mut v = c(scale, 0.0);
        for s in 0..spins {
            let bi = (i >> s) & 1;
            let bj = (j >> s) & 1;
            match factors.iter().find(|(site, _)| *site == s) {
                Some((_, axis)) => v *= spin_matrix(*axis)[bi][bj],
                None if bi != bj => return c(0.0, 0.0),
                None => {}
            }
        }
        v
    })
}

pub fn dense_term(spins: usize, term: &HamiltonianTerm) -> DMatrix<C64> {
    let factors: Vec<(usize, Axis)> = term.sites().into_iter().map(|s| (s, term.axis())).collect();
    dense_product(spins, &factors, term.strength())
}

pub fn dense_hamiltonian(model: &SpinModel) -> DMatrix<C64> {
    let spins = model.basis().spins();
    let dim = 1usize << spins;
    model.terms().fold(DMatrix::zeros(dim, dim), |acc, t| acc + dense_term(spins, t))
}

pub fn to_dvec(s: &StateVector) -> DVector<C64> {
    DVector::from_column_slice(s.amplitudes())
}

pub fn from_dvec(v: &DVector<C64>) -> StateVector {
    StateVector::new(v.iter().copied().collect()).unwrap()
}

/// `exp(−i t H)` via Hermitian eigendecomposition.
pub fn dense_expm(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, -l * t)));
    v * phases * v.adjoint()
}

pub fn spectral_radius(h: &DMatrix<C64>) -> f64 {
    SymmetricEigen::new(h.clone()).eigenvalues.iter().fold(0.0, |m: f64, l| m.max(l.abs()))
}

/// Random model with up to `max_spins` spins, arbitrary axes, fields and
/// pair couplings, reproducible from `seed`.
pub fn random_model(seed: u64, max_spins: usize) -> SpinModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spins = rng.random_range(2..=max_spins);
    let central = rng.random_range(1..spins);
    let basis = Basis::new(central, spins - central).unwrap();
    let n_terms = rng.random_range(1..=3 * spins);
    let terms: Vec<HamiltonianTerm> = (0..n_terms)
        .map(|_| {
            let axis = Axis::ALL[rng.random_range(0..3)];
            let strength = rng.random_range(-2.0..2.0);
            if rng.random_bool(0.3) {
                HamiltonianTerm::field(axis, rng.random_range(0..spins), strength)
            } else {
                let a = rng.random_range(0..spins);
                let mut b = rng.random_range(0..spins - 1);
                if b >= a {
                    b += 1;
                }
                HamiltonianTerm::two_spin(axis, a, b, strength)
            }
        })
        .collect();
    SpinModel::from_terms(basis, terms).unwrap()
}
