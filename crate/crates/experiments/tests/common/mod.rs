//! Dense-matrix oracles built directly from 2×2 spin matrices.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use spinbath_core::{Axis, HamiltonianTerm, SpinModel, StateVector};

fn spin_matrix(axis: Axis) -> [[C64; 2]; 2] {
    let (o, h) = (C64::new(0.0, 0.0), 0.5);
    match axis {
        Axis::X => [[o, C64::new(h, 0.0)], [C64::new(h, 0.0), o]],
        Axis::Y => [[o, C64::new(0.0, -h)], [C64::new(0.0, h), o]],
        Axis::Z => [[C64::new(h, 0.0), o], [o, C64::new(-h, 0.0)]],
    }
}

/// Index bit `s` is spin `s`, with 0 = up.
pub fn dense_term(spins: usize, term: &HamiltonianTerm) -> DMatrix<C64> {
    let sites = term.sites();
    let m = spin_matrix(term.axis());
    let dim = 1usize << spins;
    DMatrix::from_fn(dim, dim, |i, j| {
        let mut v = C64::new(term.strength(), 0.0);
        for s in 0..spins {
            let (bi, bj) = ((i >> s) & 1, (j >> s) & 1);
            if sites.contains(&s) {
                v *= m[bi][bj];
            } else if bi != bj {
                return C64::new(0.0, 0.0);
            }
        }
        v
    })
}

pub fn dense_hamiltonian(model: &SpinModel) -> DMatrix<C64> {
    let spins = model.basis().spins();
    let dim = 1usize << spins;
    model.terms().fold(DMatrix::zeros(dim, dim), |acc, t| acc + dense_term(spins, t))
}

/// `exp(−i t H)` by eigendecomposition.
pub fn dense_expm(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, -l * t))) * v.adjoint()
}

pub fn dense_apply(u: &DMatrix<C64>, psi: &StateVector) -> StateVector {
    let out = u * DVector::from_column_slice(psi.amplitudes());
    StateVector::new(out.iter().copied().collect()).unwrap()
}

pub fn dense_evolve(model: &SpinModel, psi: &StateVector, t: f64) -> StateVector {
    dense_apply(&dense_expm(&dense_hamiltonian(model), t), psi)
}

/// `J_n(x)` by the trapezoid rule on Bessel's integral.
pub fn bessel_by_quadrature(n: usize, x: f64) -> f64 {
    let points = 8192;
    let h = std::f64::consts::PI / points as f64;
    let f = |theta: f64| (n as f64 * theta - x * theta.sin()).cos();
    let mut sum = 0.5 * (f(0.0) + f(std::f64::consts::PI));
    for k in 1..points {
        sum += f(k as f64 * h);
    }
    sum * h / std::f64::consts::PI
}
