mod common;

use common::*;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use spinbath_core::hilbert::{apply_hamiltonian, apply_term, inner_product, random_state, MatrixFreeHamiltonian};
use spinbath_core::model::{energy_bound_e1, oscillation_preset, rescaled_apply};
use spinbath_core::{Axis, Basis, HamiltonianTerm, SpinModel, StateVector};

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[test]
fn zz_term_matches_dense_matrix() {
    let term = HamiltonianTerm::two_spin(Axis::Z, 0, 1, 16.0);
    let dense = dense_term(2, &term);
    for idx in 0..4 {
        let state = StateVector::basis_state(4, idx).unwrap();
        let fast = apply_term(&state, &term).unwrap();
        let slow = &dense * to_dvec(&state);
        for i in 0..4 {
            assert!((fast.amplitudes()[i] - slow[i]).norm() < 1e-15);
        }
    }
    let up_down = StateVector::basis_state(4, 2).unwrap();
    assert_eq!(apply_term(&up_down, &term).unwrap().amplitudes()[2], c(-4.0, 0.0));
}

#[test]
fn singlet_eigenvalue() {
    let j = 16.0;
    let basis = Basis::new(2, 0).unwrap();
    let model = SpinModel::from_terms(basis, Axis::ALL.map(|a| HamiltonianTerm::two_spin(a, 0, 1, j))).unwrap();
    let singlet = StateVector::new(vec![c(0.0, 0.0), c(-S, 0.0), c(S, 0.0), c(0.0, 0.0)]).unwrap();
    let h_singlet = apply_hamiltonian(&singlet, &model).unwrap();
    for (a, b) in h_singlet.amplitudes().iter().zip(singlet.amplitudes()) {
        assert!((a - b * -12.0).norm() < 1e-14);
    }
    // dense diagonalization: lowest eigenvalue is −3J/4 = −12
    let eig = SymmetricEigen::new(dense_hamiltonian(&model));
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!((min + 12.0).abs() < 1e-12);
}

#[test]
fn expectation_is_real_and_bounded() {
    for seed in 0..20 {
        let model = random_model(seed, 7);
        let e1 = energy_bound_e1(&model).e1;
        let psi = random_state(model.basis().dim(), seed + 100).unwrap();
        let e = inner_product(&psi, &apply_hamiltonian(&psi, &model).unwrap()).unwrap();
        assert!(e.im.abs() < 1e-12);
        assert!(e.re.abs() <= e1 / 2.0);
    }
}

#[test]
fn bound_exceeds_twice_spectral_radius() {
    let model =
        SpinModel::from_terms(Basis::new(2, 0).unwrap(), [HamiltonianTerm::two_spin(Axis::Z, 0, 1, 16.0)]).unwrap();
    assert_eq!(spectral_radius(&dense_hamiltonian(&model)), 4.0);
    assert_eq!(energy_bound_e1(&model).e1, 8.0);

    let model = oscillation_preset(4, 16.0, 17).unwrap();
    let e1 = energy_bound_e1(&model).e1;
    let radius = spectral_radius(&dense_hamiltonian(&model));
    assert!(e1 >= 2.0 * radius, "E1 {e1} vs radius {radius}");
    let a_sum: f64 = model.coupling_terms().iter().map(|t| t.strength().abs()).sum();
    assert!((e1 - (24.0 + a_sum / 2.0)).abs() < 1e-12);
}

#[test]
fn generator_eigenvalues_are_rescaled() {
    for seed in 0..5 {
        let model = random_model(seed, 5);
        let bound = energy_bound_e1(&model);
        let eig = SymmetricEigen::new(dense_hamiltonian(&model));
        for k in 0..eig.eigenvalues.len() {
            let v = from_dvec(&eig.eigenvectors.column(k).into_owned());
            let g = rescaled_apply(&v, &model, &bound).unwrap().unwrap();
            let lambda = 2.0 * eig.eigenvalues[k] / bound.e1;
            assert!(lambda.abs() <= 1.0 + 1e-12);
            assert!(
                g.distance(&{
                    let mut w = v.clone();
                    w.scale(c(lambda, 0.0));
                    w
                })
                .unwrap()
                    < 1e-12
            );
        }
    }
}

#[test]
fn bound_never_violated_on_random_states() {
    let model = oscillation_preset(3, 16.0, 2).unwrap();
    let e1 = energy_bound_e1(&model).e1;
    let h = MatrixFreeHamiltonian::from_model(&model).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..10_000u64 {
        let psi = random_state(32, seed).unwrap();
        worst = worst.max(inner_product(&psi, &h.apply(&psi).unwrap()).unwrap().re.abs());
    }
    assert!(2.0 * worst <= e1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_dense_matrix(seed in any::<u64>()) {
        let model = random_model(seed, 6);
        let dense = dense_hamiltonian(&model);
        let psi = random_state(model.basis().dim(), seed ^ 0xABCD).unwrap();
        let fast = apply_hamiltonian(&psi, &model).unwrap();
        let slow = &dense * to_dvec(&psi);
        for i in 0..psi.dim() {
            prop_assert!((fast.amplitudes()[i] - slow[i]).norm() < 1e-13);
        }
        // single terms too
        for term in model.terms() {
            let fast = apply_term(&psi, term).unwrap();
            let slow = dense_term(model.basis().spins(), term) * to_dvec(&psi);
            for i in 0..psi.dim() {
                prop_assert!((fast.amplitudes()[i] - slow[i]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn hermitian(seed in any::<u64>()) {
        let model = random_model(seed, 8);
        let dim = model.basis().dim();
        let a = random_state(dim, seed.wrapping_add(1)).unwrap();
        let b = random_state(dim, seed.wrapping_add(2)).unwrap();
        let hb = apply_hamiltonian(&b, &model).unwrap();
        let ha = apply_hamiltonian(&a, &model).unwrap();
        let lhs = inner_product(&a, &hb).unwrap();
        let rhs = inner_product(&ha, &b).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn linear(seed in any::<u64>(), alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
        let model = random_model(seed, 8);
        let dim = model.basis().dim();
        let a = random_state(dim, seed.wrapping_add(3)).unwrap();
        let b = random_state(dim, seed.wrapping_add(4)).unwrap();
        let (ca, cb) = (C64::new(alpha, 0.3), C64::new(beta, -0.7));
        let mut mix = a.clone();
        mix.scale(ca);
        mix.axpy(cb, &b).unwrap();
        let lhs = apply_hamiltonian(&mix, &model).unwrap();
        let mut rhs = apply_hamiltonian(&a, &model).unwrap();
        rhs.scale(ca);
        rhs.axpy(cb, &apply_hamiltonian(&b, &model).unwrap()).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn doubled_spin_operators_square_to_identity(seed in any::<u64>(), site in 0usize..6, axis in 0usize..3) {
        let psi = random_state(64, seed).unwrap();
        let t = HamiltonianTerm::field(Axis::ALL[axis], site, 2.0);
        let twice = apply_term(&apply_term(&psi, &t).unwrap(), &t).unwrap();
        prop_assert!(twice.distance(&psi).unwrap() < 1e-13);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(seed in any::<u64>()) {
        let a = random_state(128, seed).unwrap();
        let b = random_state(128, seed.wrapping_add(1)).unwrap();
        let ab = inner_product(&a, &b).unwrap();
        let ba = inner_product(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-15);
    }
}

#[test]
fn dense_oracle_self_check() {
    // S^x S^x + S^y S^y + S^z S^z = S₁·S₂ has eigenvalues {−3/4, 1/4, 1/4, 1/4}
    let m: DMatrix<C64> = [Axis::X, Axis::Y, Axis::Z]
        .iter()
        .fold(DMatrix::zeros(4, 4), |acc, &a| acc + dense_product(2, &[(0, a), (1, a)], 1.0));
    let mut eig: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let expected = [-0.75, 0.25, 0.25, 0.25];
    for (e, x) in eig.iter().zip(expected) {
        assert!((e - x).abs() < 1e-14);
    }
}
