mod common;

use std::sync::Arc;

use bosegas::counting::{self, Counter, WeightFunction};
use bosegas::fock::{build_hamiltonian, product_state, FockVector, Orbital, PotentialShape, TwoBodyKernel};
use bosegas::linalg::hermitian_eigenvalues;
use bosegas::observables::{self, energy_per_particle};
use bosegas::oracle::{self, TensorState};
use bosegas::{Coupling, C64};
use common::{fock, random_orbital, random_state, rng, window};

const TAU: f64 = 2.0 * std::f64::consts::PI;

#[test]
fn symmetrize_examples() {
    let s = TensorState::basis_vector(2, &[0, 1]).symmetrize().unwrap();
    assert!((s.amplitude(&[0, 1]) - C64::new(0.5, 0.0)).norm() < 1e-15);
    assert!((s.amplitude(&[1, 0]) - C64::new(0.5, 0.0)).norm() < 1e-15);
    let anti = TensorState::basis_vector(2, &[0, 1]).sub(&TensorState::basis_vector(2, &[1, 0]));
    assert!(anti.symmetrize().unwrap().norm() < 1e-15);
    let twice = s.symmetrize().unwrap();
    assert!(twice.max_abs_diff(&s) < 1e-15);
}

#[test]
fn occupation_isometry() {
    let modes = window(TAU, 32, 2);
    let basis = fock(2, &modes);
    let pair = FockVector::from_occupation(Arc::clone(&basis), &[1, 1]).unwrap();
    let psi = oracle::fock_to_firstq(&pair);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((psi.amplitude(&[0, 1]).re - h).abs() < 1e-15);
    assert!((psi.amplitude(&[1, 0]).re - h).abs() < 1e-15);

    let modes = window(TAU, 32, 4);
    let mut r = rng(5);
    for n in [2, 3] {
        let basis = fock(n, &modes);
        let phi = random_orbital(4, &mut r);
        let via_fock = oracle::fock_to_firstq(&product_state(&phi, &basis).unwrap());
        assert!(via_fock.max_abs_diff(&TensorState::product(&phi, n)) < 1e-14);
        for _ in 0..10 {
            let state = random_state(&basis, &mut r);
            let back = oracle::firstq_to_fock(&oracle::fock_to_firstq(&state), &basis).unwrap();
            assert!(back.distance(&state) < 1e-12);
            assert!((oracle::fock_to_firstq(&state).norm() - 1.0).abs() < 1e-12);
        }
    }
    let lopsided = TensorState::basis_vector(4, &[0, 1]);
    assert!(matches!(oracle::firstq_to_fock(&lopsided, &fock(2, &modes)), Err(bosegas::Error::Asymmetric(_))));
}

#[test]
fn combinatorial_projectors() {
    let modes = window(TAU, 32, 4);
    let mut r = rng(6);
    let phi = random_orbital(4, &mut r);
    let basis = fock(3, &modes);
    let psi = oracle::fock_to_firstq(&random_state(&basis, &mut r));
    let mut sum = TensorState::zeros(3, 4).unwrap();
    for k in 0..=3 {
        let pk = oracle::apply_pk(&psi, &phi, k).unwrap();
        sum = sum.add(&pk);
        assert!(oracle::apply_pk(&pk, &phi, k).unwrap().max_abs_diff(&pk) < 1e-12);
        for l in (0..=3).filter(|&l| l != k) {
            assert!(oracle::apply_pk(&pk, &phi, l).unwrap().norm() < 1e-12);
        }
    }
    assert!(sum.max_abs_diff(&psi) < 1e-12);
    let product = TensorState::product(&phi, 3);
    assert!(oracle::apply_pk(&product, &phi, 0).unwrap().max_abs_diff(&product) < 1e-12);
    let big = TensorState::zeros(4, 4).unwrap();
    assert!(oracle::apply_pk(&big, &phi, 0).is_err());
}

#[test]
fn pipelines_agree_on_random_states() {
    let modes = window(TAU, 64, 4);
    let kernel = TwoBodyKernel::new(PotentialShape::Gaussian, 0.4, &modes).unwrap();
    let mut r = rng(7);
    for n in [2usize, 3] {
        let basis = fock(n, &modes);
        let h_fock = build_hamiltonian(&basis, &kernel, Coupling::Repulsive);
        let h_brute = oracle::brute_hamiltonian(n, &modes, PotentialShape::Gaussian, 0.4, Coupling::Repulsive).unwrap();
        let restricted = oracle::symmetric_restriction(&h_brute, &basis);
        let defect = (&restricted - h_fock.to_dense()).camax();
        assert!(defect < 1e-9, "N={n}: restricted Hamiltonian differs by {defect}");
        for _ in 0..10 {
            let state = random_state(&basis, &mut r);
            let phi = random_orbital(4, &mut r);
            let psi = oracle::fock_to_firstq(&state);
            let d1 = (observables::rdm1(&state).matrix() - oracle::rdm1(&psi).unwrap().matrix()).camax();
            let d2 =
                (observables::rdm2(&state).unwrap().matrix() - oracle::rdm2(&psi).unwrap().matrix()).camax();
            assert!(d1 < 1e-9 && d2 < 1e-9, "rdm mismatch {d1} {d2}");
            let dist = counting::pk_distribution(&state, &phi).unwrap();
            for (a, b) in dist.weights().iter().zip(oracle::pk_weights(&psi, &phi).unwrap()) {
                assert!((a - b).abs() < 1e-9);
            }
            assert!((dist.alpha() - oracle::alpha(&psi, &phi).unwrap()).abs() < 1e-9);
            assert!((dist.beta() - oracle::beta(&psi, &phi).unwrap()).abs() < 1e-9);
            let e = energy_per_particle(&state, &h_fock);
            assert!((e - oracle::energy_per_particle(&psi, &h_brute)).abs() < 1e-9);
            let f = WeightFunction::custom((0..=n).map(|k| (k as f64 * 0.7).cos()).collect()).unwrap();
            let spectral = Counter::new(&phi, &basis).unwrap().hat_apply(&f, &state).unwrap();
            let literal = oracle::apply_hat(&f, &psi, &phi).unwrap();
            assert!(oracle::fock_to_firstq(&spectral).max_abs_diff(&literal) < 1e-9);
        }
    }
}

#[test]
fn brute_hamiltonian_limits() {
    let modes = window(TAU, 64, 4);
    let h1 = oracle::brute_hamiltonian(1, &modes, PotentialShape::Gaussian, 0.4, Coupling::Repulsive).unwrap();
    for (p, k) in modes.wavenumbers().iter().enumerate() {
        assert!((h1[(p, p)].re - k * k).abs() < 1e-12);
    }
    let free = oracle::brute_hamiltonian(3, &modes, PotentialShape::Gaussian, 0.4, Coupling::Free).unwrap();
    let evs = hermitian_eigenvalues(&free);
    let ks = modes.wavenumbers();
    let mut sums: Vec<f64> = (0..64).map(|i| ks[i / 16].powi(2) + ks[i / 4 % 4].powi(2) + ks[i % 4].powi(2)).collect();
    sums.sort_by(f64::total_cmp);
    for (a, b) in evs.iter().zip(&sums) {
        assert!((a - b).abs() < 1e-10);
    }
    assert!(oracle::brute_hamiltonian(7, &modes, PotentialShape::Gaussian, 0.4, Coupling::Free).is_err());
}

#[test]
fn product_energy_matches_wick_formula() {
    let modes = window(TAU, 64, 4);
    let eps = 0.5;
    let kernel = TwoBodyKernel::new(PotentialShape::Gaussian, eps, &modes).unwrap();
    let phi = random_orbital(4, &mut rng(8));
    let n = 2;
    let basis = fock(n, &modes);
    let h = build_hamiltonian(&basis, &kernel, Coupling::Attractive);
    let e = energy_per_particle(&product_state(&phi, &basis).unwrap(), &h);
    let field = phi.to_field(&modes);
    let pair = bosegas::fock::pair_interaction_energy(&field, PotentialShape::Gaussian, eps);
    let wick = field.gradient_norm_sq() - (n as f64 - 1.0) / (2.0 * n as f64) * pair;
    assert!((e - wick).abs() < 1e-10, "{e} vs {wick}");
    let h_brute = oracle::brute_hamiltonian(n, &modes, PotentialShape::Gaussian, eps, Coupling::Attractive).unwrap();
    let brute = oracle::energy_per_particle(&TensorState::product(&phi, n), &h_brute);
    assert!((e - brute).abs() < 1e-10);
    let _ = Orbital::mode(4, 0);
}
