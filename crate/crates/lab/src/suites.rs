//! Verification suites: oracle equivalence, projector calculus, and the
//! density-matrix inequalities, each reduced to a worst-case number.

use std::sync::Arc;
use std::time::Instant;

use bosegas::counting::{Counter, CountingMethod, WeightFunction};
use bosegas::fock::{
    build_hamiltonian, product_state, FockBasis, FockVector, ModeBasis, Orbital, PotentialShape, TwoBodyKernel,
};
use bosegas::observables::{self, k_from_one_check, sandwich_check, DensityMatrix};
use bosegas::oracle::{self, TensorState};
use bosegas::{Coupling, TorusGrid, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::LabResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// `worst` is the largest absolute deviation.
    Identity,
    /// `worst` is the largest `lhs - rhs` (negative means slack to spare).
    Inequality,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub kind: CheckKind,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn line(&self) -> String {
        format!(
            "{:<4} {:<44} cases={:<5} worst={:+.3e} tol={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.worst,
            self.tolerance
        )
    }
}

/// Accumulates the worst case of one check.
struct Tally {
    name: &'static str,
    kind: CheckKind,
    tolerance: f64,
    worst: f64,
    cases: usize,
    started: Instant,
}

impl Tally {
    fn new(name: &'static str, kind: CheckKind, tolerance: f64) -> Self {
        let worst = match kind {
            CheckKind::Identity => 0.0,
            CheckKind::Inequality => f64::NEG_INFINITY,
        };
        Self { name, kind, tolerance, worst, cases: 0, started: Instant::now() }
    }

    fn record(&mut self, value: f64) {
        self.cases += 1;
        // NaN must fail loudly
        self.worst = if value.is_nan() { f64::INFINITY } else { self.worst.max(value) };
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            name: self.name.into(),
            kind: self.kind,
            cases: self.cases,
            worst: self.worst,
            tolerance: self.tolerance,
            passed: self.cases > 0 && self.worst <= self.tolerance,
            seconds: self.started.elapsed().as_secs_f64(),
        }
    }
}

/// Tolerances of the suites; `override_all` replaces every entry.
#[derive(Clone, Copy, Debug)]
pub struct SuiteTolerances {
    pub equivalence: f64,
    pub identity: f64,
    pub inequality_slack: f64,
    pub projector_oracle: f64,
    pub projector_spectral: f64,
}

impl Default for SuiteTolerances {
    fn default() -> Self {
        Self {
            equivalence: 1e-9,
            identity: 1e-9,
            inequality_slack: 1e-10,
            projector_oracle: 1e-12,
            projector_spectral: 1e-12,
        }
    }
}

impl SuiteTolerances {
    pub fn uniform(tol: f64) -> Self {
        Self {
            equivalence: tol,
            identity: tol,
            inequality_slack: tol,
            projector_oracle: tol,
            projector_spectral: tol,
        }
    }
}

fn complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
}

fn random_orbital(k: usize, rng: &mut ChaCha8Rng) -> Orbital {
    Orbital::new((0..k).map(|_| complex(rng)).collect()).expect("nonzero")
}

/// Random tensor, symmetrized and normalized.
pub fn random_symmetric(n: usize, k: usize, rng: &mut ChaCha8Rng) -> TensorState {
    let raw = TensorState::new(n, k, (0..k.pow(n as u32)).map(|_| complex(rng)).collect()).expect("sizes match");
    raw.symmetrize().expect("small N").normalized().expect("nonzero")
}

fn small_window(k: usize) -> ModeBasis {
    ModeBasis::new(&TorusGrid::new(2.0 * std::f64::consts::PI, 64).expect("valid grid"), k).expect("valid window")
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Fock pipeline vs first-quantized oracle on 50 random symmetric states
/// at `(N, K)` in `{(2, 4), (3, 4)}`.
pub fn oracle_equivalence(seed: u64, tol: &SuiteTolerances) -> LabResult<Vec<SuiteReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = tol.equivalence;
    let mut tallies = [
        Tally::new("equivalence: rdm1", CheckKind::Identity, t),
        Tally::new("equivalence: rdm2", CheckKind::Identity, t),
        Tally::new("equivalence: alpha_N", CheckKind::Identity, t),
        Tally::new("equivalence: beta_N", CheckKind::Identity, t),
        Tally::new("equivalence: P_k distribution", CheckKind::Identity, t),
        Tally::new("equivalence: energy per particle", CheckKind::Identity, t),
    ];
    let modes = small_window(4);
    let (shape, eps) = (PotentialShape::Gaussian, 0.4);
    let kernel = TwoBodyKernel::new(shape, eps, &modes)?;
    for n in [2usize, 3] {
        let basis = Arc::new(FockBasis::new(n, &modes)?);
        let h = build_hamiltonian(&basis, &kernel, Coupling::Repulsive);
        let h_brute = oracle::brute_hamiltonian(n, &modes, shape, eps, Coupling::Repulsive)?;
        for _ in 0..50 {
            let psi = random_symmetric(n, 4, &mut rng);
            let phi = random_orbital(4, &mut rng);
            let state = oracle::firstq_to_fock(&psi, &basis)?;
            tallies[0].record(max_abs(&(observables::rdm1(&state).matrix() - oracle::rdm1(&psi)?.matrix())));
            tallies[1].record(max_abs(&(observables::rdm2(&state)?.matrix() - oracle::rdm2(&psi)?.matrix())));
            let dist = Counter::new(&phi, &basis)?.distribution(&state)?;
            tallies[2].record((dist.alpha() - oracle::alpha(&psi, &phi)?).abs());
            tallies[3].record((dist.beta() - oracle::beta(&psi, &phi)?).abs());
            let weights = oracle::pk_weights(&psi, &phi)?;
            tallies[4].record(dist.weights().iter().zip(&weights).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            let e = observables::energy_per_particle(&state, &h);
            tallies[5].record((e - oracle::energy_per_particle(&psi, &h_brute)).abs());
        }
    }
    Ok(tallies.into_iter().map(Tally::finish).collect())
}

fn random_nonnegative_weights(n: usize, rng: &mut ChaCha8Rng) -> WeightFunction {
    WeightFunction::custom((0..=n).map(|_| 2.0 * rng.gen::<f64>()).collect()).expect("finite")
}

/// Hermitian Toeplitz matrix `A_pq = a_{p-q}`: multiplication by a real
/// trigonometric polynomial in the mode basis.
fn multiplication_operator(k: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let a: Vec<C64> = (0..k).map(|_| complex(rng)).collect();
    DMatrix::from_fn(k, k, |p, q| {
        if p == q {
            C64::new(a[0].re, 0.0)
        } else if p > q {
            a[p - q]
        } else {
            a[q - p].conj()
        }
    })
}

/// Projector-calculus identities and inequalities on random symmetric
/// states at `N` in `{2, 3}` (100 states each) plus spectral projector
/// algebra at larger `N`.
pub fn projector_calculus(seed: u64, tol: &SuiteTolerances) -> LabResult<Vec<SuiteReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut one_q = Tally::new("weight identity: one q factor", CheckKind::Identity, tol.identity);
    let mut two_q_id = Tally::new("weight identity: two q factors", CheckKind::Identity, tol.identity);
    let mut two_q = Tally::new("weight bound: two q factors vs m^2", CheckKind::Inequality, tol.inequality_slack);
    let mut shift = Tally::new("shift rule for weights (all p/q pairs)", CheckKind::Identity, tol.identity);
    let mut oracle_alg = Tally::new("P_k algebra via oracle", CheckKind::Identity, tol.projector_oracle);
    let mut commute = Tally::new("[p_j, P_k] = 0 via oracle", CheckKind::Identity, tol.projector_oracle);
    let mut spectral_alg = Tally::new("P_k algebra via spectral projectors", CheckKind::Identity, tol.projector_spectral);
    let mut methods = Tally::new("moment vs Lagrange distributions", CheckKind::Identity, 1e-8);

    let k = 4;
    for n in [2usize, 3] {
        let m_n = WeightFunction::m_n(n);
        for _ in 0..100 {
            let psi = random_symmetric(n, k, &mut rng);
            let phi = random_orbital(k, &mut rng);
            let f = random_nonnegative_weights(n, &mut rng);

            // one q: ||f^{1/2} q_1 Psi||^2 = <Psi, f q_1 Psi> = <Psi, f m Psi>
            let q1 = oracle::apply_qj(&psi, &phi, 0)?;
            let a = oracle::apply_hat(&f.map(f64::sqrt), &q1, &phi)?.norm().powi(2);
            let b = psi.inner(&oracle::apply_hat(&f, &q1, &phi)?).re;
            let c = psi.inner(&oracle::apply_hat(&f.product(&m_n), &psi, &phi)?).re;
            one_q.record((a - b).abs().max((b - c).abs()));

            // two q: ||f^{1/2} q_1 q_2 Psi||^2 = <Psi, f q_1 q_2 Psi> <= N/(N-1) <Psi, f m^2 Psi>
            let q12 = oracle::apply_qj(&q1, &phi, 1)?;
            let a = oracle::apply_hat(&f.map(f64::sqrt), &q12, &phi)?.norm().powi(2);
            let b = psi.inner(&oracle::apply_hat(&f, &q12, &phi)?).re;
            let rhs = n as f64 / (n as f64 - 1.0)
                * psi.inner(&oracle::apply_hat(&f.product(&m_n).product(&m_n), &psi, &phi)?).re;
            two_q_id.record((a - b).abs());
            two_q.record(b - rhs);

            // shift: Q1 A f Q2 = Q1 (tau_n f) A Q2 with n = #q(Q2) - #q(Q1)
            let g = random_nonnegative_weights(n, &mut rng);
            let a_op = multiplication_operator(k, &mut rng);
            let pm = oracle::p_matrix(&phi);
            let qm = oracle::q_matrix(&phi);
            for (q1_is_q, q2_is_q) in [(false, false), (false, true), (true, false), (true, true)] {
                let m1 = if q1_is_q { &qm } else { &pm };
                let m2 = if q2_is_q { &qm } else { &pm };
                let shift_by = i64::from(q2_is_q) - i64::from(q1_is_q);
                let right = psi.apply_one_body(m2, 0);
                let lhs = oracle::apply_hat(&g, &right, &phi)?.apply_one_body(&a_op, 0).apply_one_body(m1, 0);
                let rhs = oracle::apply_hat(&g.shifted(shift_by), &right.apply_one_body(&a_op, 0), &phi)?
                    .apply_one_body(m1, 0);
                shift.record(lhs.max_abs_diff(&rhs));
            }

            // combinatorial projector algebra
            let pks: Vec<TensorState> = (0..=n).map(|kk| oracle::apply_pk(&psi, &phi, kk)).collect::<Result<_, _>>()?;
            let mut sum = TensorState::zeros(n, k)?;
            for (kk, pk) in pks.iter().enumerate() {
                sum = sum.add(pk);
                for l in 0..=n {
                    let again = oracle::apply_pk(pk, &phi, l)?;
                    let expected = if l == kk { pk.clone() } else { TensorState::zeros(n, k)? };
                    oracle_alg.record(again.max_abs_diff(&expected));
                }
                for j in 0..n {
                    let pj_pk = oracle::apply_pj(pk, &phi, j)?;
                    let pk_pj = oracle::apply_pk(&oracle::apply_pj(&psi, &phi, j)?, &phi, kk)?;
                    commute.record(pj_pk.max_abs_diff(&pk_pj));
                }
            }
            oracle_alg.record(sum.max_abs_diff(&psi));
        }
    }

    // spectral projectors at larger N on a wider window
    let modes = small_window(6);
    for n in [2usize, 4, 6, 8] {
        let basis = Arc::new(FockBasis::new(n, &modes)?);
        for _ in 0..5 {
            let amps = (0..basis.dim()).map(|_| complex(&mut rng)).collect();
            let state = FockVector::new(Arc::clone(&basis), amps)?.normalized().expect("nonzero");
            let phi = random_orbital(6, &mut rng);
            let counter = Counter::new(&phi, &basis)?;
            let mut total = vec![C64::new(0.0, 0.0); basis.dim()];
            for kk in 0..=n {
                let pk = counter.project(kk, &state)?;
                for (t, v) in total.iter_mut().zip(pk.amplitudes()) {
                    *t += v;
                }
                for l in 0..=n {
                    let again = counter.project(l, &pk)?;
                    let err = if l == kk { again.distance(&pk) } else { again.norm() };
                    spectral_alg.record(err);
                }
            }
            spectral_alg.record(state.distance(&state.with_amplitudes(total)));
            let fast = counter.distribution_with(&state, CountingMethod::Moments)?;
            let slow = counter.distribution_with(&state, CountingMethod::Lagrange)?;
            methods.record(fast.weights().iter().zip(slow.weights()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
    }
    Ok([one_q, two_q_id, two_q, shift, oracle_alg, commute, spectral_alg, methods]
        .into_iter()
        .map(Tally::finish)
        .collect())
}

/// Random two-body density matrix on the symmetric pair space with random
/// rank, and its one-body partial trace.
pub fn random_density_pair(k: usize, rng: &mut ChaCha8Rng) -> LabResult<(DensityMatrix, DensityMatrix)> {
    let dim = k * (k + 1) / 2;
    let rank = rng.gen_range(1..=dim);
    let a = DMatrix::from_fn(dim, rank, |_, _| complex(rng));
    let mut m = &a * a.adjoint();
    let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
    m /= C64::new(tr, 0.0);
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let g2 = DensityMatrix::from_matrix(2, k, m)?;
    let g1 = g2.partial_trace()?;
    Ok((g1, g2))
}

/// Sandwich and k-from-one inequalities on 200 random density matrices.
pub fn density_matrix_inequalities(seed: u64, tol: &SuiteTolerances) -> LabResult<Vec<SuiteReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd3);
    let slack = tol.inequality_slack;
    let mut lower = Tally::new("sandwich lower bound (1 - F <= gap)", CheckKind::Inequality, slack);
    let mut upper = Tally::new("sandwich upper bound (gap <= sqrt(8(1 - F)))", CheckKind::Inequality, slack);
    let mut kfrom1 = Tally::new("k-from-one reduction (k = 2)", CheckKind::Inequality, slack);
    let mut hypothesis = Tally::new("partial-trace hypothesis", CheckKind::Identity, slack);
    for i in 0..200 {
        let k = 2 + i % 4;
        let (g1, g2) = random_density_pair(k, &mut rng)?;
        // phi is sometimes the top eigenvector of gamma_1 so that small gaps are exercised
        let phi = if i % 3 == 0 { top_eigenvector(&g1) } else { random_orbital(k, &mut rng) };
        for g in [&g1, &g2] {
            let r = sandwich_check(g, &phi)?;
            lower.record(r.lower - r.gap);
            upper.record(r.gap - r.upper);
        }
        let r = k_from_one_check(&g1, &g2, &phi)?;
        kfrom1.record(r.lhs - r.rhs);
        hypothesis.record(r.partial_trace_defect);
    }
    Ok([lower, upper, kfrom1, hypothesis].into_iter().map(Tally::finish).collect())
}

fn top_eigenvector(g: &DensityMatrix) -> Orbital {
    let eig = g.matrix().clone().symmetric_eigen();
    let (idx, _) = eig.eigenvalues.iter().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, v)| {
        if *v > best.1 {
            (i, *v)
        } else {
            best
        }
    });
    Orbital::new(eig.eigenvectors.column(idx).iter().copied().collect()).expect("unit vector")
}

/// Orientation of the `k <-> N - k` mapping: product states in `phi` put
/// all weight on `k = 0`, orthogonal product states on `k = N`.
pub fn counting_orientation(tol: &SuiteTolerances) -> LabResult<Vec<SuiteReport>> {
    let mut t = Tally::new("counting orientation (w_0 / w_N)", CheckKind::Identity, tol.projector_spectral);
    let modes = small_window(4);
    for n in 1..=6usize {
        let basis = Arc::new(FockBasis::new(n, &modes)?);
        let phi = Orbital::mode(4, 1);
        let psi = Orbital::mode(4, 3);
        let counter = Counter::new(&phi, &basis)?;
        for method in [CountingMethod::Moments, CountingMethod::Lagrange] {
            let d = counter.distribution_with(&product_state(&phi, &basis)?, method)?;
            t.record((d.weight(0) - 1.0).abs());
            let d = counter.distribution_with(&product_state(&psi, &basis)?, method)?;
            t.record((d.weight(n) - 1.0).abs());
        }
    }
    Ok(vec![t.finish()])
}

/// Every suite, in a fixed order.
pub fn run_all(seed: u64, tol: &SuiteTolerances) -> LabResult<Vec<SuiteReport>> {
    let mut out = counting_orientation(tol)?;
    out.extend(oracle_equivalence(seed, tol)?);
    out.extend(projector_calculus(seed, tol)?);
    out.extend(density_matrix_inequalities(seed, tol)?);
    Ok(out)
}
