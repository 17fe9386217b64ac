//! First-quantized reference implementation for a handful of particles.
//!
//! States are dense arrays over `K^N` index tuples `(i_1, ..., i_N)`, with
//! particle 1 the most significant digit. Every operator here is built
//! literally from its definition and shares no code path with the
//! occupation-number machinery it is used to certify.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::counting::WeightFunction;
use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockVector, ModeBasis, Orbital, PotentialShape};
use crate::nls::Coupling;
use crate::observables::DensityMatrix;

/// Projector calculus guard: `N <= 3`, `K <= 6`.
pub const PROJECTOR_MAX_PARTICLES: usize = 3;
pub const PROJECTOR_MAX_MODES: usize = 6;
/// Largest tensor dimension for [`brute_hamiltonian`].
pub const HAMILTONIAN_MAX_DIM: usize = 10_000;

const ZERO: C64 = C64::new(0.0, 0.0);

fn digits(mut index: usize, n: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % k;
        index /= k;
    }
    out
}

fn undigits(d: &[usize], k: usize) -> usize {
    d.iter().fold(0, |acc, &x| acc * k + x)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

/// Dense `N`-particle wave function on `K` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorState {
    particles: usize,
    modes: usize,
    amps: Vec<C64>,
}

impl TensorState {
    pub fn new(particles: usize, modes: usize, amps: Vec<C64>) -> Result<Self> {
        let dim = modes
            .checked_pow(particles as u32)
            .ok_or_else(|| Error::SizeGuard(format!("{modes}^{particles} overflows")))?;
        if particles == 0 || modes == 0 {
            return Err(Error::InvalidArgument("need at least one particle and one mode".into()));
        }
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: amps.len() });
        }
        Ok(Self { particles, modes, amps })
    }

    pub fn zeros(particles: usize, modes: usize) -> Result<Self> {
        let dim = modes.pow(particles as u32);
        Self::new(particles, modes, vec![ZERO; dim])
    }

    /// `phi^{(x) N}`.
    pub fn product(phi: &Orbital, particles: usize) -> Self {
        let k = phi.len();
        let dim = k.pow(particles as u32);
        let c = phi.coeffs();
        let amps = (0..dim).map(|i| digits(i, particles, k).iter().map(|&p| c[p]).product()).collect();
        Self { particles, modes: k, amps }
    }

    /// `e_{i_1} (x) ... (x) e_{i_N}`.
    pub fn basis_vector(modes: usize, slots: &[usize]) -> Self {
        let n = slots.len();
        let mut amps = vec![ZERO; modes.pow(n as u32)];
        amps[undigits(slots, modes)] = C64::new(1.0, 0.0);
        Self { particles: n, modes, amps }
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, slots: &[usize]) -> C64 {
        self.amps[undigits(slots, self.modes)]
    }

    fn with(&self, amps: Vec<C64>) -> Self {
        Self { particles: self.particles, modes: self.modes, amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 1e-14).then(|| self.with(self.amps.iter().map(|a| a / n).collect()))
    }

    pub fn scaled(&self, s: C64) -> Self {
        self.with(self.amps.iter().map(|a| a * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.with(self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.with(self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Permutes particle labels: particle `j` of the result is particle
    /// `perm[j]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let (n, k) = (self.particles, self.modes);
        let amps = (0..self.dim())
            .map(|i| {
                let d = digits(i, n, k);
                let src: Vec<usize> = (0..n).map(|j| d[perm[j]]).collect();
                self.amps[undigits(&src, k)]
            })
            .collect();
        self.with(amps)
    }

    /// Average over all `N!` label permutations.
    pub fn symmetrize(&self) -> Result<Self> {
        if factorial(self.particles) > 720.0 {
            return Err(Error::SizeGuard(format!("{}! permutations exceed 720", self.particles)));
        }
        let perms = permutations(self.particles);
        let mut acc = vec![ZERO; self.dim()];
        for p in &perms {
            for (a, b) in acc.iter_mut().zip(&self.permuted(p).amps) {
                *a += b;
            }
        }
        let scale = 1.0 / perms.len() as f64;
        Ok(self.with(acc.into_iter().map(|a| a * scale).collect()))
    }

    /// `max |Psi - S Psi|`.
    pub fn asymmetry(&self) -> Result<f64> {
        Ok(self.max_abs_diff(&self.symmetrize()?))
    }

    /// `A` (a `K x K` matrix) acting on particle `j` (0-based).
    pub fn apply_one_body(&self, a: &DMatrix<C64>, j: usize) -> Self {
        let (n, k) = (self.particles, self.modes);
        assert!(j < n && a.nrows() == k && a.ncols() == k);
        let mut out = vec![ZERO; self.dim()];
        for (i, amp) in self.amps.iter().enumerate() {
            if *amp == ZERO {
                continue;
            }
            let mut d = digits(i, n, k);
            let q = d[j];
            for p in 0..k {
                d[j] = p;
                out[undigits(&d, k)] += a[(p, q)] * amp;
            }
        }
        self.with(out)
    }

    /// Dense matrix of the state as `Psi(i_1, rest)`: rows `i_1`, columns
    /// the remaining particles.
    fn split_first(&self, first: usize) -> DMatrix<C64> {
        let rows = self.modes.pow(first as u32);
        let cols = self.dim() / rows;
        DMatrix::from_fn(rows, cols, |r, c| self.amps[r * cols + c])
    }
}

fn projector_guard(psi: &TensorState, phi: &Orbital) -> Result<()> {
    if psi.particles > PROJECTOR_MAX_PARTICLES || psi.modes > PROJECTOR_MAX_MODES {
        return Err(Error::SizeGuard(format!(
            "projector oracle limited to N <= {PROJECTOR_MAX_PARTICLES}, K <= {PROJECTOR_MAX_MODES}"
        )));
    }
    if phi.len() != psi.modes {
        return Err(Error::DimensionMismatch { expected: psi.modes, got: phi.len() });
    }
    Ok(())
}

/// `|phi><phi|` as a `K x K` matrix.
pub fn p_matrix(phi: &Orbital) -> DMatrix<C64> {
    let c = phi.coeffs();
    DMatrix::from_fn(c.len(), c.len(), |p, q| c[p] * c[q].conj())
}

/// `1 - |phi><phi|`.
pub fn q_matrix(phi: &Orbital) -> DMatrix<C64> {
    DMatrix::identity(phi.len(), phi.len()) - p_matrix(phi)
}

/// `p_j Psi` (particle `j`, 0-based).
pub fn apply_pj(psi: &TensorState, phi: &Orbital, j: usize) -> Result<TensorState> {
    projector_guard(psi, phi)?;
    Ok(psi.apply_one_body(&p_matrix(phi), j))
}

/// `q_j Psi` (particle `j`, 0-based).
pub fn apply_qj(psi: &TensorState, phi: &Orbital, j: usize) -> Result<TensorState> {
    projector_guard(psi, phi)?;
    Ok(psi.apply_one_body(&q_matrix(phi), j))
}

/// `P_k Psi = sum_{|a| = k} prod_j p_j^{1 - a_j} q_j^{a_j} Psi`, summed
/// literally over all `a in {0,1}^N`.
pub fn apply_pk(psi: &TensorState, phi: &Orbital, k: usize) -> Result<TensorState> {
    projector_guard(psi, phi)?;
    let n = psi.particles;
    let (p, q) = (p_matrix(phi), q_matrix(phi));
    let mut acc = TensorState::zeros(n, psi.modes)?;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let mut term = psi.clone();
        for j in 0..n {
            term = term.apply_one_body(if mask >> j & 1 == 1 { &q } else { &p }, j);
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// `f^ Psi = sum_k f(k) P_k Psi` with the combinatorial `P_k`.
pub fn apply_hat(f: &WeightFunction, psi: &TensorState, phi: &Orbital) -> Result<TensorState> {
    let n = psi.particles;
    if f.particles() != n {
        return Err(Error::DimensionMismatch { expected: n + 1, got: f.values().len() });
    }
    let mut acc = TensorState::zeros(n, psi.modes)?;
    for k in 0..=n {
        acc = acc.add(&apply_pk(psi, phi, k)?.scaled(C64::new(f.at(k), 0.0)));
    }
    Ok(acc)
}

/// `w_k = <Psi, P_k Psi>` with the combinatorial `P_k`.
pub fn pk_weights(psi: &TensorState, phi: &Orbital) -> Result<Vec<f64>> {
    (0..=psi.particles).map(|k| Ok(psi.inner(&apply_pk(psi, phi, k)?).re)).collect()
}

pub fn alpha(psi: &TensorState, phi: &Orbital) -> Result<f64> {
    let n = psi.particles as f64;
    Ok(pk_weights(psi, phi)?.iter().enumerate().map(|(k, w)| k as f64 / n * w).sum())
}

pub fn beta(psi: &TensorState, phi: &Orbital) -> Result<f64> {
    let n = psi.particles as f64;
    Ok(pk_weights(psi, phi)?.iter().enumerate().map(|(k, w)| (k as f64 / n).sqrt() * w).sum())
}

fn occupation_of(slots: &[usize], k: usize) -> Vec<u8> {
    let mut occ = vec![0u8; k];
    for &s in slots {
        occ[s] += 1;
    }
    occ
}

fn multinomial_sqrt(occ: &[u8], n: usize) -> f64 {
    (factorial(n) / occ.iter().map(|&m| factorial(m as usize)).product::<f64>()).sqrt()
}

/// Occupation amplitudes `sqrt(N! / prod n_p!) Psi(sorted slots)`.
pub fn firstq_to_fock(psi: &TensorState, basis: &Arc<FockBasis>) -> Result<FockVector> {
    if basis.particles() != psi.particles || basis.mode_count() != psi.modes {
        return Err(Error::InvalidArgument("tensor state and Fock basis disagree on N or K".into()));
    }
    let asym = psi.asymmetry()?;
    if asym > 1e-10 {
        return Err(Error::Asymmetric(asym));
    }
    let amps = basis
        .iter()
        .map(|occ| {
            let slots: Vec<usize> =
                occ.iter().enumerate().flat_map(|(p, &m)| std::iter::repeat_n(p, m as usize)).collect();
            psi.amplitude(&slots) * multinomial_sqrt(occ, psi.particles)
        })
        .collect();
    FockVector::new(Arc::clone(basis), amps)
}

/// Inverse of [`firstq_to_fock`].
pub fn fock_to_firstq(phi: &FockVector) -> TensorState {
    let basis = phi.basis();
    let (n, k) = (basis.particles(), basis.mode_count());
    let dim = k.pow(n as u32);
    let amps = (0..dim)
        .map(|i| {
            let occ = occupation_of(&digits(i, n, k), k);
            let idx = basis.index_of(&occ).expect("every tuple has an occupation");
            phi.amplitudes()[idx] / multinomial_sqrt(&occ, n)
        })
        .collect();
    TensorState { particles: n, modes: k, amps }
}

/// Columns: the first-quantized images of the Fock basis vectors.
pub fn symmetric_isometry(basis: &Arc<FockBasis>) -> DMatrix<C64> {
    let (n, k) = (basis.particles(), basis.mode_count());
    let dim = k.pow(n as u32);
    let mut b = DMatrix::zeros(dim, basis.dim());
    for col in 0..basis.dim() {
        let mut amps = vec![ZERO; basis.dim()];
        amps[col] = C64::new(1.0, 0.0);
        let v = FockVector::new(Arc::clone(basis), amps).expect("unit vector");
        for (row, a) in fock_to_firstq(&v).amps.into_iter().enumerate() {
            b[(row, col)] = a;
        }
    }
    b
}

/// `(1/L) int_0^L V_per(r) exp(-i q r) dr` by the trapezoid rule on a fine
/// periodic grid, with `V_per` the periodization of the line profile.
pub fn pair_element(shape: PotentialShape, eps: f64, length: f64, q: f64) -> f64 {
    const SAMPLES: usize = 1 << 14;
    const IMAGES: i32 = 6;
    let h = length / SAMPLES as f64;
    let mut acc = 0.0;
    for j in 0..SAMPLES {
        let r = -0.5 * length + j as f64 * h;
        let v: f64 = (-IMAGES..=IMAGES).map(|m| shape.profile(r + f64::from(m) * length, eps)).sum();
        acc += v * (q * r).cos();
    }
    acc * h / length
}

/// `sum_i k_{(i)}^2 + (kappa/N) sum_{i<j} V_eps(x_i - x_j)` projected onto
/// the window, as a dense `K^N x K^N` matrix.
pub fn brute_hamiltonian(
    particles: usize,
    modes: &ModeBasis,
    shape: PotentialShape,
    eps: f64,
    coupling: Coupling,
) -> Result<DMatrix<C64>> {
    let k = modes.len();
    let dim = k
        .checked_pow(particles as u32)
        .filter(|&d| d <= HAMILTONIAN_MAX_DIM)
        .ok_or_else(|| Error::SizeGuard(format!("{k}^{particles} exceeds {HAMILTONIAN_MAX_DIM}")))?;
    let ks = modes.wavenumbers();
    let length = modes.grid().length();
    let dk = 2.0 * PI / length;
    // element <e_a e_b | V | e_c e_d> = delta(a+b, c+d) W(a - c)
    let w: Vec<f64> = (-(k as i64 - 1)..k as i64).map(|d| pair_element(shape, eps, length, dk * d as f64)).collect();
    let w_at = |d: i64| w[(d + k as i64 - 1) as usize];
    let g = coupling.value() / particles as f64;
    let mut h = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let d = digits(col, particles, k);
        let kinetic: f64 = d.iter().map(|&p| ks[p] * ks[p]).sum();
        h[(col, col)] += C64::new(kinetic, 0.0);
        if g == 0.0 {
            continue;
        }
        for i in 0..particles {
            for j in i + 1..particles {
                let (c, dd) = (d[i], d[j]);
                for a in 0..k {
                    let b = (c + dd) as i64 - a as i64;
                    if !(0..k as i64).contains(&b) {
                        continue;
                    }
                    let mut out = d.clone();
                    out[i] = a;
                    out[j] = b as usize;
                    h[(undigits(&out, k), col)] += C64::new(g * w_at(a as i64 - c as i64), 0.0);
                }
            }
        }
    }
    Ok(h)
}

/// `B^dag H B` with `B` the symmetric isometry: the brute-force Hamiltonian
/// in the occupation basis.
pub fn symmetric_restriction(h: &DMatrix<C64>, basis: &Arc<FockBasis>) -> DMatrix<C64> {
    let b = symmetric_isometry(basis);
    b.adjoint() * h * b
}

/// `<Psi, H Psi> / N`.
pub fn energy_per_particle(psi: &TensorState, h: &DMatrix<C64>) -> f64 {
    let v = nalgebra::DVector::from_column_slice(&psi.amps);
    (v.adjoint() * h * &v)[(0, 0)].re / psi.particles as f64
}

/// `gamma_{pq} = sum_rest Psi(p, rest) conj Psi(q, rest)`.
pub fn rdm1(psi: &TensorState) -> Result<DensityMatrix> {
    let m = psi.split_first(1);
    DensityMatrix::from_matrix(1, psi.modes, &m * m.adjoint())
}

/// Two-body matrix from `G(ab; cd) = sum_rest Psi(a, b, rest) conj Psi(c, d, rest)`.
pub fn rdm2(psi: &TensorState) -> Result<DensityMatrix> {
    if psi.particles < 2 {
        return Err(Error::InvalidArgument("two-body density matrix needs N >= 2".into()));
    }
    let m = psi.split_first(2);
    DensityMatrix::from_tensor(psi.modes, &(&m * m.adjoint()))
}
