//! Reduced density matrices and the distances that compare them with
//! condensate projectors.
//!
//! One-body matrices live on the mode window (`K x K`, slot order). Two-body
//! matrices live on the symmetric pair basis `s_pq`, `p <= q`, ordered
//! `(0,0), (0,1), ..., (0,K-1), (1,1), ...`, with
//! `s_pq = (e_p (x) e_q + e_q (x) e_p) / sqrt 2` for `p < q` and
//! `s_pp = e_p (x) e_p`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{ladder, FockVector, Orbital, SparseHermitian};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect, trace_norm};

/// Slack used by every inequality check in this module.
pub const INEQUALITY_SLACK: f64 = 1e-10;

/// Index of the symmetric pair `(p, q)`, `p <= q`, among `K` modes.
pub fn pair_index(p: usize, q: usize, k: usize) -> usize {
    let (p, q) = if p <= q { (p, q) } else { (q, p) };
    p * (2 * k - p + 1) / 2 + (q - p)
}

fn pair_list(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|p| (p..k).map(move |q| (p, q))).collect()
}

fn pair_weight(p: usize, q: usize) -> f64 {
    if p == q {
        1.0
    } else {
        std::f64::consts::SQRT_2
    }
}

/// Hermitian, unit-trace `k`-particle reduced density matrix, `k` in {1, 2}.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    order: usize,
    modes: usize,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Wraps a matrix given in the basis described in the module docs.
    pub fn from_matrix(order: usize, modes: usize, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = match order {
            1 => modes,
            2 => modes * (modes + 1) / 2,
            other => return Err(Error::InvalidArgument(format!("only orders 1 and 2 are supported, got {other}"))),
        };
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: matrix.nrows() });
        }
        Ok(Self { order, modes, matrix })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|c| c.re).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Two-body kernel `G(ab; cd) = <e_a e_b | gamma | e_c e_d>` as a
    /// `K^2 x K^2` matrix with row `a K + b`, column `c K + d`.
    pub fn to_tensor(&self) -> Result<DMatrix<C64>> {
        if self.order != 2 {
            return Err(Error::InvalidArgument("tensor form is defined for two-body matrices".into()));
        }
        let k = self.modes;
        let mut g = DMatrix::zeros(k * k, k * k);
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    for d in 0..k {
                        let m = self.matrix[(pair_index(a, b, k), pair_index(c, d, k))];
                        g[(a * k + b, c * k + d)] = m / (pair_weight(a, b) * pair_weight(c, d));
                    }
                }
            }
        }
        Ok(g)
    }

    /// Inverse of [`to_tensor`](Self::to_tensor) for a kernel supported on
    /// the symmetric subspace.
    pub fn from_tensor(modes: usize, g: &DMatrix<C64>) -> Result<Self> {
        let k = modes;
        if g.nrows() != k * k || g.ncols() != k * k {
            return Err(Error::DimensionMismatch { expected: k * k, got: g.nrows() });
        }
        let pairs = pair_list(k);
        let m = DMatrix::from_fn(pairs.len(), pairs.len(), |i, j| {
            let ((a, b), (c, d)) = (pairs[i], pairs[j]);
            g[(a * k + b, c * k + d)] * pair_weight(a, b) * pair_weight(c, d)
        });
        Self::from_matrix(2, k, m)
    }

    /// `Tr_2` of a two-body matrix.
    pub fn partial_trace(&self) -> Result<DensityMatrix> {
        let g = self.to_tensor()?;
        let k = self.modes;
        let m = DMatrix::from_fn(k, k, |a, c| (0..k).map(|b| g[(a * k + b, c * k + b)]).sum());
        Self::from_matrix(1, k, m)
    }

    /// Checks hermiticity (1e-12), trace (1e-10) and positivity (-1e-10).
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > 1e-12 {
            return Err(Error::InvalidArgument(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("density matrix trace {tr}")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(Error::InvalidArgument(format!("density matrix has eigenvalue {min}")));
        }
        Ok(())
    }

    /// Binary export: magic `b"BGRDM001"`, `u64` order, `u64` mode count,
    /// 8-byte ordering tag (`b"MODES\0\0\0"` or `b"SYMPAIR\0"`), `u64`
    /// dimension, then the matrix row-major as `(re, im)` little-endian `f64`.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(b"BGRDM001")?;
        out.write_all(&(self.order as u64).to_le_bytes())?;
        out.write_all(&(self.modes as u64).to_le_bytes())?;
        out.write_all(if self.order == 1 { b"MODES\0\0\0" } else { b"SYMPAIR\0" })?;
        out.write_all(&(self.dim() as u64).to_le_bytes())?;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let v = self.matrix[(i, j)];
                out.write_all(&v.re.to_le_bytes())?;
                out.write_all(&v.im.to_le_bytes())?;
            }
        }
        Ok(())
    }
}

/// `phi^{(x) k}` in the basis of a `k`-body density matrix.
pub fn product_vector(phi: &Orbital, order: usize) -> DVector<C64> {
    let c = phi.coeffs();
    match order {
        1 => DVector::from_column_slice(c),
        2 => {
            let pairs = pair_list(c.len());
            DVector::from_iterator(pairs.len(), pairs.iter().map(|&(p, q)| c[p] * c[q] * pair_weight(p, q)))
        }
        other => panic!("unsupported order {other}"),
    }
}

/// `gamma_{pq} = <a_q^dag a_p> / N`.
pub fn rdm1(phi: &FockVector) -> DensityMatrix {
    let basis = phi.basis();
    let k = basis.mode_count();
    let amps = phi.amplitudes();
    let mut m = DMatrix::<C64>::zeros(k, k);
    let mut work = vec![0u8; k];
    for (s, occ) in basis.iter().enumerate() {
        if amps[s].norm_sqr() == 0.0 {
            continue;
        }
        for p in 0..k {
            if occ[p] == 0 {
                continue;
            }
            for q in 0..k {
                work.copy_from_slice(occ);
                let f = ladder(&mut work, &[p], &[q]).expect("occupation checked");
                let t = basis.rank(&work);
                m[(p, q)] += amps[t].conj() * amps[s] * f;
            }
        }
    }
    m /= C64::new(basis.particles() as f64, 0.0);
    DensityMatrix { order: 1, modes: k, matrix: m }
}

/// Two-body reduced density matrix on the symmetric pair basis,
/// `G(ab; cd) = <a_c^dag a_d^dag a_b a_a> / (N (N - 1))`.
pub fn rdm2(phi: &FockVector) -> Result<DensityMatrix> {
    let basis = phi.basis();
    let n = basis.particles();
    if n < 2 {
        return Err(Error::InvalidArgument("two-body density matrix needs N >= 2".into()));
    }
    let k = basis.mode_count();
    let amps = phi.amplitudes();
    let mut g = DMatrix::<C64>::zeros(k * k, k * k);
    let mut work = vec![0u8; k];
    for (s, occ) in basis.iter().enumerate() {
        if amps[s].norm_sqr() == 0.0 {
            continue;
        }
        for a in 0..k {
            for b in 0..k {
                if occ[a] == 0 || occ[b] < 1 + u8::from(a == b) {
                    continue;
                }
                for c in 0..k {
                    for d in 0..k {
                        work.copy_from_slice(occ);
                        let f = ladder(&mut work, &[a, b], &[d, c]).expect("occupation checked");
                        let t = basis.rank(&work);
                        g[(a * k + b, c * k + d)] += amps[t].conj() * amps[s] * f;
                    }
                }
            }
        }
    }
    g /= C64::new((n * (n - 1)) as f64, 0.0);
    DensityMatrix::from_tensor(k, &g)
}

/// `Tr | gamma - |phi^k><phi^k| |` by full eigendecomposition.
pub fn trace_norm_gap(gamma: &DensityMatrix, phi: &Orbital) -> f64 {
    let v = product_vector(phi, gamma.order);
    let diff = &gamma.matrix - &v * v.adjoint();
    trace_norm(&diff)
}

/// `<phi^k, gamma phi^k>`; values outside `[-1e-10, 1 + 1e-10]` are errors,
/// values within the slack are clamped to `[0, 1]`.
pub fn fidelity(gamma: &DensityMatrix, phi: &Orbital) -> Result<f64> {
    let v = product_vector(phi, gamma.order);
    let f = (v.adjoint() * &gamma.matrix * &v)[(0, 0)].re;
    if !(-INEQUALITY_SLACK..=1.0 + INEQUALITY_SLACK).contains(&f) {
        return Err(Error::OutOfRange { value: f, lo: 0.0, hi: 1.0 });
    }
    Ok(f.clamp(0.0, 1.0))
}

/// `1 - F <= Tr|gamma - P| <= sqrt(8 (1 - F))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SandwichReport {
    pub lower: f64,
    pub gap: f64,
    pub upper: f64,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.lower <= self.gap + INEQUALITY_SLACK && self.gap <= self.upper + INEQUALITY_SLACK
    }

    /// Smallest distance to either bound (negative on violation).
    pub fn margin(&self) -> f64 {
        (self.gap - self.lower).min(self.upper - self.gap)
    }
}

pub fn sandwich_check(gamma: &DensityMatrix, phi: &Orbital) -> Result<SandwichReport> {
    let f = fidelity(gamma, phi)?;
    let deficit = 1.0 - f;
    Ok(SandwichReport { lower: deficit, gap: trace_norm_gap(gamma, phi), upper: (8.0 * deficit).sqrt() })
}

/// `1 - <phi^k, gamma_k phi^k> <= k (1 - <phi, gamma_1 phi>)` together with
/// the partial-trace hypothesis `Tr_2 gamma_2 = gamma_1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KFromOneReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `max |Tr_2 gamma_2 - gamma_1|`.
    pub partial_trace_defect: f64,
}

impl KFromOneReport {
    pub fn hypothesis_holds(&self) -> bool {
        self.partial_trace_defect <= INEQUALITY_SLACK
    }

    pub fn inequality_holds(&self) -> bool {
        self.lhs <= self.rhs + INEQUALITY_SLACK
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

pub fn k_from_one_check(gamma1: &DensityMatrix, gamma_k: &DensityMatrix, phi: &Orbital) -> Result<KFromOneReport> {
    if gamma1.order != 1 || gamma_k.order != 2 {
        return Err(Error::InvalidArgument("expected a one-body and a two-body density matrix".into()));
    }
    let reduced = gamma_k.partial_trace()?;
    let partial_trace_defect =
        (&reduced.matrix - &gamma1.matrix).iter().map(|c| c.norm()).fold(0.0, f64::max);
    let lhs = 1.0 - fidelity(gamma_k, phi)?;
    let rhs = 2.0 * (1.0 - fidelity(gamma1, phi)?);
    Ok(KFromOneReport { lhs, rhs, partial_trace_defect })
}

/// `(1/N) <Phi, H Phi>` for normalized `Phi`.
pub fn energy_per_particle(phi: &FockVector, h: &SparseHermitian) -> f64 {
    h.expectation(phi.amplitudes()) / phi.particles() as f64
}
