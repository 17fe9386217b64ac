//! Counting particles outside a condensate orbital.
//!
//! `P_k` projects onto states with exactly `k` particles not in `phi`. It is
//! realized spectrally: `P_k` is the eigenprojector of
//! `N_phi = a^dag(phi) a(phi)` at eigenvalue `N - k`. Eigenvalue `j` of
//! `N_phi` therefore maps to `k = N - j`.

use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{number_operator, FockBasis, FockVector, Orbital, SparseHermitian};
use crate::observables::rdm1;

/// Largest `N` for which the moment/Vandermonde path is attempted.
pub const MOMENT_PARTICLE_LIMIT: usize = 12;

const NEGATIVE_CLAMP: f64 = 1e-10;
const SUM_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightTag {
    /// `m_N(k) = k / N`.
    MN,
    /// `n_N(k) = sqrt(k / N)`.
    NN,
    Custom,
}

/// Tabulated `f(k)`, `k = 0..=N`, defining `f^ = sum_k f(k) P_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFunction {
    values: Vec<f64>,
    tag: WeightTag,
}

impl WeightFunction {
    pub fn m_n(n: usize) -> Self {
        assert!(n >= 1);
        Self { values: (0..=n).map(|k| k as f64 / n as f64).collect(), tag: WeightTag::MN }
    }

    pub fn n_n(n: usize) -> Self {
        assert!(n >= 1);
        Self { values: (0..=n).map(|k| (k as f64 / n as f64).sqrt()).collect(), tag: WeightTag::NN }
    }

    pub fn custom(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("weight function needs finite values for k = 0..=N".into()));
        }
        Ok(Self { values, tag: WeightTag::Custom })
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self { values: vec![value; n + 1], tag: WeightTag::Custom }
    }

    pub fn indicator(n: usize, k: usize) -> Self {
        Self { values: (0..=n).map(|j| f64::from(u8::from(j == k))).collect(), tag: WeightTag::Custom }
    }

    pub fn particles(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tag(&self) -> &WeightTag {
        &self.tag
    }

    pub fn at(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// Pointwise product; `(fg)^ = f^ g^`.
    pub fn product(&self, other: &Self) -> Self {
        assert_eq!(self.values.len(), other.values.len());
        Self { values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(), tag: WeightTag::Custom }
    }

    /// Pointwise map, e.g. `sqrt` for `f^{1/2}`.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> Self {
        Self { values: self.values.iter().map(|&v| g(v)).collect(), tag: WeightTag::Custom }
    }

    /// Shifted table `(tau_d f)(k) = f(k + d)`, zero outside `0..=N`.
    pub fn shifted(&self, d: i64) -> Self {
        let n = self.values.len() as i64;
        let values = (0..n)
            .map(|k| {
                let s = k + d;
                if (0..n).contains(&s) {
                    self.values[s as usize]
                } else {
                    0.0
                }
            })
            .collect();
        Self { values, tag: WeightTag::Custom }
    }
}

/// `w_k = <Phi, P_k Phi>`, `k = 0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct CountingDistribution {
    weights: Vec<f64>,
}

impl CountingDistribution {
    /// Validates the weights: entries in `[-1e-10, 0)` are clamped to zero
    /// with a warning, anything lower or a total off by more than `1e-8` is
    /// an error.
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::Counting("distribution needs N >= 1".into()));
        }
        for (k, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() || *w < -NEGATIVE_CLAMP {
                return Err(Error::Counting(format!("weight w_{k} = {w:e} is negative")));
            }
            if *w < 0.0 {
                log::warn!("clamping w_{k} = {w:e} to zero");
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Counting(format!("weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    pub fn particles(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    /// `<Phi, f^ Phi> = sum_k f(k) w_k`.
    pub fn expectation(&self, f: &WeightFunction) -> f64 {
        assert_eq!(f.values.len(), self.weights.len(), "weight function and distribution disagree on N");
        self.weights.iter().zip(&f.values).map(|(w, v)| w * v).sum()
    }

    pub fn alpha(&self) -> f64 {
        self.expectation(&WeightFunction::m_n(self.particles()))
    }

    pub fn beta(&self) -> f64 {
        self.expectation(&WeightFunction::n_n(self.particles()))
    }

    /// One row per `k`: `k,w_k,n_N(k),m_N(k)`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.particles();
        writeln!(out, "k,w_k,n_N(k),m_N(k)")?;
        for (k, w) in self.weights.iter().enumerate() {
            let m = k as f64 / n as f64;
            writeln!(out, "{k},{w:e},{:e},{m:e}", m.sqrt())?;
        }
        Ok(())
    }
}

/// How [`Counter::distribution`] obtains the weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountingMethod {
    /// Moments `<Phi, N_phi^m Phi>` and a Vandermonde solve, falling back
    /// to [`CountingMethod::Lagrange`] when the result fails validation.
    Moments,
    /// Lagrange interpolation projectors applied to `Phi`.
    Lagrange,
}

/// `N_phi` on a fixed basis, reused across many states.
#[derive(Clone, Debug)]
pub struct Counter {
    basis: Arc<FockBasis>,
    number: SparseHermitian,
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (y, x) in y.iter_mut().zip(x) {
        *y += a * x;
    }
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

impl Counter {
    pub fn new(phi: &Orbital, basis: &Arc<FockBasis>) -> Result<Self> {
        if phi.len() != basis.mode_count() {
            return Err(Error::DimensionMismatch { expected: basis.mode_count(), got: phi.len() });
        }
        Ok(Self { basis: Arc::clone(basis), number: number_operator(phi, basis) })
    }

    pub fn number_operator(&self) -> &SparseHermitian {
        &self.number
    }

    fn particles(&self) -> usize {
        self.basis.particles()
    }

    fn check(&self, state: &FockVector) -> Result<()> {
        if !Arc::ptr_eq(state.basis(), &self.basis) && **state.basis() != *self.basis {
            return Err(Error::InvalidArgument("state lives on a different Fock basis".into()));
        }
        Ok(())
    }

    /// `P_k x = prod_{j != N-k} (N_phi - j) x / ((N - k) - j)`.
    fn project_raw(&self, k: usize, x: &[C64]) -> Vec<C64> {
        let n = self.particles();
        let target = (n - k) as f64;
        let mut v = x.to_vec();
        for j in (0..=n).filter(|&j| j != n - k) {
            let mut next = self.number.apply(&v);
            axpy(&mut next, C64::new(-(j as f64), 0.0), &v);
            let denom = target - j as f64;
            next.iter_mut().for_each(|z| *z /= denom);
            v = next;
        }
        v
    }

    /// `P_k Phi`.
    pub fn project(&self, k: usize, state: &FockVector) -> Result<FockVector> {
        self.check(state)?;
        if k > self.particles() {
            return Err(Error::OutOfRange { value: k as f64, lo: 0.0, hi: self.particles() as f64 });
        }
        Ok(state.with_amplitudes(self.project_raw(k, state.amplitudes())))
    }

    /// `f^ Phi = sum_k f(k) P_k Phi`.
    pub fn hat_apply(&self, f: &WeightFunction, state: &FockVector) -> Result<FockVector> {
        self.check(state)?;
        let n = self.particles();
        if f.particles() != n {
            return Err(Error::DimensionMismatch { expected: n + 1, got: f.values.len() });
        }
        let mut out = vec![C64::new(0.0, 0.0); state.dim()];
        for k in 0..=n {
            if f.at(k) != 0.0 {
                axpy(&mut out, C64::new(f.at(k), 0.0), &self.project_raw(k, state.amplitudes()));
            }
        }
        Ok(state.with_amplitudes(out))
    }

    fn lagrange_weights(&self, x: &[C64]) -> Vec<f64> {
        (0..=self.particles()).map(|k| dot(x, &self.project_raw(k, x)).re).collect()
    }

    fn moment_weights(&self, x: &[C64]) -> Option<Vec<f64>> {
        let n = self.particles();
        let mut moments = Vec::with_capacity(n + 1);
        let mut v = x.to_vec();
        moments.push(dot(x, &v).re);
        for _ in 0..n {
            v = self.number.apply(&v);
            moments.push(dot(x, &v).re);
        }
        let vander = DMatrix::from_fn(n + 1, n + 1, |m, j| (j as f64).powi(m as i32));
        let solved = vander.lu().solve(&DVector::from_vec(moments))?;
        // eigenvalue j of N_phi carries k = N - j
        Some((0..=n).map(|k| solved[n - k]).collect())
    }

    /// Weights `w_k`, with the moment path falling back to Lagrange
    /// projectors when its result does not validate.
    pub fn distribution_with(&self, state: &FockVector, method: CountingMethod) -> Result<CountingDistribution> {
        self.check(state)?;
        let x = state.amplitudes();
        if method == CountingMethod::Moments && self.particles() <= MOMENT_PARTICLE_LIMIT {
            if let Some(w) = self.moment_weights(x) {
                match CountingDistribution::new(w) {
                    Ok(d) => return Ok(d),
                    Err(e) => log::warn!("moment path rejected ({e}); using Lagrange projectors"),
                }
            }
        }
        CountingDistribution::new(self.lagrange_weights(x))
    }

    pub fn distribution(&self, state: &FockVector) -> Result<CountingDistribution> {
        self.distribution_with(state, CountingMethod::Moments)
    }
}

/// `w_k = <Phi, P_k^phi Phi>` for `k = 0..=N`.
pub fn pk_distribution(state: &FockVector, phi: &Orbital) -> Result<CountingDistribution> {
    Counter::new(phi, state.basis())?.distribution(state)
}

/// `alpha_N = sum_k (k/N) w_k`.
pub fn alpha(state: &FockVector, phi: &Orbital) -> Result<f64> {
    Ok(pk_distribution(state, phi)?.alpha())
}

/// `beta_N = sum_k sqrt(k/N) w_k`.
pub fn beta(state: &FockVector, phi: &Orbital) -> Result<f64> {
    Ok(pk_distribution(state, phi)?.beta())
}

pub fn hat_apply(f: &WeightFunction, state: &FockVector, phi: &Orbital) -> Result<FockVector> {
    Counter::new(phi, state.basis())?.hat_apply(f, state)
}

/// `|| grad_1 q_1 Phi ||^2 = Tr(q T q gamma_1)` with `T = diag(k_p^2)` and
/// `q = 1 - |phi><phi|`.
pub fn grad_q1_norm_sq(state: &FockVector, phi: &Orbital) -> f64 {
    let gamma = rdm1(state);
    let k = phi.len();
    let c = DVector::from_column_slice(phi.coeffs());
    let q = DMatrix::<C64>::identity(k, k) - &c * c.adjoint();
    let ks = state.basis().modes().wavenumbers();
    let t = DMatrix::from_fn(k, k, |i, j| if i == j { C64::new(ks[i] * ks[i], 0.0) } else { C64::new(0.0, 0.0) });
    let value = (&q * t * &q * gamma.matrix()).trace().re;
    value.max(0.0)
}
