//! Krylov (Lanczos) approximation of `exp(-i t H) Phi` for sparse Hermitian `H`.
//!
//! Each call tridiagonalizes `H` on the Krylov space of the current vector
//! with full re-orthogonalization, exponentiates the small tridiagonal
//! matrix exactly, and shrinks the substep until the a-posteriori error
//! estimate `beta_m |e_m^T exp(-i h T) e_1|` meets the tolerance. The Krylov
//! space does not depend on the substep, so shrinking is free.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{FockVector, SparseHermitian};
use crate::linalg::expm_first_column;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorConfig {
    pub dt: f64,
    pub krylov_dim: usize,
    pub tolerance: f64,
    pub max_substeps: usize,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self { dt: 0.05, krylov_dim: 30, tolerance: 1e-10, max_substeps: 10_000 }
    }
}

impl PropagatorConfig {
    pub fn with_dt(dt: f64) -> Self {
        Self { dt, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("propagator dt must be positive, got {}", self.dt)));
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-4) {
            return Err(Error::OutOfRange { value: self.tolerance, lo: 0.0, hi: 1e-4 });
        }
        if self.krylov_dim < 2 || self.max_substeps == 0 {
            return Err(Error::InvalidArgument("Krylov dimension must be >= 2 and substep budget >= 1".into()));
        }
        Ok(())
    }
}

struct Krylov {
    basis: Vec<Vec<C64>>,
    tridiag: DMatrix<f64>,
    /// Residual norm after the last vector; zero on breakdown.
    residual: f64,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn lanczos(h: &SparseHermitian, start: &[C64], max_dim: usize) -> Krylov {
    let n0 = norm(start);
    let mut basis = vec![start.iter().map(|x| x / n0).collect::<Vec<_>>()];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut residual = 0.0;
    let max_dim = max_dim.min(h.dim());
    loop {
        let j = basis.len() - 1;
        let mut w = h.apply(&basis[j]);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        // full re-orthogonalization, two passes
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
            }
        }
        let b = norm(&w);
        let anorm = alpha.iter().chain(&beta).fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        if b <= 1e-12 * anorm {
            // invariant subspace: the projected exponential is exact
            break;
        }
        if basis.len() == max_dim {
            residual = b;
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    Krylov { basis, tridiag: t, residual }
}

/// `exp(-i dt H) Phi`. `dt` may be zero or negative.
pub fn expm_apply(h: &SparseHermitian, phi: &FockVector, dt: f64, cfg: &PropagatorConfig) -> Result<FockVector> {
    if h.dim() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: phi.dim() });
    }
    let mut v = phi.amplitudes().to_vec();
    let v_norm = norm(&v);
    if v_norm == 0.0 {
        return Err(Error::InvalidArgument("cannot propagate the zero vector".into()));
    }
    if dt == 0.0 {
        return Ok(phi.clone());
    }
    let sign = dt.signum();
    let mut remaining = dt.abs();
    let mut trial = remaining;
    let mut substeps = 0;
    let mut last_estimate = 0.0;
    while remaining > 0.0 {
        let kry = lanczos(h, &v, cfg.krylov_dim);
        let beta0 = norm(&v);
        let mut step = trial.min(remaining);
        let coeffs = loop {
            substeps += 1;
            if substeps > cfg.max_substeps {
                return Err(Error::NonConvergence { substeps: cfg.max_substeps, remaining, estimate: last_estimate });
            }
            let y = expm_first_column(&kry.tridiag, sign * step);
            let estimate = kry.residual * y.last().map_or(0.0, |c| c.norm()) * beta0;
            last_estimate = estimate;
            if estimate <= cfg.tolerance {
                break y;
            }
            step *= 0.5;
        };
        let mut next = vec![C64::new(0.0, 0.0); v.len()];
        for (b, c) in kry.basis.iter().zip(&coeffs) {
            let c = c * beta0;
            next.iter_mut().zip(b).for_each(|(n, x)| *n += c * x);
        }
        v = next;
        remaining -= step;
        if remaining < 1e-15 * dt.abs() {
            remaining = 0.0;
        }
        trial = 2.0 * step;
    }
    Ok(phi.with_amplitudes(v))
}

/// Sampled many-body trajectory.
#[derive(Clone, Debug)]
pub struct FockTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<FockVector>,
    pub norms: Vec<f64>,
    /// `<Phi, H Phi>` at each sample.
    pub energies: Vec<f64>,
}

impl FockTrajectory {
    pub fn norm_drift(&self) -> f64 {
        self.norms.iter().map(|n| (n - self.norms[0]).abs()).fold(0.0, f64::max)
    }

    /// `max |E(t) - E(0)| / (|E(0)| + 1)`.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energies[0];
        self.energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / (e0.abs() + 1.0)
    }
}

/// Evolves `phi0` to `t_final` in steps of (at most) `cfg.dt`, sampling
/// every `sample_every` steps and at the terminal time.
pub fn evolve(
    h: &SparseHermitian,
    phi0: &FockVector,
    t_final: f64,
    cfg: &PropagatorConfig,
    sample_every: usize,
) -> Result<FockTrajectory> {
    cfg.validate()?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_final must be nonnegative, got {t_final}")));
    }
    if sample_every == 0 {
        return Err(Error::InvalidArgument("sample_every must be at least 1".into()));
    }
    let steps = (t_final / cfg.dt - 1e-9).ceil().max(0.0) as usize;
    let dt = if steps == 0 { cfg.dt } else { t_final / steps as f64 };
    let mut traj = FockTrajectory {
        times: vec![0.0],
        states: vec![phi0.clone()],
        norms: vec![phi0.norm()],
        energies: vec![h.expectation(phi0.amplitudes())],
    };
    let mut state = phi0.clone();
    for s in 1..=steps {
        state = expm_apply(h, &state, dt, cfg)?;
        if s % sample_every == 0 || s == steps {
            traj.times.push(s as f64 * dt);
            traj.norms.push(state.norm());
            traj.energies.push(h.expectation(state.amplitudes()));
            traj.states.push(state.clone());
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockBasis, ModeBasis};
    use crate::grid::TorusGrid;
    use crate::linalg::expm_hermitian_apply;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn basis_of_dim3() -> Arc<FockBasis> {
        // N = 2 in K = 2 modes has dimension 3
        let m = ModeBasis::new(&TorusGrid::new(1.0, 8).unwrap(), 2).unwrap();
        Arc::new(FockBasis::new(2, &m).unwrap())
    }

    fn three_by_three() -> SparseHermitian {
        SparseHermitian::from_upper_rows(vec![
            vec![(0, c(1.0, 0.0)), (1, c(0.5, 0.25)), (2, c(0.0, -0.3))],
            vec![(1, c(-0.7, 0.0)), (2, c(0.2, 0.0))],
            vec![(2, c(2.0, 0.0))],
        ])
    }

    #[test]
    fn diagonal_one_hot() {
        let h = SparseHermitian::from_upper_rows(vec![
            vec![(0, c(1.5, 0.0))],
            vec![(1, c(-0.5, 0.0))],
            vec![(2, c(3.0, 0.0))],
        ]);
        let b = basis_of_dim3();
        let phi = FockVector::new(b, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.8)]).unwrap();
        let out = expm_apply(&h, &phi, 0.7, &PropagatorConfig::default()).unwrap();
        let expect = c(0.6, 0.8) * C64::from_polar(1.0, -0.7 * 3.0);
        assert!((out.amplitudes()[2] - expect).norm() < 1e-15);
        assert_eq!(out.amplitudes()[0], c(0.0, 0.0));
    }

    #[test]
    fn zero_step_is_identity() {
        let phi = FockVector::new(basis_of_dim3(), vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.0)]).unwrap();
        let out = expm_apply(&three_by_three(), &phi, 0.0, &PropagatorConfig::default()).unwrap();
        assert_eq!(out, phi);
    }

    #[test]
    fn matches_dense_exponential() {
        let h = three_by_three();
        let v = vec![c(0.3, 0.1), c(-0.5, 0.2), c(0.4, -0.6)];
        let phi = FockVector::new(basis_of_dim3(), v.clone()).unwrap();
        for t in [0.1, 1.0, 5.0, -2.0] {
            let out = expm_apply(&h, &phi, t, &PropagatorConfig::default()).unwrap();
            let reference = expm_hermitian_apply(&h.to_dense(), t, &v);
            for (a, b) in out.amplitudes().iter().zip(&reference) {
                assert!((a - b).norm() < 1e-12, "t = {t}");
            }
        }
    }

    #[test]
    fn zero_steps_trajectory() {
        let phi = FockVector::new(basis_of_dim3(), vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let tr = evolve(&three_by_three(), &phi, 0.0, &PropagatorConfig::default(), 1).unwrap();
        assert_eq!(tr.times, vec![0.0]);
        assert_eq!(tr.states[0], phi);
    }

    #[test]
    fn config_validation() {
        assert!(PropagatorConfig { tolerance: 1e-3, ..Default::default() }.validate().is_err());
        assert!(PropagatorConfig { dt: 0.0, ..Default::default() }.validate().is_err());
        assert!(PropagatorConfig::default().validate().is_ok());
    }

    #[test]
    fn substep_budget() {
        let h = three_by_three();
        let phi = FockVector::new(basis_of_dim3(), vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let cfg = PropagatorConfig { krylov_dim: 2, max_substeps: 1, tolerance: 1e-12, ..Default::default() };
        assert!(matches!(expm_apply(&h, &phi, 50.0, &cfg), Err(Error::NonConvergence { .. })));
    }
}
