use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

use super::basis::FockBasis;
use super::modes::Orbital;

/// Applies `a_{ann[0]}`, then `a_{ann[1]}`, ..., then the creators in
/// `cre` (first entry first) to the occupation vector in `occ` (modified in
/// place). Returns the bosonic amplitude factor, or `None` if an
/// annihilator hits an empty mode.
pub(crate) fn ladder(occ: &mut [u8], ann: &[usize], cre: &[usize]) -> Option<f64> {
    let mut factor = 1.0;
    for &p in ann {
        if occ[p] == 0 {
            return None;
        }
        factor *= f64::from(occ[p]).sqrt();
        occ[p] -= 1;
    }
    for &p in cre {
        occ[p] += 1;
        factor *= f64::from(occ[p]).sqrt();
    }
    Some(factor)
}

/// Complex amplitudes over a [`FockBasis`], in basis order.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    basis: Arc<FockBasis>,
    amps: Vec<C64>,
}

impl FockVector {
    pub fn new(basis: Arc<FockBasis>, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), got: amps.len() });
        }
        Ok(Self { basis, amps })
    }

    pub fn zeros(basis: Arc<FockBasis>) -> Self {
        let amps = vec![C64::new(0.0, 0.0); basis.dim()];
        Self { basis, amps }
    }

    /// Unit vector on a single occupation state.
    pub fn from_occupation(basis: Arc<FockBasis>, occ: &[u8]) -> Result<Self> {
        let idx = basis
            .index_of(occ)
            .ok_or_else(|| Error::InvalidArgument(format!("{occ:?} is not in the basis")))?;
        let mut v = Self::zeros(basis);
        v.amps[idx] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn particles(&self) -> usize {
        self.basis.particles()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn with_amplitudes(&self, amps: Vec<C64>) -> Self {
        assert_eq!(amps.len(), self.amps.len());
        Self { basis: self.basis.clone(), amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.with_amplitudes(self.amps.iter().map(|a| a / n).collect()))
    }

    pub fn distance(&self, other: &FockVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `phi^{(x) N}` in occupation form: amplitude
/// `sqrt(N! / prod n_p!) prod c_p^{n_p}` on `(n_1, ..., n_K)`.
pub fn product_state(phi: &Orbital, basis: &Arc<FockBasis>) -> Result<FockVector> {
    if phi.len() != basis.mode_count() {
        return Err(Error::DimensionMismatch { expected: basis.mode_count(), got: phi.len() });
    }
    let log_fact: Vec<f64> = (0..=basis.particles())
        .scan(0.0, |acc, n| {
            if n > 0 {
                *acc += (n as f64).ln();
            }
            Some(*acc)
        })
        .collect();
    let n_fact = log_fact[basis.particles()];
    let c = phi.coeffs();
    let amps = basis
        .iter()
        .map(|occ| {
            let mut amp = C64::new(1.0, 0.0);
            let mut log_w = n_fact;
            for (p, &n) in occ.iter().enumerate() {
                if n > 0 {
                    amp *= c[p].powu(u32::from(n));
                    log_w -= log_fact[n as usize];
                }
            }
            amp * (0.5 * log_w).exp()
        })
        .collect();
    FockVector::new(basis.clone(), amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::modes::ModeBasis;
    use crate::grid::TorusGrid;

    fn basis(n: usize, k: usize) -> Arc<FockBasis> {
        let m = ModeBasis::new(&TorusGrid::new(1.0, 32).unwrap(), k).unwrap();
        Arc::new(FockBasis::new(n, &m).unwrap())
    }

    #[test]
    fn single_particle_amplitudes_are_coefficients() {
        let b = basis(1, 4);
        let phi = Orbital::new(vec![
            C64::new(0.1, 0.2),
            C64::new(-0.5, 0.0),
            C64::new(0.3, -0.4),
            C64::new(0.0, 0.6),
        ])
        .unwrap();
        let v = product_state(&phi, &b).unwrap();
        // descending lex for N = 1: (1,0,0,0), (0,1,0,0), ...
        for (a, c) in v.amplitudes().iter().zip(phi.coeffs()) {
            assert!((a - c).norm() < 1e-15);
        }
    }

    #[test]
    fn single_mode_condensate() {
        let b = basis(5, 4);
        let v = product_state(&Orbital::mode(4, 0), &b).unwrap();
        assert!((v.amplitudes()[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(v.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn binomial_amplitudes() {
        let b = basis(3, 2);
        let s = 0.5f64.sqrt();
        let v = product_state(&Orbital::new(vec![C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap(), &b).unwrap();
        let r8 = 1.0 / 8f64.sqrt();
        let expect = [r8, r8 * 3f64.sqrt(), r8 * 3f64.sqrt(), r8];
        for (a, e) in v.amplitudes().iter().zip(expect) {
            assert!((a - C64::new(e, 0.0)).norm() < 1e-15);
        }
        assert!((v.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ladder_factors() {
        let mut occ = [2u8, 1];
        // a_0 a_0 |2,1> = sqrt(2) sqrt(1) |0,1>
        assert_eq!(ladder(&mut occ, &[0, 0], &[]), Some(2f64.sqrt()));
        assert_eq!(occ, [0, 1]);
        let mut occ = [0u8, 1];
        assert_eq!(ladder(&mut occ, &[0], &[1]), None);
        let mut occ = [0u8, 1];
        // a_1^dag |0,1> = sqrt 2 |0,2>
        assert_eq!(ladder(&mut occ, &[], &[1]), Some(2f64.sqrt()));
    }
}
