//! Periodic 1D grid with a unitary discrete Fourier transform.
//!
//! A field on the torus `[0, L)` is stored by its values at the `M` nodes
//! `x_j = j L / M`. Its frequency view holds the coefficients `c_n` on the
//! orthonormal plane waves `e_n(x) = exp(i k_n x) / sqrt(L)`, `k_n = 2 pi n / L`,
//! so that `sum |c_n|^2` equals the rectangle-rule mass `sum |phi_j|^2 L / M`.
//! Coefficient vectors are kept in FFT order: slot `i` holds `n = i` for
//! `i < M/2` and `n = i - M` otherwise.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::par;

#[derive(Clone)]
pub struct TorusGrid {
    length: f64,
    points: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("length", &self.length)
            .field("points", &self.points)
            .finish()
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.length == other.length && self.points == other.points
    }
}

impl TorusGrid {
    /// Builds a grid of `points` nodes on a box of the given length.
    /// `points` must be an even power of two, at least 8.
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {length}")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count must be a power of two >= 8, got {points}"
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            length,
            points,
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.node(j)).collect()
    }

    /// Wavenumber `2 pi n / L` for a signed mode index.
    pub fn wavenumber(&self, n: i64) -> f64 {
        TAU * n as f64 / self.length
    }

    /// Signed mode index stored at FFT slot `slot`.
    pub fn signed_index(&self, slot: usize) -> i64 {
        let m = self.points as i64;
        let s = slot as i64;
        if s < m / 2 {
            s
        } else {
            s - m
        }
    }

    /// FFT slot of a signed mode index in `[-M/2, M/2)`.
    pub fn slot(&self, n: i64) -> usize {
        let m = self.points as i64;
        debug_assert!((-m / 2..m / 2).contains(&n));
        n.rem_euclid(m) as usize
    }

    /// Wavenumbers in signed order `n = -M/2, ..., M/2 - 1`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let half = self.points as i64 / 2;
        (-half..half).map(|n| self.wavenumber(n)).collect()
    }

    /// Wavenumbers in FFT slot order.
    pub fn slot_wavenumbers(&self) -> Vec<f64> {
        (0..self.points).map(|s| self.wavenumber(self.signed_index(s))).collect()
    }

    /// Largest representable `|k|`, attained only by the Nyquist mode.
    pub fn nyquist(&self) -> f64 {
        self.wavenumber(self.points as i64 / 2)
    }

    /// Distance on the circle between nodes `i` and `j`.
    pub fn torus_distance(&self, i: usize, j: usize) -> f64 {
        let d = i.abs_diff(j);
        d.min(self.points - d) as f64 * self.spacing()
    }

    /// Unnormalized in-place forward FFT.
    pub(crate) fn fft_inplace(&self, buf: &mut [C64]) {
        self.forward.process(buf);
    }

    /// Unnormalized in-place inverse FFT.
    pub(crate) fn ifft_inplace(&self, buf: &mut [C64]) {
        self.inverse.process(buf);
    }

    fn forward_transform(&self, values: &[C64]) -> Vec<C64> {
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        let scale = self.length.sqrt() / self.points as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    fn inverse_transform(&self, coefficients: &[C64]) -> Vec<C64> {
        let mut buf = coefficients.to_vec();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.length.sqrt();
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }
}

/// One-particle wavefunction on a [`TorusGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    values: Vec<C64>,
}

impl SpectralField {
    pub fn new(grid: TorusGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.points() {
            return Err(Error::DimensionMismatch { expected: grid.points(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &TorusGrid) -> Self {
        Self { grid: grid.clone(), values: vec![C64::new(0.0, 0.0); grid.points()] }
    }

    pub fn from_fn(grid: &TorusGrid, f: impl Fn(f64) -> C64) -> Self {
        let values = (0..grid.points()).map(|j| f(grid.node(j))).collect();
        Self { grid: grid.clone(), values }
    }

    /// Builds a field from plane-wave coefficients in FFT slot order.
    pub fn from_coefficients(grid: &TorusGrid, coefficients: &[C64]) -> Result<Self> {
        if coefficients.len() != grid.points() {
            return Err(Error::DimensionMismatch { expected: grid.points(), got: coefficients.len() });
        }
        Ok(Self { grid: grid.clone(), values: grid.inverse_transform(coefficients) })
    }

    /// Single normalized plane wave `e_n`.
    pub fn plane_wave(grid: &TorusGrid, n: i64) -> Self {
        let k = grid.wavenumber(n);
        let a = 1.0 / grid.length().sqrt();
        Self::from_fn(grid, |x| C64::from_polar(a, k * x))
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// Plane-wave coefficients in FFT slot order.
    pub fn coefficients(&self) -> Vec<C64> {
        self.grid.forward_transform(&self.values)
    }

    /// Coefficient of the signed mode `n`.
    pub fn coefficient(&self, n: i64) -> C64 {
        self.coefficients()[self.grid.slot(n)]
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn l2_norm(&self) -> f64 {
        self.mass().sqrt()
    }

    /// Discrete `L^q` norm by the rectangle rule; `q = inf` gives the sup norm.
    pub fn lq_norm(&self, q: f64) -> f64 {
        if q.is_infinite() {
            return self.sup_norm();
        }
        let s: f64 = self.values.iter().map(|v| v.norm().powf(q)).sum();
        (s * self.grid.spacing()).powf(1.0 / q)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `<self, other>`, antilinear in the first slot.
    pub fn inner(&self, other: &SpectralField) -> C64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * self.grid.spacing()
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| v * factor).collect() }
    }

    pub fn sub(&self, other: &SpectralField) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self { grid: self.grid.clone(), values }
    }

    /// Returns the field scaled to unit mass, or `None` for the zero field.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.l2_norm();
        (n > 0.0).then(|| self.scaled(C64::new(1.0 / n, 0.0)))
    }

    /// Sharp frequency cutoff: zeroes every mode with `|k_n| > cutoff`.
    pub fn lp_project(&self, cutoff: f64) -> Self {
        self.filter_modes(|k| k.abs() <= cutoff)
    }

    /// Complement of [`lp_project`](Self::lp_project): keeps only `|k_n| > cutoff`.
    pub fn lp_tail(&self, cutoff: f64) -> Self {
        self.filter_modes(|k| k.abs() > cutoff)
    }

    fn filter_modes(&self, keep: impl Fn(f64) -> bool) -> Self {
        let mut c = self.coefficients();
        for (slot, k) in self.grid.slot_wavenumbers().into_iter().enumerate() {
            if !keep(k) {
                c[slot] = C64::new(0.0, 0.0);
            }
        }
        Self { grid: self.grid.clone(), values: self.grid.inverse_transform(&c) }
    }

    /// Discrete `H^s` norm `sqrt(sum (1 + k_n^2)^s |c_n|^2)`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let ks = self.grid.slot_wavenumbers();
        self.coefficients()
            .iter()
            .zip(ks)
            .map(|(c, k)| (1.0 + k * k).powf(s) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `||grad phi||_{L^2}` evaluated spectrally.
    pub fn gradient_norm(&self) -> f64 {
        self.gradient_norm_sq().sqrt()
    }

    pub fn gradient_norm_sq(&self) -> f64 {
        let ks = self.grid.slot_wavenumbers();
        self.coefficients().iter().zip(ks).map(|(c, k)| k * k * c.norm_sqr()).sum()
    }

    /// Spectral derivative `d phi / dx`.
    pub fn derivative(&self) -> Self {
        let ks = self.grid.slot_wavenumbers();
        let c: Vec<C64> =
            self.coefficients().iter().zip(ks).map(|(c, k)| c * C64::new(0.0, k)).collect();
        Self { grid: self.grid.clone(), values: self.grid.inverse_transform(&c) }
    }

    /// Discrete Hölder-1/2 seminorm: max over node pairs of
    /// `|phi(x) - phi(y)| / d(x, y)^{1/2}` with `d` the distance on the circle.
    pub fn hoelder_half_seminorm(&self) -> f64 {
        let m = self.grid.points();
        let v = &self.values;
        let grid = &self.grid;
        par::max_over(m, |i| {
            let mut best = 0.0f64;
            for j in (i + 1)..m {
                let d = grid.torus_distance(i, j);
                best = best.max((v[i] - v[j]).norm() / d.sqrt());
            }
            best
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TorusGrid::new(1.0, 7).is_err());
        assert!(TorusGrid::new(1.0, 4).is_err());
        assert!(TorusGrid::new(1.0, 24).is_err());
        assert!(TorusGrid::new(0.0, 8).is_err());
        assert!(TorusGrid::new(-1.0, 8).is_err());
        assert!(TorusGrid::new(f64::NAN, 8).is_err());
    }

    #[test]
    fn wavenumbers_on_two_pi_box() {
        let g = TorusGrid::new(TAU, 8).unwrap();
        let ks = g.wavenumbers();
        let expect = [-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        for (k, e) in ks.iter().zip(expect) {
            assert!((k - e).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_box_spacing() {
        let g = TorusGrid::new(1.0, 8).unwrap();
        assert_eq!(g.spacing(), 0.125);
        assert_eq!(g.node(3), 0.375);
    }

    #[test]
    fn large_box_nyquist() {
        let g = TorusGrid::new(40.0, 512).unwrap();
        assert_eq!(g.nodes().len(), 512);
        assert!((g.nyquist() - TAU * 256.0 / 40.0).abs() < 1e-12);
    }

    #[test]
    fn plane_wave_has_single_coefficient() {
        let g = TorusGrid::new(3.0, 16).unwrap();
        let f = SpectralField::plane_wave(&g, -3);
        let coeffs = f.coefficients();
        for (slot, cval) in coeffs.iter().enumerate() {
            let expect = if g.signed_index(slot) == -3 { 1.0 } else { 0.0 };
            assert!((cval - c(expect)).norm() < 1e-13);
        }
    }

    #[test]
    fn lp_project_edges() {
        let g = TorusGrid::new(TAU, 16).unwrap();
        let f = SpectralField::from_fn(&g, |x| C64::new(x.sin() + 0.3, (2.0 * x).cos()));
        let same = f.lp_project(g.nyquist());
        assert!(same.sub(&f).l2_norm() < 1e-13);
        let mean = f.lp_project(0.0);
        let avg: C64 = f.values().iter().sum::<C64>() / 16.0;
        for v in mean.values() {
            assert!((v - avg).norm() < 1e-13);
        }
    }

    #[test]
    fn lp_project_two_mode_field() {
        let g = TorusGrid::new(TAU, 32).unwrap();
        let e3 = SpectralField::plane_wave(&g, 3);
        let e7 = SpectralField::plane_wave(&g, 7);
        let both = SpectralField::new(
            g.clone(),
            e3.values().iter().zip(e7.values()).map(|(a, b)| a + b).collect(),
        )
        .unwrap();
        let kept = both.lp_project(5.0);
        let (ca, cb) = (kept.coefficients(), e3.coefficients());
        for (a, b) in ca.iter().zip(&cb) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn sobolev_single_mode() {
        let g = TorusGrid::new(5.0, 32).unwrap();
        let f = SpectralField::plane_wave(&g, 2);
        let k = g.wavenumber(2);
        assert!((f.sobolev_norm(0.0) - 1.0).abs() < 1e-13);
        for s in [0.5, 1.0, 2.0] {
            let expect = (1.0 + k * k).powf(s / 2.0);
            assert!((f.sobolev_norm(s) - expect).abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn sobolev_h1_of_soliton_profile() {
        // phi = sqrt(2) sech x: int |phi|^2 = 4, int |phi'|^2 = 2 int sech^2 tanh^2 = 4/3.
        let g = TorusGrid::new(40.0, 512).unwrap();
        let f = SpectralField::from_fn(&g, |x| c(2f64.sqrt() / (x - 20.0).cosh()));
        let exact = (4.0 + 4.0 / 3.0f64).sqrt();
        assert!((f.sobolev_norm(1.0) - exact).abs() < 1e-6);
    }

    #[test]
    fn hoelder_constant_and_step() {
        let g = TorusGrid::new(2.0, 16).unwrap();
        let flat = SpectralField::from_fn(&g, |_| C64::new(0.7, -0.2));
        assert_eq!(flat.hoelder_half_seminorm(), 0.0);
        let h = 0.5;
        let mut vals = vec![c(0.0); 16];
        vals[9] = c(h);
        let step = SpectralField::new(g.clone(), vals).unwrap();
        let expect = h / g.spacing().sqrt();
        assert!((step.hoelder_half_seminorm() - expect).abs() < 1e-14);
    }

    #[test]
    fn torus_distance_wraps() {
        let g = TorusGrid::new(PI, 8).unwrap();
        assert!((g.torus_distance(0, 7) - g.spacing()).abs() < 1e-15);
        assert!((g.torus_distance(1, 5) - 4.0 * g.spacing()).abs() < 1e-15);
    }
}
