use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{SpectralField, TorusGrid};

/// Window of `K` plane waves `e_n`, `n = -K/2, ..., K/2 - 1`.
///
/// Slot `p` of the window holds mode `n = p - K/2`; every Fock-space object
/// indexes modes by slot.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeBasis {
    grid: TorusGrid,
    count: usize,
}

impl ModeBasis {
    pub fn new(grid: &TorusGrid, count: usize) -> Result<Self> {
        if count < 2 || !count.is_multiple_of(2) || count > grid.points() {
            return Err(Error::InvalidArgument(format!(
                "mode window must be even with 2 <= K <= {}, got {count}",
                grid.points()
            )));
        }
        Ok(Self { grid: grid.clone(), count })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn mode_index(&self, slot: usize) -> i64 {
        slot as i64 - self.count as i64 / 2
    }

    /// Slot holding signed mode `n`, if it lies in the window.
    pub fn slot_of(&self, n: i64) -> Option<usize> {
        let s = n + self.count as i64 / 2;
        (0..self.count as i64).contains(&s).then_some(s as usize)
    }

    pub fn wavenumber(&self, slot: usize) -> f64 {
        self.grid.wavenumber(self.mode_index(slot))
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.count).map(|p| self.wavenumber(p)).collect()
    }

    /// The plane wave `e_n` for slot `p` as a grid field.
    pub fn mode_field(&self, slot: usize) -> SpectralField {
        SpectralField::plane_wave(&self.grid, self.mode_index(slot))
    }

    /// Coefficients of `field` on the window, without renormalization.
    pub fn window_coefficients(&self, field: &SpectralField) -> Vec<C64> {
        let c = field.coefficients();
        (0..self.count).map(|p| c[self.grid.slot(self.mode_index(p))]).collect()
    }

    /// Windowed and renormalized orbital of `field`.
    pub fn orbital(&self, field: &SpectralField) -> Result<Orbital> {
        if field.grid() != &self.grid {
            return Err(Error::InvalidArgument("field lives on a different grid".into()));
        }
        Orbital::new(self.window_coefficients(field))
    }

    /// Grid field `sum_p c_p e_p`.
    pub fn field_from_coefficients(&self, coeffs: &[C64]) -> SpectralField {
        let mut full = vec![C64::new(0.0, 0.0); self.grid.points()];
        for (p, c) in coeffs.iter().enumerate() {
            full[self.grid.slot(self.mode_index(p))] = *c;
        }
        SpectralField::from_coefficients(&self.grid, &full).expect("length matches grid")
    }
}

/// Unit-norm one-particle state on a mode window.
#[derive(Clone, Debug, PartialEq)]
pub struct Orbital {
    coeffs: Vec<C64>,
}

impl Orbital {
    /// Normalizes `coeffs`; rejects vectors of (numerically) zero norm.
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 1e-14 {
            return Err(Error::ZeroWindow);
        }
        Ok(Self { coeffs: coeffs.into_iter().map(|c| c / norm).collect() })
    }

    /// Slot-`p` basis vector.
    pub fn mode(count: usize, slot: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); count];
        coeffs[slot] = C64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `<self, other>`.
    pub fn inner(&self, other: &Orbital) -> C64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }

    /// `sum_p k_p^2 |c_p|^2`.
    pub fn kinetic(&self, modes: &ModeBasis) -> f64 {
        self.coeffs.iter().enumerate().map(|(p, c)| modes.wavenumber(p).powi(2) * c.norm_sqr()).sum()
    }

    pub fn to_field(&self, modes: &ModeBasis) -> SpectralField {
        modes.field_from_coefficients(&self.coeffs)
    }
}
