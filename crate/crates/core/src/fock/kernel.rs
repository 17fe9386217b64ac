use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::SpectralField;

use super::modes::ModeBasis;

/// Unit-integral short-range profile `V`; the regularized potential is
/// `V_eps(x) = V(x / eps) / eps`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialShape {
    /// `exp(-x^2 / 2) / sqrt(2 pi)`
    Gaussian,
    /// Indicator of `[-1/2, 1/2]`.
    TopHat,
    /// `sech^2(x) / 2`
    Sech2,
}

impl PotentialShape {
    pub fn name(self) -> &'static str {
        match self {
            PotentialShape::Gaussian => "gaussian",
            PotentialShape::TopHat => "top-hat",
            PotentialShape::Sech2 => "sech2",
        }
    }

    /// `V_eps(x)` on the line.
    pub fn profile(self, x: f64, eps: f64) -> f64 {
        let u = x / eps;
        let v = match self {
            PotentialShape::Gaussian => (-0.5 * u * u).exp() / (2.0 * PI).sqrt(),
            PotentialShape::TopHat => {
                if u.abs() <= 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            PotentialShape::Sech2 => 0.5 / u.cosh().powi(2),
        };
        v / eps
    }

    /// `int V_eps(x) exp(-i q x) dx` in closed form.
    pub fn fourier(self, q: f64, eps: f64) -> f64 {
        let u = q * eps;
        match self {
            PotentialShape::Gaussian => (-0.5 * u * u).exp(),
            PotentialShape::TopHat => {
                let h = 0.5 * u;
                if h.abs() < 1e-8 {
                    1.0 - h * h / 6.0
                } else {
                    h.sin() / h
                }
            }
            PotentialShape::Sech2 => {
                let h = 0.5 * PI * u;
                if h.abs() < 1e-8 {
                    1.0 - h * h / 6.0
                } else {
                    h / h.sinh()
                }
            }
        }
    }
}

impl fmt::Display for PotentialShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PotentialShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(PotentialShape::Gaussian),
            "top-hat" | "tophat" => Ok(PotentialShape::TopHat),
            "sech2" => Ok(PotentialShape::Sech2),
            other => Err(Error::InvalidArgument(format!("unknown potential shape {other:?}"))),
        }
    }
}

/// Transfer coefficients `hat V_eps(q)` for every momentum difference that
/// fits in a mode window.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoBodyKernel {
    shape: PotentialShape,
    eps: f64,
    modes: ModeBasis,
    /// Indexed by slot difference `d + K - 1`, `d` in `-(K-1)..=K-1`.
    coeffs: Vec<f64>,
}

impl TwoBodyKernel {
    /// Fails when `eps` is below two grid spacings.
    pub fn new(shape: PotentialShape, eps: f64, modes: &ModeBasis) -> Result<Self> {
        let min = 2.0 * modes.grid().spacing();
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidArgument(format!("interaction width must be positive, got {eps}")));
        }
        if eps < min {
            return Err(Error::Unresolvable { eps, min });
        }
        let k = modes.len() as i64;
        let grid = modes.grid();
        let coeffs = (-(k - 1)..k).map(|d| shape.fourier(grid.wavenumber(d), eps)).collect();
        Ok(Self { shape, eps, modes: modes.clone(), coeffs })
    }

    pub fn shape(&self) -> PotentialShape {
        self.shape
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn modes(&self) -> &ModeBasis {
        &self.modes
    }

    /// `hat V_eps` at the wavenumber of slot difference `d = p - q`.
    pub fn coefficient(&self, d: i64) -> f64 {
        self.coeffs[(d + self.modes.len() as i64 - 1) as usize]
    }
}

/// `int |phi|^2 (V_eps * |phi|^2)` on the torus, evaluated through the
/// Fourier coefficients of `|phi|^2`. Exact when `|phi|^2` is resolved by
/// the grid.
pub fn pair_interaction_energy(phi: &SpectralField, shape: PotentialShape, eps: f64) -> f64 {
    let grid = phi.grid();
    let m = grid.points() as f64;
    let mut rho: Vec<C64> = phi.values().iter().map(|v| C64::new(v.norm_sqr(), 0.0)).collect();
    grid.fft_inplace(&mut rho);
    grid.length()
        * rho
            .iter()
            .enumerate()
            .map(|(slot, r)| {
                let q = grid.wavenumber(grid.signed_index(slot));
                shape.fourier(q, eps) * (r / m).norm_sqr()
            })
            .sum::<f64>()
}

/// `||phi||_{L^4}^4`, the `eps -> 0` limit of [`pair_interaction_energy`].
pub fn l4_to_fourth(phi: &SpectralField) -> f64 {
    phi.values().iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() * phi.grid().spacing()
}
