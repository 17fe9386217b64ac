//! Initial one-particle data.

use std::f64::consts::PI;

use bosegas::{SpectralField, TorusGrid, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::DatumSpec;
use crate::error::{LabError, LabResult};

/// Samples the configured profile on `grid` and normalizes it to unit mass.
pub fn build_datum(spec: &DatumSpec, grid: &TorusGrid, seed: u64) -> LabResult<SpectralField> {
    let field = match spec {
        DatumSpec::VonMises { concentration, center, momentum } => {
            let k = grid.wavenumber(*momentum);
            SpectralField::from_fn(grid, |x| {
                C64::from_polar((concentration * (2.0 * PI * (x - center) / grid.length()).cos()).exp(), k * x)
            })
        }
        DatumSpec::Gaussian { center, width, momentum } => SpectralField::from_fn(grid, |x| {
            let y = x - center;
            C64::from_polar((-y * y / (2.0 * width * width)).exp(), momentum * y)
        }),
        DatumSpec::Sech { center } => SpectralField::from_fn(grid, |x| C64::new(1.0 / (x - center).cosh(), 0.0)),
        DatumSpec::PlaneWave { mode } => SpectralField::plane_wave(grid, *mode),
        DatumSpec::Rough { tail_exponent } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = grid.points();
            let mut coeffs = vec![C64::new(0.0, 0.0); m];
            for (slot, c) in coeffs.iter_mut().enumerate() {
                let n = grid.signed_index(slot);
                let phase = 2.0 * PI * rng.gen::<f64>();
                *c = C64::from_polar((1.0 + n.abs() as f64).powf(-tail_exponent), phase);
            }
            SpectralField::from_coefficients(grid, &coeffs)?
        }
        DatumSpec::File { path } => {
            let mut reader = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).from_path(path)?;
            let mut values = Vec::with_capacity(grid.points());
            for record in reader.records() {
                let record = record?;
                let parse = |i: usize| -> LabResult<f64> {
                    record
                        .get(i)
                        .and_then(|s| s.trim().parse().ok())
                        .ok_or_else(|| LabError::Config(format!("bad datum row {record:?}")))
                };
                values.push(C64::new(parse(0)?, parse(1)?));
            }
            SpectralField::new(grid.clone(), values).map_err(|e| LabError::Config(e.to_string()))?
        }
    };
    field.normalized().ok_or_else(|| LabError::Config("initial datum has zero mass".into()))
}
