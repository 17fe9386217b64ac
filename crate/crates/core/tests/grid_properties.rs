mod common;

use bosegas::{SpectralField, TorusGrid, C64};
use proptest::prelude::*;

const L: f64 = 2.0 * std::f64::consts::PI;

/// Random field whose top quarter of frequencies is empty.
fn band_limited(points: usize, raw: &[(f64, f64)]) -> SpectralField {
    let grid = TorusGrid::new(L, points).unwrap();
    let mut coeffs = vec![C64::new(0.0, 0.0); points];
    let keep = (3 * points / 8) as i64;
    for (i, &(re, im)) in raw.iter().enumerate() {
        let n = i as i64 - keep;
        if n.abs() < keep {
            coeffs[grid.slot(n)] = C64::new(re, im);
        }
    }
    SpectralField::from_coefficients(&grid, &coeffs).unwrap()
}

fn raw_coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 48)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn plancherel(raw in raw_coeffs()) {
        let f = band_limited(64, &raw);
        let spectral = f.sobolev_norm(0.0).powi(2);
        prop_assert!((spectral - f.mass()).abs() <= 1e-12 * f.mass().max(1e-300));
    }

    #[test]
    fn lp_project_is_an_orthogonal_projector(raw in raw_coeffs(), other in raw_coeffs(), cutoff in 0.0..40.0f64) {
        let f = band_limited(64, &raw);
        let g = band_limited(64, &other);
        let pf = f.lp_project(cutoff);
        prop_assert!(pf.lp_project(cutoff).sub(&pf).l2_norm() <= 1e-12 * (1.0 + f.l2_norm()));
        let lhs = pf.inner(&g);
        let rhs = f.inner(&g.lp_project(cutoff));
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + f.l2_norm() * g.l2_norm()));
    }

    #[test]
    fn hoelder_below_gradient(raw in raw_coeffs()) {
        let f = band_limited(64, &raw);
        prop_assert!(f.hoelder_half_seminorm() <= 1.05 * f.gradient_norm() + 1e-12);
    }

    #[test]
    fn transforms_round_trip(raw in raw_coeffs()) {
        let f = band_limited(64, &raw);
        let back = SpectralField::from_coefficients(f.grid(), &f.coefficients()).unwrap();
        prop_assert!(back.sub(&f).l2_norm() <= 1e-12 * (1.0 + f.l2_norm()));
    }

    #[test]
    fn sobolev_monotone_in_s(raw in raw_coeffs(), s in 0.0..3.0f64) {
        let f = band_limited(64, &raw);
        prop_assert!(f.sobolev_norm(s) <= f.sobolev_norm(s + 0.5) * (1.0 + 1e-14));
    }
}

#[test]
fn grid_examples() {
    let g = TorusGrid::new(L, 8).unwrap();
    let ks: Vec<f64> = g.wavenumbers();
    for (k, n) in ks.iter().zip(-4..4) {
        assert!((k - f64::from(n)).abs() < 1e-14);
    }
    assert!((TorusGrid::new(1.0, 8).unwrap().spacing() - 0.125).abs() < 1e-15);
    let big = TorusGrid::new(40.0, 512).unwrap();
    assert!((big.nyquist() - 2.0 * std::f64::consts::PI * 256.0 / 40.0).abs() < 1e-12);
    assert!(TorusGrid::new(1.0, 6).is_err());
    assert!(TorusGrid::new(-1.0, 8).is_err());
}
