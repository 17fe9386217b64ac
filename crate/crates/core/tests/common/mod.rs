#![allow(dead_code)]

use std::sync::Arc;

use bosegas::fock::{FockBasis, FockVector, ModeBasis, Orbital};
use bosegas::{TorusGrid, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn window(length: f64, points: usize, k: usize) -> ModeBasis {
    ModeBasis::new(&TorusGrid::new(length, points).unwrap(), k).unwrap()
}

pub fn fock(n: usize, modes: &ModeBasis) -> Arc<FockBasis> {
    Arc::new(FockBasis::new(n, modes).unwrap())
}

pub fn gaussian_complex(rng: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
    (0..len).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect()
}

pub fn random_state(basis: &Arc<FockBasis>, rng: &mut ChaCha8Rng) -> FockVector {
    FockVector::new(Arc::clone(basis), gaussian_complex(rng, basis.dim())).unwrap().normalized().unwrap()
}

pub fn random_orbital(k: usize, rng: &mut ChaCha8Rng) -> Orbital {
    Orbital::new(gaussian_complex(rng, k)).unwrap()
}
