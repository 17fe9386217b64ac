use crate::error::{Error, Result};

use super::modes::ModeBasis;

/// Default ceiling on the number of occupation states.
pub const DEFAULT_DIMENSION_CAP: usize = 5_000_000;

/// `binomial(n + k - 1, k - 1)`: ways to place `n` bosons in `k` modes.
pub fn fock_dimension(particles: usize, modes: usize) -> u128 {
    if modes == 0 {
        return u128::from(particles == 0);
    }
    let (n, r) = ((particles + modes - 1) as u128, (modes - 1) as u128);
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Occupation states `(n_1, ..., n_K)` with `sum n_p = N`, in descending
/// lexicographic order: `(N, 0, ..., 0)` first, `(0, ..., 0, N)` last.
#[derive(Clone, Debug)]
pub struct FockBasis {
    particles: usize,
    modes: ModeBasis,
    occupations: Vec<u8>,
    /// `counts[m][r]`: number of states of `r` bosons in `m` modes.
    counts: Vec<Vec<usize>>,
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.particles == other.particles && self.modes == other.modes
    }
}

impl FockBasis {
    pub fn new(particles: usize, modes: &ModeBasis) -> Result<Self> {
        Self::with_cap(particles, modes, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(particles: usize, modes: &ModeBasis, cap: usize) -> Result<Self> {
        let k = modes.len();
        if particles == 0 || particles > u8::MAX as usize {
            return Err(Error::InvalidArgument(format!("particle count must be in 1..=255, got {particles}")));
        }
        let dim = fock_dimension(particles, k);
        if dim > cap as u128 {
            return Err(Error::DimensionCap { dim, cap });
        }
        let dim = dim as usize;

        let counts: Vec<Vec<usize>> = (0..=k + 1)
            .map(|m| (0..=particles).map(|r| fock_dimension(r, m) as usize).collect())
            .collect();

        let mut occupations = Vec::with_capacity(dim * k);
        let mut current = vec![0u8; k];
        fill_descending(&mut current, 0, particles, &mut occupations);
        debug_assert_eq!(occupations.len(), dim * k);

        Ok(Self { particles, modes: modes.clone(), occupations, counts })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn modes(&self) -> &ModeBasis {
        &self.modes
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn dim(&self) -> usize {
        self.occupations.len() / self.modes.len()
    }

    pub fn occupation(&self, index: usize) -> &[u8] {
        let k = self.modes.len();
        &self.occupations[index * k..(index + 1) * k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.occupations.chunks_exact(self.modes.len())
    }

    /// Position of an occupation vector in the ordering.
    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        let k = self.modes.len();
        if occ.len() != k || occ.iter().map(|&n| n as usize).sum::<usize>() != self.particles {
            return None;
        }
        Some(self.rank(occ))
    }

    /// Rank of a valid occupation vector. For slot `i` with `R` bosons still
    /// to place, every state with a larger `n_i` precedes it; those number
    /// `counts[m + 1][R - n_i - 1]` with `m = K - i - 1` modes left.
    pub(crate) fn rank(&self, occ: &[u8]) -> usize {
        let k = occ.len();
        let mut remaining = self.particles;
        let mut index = 0;
        for (i, &n) in occ.iter().enumerate().take(k - 1) {
            let n = n as usize;
            if n < remaining {
                index += self.counts[k - i][remaining - n - 1];
            }
            remaining -= n;
        }
        index
    }
}

fn fill_descending(current: &mut [u8], slot: usize, remaining: usize, out: &mut Vec<u8>) {
    if slot + 1 == current.len() {
        current[slot] = remaining as u8;
        out.extend_from_slice(current);
        return;
    }
    for n in (0..=remaining).rev() {
        current[slot] = n as u8;
        fill_descending(current, slot + 1, remaining - n, out);
    }
    current[slot] = 0;
}
