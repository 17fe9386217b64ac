use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::par;

/// Hermitian matrix in compressed-row form.
///
/// Built from the upper triangle only and mirrored, so `A[j][i]` is the
/// exact conjugate of `A[i][j]` and diagonal entries are exactly real.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseHermitian {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseHermitian {
    /// `upper[i]` lists `(j, A[i][j])` for `j >= i`, duplicates allowed
    /// (they are summed).
    pub fn from_upper_rows(upper: Vec<Vec<(usize, C64)>>) -> Self {
        let dim = upper.len();
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for (i, entries) in upper.into_iter().enumerate() {
            for (j, v) in merge_sorted(entries) {
                debug_assert!(j >= i, "entry ({i}, {j}) below the diagonal");
                if j == i {
                    rows[i].push((i, C64::new(v.re, 0.0)));
                } else {
                    rows[i].push((j, v));
                    rows[j].push((i, v.conj()));
                }
            }
        }
        let mut row_start = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            for (j, v) in row {
                cols.push(j);
                vals.push(v);
            }
            row_start.push(cols.len());
        }
        Self { dim, row_start, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let r = self.row_start[i]..self.row_start[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    fn row_dot(&self, i: usize, x: &[C64]) -> C64 {
        self.row(i).map(|(j, v)| v * x[j]).sum()
    }

    /// `A x`, parallel over rows when the `parallel` feature is on.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim);
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        par::fill_indexed(&mut out, |i| self.row_dot(i, x));
        out
    }

    /// `A x` on the calling thread only.
    pub fn apply_serial(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim).map(|i| self.row_dot(i, x)).collect()
    }

    /// `<x, A x>`; real for Hermitian `A`.
    pub fn expectation(&self, x: &[C64]) -> f64 {
        let ax = self.apply(x);
        x.iter().zip(&ax).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    /// `max |A - A^dagger|` over stored entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let dense = self.to_dense();
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for (j, _) in self.row(i) {
                worst = worst.max((dense[(i, j)] - dense[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

fn merge_sorted(mut entries: Vec<(usize, C64)>) -> Vec<(usize, C64)> {
    entries.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, C64)> = Vec::with_capacity(entries.len());
    for (j, v) in entries {
        match out.last_mut() {
            Some(last) if last.0 == j => last.1 += v,
            _ => out.push((j, v)),
        }
    }
    out
}
