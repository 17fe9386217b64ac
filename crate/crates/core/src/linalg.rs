//! Dense Hermitian helpers on top of nalgebra's symmetric eigensolver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Trace norm `Tr |A| = sum |lambda_i|` of a Hermitian matrix.
pub fn trace_norm(m: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(m).iter().map(|l| l.abs()).sum()
}

/// `max |A - A^dagger|`.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `exp(-i t H) v` for a dense Hermitian `H`, through its eigendecomposition.
pub fn expm_hermitian_apply(h: &DMatrix<C64>, t: f64, v: &[C64]) -> Vec<C64> {
    let eig = SymmetricEigen::new(h.clone());
    let u = &eig.eigenvectors;
    let coeffs = u.adjoint() * DVector::from_column_slice(v);
    let phased = DVector::from_iterator(
        coeffs.len(),
        coeffs.iter().zip(eig.eigenvalues.iter()).map(|(c, l)| c * C64::from_polar(1.0, -t * l)),
    );
    (u * phased).iter().copied().collect()
}

/// First column of `exp(-i t T)` for a real symmetric (tridiagonal) `T`.
pub(crate) fn expm_first_column(t_mat: &DMatrix<f64>, t: f64) -> Vec<C64> {
    let eig = SymmetricEigen::new(t_mat.clone());
    let u = &eig.eigenvectors;
    let n = t_mat.nrows();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| C64::from_polar(u[(i, j)] * u[(0, j)], -t * eig.eigenvalues[j]))
                .sum::<C64>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_exponential() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(-2.0, 0.0)]));
        let out = expm_hermitian_apply(&h, 0.3, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        assert!((out[0] - C64::from_polar(1.0, -0.3)).norm() < 1e-15);
        assert!((out[1] - C64::new(0.0, 1.0) * C64::from_polar(1.0, 0.6)).norm() < 1e-15);
    }

    #[test]
    fn trace_norm_of_pauli_x() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]);
        assert!((trace_norm(&m) - 2.0).abs() < 1e-15);
        assert_eq!(hermiticity_defect(&m), 0.0);
    }
}
