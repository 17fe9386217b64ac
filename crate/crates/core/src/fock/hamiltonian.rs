//! Second-quantized operators on a [`FockBasis`].

use num_complex::Complex64 as C64;

use crate::nls::Coupling;
use crate::par;

use super::basis::FockBasis;
use super::kernel::TwoBodyKernel;
use super::modes::Orbital;
use super::sparse::SparseHermitian;
use super::state::ladder;

/// Keeps the entries of column `i` (given as `(j, <j|A|i>)`) that lie in the
/// upper triangle of row `i`, conjugated into row form.
fn upper_row(i: usize, column: Vec<(usize, C64)>) -> Vec<(usize, C64)> {
    column.into_iter().filter(|(j, _)| *j >= i).map(|(j, v)| (j, v.conj())).collect()
}

/// Regularized Hamiltonian
/// `sum_p k_p^2 a_p^dag a_p + kappa / (2 N L) sum hat V(k_a - k_c) a_a^dag a_b^dag a_d a_c`,
/// summed over momentum-conserving slot quadruples `a + b = c + d` inside
/// the window. Rows are assembled independently (in parallel with the
/// `parallel` feature).
pub fn build_hamiltonian(basis: &FockBasis, kernel: &TwoBodyKernel, coupling: Coupling) -> SparseHermitian {
    assert_eq!(basis.modes(), kernel.modes(), "basis and kernel must share the mode window");
    let k = basis.mode_count();
    let n = basis.particles();
    let ks = basis.modes().wavenumbers();
    let scale = coupling.value() / (2.0 * n as f64 * basis.modes().grid().length());
    let interacting = scale != 0.0 && n >= 2;

    let rows = par::map_indices(basis.dim(), |i| {
        let occ = basis.occupation(i);
        let kinetic: f64 = occ.iter().zip(&ks).map(|(&m, kp)| f64::from(m) * kp * kp).sum();
        let mut column = vec![(i, C64::new(kinetic, 0.0))];
        if interacting {
            let mut work = occ.to_vec();
            for c in 0..k {
                if occ[c] == 0 {
                    continue;
                }
                for d in 0..k {
                    if occ[d] < 1 + u8::from(c == d) {
                        continue;
                    }
                    for a in 0..k {
                        let b = (c + d) as i64 - a as i64;
                        if !(0..k as i64).contains(&b) {
                            continue;
                        }
                        work.copy_from_slice(occ);
                        let f = ladder(&mut work, &[c, d], &[b as usize, a]).expect("occupations checked");
                        let v = scale * kernel.coefficient(a as i64 - c as i64) * f;
                        let j = basis.rank(&work);
                        column.push((j, C64::new(v, 0.0)));
                    }
                }
            }
        }
        upper_row(i, column)
    });
    SparseHermitian::from_upper_rows(rows)
}

/// `N_phi = a^dag(phi) a(phi) = sum_{pq} c_p conj(c_q) a_p^dag a_q`.
pub fn number_operator(phi: &Orbital, basis: &FockBasis) -> SparseHermitian {
    let k = basis.mode_count();
    let c = phi.coeffs();
    let rows = par::map_indices(basis.dim(), |i| {
        let occ = basis.occupation(i);
        let mut work = occ.to_vec();
        let mut column = Vec::new();
        for q in 0..k {
            if occ[q] == 0 || c[q].norm_sqr() == 0.0 {
                continue;
            }
            for p in 0..k {
                if c[p].norm_sqr() == 0.0 {
                    continue;
                }
                work.copy_from_slice(occ);
                let f = ladder(&mut work, &[q], &[p]).expect("occupation checked");
                column.push((basis.rank(&work), c[p] * c[q].conj() * f));
            }
        }
        upper_row(i, column)
    });
    SparseHermitian::from_upper_rows(rows)
}

/// One-body operator `dGamma(A) = sum_{pq} A_{pq} a_p^dag a_q` for a
/// Hermitian `K x K` matrix given row-major.
pub fn one_body_operator(a: &[C64], basis: &FockBasis) -> SparseHermitian {
    let k = basis.mode_count();
    assert_eq!(a.len(), k * k);
    let rows = par::map_indices(basis.dim(), |i| {
        let occ = basis.occupation(i);
        let mut work = occ.to_vec();
        let mut column = Vec::new();
        for q in 0..k {
            if occ[q] == 0 {
                continue;
            }
            for p in 0..k {
                let apq = a[p * k + q];
                if apq.norm_sqr() == 0.0 {
                    continue;
                }
                work.copy_from_slice(occ);
                let f = ladder(&mut work, &[q], &[p]).expect("occupation checked");
                column.push((basis.rank(&work), apq * f));
            }
        }
        upper_row(i, column)
    });
    SparseHermitian::from_upper_rows(rows)
}

/// Total momentum `sum_p k_p n_p`, diagonal in the occupation basis.
pub fn total_momentum(basis: &FockBasis) -> SparseHermitian {
    let ks = basis.modes().wavenumbers();
    let rows = basis
        .iter()
        .enumerate()
        .map(|(i, occ)| {
            let p: f64 = occ.iter().zip(&ks).map(|(&m, k)| f64::from(m) * k).sum();
            vec![(i, C64::new(p, 0.0))]
        })
        .collect();
    SparseHermitian::from_upper_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::kernel::PotentialShape;
    use crate::fock::modes::ModeBasis;
    use crate::grid::TorusGrid;
    use std::f64::consts::TAU;

    fn setup(n: usize, k: usize) -> (FockBasis, TwoBodyKernel) {
        let m = ModeBasis::new(&TorusGrid::new(TAU, 32).unwrap(), k).unwrap();
        let kern = TwoBodyKernel::new(PotentialShape::Gaussian, 0.5, &m).unwrap();
        (FockBasis::new(n, &m).unwrap(), kern)
    }

    #[test]
    fn single_particle_is_kinetic() {
        let (b, kern) = setup(1, 6);
        let h = build_hamiltonian(&b, &kern, Coupling::Repulsive);
        assert_eq!(h.nnz(), 6);
        for i in 0..6 {
            let diag = h.row(i).next().unwrap();
            assert_eq!(diag.0, i);
            assert!((diag.1.re - b.modes().wavenumber(i).powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn two_bosons_two_modes_by_hand() {
        // slots 0, 1 hold n = -1, 0, so k = (-1, 0) on a 2 pi box.
        let (b, kern) = setup(2, 2);
        let h = build_hamiltonian(&b, &kern, Coupling::Repulsive).to_dense();
        let l = TAU;
        let v1 = kern.coefficient(1);
        let g = 1.0 / (2.0 * 2.0 * l);
        // <2,0|V|2,0>: a0+ a0+ a0 a0 -> 2, coefficient hat V(0) = 1
        let e20 = 2.0 + g * 2.0;
        // <1,1|V|1,1>: direct (a = c) and exchange (a = d) terms, each twice.
        // Momentum conservation leaves no off-diagonal entries.
        let e11 = 1.0 + g * 2.0 * (1.0 + v1);
        let e02 = g * 2.0;
        let expect = [[e20, 0.0, 0.0], [0.0, e11, 0.0], [0.0, 0.0, e02]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((h[(i, j)] - C64::new(expect[i][j], 0.0)).norm() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn exactly_hermitian_and_momentum_conserving() {
        let (b, kern) = setup(3, 6);
        let h = build_hamiltonian(&b, &kern, Coupling::Attractive);
        assert_eq!(h.hermiticity_defect(), 0.0);
        let p = total_momentum(&b);
        let (hd, pd) = (h.to_dense(), p.to_dense());
        let comm = &hd * &pd - &pd * &hd;
        assert!(comm.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-12);
    }

    #[test]
    fn number_operator_on_mode() {
        let (b, _) = setup(3, 4);
        let nop = number_operator(&Orbital::mode(4, 1), &b);
        for i in 0..b.dim() {
            let d: C64 = nop.row(i).filter(|(j, _)| *j == i).map(|e| e.1).sum();
            assert!((d.re - f64::from(b.occupation(i)[1])).abs() < 1e-14);
            assert!(nop.row(i).all(|(j, v)| j == i || v.norm() == 0.0));
        }
    }
}
