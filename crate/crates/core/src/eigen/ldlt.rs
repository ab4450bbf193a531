//! Symmetric indefinite `P A Pᵀ = L D Lᵀ` factorization with Bunch–Kaufman
//! pivoting. Only the block diagonal `D` is kept: by Sylvester's law of
//! inertia its eigenvalue signs are those of `A`.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Summary of the block-diagonal factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdltSummary {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
    /// `ln |det A|`; `-inf` when a pivot is exactly zero.
    pub log_abs_det: f64,
    /// Sign of `det A` (`0.0` when singular).
    pub det_sign: f64,
}

/// Growth bound constant `(1 + √17) / 8`.
const ALPHA: f64 = 0.640_388_203_202_208_4;

/// Factor a symmetric matrix given by its lower triangle in row-major
/// `n × n` storage (`a[i * n + j]`, `j ≤ i`). Eigenvalues of `D` within
/// `zero_tol` of zero (absolute) count as zero.
pub(crate) fn factor_lower(a: &mut [f64], n: usize, zero_tol: f64) -> Result<LdltSummary> {
    let at = |i: usize, j: usize| i * n + j;
    let mut out = LdltSummary {
        negative: 0,
        zero: 0,
        positive: 0,
        log_abs_det: 0.0,
        det_sign: 1.0,
    };
    let classify = |value: f64, out: &mut LdltSummary| {
        if value < -zero_tol {
            out.negative += 1;
        } else if value > zero_tol {
            out.positive += 1;
        } else {
            out.zero += 1;
        }
    };
    let mut col = vec![0.0; n];
    let mut col2 = vec![0.0; n];
    let mut k = 0;
    while k < n {
        let absakk = a[at(k, k)].abs();
        let (mut imax, mut colmax) = (k, 0.0f64);
        for i in k + 1..n {
            let v = a[at(i, k)].abs();
            if v > colmax {
                colmax = v;
                imax = i;
            }
        }
        if !absakk.is_finite() || !colmax.is_finite() {
            return Err(Error::Breakdown { pivot: k });
        }
        if absakk.max(colmax) == 0.0 {
            // Column already eliminated: an exact zero pivot.
            classify(0.0, &mut out);
            out.det_sign = 0.0;
            out.log_abs_det = f64::NEG_INFINITY;
            k += 1;
            continue;
        }
        let (kp, step) = if absakk >= ALPHA * colmax {
            (k, 1)
        } else {
            let mut rowmax = 0.0f64;
            for j in k..imax {
                rowmax = rowmax.max(a[at(imax, j)].abs());
            }
            for i in imax + 1..n {
                rowmax = rowmax.max(a[at(i, imax)].abs());
            }
            if absakk >= ALPHA * colmax * (colmax / rowmax) {
                (k, 1)
            } else if a[at(imax, imax)].abs() >= ALPHA * rowmax {
                (imax, 1)
            } else {
                (imax, 2)
            }
        };
        let kk = k + step - 1;
        if kp != kk {
            swap_symmetric(a, n, k, kk, kp);
        }
        if step == 1 {
            let d = a[at(k, k)];
            classify(d, &mut out);
            accumulate_det(&mut out, d);
            if d != 0.0 {
                for i in k + 1..n {
                    col[i] = a[at(i, k)];
                }
                for i in k + 1..n {
                    let f = col[i] / d;
                    if f == 0.0 {
                        continue;
                    }
                    let row = &mut a[at(i, k + 1)..=at(i, i)];
                    for (r, &c) in row.iter_mut().zip(&col[k + 1..=i]) {
                        *r -= f * c;
                    }
                }
            }
        } else {
            let d11 = a[at(k, k)];
            let d21 = a[at(k + 1, k)];
            let d22 = a[at(k + 1, k + 1)];
            let det = d11 * d22 - d21 * d21;
            if !det.is_finite() || det == 0.0 {
                return Err(Error::Breakdown { pivot: k });
            }
            // Eigenvalues of the 2 × 2 block.
            let mid = 0.5 * (d11 + d22);
            let rad = (0.5 * (d11 - d22)).hypot(d21);
            classify(mid - rad, &mut out);
            classify(mid + rad, &mut out);
            accumulate_det(&mut out, det);
            for i in k + 2..n {
                col[i] = a[at(i, k)];
                col2[i] = a[at(i, k + 1)];
            }
            for i in k + 2..n {
                // (w1, w2) = (c1, c2) D⁻¹
                let w1 = (col[i] * d22 - col2[i] * d21) / det;
                let w2 = (col2[i] * d11 - col[i] * d21) / det;
                if w1 == 0.0 && w2 == 0.0 {
                    continue;
                }
                let row = &mut a[at(i, k + 2)..=at(i, i)];
                for ((r, &c1), &c2) in row.iter_mut().zip(&col[k + 2..=i]).zip(&col2[k + 2..=i]) {
                    *r -= w1 * c1 + w2 * c2;
                }
            }
        }
        k += step;
    }
    Ok(out)
}

fn accumulate_det(out: &mut LdltSummary, value: f64) {
    if value == 0.0 {
        out.det_sign = 0.0;
        out.log_abs_det = f64::NEG_INFINITY;
    } else {
        out.log_abs_det += value.abs().ln();
        if value < 0.0 {
            out.det_sign = -out.det_sign;
        }
    }
}

/// Symmetric interchange of rows/columns `kk` and `kp` (`kp > kk`) within the
/// trailing block starting at `k`, lower storage.
fn swap_symmetric(a: &mut [f64], n: usize, k: usize, kk: usize, kp: usize) {
    let at = |i: usize, j: usize| i * n + j;
    for i in kp + 1..n {
        a.swap(at(i, kk), at(i, kp));
    }
    for j in kk + 1..kp {
        a.swap(at(j, kk), at(kp, j));
    }
    a.swap(at(kk, kk), at(kp, kp));
    if kk > k {
        // Two-by-two pivot: the coupling entry moves with its row.
        a.swap(at(kk, k), at(kp, k));
    }
}

/// Dense lower-triangle copy of a sparse symmetric matrix.
pub(crate) fn lower_dense(matrix: &CsrMatrix) -> Vec<f64> {
    let n = matrix.nrows();
    let mut a = vec![0.0; n * n];
    for (i, j, v) in matrix.iter() {
        if j <= i {
            a[i * n + j] = v;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn summary(dense: &[f64], n: usize, tol: f64) -> LdltSummary {
        let m = CsrMatrix::from_dense(n, n, dense);
        factor_lower(&mut lower_dense(&m), n, tol).unwrap()
    }

    #[test]
    fn diagonal_signs() {
        let s = summary(&[-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0], 3, 1e-12);
        assert_eq!((s.negative, s.zero, s.positive), (1, 1, 1));
        assert_eq!(s.det_sign, 0.0);
    }

    #[test]
    fn zero_diagonal_forces_two_by_two_pivot() {
        // [[0, 1], [1, 0]] has eigenvalues ±1.
        let s = summary(&[0.0, 1.0, 1.0, 0.0], 2, 1e-12);
        assert_eq!((s.negative, s.zero, s.positive), (1, 0, 1));
        assert_eq!(s.det_sign, -1.0);
        assert!(s.log_abs_det.abs() < 1e-15);
    }

    #[test]
    fn determinant_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [3usize, 10, 25] {
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    a[i * n + j] = v;
                    a[j * n + i] = v;
                }
            }
            let det = nalgebra::DMatrix::from_row_slice(n, n, &a).determinant();
            let s = summary(&a, n, 0.0);
            assert_eq!(s.det_sign, det.signum());
            assert!((s.log_abs_det - det.abs().ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn inertia_matches_oracle_on_indefinite_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..40 {
            let n = 1 + trial % 30;
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    // Sparse-ish with small diagonal to exercise 2 × 2 pivots.
                    let v: f64 = if rng.random_bool(0.4) { rng.random_range(-2.0..2.0) } else { 0.0 };
                    let v = if i == j { 0.05 * v } else { v };
                    a[i * n + j] = v;
                    a[j * n + i] = v;
                }
            }
            let eig = nalgebra::DMatrix::from_row_slice(n, n, &a).symmetric_eigenvalues();
            let tol = 1e-8 * a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let neg = eig.iter().filter(|&&v| v < -tol).count();
            let pos = eig.iter().filter(|&&v| v > tol).count();
            let s = summary(&a, n, tol);
            assert_eq!((s.negative, s.positive), (neg, pos), "trial {trial}");
        }
    }
}
