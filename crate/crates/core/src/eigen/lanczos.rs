//! Thick-restart Lanczos for a few extreme eigenvalues of a sparse symmetric
//! matrix.
//!
//! The iteration always targets the *largest* eigenvalues of a shifted,
//! possibly negated operator `s (A − c I)`. For the smallest end of the
//! spectrum `c` is the Gershgorin upper bound and `s = −1`, which makes the
//! wanted eigenvalues the dominant, positive ones. Every new Lanczos vector
//! is orthogonalized twice against the whole basis (classical Gram–Schmidt
//! with one refinement pass), and converged Ritz vectors are locked: they
//! stay in the basis with their coupling to the residual set to zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eigen::dense_sym::{dot, sym_eigen};
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum End {
    Smallest,
    Largest,
}

pub(crate) struct LanczosResult {
    /// Ascending for `Smallest`, descending for `Largest`.
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub restarts: usize,
}

const START_SEED: u64 = 0x1a2c_705e_ed00_0001;

pub(crate) fn extreme_eigenvalues(
    matrix: &CsrMatrix,
    k: usize,
    end: End,
    tol: f64,
    max_restarts: usize,
) -> Result<LanczosResult> {
    let n = matrix.nrows();
    assert!(k >= 1 && k <= n);
    let (lo, hi) = matrix.gershgorin_bounds();
    let (sign, center) = match end {
        End::Smallest => (-1.0, hi),
        End::Largest => (1.0, lo),
    };
    let norm_bound = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let abs_tol = tol * norm_bound;
    let apply = |x: &[f64], y: &mut [f64]| {
        matrix.matvec_into(x, y);
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi = sign * (*yi - center * xi);
        }
    };
    let to_original = |theta: f64| sign * theta + center;

    let basis_cap = n.min((2 * k + 20).max(40));
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(basis_cap + 1);
    let mut v0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    normalize(&mut v0);
    basis.push(v0);

    // Projected matrix T (basis_cap × basis_cap, row-major) and lock flags.
    let mut t = vec![0.0; basis_cap * basis_cap];
    let mut locked: Vec<bool> = Vec::new();
    let mut start = 0;
    let mut w = vec![0.0; n];
    let mut coeffs = vec![0.0; basis_cap + 1];
    let mut last_values = Vec::new();
    let mut last_residuals = Vec::new();

    for restart in 0..=max_restarts {
        let mut beta = 0.0;
        let mut size = basis_cap;
        for j in start..basis_cap {
            apply(&basis[j], &mut w);
            orthogonalize(&basis[..=j], &mut w, &mut coeffs);
            for i in 0..=j {
                let h = if i < j && locked.get(i).copied().unwrap_or(false) {
                    0.0
                } else {
                    coeffs[i]
                };
                t[i * basis_cap + j] = h;
                t[j * basis_cap + i] = h;
            }
            beta = norm(&w);
            if j + 1 == n {
                // Krylov space is the whole space.
                beta = 0.0;
                size = j + 1;
                break;
            }
            let mut next = std::mem::take(&mut w);
            if beta <= 1e-12 * norm_bound {
                // Invariant subspace: continue with a fresh direction.
                beta = 0.0;
                next = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                orthogonalize(&basis[..=j], &mut next, &mut coeffs);
                orthogonalize(&basis[..=j], &mut next, &mut coeffs);
                normalize(&mut next);
            } else {
                next.iter_mut().for_each(|e| *e /= beta);
            }
            basis.truncate(j + 1);
            basis.push(next);
            w = vec![0.0; n];
            if j + 1 == basis_cap {
                size = basis_cap;
            }
        }
        let exhausted = size < basis_cap || size == n;

        let mut proj = vec![0.0; size * size];
        for i in 0..size {
            proj[i * size..(i + 1) * size].copy_from_slice(&t[i * basis_cap..i * basis_cap + size]);
        }
        let eig = sym_eigen(&mut proj, size, true)?;
        let y = eig.vectors.expect("vectors requested");
        // Wanted: the k largest Ritz values of the transformed operator.
        let order: Vec<usize> = (0..size).rev().collect();
        let residual = |col: usize| (beta * y[(size - 1) * size + col]).abs();

        let wanted = &order[..k];
        last_values = wanted.iter().map(|&c| to_original(eig.values[c])).collect();
        last_residuals = wanted.iter().map(|&c| residual(c)).collect();
        let all_converged = last_residuals.iter().all(|&r| r <= abs_tol);
        if exhausted || all_converged {
            return Ok(LanczosResult {
                values: last_values,
                residuals: if exhausted && !all_converged {
                    vec![0.0; k]
                } else {
                    last_residuals
                },
                restarts: restart,
            });
        }
        if restart == max_restarts {
            break;
        }

        // Thick restart: keep the leading Ritz vectors plus the residual
        // direction.
        let keep = (k + (size - k) / 2).min(size - 1);
        let kept = &order[..keep];
        let mut new_basis: Vec<Vec<f64>> = Vec::with_capacity(basis_cap + 1);
        for &c in kept {
            let mut v = vec![0.0; n];
            for (row, b) in basis.iter().take(size).enumerate() {
                let coef = y[row * size + c];
                if coef != 0.0 {
                    for (vi, &bi) in v.iter_mut().zip(b) {
                        *vi += coef * bi;
                    }
                }
            }
            new_basis.push(v);
        }
        new_basis.push(basis.swap_remove(size));
        basis = new_basis;

        t.iter_mut().for_each(|e| *e = 0.0);
        locked.clear();
        for (i, &c) in kept.iter().enumerate() {
            t[i * basis_cap + i] = eig.values[c];
            let r = residual(c);
            locked.push(r <= abs_tol);
        }
        start = keep;
    }
    let converged = last_residuals.iter().filter(|&&r| r <= abs_tol).count();
    Err(Error::NotConverged {
        iterations: max_restarts,
        wanted: k,
        converged,
        partial: last_values.iter().map(|&v| v.into()).collect(),
        residuals: last_residuals,
    })
}

/// `w ← (I − V Vᵀ) w` twice; `coeffs` receives the accumulated projections.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64], coeffs: &mut [f64]) {
    coeffs[..basis.len()].iter_mut().for_each(|c| *c = 0.0);
    for _ in 0..2 {
        for (i, b) in basis.iter().enumerate() {
            let h = dot(b, w);
            coeffs[i] += h;
            for (wi, &bi) in w.iter_mut().zip(b) {
                *wi -= h * bi;
            }
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn normalize(v: &mut [f64]) {
    let s = norm(v);
    v.iter_mut().for_each(|e| *e /= s);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_symmetric(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rng.random_range(-1.0..1.0);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        a
    }

    fn sorted_oracle(a: &[f64], n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = nalgebra::DMatrix::from_row_slice(n, n, a)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn smallest_of_random_matrix() {
        let n = 200;
        let a = random_symmetric(n, 99);
        let m = CsrMatrix::from_dense(n, n, &a);
        let r = extreme_eigenvalues(&m, 10, End::Smallest, 1e-12, 500).unwrap();
        let want = sorted_oracle(&a, n);
        for (g, w) in r.values.iter().zip(&want) {
            assert!((g - w).abs() < 1e-8, "{g} vs {w}");
        }
    }

    #[test]
    fn largest_of_random_matrix() {
        let n = 150;
        let a = random_symmetric(n, 5);
        let m = CsrMatrix::from_dense(n, n, &a);
        let r = extreme_eigenvalues(&m, 3, End::Largest, 1e-12, 500).unwrap();
        let want = sorted_oracle(&a, n);
        for (g, w) in r.values.iter().zip(want.iter().rev()) {
            assert!((g - w).abs() < 1e-8, "{g} vs {w}");
        }
    }

    #[test]
    fn small_matrix_is_solved_exactly() {
        // Path Laplacian on three nodes: spectrum {0, 1, 3}.
        let m = CsrMatrix::from_dense(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
        let r = extreme_eigenvalues(&m, 3, End::Smallest, 1e-12, 10).unwrap();
        for (g, w) in r.values.iter().zip([0.0, 1.0, 3.0]) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_eigenvalues() {
        // Block diagonal with repeated blocks: multiplicities need fresh
        // directions after invariant subspaces are found.
        let n = 60;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = (i % 3) as f64;
        }
        let m = CsrMatrix::from_dense(n, n, &a);
        let r = extreme_eigenvalues(&m, 25, End::Smallest, 1e-12, 200).unwrap();
        let mut want = vec![0.0; 20];
        want.extend([1.0; 5]);
        for (g, w) in r.values.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10, "{:?}", r.values);
        }
    }
}
