//! Implicitly restarted Arnoldi for a few eigenvalues of a sparse real
//! nonsymmetric matrix, in the style of ARPACK's `dnaupd`.
//!
//! An `m`-step Arnoldi factorization `A V = V H + f eₘᵀ` is compressed to
//! `k` steps by applying the `m − k` unwanted Ritz values as exact shifts
//! (real shifts by a Givens bulge chase, complex conjugate pairs by a
//! double-shift Householder chase), then extended again. Ritz residuals are
//! estimated as `‖f‖ |yₘ|` from eigenvectors `y` of the small Hessenberg
//! matrix.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eigen::dense_nonsym::hessenberg_eigenvalues;
use crate::eigen::dense_sym::{dot, householder};
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Target {
    LargestModulus,
    LargestReal,
}

impl Target {
    pub(crate) fn key(self, z: Complex64) -> f64 {
        match self {
            Target::LargestModulus => z.norm(),
            Target::LargestReal => z.re,
        }
    }
}

pub(crate) struct ArnoldiResult {
    /// Wanted Ritz values, best first under the target ordering.
    pub values: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub restarts: usize,
}

const START_SEED: u64 = 0x1a2c_705e_ed00_0002;

/// Smallest dimension this solver accepts for `nev` wanted values; below it
/// a dense solve is the right tool.
pub(crate) fn min_dimension(nev: usize) -> usize {
    krylov_size(nev, usize::MAX) + 1
}

fn krylov_size(nev: usize, dim: usize) -> usize {
    dim.min((2 * nev + 1).max(nev + 20))
}

/// With `floor = Some(b)` only the wanted Ritz values whose key is at least
/// `b` have to converge, and the iteration also stops once those have
/// converged and their number held steady over two restarts while the
/// weakest wanted value sits below `b`. Values below `b` are then returned
/// unconverged.
pub(crate) fn leading_eigenvalues(
    matrix: &CsrMatrix,
    nev: usize,
    target: Target,
    floor: Option<f64>,
    tol: f64,
    max_restarts: usize,
) -> Result<ArnoldiResult> {
    let dim = matrix.nrows();
    let m = krylov_size(nev, dim);
    assert!(nev >= 1 && m < dim && m >= nev + 2, "dimension too small for Arnoldi");
    let eps23 = f64::EPSILON.powf(2.0 / 3.0);

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut random_unit = |basis: &[Vec<f64>], coeffs: &mut [f64]| {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        orthogonalize(basis, &mut v, coeffs);
        orthogonalize(basis, &mut v, coeffs);
        let s = norm(&v);
        v.iter_mut().for_each(|e| *e /= s);
        v
    };

    let mut coeffs = vec![0.0; m + 1];
    let mut basis: Vec<Vec<f64>> = vec![random_unit(&[], &mut coeffs)];
    let mut h = vec![0.0; m * m];
    let mut q = vec![0.0; m * m];
    let mut w = vec![0.0; dim];
    let mut start = 0;
    let mut anorm = 0.0f64;
    let mut previous_inside = None;

    for restart in 0..=max_restarts {
        let mut fnorm = 0.0;
        for j in start..m {
            matrix.matvec_into(&basis[j], &mut w);
            orthogonalize(&basis[..=j], &mut w, &mut coeffs);
            for i in 0..=j {
                h[i * m + j] = coeffs[i];
            }
            fnorm = norm(&w);
            anorm = anorm.max(fnorm).max(coeffs[..=j].iter().fold(0.0, |a, c| a.max(c.abs())));
            let next = if fnorm <= 1e-13 * anorm.max(f64::MIN_POSITIVE) {
                fnorm = 0.0;
                random_unit(&basis[..=j], &mut coeffs)
            } else {
                w.iter().map(|e| e / fnorm).collect()
            };
            if j + 1 < m {
                h[(j + 1) * m + j] = fnorm;
            }
            basis.truncate(j + 1);
            basis.push(next);
        }

        let mut ritz = hessenberg_eigenvalues(&mut h.clone(), m)?;
        ritz.sort_by(|a, b| {
            target
                .key(*b)
                .total_cmp(&target.key(*a))
                .then(b.im.total_cmp(&a.im))
        });
        let hnorm = h.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let wanted = nev + usize::from(splits_pair(&ritz, nev));
        let residuals: Vec<f64> = ritz[..wanted]
            .iter()
            .map(|&theta| fnorm * last_component(&h, m, theta, hnorm))
            .collect();
        let is_converged = |theta: Complex64, r: f64| r <= tol * theta.norm().max(eps23 * hnorm);
        let nconv = ritz[..wanted]
            .iter()
            .zip(&residuals)
            .filter(|(t, r)| is_converged(**t, **r))
            .count();
        let settled = floor.is_some_and(|b| {
            let inside: Vec<usize> = (0..wanted).filter(|&i| target.key(ritz[i]) >= b).collect();
            let all_converged = inside.iter().all(|&i| is_converged(ritz[i], residuals[i]));
            let stable = previous_inside.replace(inside.len()) == Some(inside.len());
            all_converged && stable && inside.len() < wanted
        });
        let last = (ritz[..wanted].to_vec(), residuals);
        if nconv == wanted || settled {
            return Ok(ArnoldiResult {
                values: last.0,
                residuals: last.1,
                restarts: restart,
            });
        }
        if restart == max_restarts {
            return Err(Error::NotConverged {
                iterations: max_restarts,
                wanted,
                converged: nconv,
                partial: last.0,
                residuals: last.1,
            });
        }

        // Keep more than the wanted set once some values have converged, to
        // avoid stagnation.
        let mut keep = (wanted + nconv.min((m - wanted) / 2)).min(m - 1);
        if splits_pair(&ritz, keep) {
            keep = if keep + 1 < m { keep + 1 } else { keep - 1 };
        }

        q.iter_mut().for_each(|e| *e = 0.0);
        for i in 0..m {
            q[i * m + i] = 1.0;
        }
        for shift in &ritz[keep..] {
            if shift.im == 0.0 {
                real_shift(&mut h, &mut q, m, shift.re);
            } else if shift.im > 0.0 {
                double_shift(&mut h, &mut q, m, shift.re, shift.im);
            }
        }

        // V ← V Q[:, :keep] and the new residual vector.
        let coupling = h[keep * m + keep - 1];
        let tail = fnorm * q[(m - 1) * m + keep - 1];
        let mut new_basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        for col in 0..=keep {
            let mut v = vec![0.0; dim];
            for (row, b) in basis.iter().take(m).enumerate() {
                let c = q[row * m + col];
                if c != 0.0 {
                    for (vi, &bi) in v.iter_mut().zip(b) {
                        *vi += c * bi;
                    }
                }
            }
            new_basis.push(v);
        }
        let mut f = new_basis.pop().expect("keep + 1 columns");
        for (fi, &vi) in f.iter_mut().zip(&basis[m]) {
            *fi = *fi * coupling + tail * vi;
        }
        orthogonalize(&new_basis, &mut f, &mut coeffs);
        let beta = norm(&f);
        let next = if beta <= 1e-13 * anorm {
            random_unit(&new_basis, &mut coeffs)
        } else {
            f.iter().map(|e| e / beta).collect()
        };
        let beta = if beta <= 1e-13 * anorm { 0.0 } else { beta };
        basis = new_basis;
        basis.push(next);

        for i in 0..m {
            for j in 0..m {
                let inside = i < keep && j < keep && i <= j + 1;
                if !inside {
                    h[i * m + j] = 0.0;
                }
            }
        }
        h[keep * m + keep - 1] = beta;
        start = keep;
    }
    unreachable!("loop returns on its final iteration")
}

/// Whether the first `count` values end in the middle of a conjugate pair.
fn splits_pair(sorted: &[Complex64], count: usize) -> bool {
    count > 0
        && count < sorted.len()
        && sorted[count - 1].im != 0.0
        && sorted[count] == sorted[count - 1].conj()
}

/// `|y[m−1]|` for the unit eigenvector `y` of the Hessenberg matrix `h`
/// belonging to `theta`, by two steps of inverse iteration.
fn last_component(h: &[f64], m: usize, theta: Complex64, hnorm: f64) -> f64 {
    let floor = f64::EPSILON * hnorm.max(f64::MIN_POSITIVE);
    let mut y = vec![Complex64::new(1.0, 0.0); m];
    for _ in 0..2 {
        // Hessenberg LU with adjacent-row pivoting of (H − θI).
        let mut a: Vec<Complex64> = h.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for i in 0..m {
            a[i * m + i] -= theta;
        }
        let mut rhs = y.clone();
        for j in 0..m - 1 {
            if a[(j + 1) * m + j].norm() > a[j * m + j].norm() {
                for c in j..m {
                    a.swap(j * m + c, (j + 1) * m + c);
                }
                rhs.swap(j, j + 1);
            }
            let mut pivot = a[j * m + j];
            if pivot.norm() < floor {
                pivot = Complex64::new(floor, 0.0);
                a[j * m + j] = pivot;
            }
            let factor = a[(j + 1) * m + j] / pivot;
            if factor != Complex64::new(0.0, 0.0) {
                for c in j..m {
                    let u = a[j * m + c];
                    a[(j + 1) * m + c] -= factor * u;
                }
                let r = rhs[j];
                rhs[j + 1] -= factor * r;
            }
        }
        if a[(m - 1) * m + m - 1].norm() < floor {
            a[(m - 1) * m + m - 1] = Complex64::new(floor, 0.0);
        }
        for i in (0..m).rev() {
            let mut s = rhs[i];
            for c in i + 1..m {
                s -= a[i * m + c] * y[c];
            }
            y[i] = s / a[i * m + i];
        }
        let scale = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !scale.is_finite() || scale == 0.0 {
            return 1.0;
        }
        y.iter_mut().for_each(|c| *c /= scale);
    }
    y[m - 1].norm()
}

/// One implicit QR step with real shift `mu`: `H ← Gᵀ H G`, `Q ← Q G`.
fn real_shift(h: &mut [f64], q: &mut [f64], m: usize, mu: f64) {
    let mut x = h[0] - mu;
    let mut y = h[m];
    for i in 0..m - 1 {
        let r = x.hypot(y);
        let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (x / r, y / r) };
        for j in i.saturating_sub(1)..m {
            let (a, b) = (h[i * m + j], h[(i + 1) * m + j]);
            h[i * m + j] = c * a + s * b;
            h[(i + 1) * m + j] = c * b - s * a;
        }
        for r in 0..=(i + 2).min(m - 1) {
            let (a, b) = (h[r * m + i], h[r * m + i + 1]);
            h[r * m + i] = c * a + s * b;
            h[r * m + i + 1] = c * b - s * a;
        }
        for r in 0..m {
            let (a, b) = (q[r * m + i], q[r * m + i + 1]);
            q[r * m + i] = c * a + s * b;
            q[r * m + i + 1] = c * b - s * a;
        }
        if i > 0 {
            h[(i + 1) * m + i - 1] = 0.0;
        }
        if i + 2 < m {
            x = h[(i + 1) * m + i];
            y = h[(i + 2) * m + i];
        }
    }
}

/// One Francis double step with the conjugate shifts `re ± i·im`.
fn double_shift(h: &mut [f64], q: &mut [f64], m: usize, re: f64, im: f64) {
    let s = 2.0 * re;
    let t = re * re + im * im;
    let (h00, h01, h10, h11) = (h[0], h[1], h[m], h[m + 1]);
    let mut x = h00 * h00 + h01 * h10 - s * h00 + t;
    let mut y = h10 * (h00 + h11 - s);
    let mut z = if m > 2 { h10 * h[2 * m + 1] } else { 0.0 };
    for k in 0..m - 1 {
        let size = if k + 2 < m { 3 } else { 2 };
        let (v, beta, _) = householder(&[x, y, z][..size]);
        if beta != 0.0 {
            for j in k.saturating_sub(1)..m {
                let d: f64 = (0..size).map(|r| v[r] * h[(k + r) * m + j]).sum();
                for r in 0..size {
                    h[(k + r) * m + j] -= beta * v[r] * d;
                }
            }
            for r in 0..=(k + size).min(m - 1) {
                let d: f64 = (0..size).map(|c| h[r * m + k + c] * v[c]).sum();
                for c in 0..size {
                    h[r * m + k + c] -= beta * d * v[c];
                }
            }
            for r in 0..m {
                let d: f64 = (0..size).map(|c| q[r * m + k + c] * v[c]).sum();
                for c in 0..size {
                    q[r * m + k + c] -= beta * d * v[c];
                }
            }
        }
        if k > 0 {
            h[(k + 1) * m + k - 1] = 0.0;
            if size == 3 {
                h[(k + 2) * m + k - 1] = 0.0;
            }
        }
        x = h[(k + 1) * m + k];
        y = if k + 2 < m { h[(k + 2) * m + k] } else { 0.0 };
        z = if k + 3 < m { h[(k + 3) * m + k] } else { 0.0 };
    }
}

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
