//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by implicit QL iterations with Wilkinson-style shifts.

use crate::error::{Error, Result};

/// Eigen decomposition of a dense symmetric matrix.
pub(crate) struct SymEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Row-major `n × n`; column `j` is the unit eigenvector of `values[j]`.
    pub vectors: Option<Vec<f64>>,
}

/// Eigenvalues (and optionally eigenvectors) of the symmetric matrix `a`
/// (row-major, both triangles filled). `a` is overwritten.
pub(crate) fn sym_eigen(a: &mut [f64], n: usize, want_vectors: bool) -> Result<SymEigen> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(SymEigen {
            values: Vec::new(),
            vectors: want_vectors.then(Vec::new),
        });
    }
    let (mut diag, mut off, reflectors) = tridiagonalize(a, n);
    let mut z = if want_vectors {
        Some(accumulate(&reflectors, n))
    } else {
        None
    };
    tridiagonal_ql(&mut diag, &mut off, z.as_deref_mut(), n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = z.map(|z| {
        let mut sorted = vec![0.0; n * n];
        for (new, &old) in order.iter().enumerate() {
            for r in 0..n {
                sorted[r * n + new] = z[r * n + old];
            }
        }
        sorted
    });
    Ok(SymEigen { values, vectors })
}

/// A Householder reflector `I − β v vᵀ` acting on indices `start..n`.
struct Reflector {
    start: usize,
    v: Vec<f64>,
    beta: f64,
}

/// Returns the diagonal, the off-diagonal (`off[i] = T[i][i+1]`, last entry
/// zero) and the reflectors whose product `Q` satisfies `A = Q T Qᵀ`.
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>, Vec<Reflector>) {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let start = k + 1;
        // Row k right of the diagonal equals column k below it.
        let x = &a[k * n + start..k * n + n];
        let (v, beta, alpha) = householder(x);
        diag[k] = a[k * n + k];
        off[k] = alpha;
        if beta != 0.0 {
            // Trailing block S ← (I − βvvᵀ) S (I − βvvᵀ) = S − v wᵀ − w vᵀ with
            // p = βSv and w = p − (β/2)(pᵀv)v.
            let len = n - start;
            for i in 0..len {
                let row = &a[(start + i) * n + start..(start + i) * n + n];
                p[i] = beta * dot(row, &v);
            }
            let pv = dot(&p[..len], &v);
            let half = 0.5 * beta * pv;
            for i in 0..len {
                p[i] -= half * v[i];
            }
            for i in 0..len {
                let (vi, wi) = (v[i], p[i]);
                let row = &mut a[(start + i) * n + start..(start + i) * n + n];
                for ((r, &vj), &wj) in row.iter_mut().zip(&v).zip(&p[..len]) {
                    *r -= vi * wj + wi * vj;
                }
            }
        }
        reflectors.push(Reflector { start, v, beta });
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2) * n + n - 2];
        off[n - 2] = a[(n - 2) * n + n - 1];
    }
    diag[n - 1] = a[(n - 1) * n + n - 1];
    (diag, off, reflectors)
}

/// `(v, β, α)` with `(I − β v vᵀ) x = α e₁` and `v[0] = 1`.
pub(crate) fn householder(x: &[f64]) -> (Vec<f64>, f64, f64) {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut v = x.to_vec();
    if scale == 0.0 || x.len() == 1 {
        v.iter_mut().for_each(|e| *e = 0.0);
        v[0] = 1.0;
        return (v, 0.0, x[0]);
    }
    let norm = scale * x.iter().map(|e| (e / scale).powi(2)).sum::<f64>().sqrt();
    let tail_zero = x[1..].iter().all(|&e| e == 0.0);
    if tail_zero {
        v.iter_mut().for_each(|e| *e = 0.0);
        v[0] = 1.0;
        return (v, 0.0, x[0]);
    }
    let alpha = if x[0] >= 0.0 { -norm } else { norm };
    let v0 = x[0] - alpha;
    for e in v.iter_mut().skip(1) {
        *e /= v0;
    }
    v[0] = 1.0;
    let beta = -v0 / alpha;
    (v, beta, alpha)
}

fn accumulate(reflectors: &[Reflector], n: usize) -> Vec<f64> {
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    let mut s = vec![0.0; n];
    // Q = H₀ H₁ ⋯, built right to left so each step touches a shrinking block.
    for r in reflectors.iter().rev() {
        if r.beta == 0.0 {
            continue;
        }
        let st = r.start;
        let width = n - st;
        s[..width].iter_mut().for_each(|e| *e = 0.0);
        for (i, &vi) in r.v.iter().enumerate() {
            let row = &q[(st + i) * n + st..(st + i) * n + n];
            for (acc, &qv) in s[..width].iter_mut().zip(row) {
                *acc += vi * qv;
            }
        }
        for (i, &vi) in r.v.iter().enumerate() {
            let f = r.beta * vi;
            let row = &mut q[(st + i) * n + st..(st + i) * n + n];
            for (qv, &acc) in row.iter_mut().zip(&s[..width]) {
                *qv -= f * acc;
            }
        }
    }
    q
}

/// Implicit QL on the symmetric tridiagonal matrix `(diag, off)`; rotations
/// are applied to the columns of `z` when given.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64], mut z: Option<&mut [f64]>, n: usize) -> Result<()> {
    const MAX_SWEEPS: usize = 60;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_SWEEPS {
                return Err(Error::NotConverged {
                    iterations,
                    wanted: n,
                    converged: l,
                    partial: diag.iter().map(|&d| d.into()).collect(),
                    residuals: off.iter().map(|e| e.abs()).collect(),
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let zf = z[k * n + i + 1];
                        let zi = z[k * n + i];
                        z[k * n + i + 1] = s * zi + c * zf;
                        z[k * n + i] = c * zi - s * zf;
                    }
                }
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

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

    #[test]
    fn diagonal_matrix() {
        let mut a = vec![5.0, 0.0, 0.0, 0.0, -3.0, 0.0, 0.0, 0.0, 0.5];
        let e = sym_eigen(&mut a, 3, false).unwrap();
        assert_eq!(e.values, vec![-3.0, 0.5, 5.0]);
    }

    #[test]
    fn matches_nalgebra_and_reconstructs() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (17, 4), (60, 5)] {
            let a = random_symmetric(n, seed);
            let oracle = nalgebra::DMatrix::from_row_slice(n, n, &a).symmetric_eigenvalues();
            let mut expected: Vec<f64> = oracle.iter().copied().collect();
            expected.sort_by(f64::total_cmp);

            let mut work = a.clone();
            let e = sym_eigen(&mut work, n, true).unwrap();
            for (x, y) in e.values.iter().zip(&expected) {
                assert!((x - y).abs() < 1e-12, "n={n}: {x} vs {y}");
            }
            // A v = λ v for every pair.
            let z = e.vectors.unwrap();
            for j in 0..n {
                for i in 0..n {
                    let av: f64 = (0..n).map(|k| a[i * n + k] * z[k * n + j]).sum();
                    assert!((av - e.values[j] * z[i * n + j]).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn householder_maps_to_axis() {
        let x = [3.0, 4.0, 0.0, 12.0];
        let (v, beta, alpha) = householder(&x);
        let vx = dot(&v, &x);
        let hx: Vec<f64> = x.iter().zip(&v).map(|(xi, vi)| xi - beta * vi * vx).collect();
        assert!((alpha.abs() - 13.0).abs() < 1e-12);
        assert!((hx[0] - alpha).abs() < 1e-12);
        assert!(hx[1..].iter().all(|e| e.abs() < 1e-12));
    }
}
