//! Dense real nonsymmetric eigenvalues: balancing, Householder reduction to
//! upper Hessenberg form, then Francis double-shift QR.

use num_complex::Complex64;

use crate::eigen::dense_sym::{dot, householder};
use crate::error::{Error, Result};

/// All eigenvalues of the row-major `n × n` matrix `a`, which is overwritten.
pub(crate) fn eigenvalues(a: &mut [f64], n: usize) -> Result<Vec<Complex64>> {
    assert_eq!(a.len(), n * n);
    balance(a, n);
    hessenberg(a, n);
    hessenberg_eigenvalues(a, n)
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable.
fn balance(a: &mut [f64], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].abs();
                    r += a[i * n + j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut g = r / RADIX;
            let mut f = 1.0;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                a[i * n..i * n + n].iter_mut().for_each(|v| *v *= inv);
                for j in 0..n {
                    a[j * n + i] *= f;
                }
            }
        }
    }
}

/// Orthogonal reduction to upper Hessenberg form in place. Entries below the
/// subdiagonal are set to zero.
pub(crate) fn hessenberg(a: &mut [f64], n: usize) {
    let mut x = vec![0.0; n];
    let mut s = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        for i in 0..len {
            x[i] = a[(k + 1 + i) * n + k];
        }
        let (v, beta, alpha) = householder(&x[..len]);
        if beta == 0.0 {
            continue;
        }
        // Left: rows k+1.., columns k.. ← (I − βvvᵀ) ·
        let width = n - k;
        s[..width].iter_mut().for_each(|e| *e = 0.0);
        for (i, &vi) in v.iter().enumerate() {
            let row = &a[(k + 1 + i) * n + k..(k + 2 + i) * n];
            for (acc, &r) in s[..width].iter_mut().zip(row) {
                *acc += vi * r;
            }
        }
        for (i, &vi) in v.iter().enumerate() {
            let f = beta * vi;
            let row = &mut a[(k + 1 + i) * n + k..(k + 2 + i) * n];
            for (r, &acc) in row.iter_mut().zip(&s[..width]) {
                *r -= f * acc;
            }
        }
        // Right: all rows, columns k+1.. ← · (I − βvvᵀ)
        for i in 0..n {
            let row = &mut a[i * n + k + 1..(i + 1) * n];
            let t = beta * dot(row, &v);
            for (r, &vj) in row.iter_mut().zip(&v) {
                *r -= t * vj;
            }
        }
        a[(k + 1) * n + k] = alpha;
        for i in k + 2..n {
            a[i * n + k] = 0.0;
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
/// algorithm. `h` is destroyed.
pub(crate) fn hessenberg_eigenvalues(h: &mut [f64], n: usize) -> Result<Vec<Complex64>> {
    let max_its = 30 * n.max(10);
    let idx = |i: usize, j: usize| i * n + j;
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(values);
    }
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h[idx(i, j)].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut shift_total = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 1 {
                let mut s = h[idx(l - 1, l - 1)].abs() + h[idx(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if h[idx(l, l - 1)].abs() <= f64::EPSILON * s {
                    h[idx(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = h[idx(nu, nu)];
            if l == nu {
                values[nu] = Complex64::new(x + shift_total, 0.0);
                nn -= 1;
                break;
            }
            let mut y = h[idx(nu - 1, nu - 1)];
            let mut w = h[idx(nu, nu - 1)] * h[idx(nu - 1, nu)];
            if l + 1 == nu {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += shift_total;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    let hi = x + z;
                    let lo = if z != 0.0 { x - w / z } else { hi };
                    values[nu - 1] = Complex64::new(hi, 0.0);
                    values[nu] = Complex64::new(lo, 0.0);
                } else {
                    values[nu - 1] = Complex64::new(x + p, -z);
                    values[nu] = Complex64::new(x + p, z);
                }
                nn -= 2;
                break;
            }
            if its == max_its {
                let found = n - 1 - nu;
                return Err(Error::NotConverged {
                    iterations: its,
                    wanted: n,
                    converged: found,
                    partial: values,
                    residuals: Vec::new(),
                });
            }
            if its > 0 && its % 10 == 0 {
                // Exceptional shift.
                shift_total += x;
                for i in 0..=nu {
                    h[idx(i, i)] -= x;
                }
                let s = h[idx(nu, nu - 1)].abs() + h[idx(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            let (mut p, mut q, mut r);
            let mut m = nu - 2;
            loop {
                let z = h[idx(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h[idx(m + 1, m)] + h[idx(m, m + 1)];
                q = h[idx(m + 1, m + 1)] - z - rr - ss;
                r = h[idx(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h[idx(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (h[idx(m - 1, m - 1)].abs() + z.abs() + h[idx(m + 1, m + 1)].abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                h[idx(i, i - 2)] = 0.0;
                if i != m + 2 {
                    h[idx(i, i - 3)] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                let mut scale = 0.0;
                if k != m {
                    p = h[idx(k, k - 1)];
                    q = h[idx(k + 1, k - 1)];
                    r = if k + 1 != nu { h[idx(k + 2, k - 1)] } else { 0.0 };
                    scale = p.abs() + q.abs() + r.abs();
                    if scale != 0.0 {
                        p /= scale;
                        q /= scale;
                        r /= scale;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            h[idx(k, k - 1)] = -h[idx(k, k - 1)];
                        }
                    } else {
                        h[idx(k, k - 1)] = -s * scale;
                    }
                    p += s;
                    let xs = p / s;
                    let ys = q / s;
                    let zs = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = h[idx(k, j)] + q * h[idx(k + 1, j)];
                        if k + 1 != nu {
                            pp += r * h[idx(k + 2, j)];
                            h[idx(k + 2, j)] -= pp * zs;
                        }
                        h[idx(k + 1, j)] -= pp * ys;
                        h[idx(k, j)] -= pp * xs;
                    }
                    let last = nu.min(k + 3);
                    for i in l..=last {
                        let mut pp = xs * h[idx(i, k)] + ys * h[idx(i, k + 1)];
                        if k + 1 != nu {
                            pp += zs * h[idx(i, k + 2)];
                            h[idx(i, k + 2)] -= pp * r;
                        }
                        h[idx(i, k + 1)] -= pp * q;
                        h[idx(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(values)
}
