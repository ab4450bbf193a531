//! Eigenvalue machinery for the spectral estimators.
//!
//! * [`sym_smallest`] / [`sym_largest`]: a few extreme eigenvalues of a
//!   sparse symmetric matrix (dense QL below a cutoff, thick-restart Lanczos
//!   above it).
//! * [`inertia_ldlt`]: signs of all eigenvalues via a Bunch–Kaufman `LDLᵀ`
//!   factorization.
//! * [`nonsym_spectrum`]: eigenvalues of a sparse real matrix, either all of
//!   them (dense Francis QR) or every eigenvalue in a half-plane / outside a
//!   disc (implicitly restarted Arnoldi, growing the Krylov target until the
//!   region is exhausted).
//!
//! Matrices are first split into the diagonal blocks given by the connected
//! components of their sparsity pattern; each block is solved on its own,
//! so graphs with many small components never reach a Krylov solver, which
//! cannot resolve repeated eigenvalues from one starting vector.

mod arnoldi;
mod dense_nonsym;
mod dense_sym;
mod lanczos;
mod ldlt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub use ldlt::LdltSummary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Symmetric blocks up to this order are solved densely.
    pub sym_dense_cutoff: usize,
    /// Nonsymmetric blocks up to this order are solved densely.
    pub nonsym_dense_cutoff: usize,
    /// Symmetric blocks up to this order get a dense `LDLᵀ` for inertia;
    /// larger ones count negative eigenvalues with Lanczos.
    pub inertia_dense_limit: usize,
    /// Use the Krylov solvers regardless of size.
    pub force_iterative: bool,
    /// Relative residual tolerance of the Krylov solvers.
    pub tol: f64,
    pub max_restarts: usize,
    /// Eigenvalues within `zero_tol · max|entry|` of zero count as zero.
    pub zero_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            sym_dense_cutoff: 500,
            nonsym_dense_cutoff: 300,
            inertia_dense_limit: 8000,
            force_iterative: false,
            tol: 1e-10,
            max_restarts: 1000,
            zero_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Dense,
    Krylov,
}

impl SolverKind {
    fn merge(self, other: SolverKind) -> SolverKind {
        if self == SolverKind::Krylov || other == SolverKind::Krylov {
            SolverKind::Krylov
        } else {
            SolverKind::Dense
        }
    }
}

/// Extreme eigenvalues of a symmetric matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymSpectrum {
    pub values: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub converged: bool,
    pub solver: SolverKind,
}

/// Eigenvalues of a real matrix, closed under conjugation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexSpectrum {
    pub values: Vec<Complex64>,
    pub residual_norms: Vec<f64>,
    pub solver: SolverKind,
    /// `None` for the full spectrum. Otherwise every eigenvalue whose
    /// modulus (or real part) is at least this bound is present; a few
    /// slightly below it may be too.
    pub region_bound: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
    /// Absolute threshold below which an eigenvalue counted as zero.
    pub zero_tol: f64,
}

impl Inertia {
    pub fn total(&self) -> usize {
        self.negative + self.zero + self.positive
    }
}

/// Which part of a nonsymmetric spectrum to compute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumMode {
    Full,
    /// All eigenvalues with `|λ| ≥ radius`; `nev` is the first Krylov target.
    Leading { nev: usize, radius: f64 },
    /// All eigenvalues with `Re λ ≥ abscissa`.
    RightOf { nev: usize, abscissa: f64 },
}

/// The `k` algebraically smallest eigenvalues, ascending.
pub fn sym_smallest(matrix: &CsrMatrix, k: usize, cfg: &SolverConfig) -> Result<SymSpectrum> {
    sym_extreme(matrix, k, lanczos::End::Smallest, cfg)
}

/// The `k` algebraically largest eigenvalues, descending.
pub fn sym_largest(matrix: &CsrMatrix, k: usize, cfg: &SolverConfig) -> Result<SymSpectrum> {
    sym_extreme(matrix, k, lanczos::End::Largest, cfg)
}

fn sym_extreme(matrix: &CsrMatrix, k: usize, end: lanczos::End, cfg: &SolverConfig) -> Result<SymSpectrum> {
    let n = square_order(matrix)?;
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={n}")));
    }
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    let mut solver = SolverKind::Dense;
    for block in diagonal_blocks(matrix) {
        let sub = principal_submatrix(matrix, &block);
        let kb = k.min(block.len());
        if block.len() <= cfg.sym_dense_cutoff && !cfg.force_iterative {
            let mut all = dense_symmetric_eigenvalues(&sub)?;
            if end == lanczos::End::Largest {
                all.reverse();
            }
            pairs.extend(all.into_iter().take(kb).map(|v| (v, 0.0)));
        } else {
            let r = lanczos::extreme_eigenvalues(&sub, kb, end, cfg.tol, cfg.max_restarts)?;
            log::debug!("lanczos: order {}, {} restarts", block.len(), r.restarts);
            pairs.extend(r.values.into_iter().zip(r.residuals));
            solver = SolverKind::Krylov;
        }
    }
    match end {
        lanczos::End::Smallest => pairs.sort_by(|a, b| a.0.total_cmp(&b.0)),
        lanczos::End::Largest => pairs.sort_by(|a, b| b.0.total_cmp(&a.0)),
    }
    pairs.truncate(k);
    Ok(SymSpectrum {
        values: pairs.iter().map(|p| p.0).collect(),
        residual_norms: pairs.iter().map(|p| p.1).collect(),
        converged: true,
        solver,
    })
}

/// Every eigenvalue of a symmetric matrix, ascending, by a dense solve.
pub fn dense_symmetric_eigenvalues(matrix: &CsrMatrix) -> Result<Vec<f64>> {
    let n = square_order(matrix)?;
    Ok(dense_sym::sym_eigen(&mut matrix.to_dense(), n, false)?.values)
}

/// Every eigenvalue of a real square matrix by a dense solve, in no
/// particular order.
pub fn dense_eigenvalues(matrix: &CsrMatrix) -> Result<Vec<Complex64>> {
    let n = square_order(matrix)?;
    dense_nonsym::eigenvalues(&mut matrix.to_dense(), n)
}

/// Inertia of a symmetric matrix from its `LDLᵀ` block signs. Eigenvalues
/// within `zero_tol · max|entry|` of zero count as zero.
pub fn inertia_ldlt(matrix: &CsrMatrix, zero_tol: f64) -> Result<Inertia> {
    inertia(
        matrix,
        &SolverConfig {
            zero_tol,
            inertia_dense_limit: usize::MAX,
            ..SolverConfig::default()
        },
    )
}

/// [`inertia_ldlt`], switching to a Lanczos count for blocks above
/// `cfg.inertia_dense_limit`.
pub fn inertia(matrix: &CsrMatrix, cfg: &SolverConfig) -> Result<Inertia> {
    square_order(matrix)?;
    let tol = cfg.zero_tol * matrix.max_abs();
    let mut total = Inertia {
        negative: 0,
        zero: 0,
        positive: 0,
        zero_tol: tol,
    };
    for block in diagonal_blocks(matrix) {
        let sub = principal_submatrix(matrix, &block);
        let part = if block.len() <= cfg.inertia_dense_limit {
            block_inertia_dense(&sub, tol)?
        } else {
            block_inertia_lanczos(&sub, tol, cfg)?
        };
        total.negative += part.negative;
        total.zero += part.zero;
        total.positive += part.positive;
    }
    Ok(total)
}

fn block_inertia_dense(sub: &CsrMatrix, tol: f64) -> Result<Inertia> {
    let n = sub.nrows();
    match ldlt::factor_lower(&mut ldlt::lower_dense(sub), n, tol) {
        Ok(s) => Ok(Inertia {
            negative: s.negative,
            zero: s.zero,
            positive: s.positive,
            zero_tol: tol,
        }),
        Err(Error::Breakdown { pivot }) => {
            log::warn!("LDLᵀ broke down at pivot {pivot}; counting signs from a dense eigensolve");
            Ok(count_signs(&dense_symmetric_eigenvalues(sub)?, tol))
        }
        Err(e) => Err(e),
    }
}

fn block_inertia_lanczos(sub: &CsrMatrix, tol: f64, cfg: &SolverConfig) -> Result<Inertia> {
    let n = sub.nrows();
    let mut k = 16.min(n);
    loop {
        let r = lanczos::extreme_eigenvalues(sub, k, lanczos::End::Smallest, cfg.tol, cfg.max_restarts)?;
        let last = *r.values.last().expect("k ≥ 1");
        if last > tol || k == n {
            let mut counts = count_signs(&r.values, tol);
            counts.positive = n - counts.negative - counts.zero;
            return Ok(counts);
        }
        k = (2 * k).min(n);
    }
}

fn count_signs(values: &[f64], tol: f64) -> Inertia {
    let negative = values.iter().filter(|&&v| v < -tol).count();
    let positive = values.iter().filter(|&&v| v > tol).count();
    Inertia {
        negative,
        zero: values.len() - negative - positive,
        positive,
        zero_tol: tol,
    }
}

/// `LDLᵀ` summary of the whole matrix: inertia plus `ln |det|` and the
/// determinant's sign.
pub fn ldlt_summary(matrix: &CsrMatrix, zero_tol: f64) -> Result<LdltSummary> {
    let n = square_order(matrix)?;
    ldlt::factor_lower(&mut ldlt::lower_dense(matrix), n, zero_tol * matrix.max_abs())
}

/// Eigenvalues of a real square matrix according to `mode`.
pub fn nonsym_spectrum(matrix: &CsrMatrix, mode: SpectrumMode, cfg: &SolverConfig) -> Result<ComplexSpectrum> {
    square_order(matrix)?;
    let region = match mode {
        SpectrumMode::Full => None,
        SpectrumMode::Leading { nev, radius } => Some((arnoldi::Target::LargestModulus, nev, radius)),
        SpectrumMode::RightOf { nev, abscissa } => Some((arnoldi::Target::LargestReal, nev, abscissa)),
    };
    let mut values = Vec::new();
    let mut residuals = Vec::new();
    let mut solver = SolverKind::Dense;
    for block in diagonal_blocks(matrix) {
        let sub = principal_submatrix(matrix, &block);
        let dense = || -> Result<Vec<Complex64>> { dense_eigenvalues(&sub) };
        match region {
            None => {
                let v = dense()?;
                residuals.extend(std::iter::repeat(0.0).take(v.len()));
                values.extend(v);
            }
            Some((target, nev, bound)) => {
                let guard = region_guard(bound);
                let small = block.len() <= cfg.nonsym_dense_cutoff && !cfg.force_iterative;
                let found = if small {
                    None
                } else {
                    region_krylov(&sub, target, nev, bound, cfg)?
                };
                match found {
                    Some((v, r)) => {
                        values.extend(v);
                        residuals.extend(r);
                        solver = solver.merge(SolverKind::Krylov);
                    }
                    None => {
                        for z in dense()? {
                            if target.key(z) >= bound - guard {
                                values.push(z);
                                residuals.push(0.0);
                            }
                        }
                    }
                }
            }
        }
    }
    let (values, residual_norms) = close_conjugates(values, residuals);
    Ok(ComplexSpectrum {
        values,
        residual_norms,
        solver,
        region_bound: region.map(|r| r.2),
    })
}

/// Largest eigenvalue modulus of a real square matrix.
pub fn spectral_radius(matrix: &CsrMatrix, cfg: &SolverConfig) -> Result<f64> {
    square_order(matrix)?;
    let mut radius = 0.0f64;
    for block in diagonal_blocks(matrix) {
        let sub = principal_submatrix(matrix, &block);
        let dim = block.len();
        let krylov = (dim > cfg.nonsym_dense_cutoff || cfg.force_iterative) && dim >= 4 * arnoldi::min_dimension(1);
        let values = if krylov {
            arnoldi::leading_eigenvalues(&sub, 1, arnoldi::Target::LargestModulus, None, cfg.tol, cfg.max_restarts)?.values
        } else {
            dense_eigenvalues(&sub)?
        };
        radius = values.iter().fold(radius, |r, z| r.max(z.norm()));
    }
    Ok(radius)
}

fn region_guard(bound: f64) -> f64 {
    1e-6 * bound.abs().max(1.0)
}

/// Grow the Arnoldi target until the weakest converged value falls below
/// the region. `None` when the block is too small (or the target would
/// cover too much of it) for Arnoldi to pay off.
fn region_krylov(
    sub: &CsrMatrix,
    target: arnoldi::Target,
    nev: usize,
    bound: f64,
    cfg: &SolverConfig,
) -> Result<Option<(Vec<Complex64>, Vec<f64>)>> {
    let guard = region_guard(bound);
    let dim = sub.nrows();
    let mut nev = nev.max(1);
    loop {
        if dim < arnoldi::min_dimension(nev) || 4 * nev > dim {
            return Ok(None);
        }
        let r = arnoldi::leading_eigenvalues(sub, nev, target, Some(bound - guard), cfg.tol, cfg.max_restarts)?;
        log::debug!("arnoldi: order {dim}, nev {nev}, {} restarts", r.restarts);
        let weakest = r.values.last().map_or(f64::INFINITY, |&z| target.key(z));
        if weakest < bound - guard {
            let keep: Vec<(Complex64, f64)> = r
                .values
                .into_iter()
                .zip(r.residuals)
                .filter(|(z, _)| target.key(*z) >= bound - guard)
                .collect();
            return Ok(Some(keep.into_iter().unzip()));
        }
        nev *= 2;
    }
}

/// Pair every non-real value with its conjugate, symmetrizing the pair and
/// adding a missing partner.
fn close_conjugates(values: Vec<Complex64>, residuals: Vec<f64>) -> (Vec<Complex64>, Vec<f64>) {
    let mut out: Vec<(Complex64, f64)> = Vec::with_capacity(values.len());
    let mut upper: Vec<(Complex64, f64)> = Vec::new();
    let mut lower: Vec<(Complex64, f64)> = Vec::new();
    for (z, r) in values.into_iter().zip(residuals) {
        if z.im == 0.0 {
            out.push((z, r));
        } else if z.im > 0.0 {
            upper.push((z, r));
        } else {
            lower.push((z, r));
        }
    }
    let mut used = vec![false; lower.len()];
    for (z, r) in upper {
        let partner = lower
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, (w, _))| (i, (w.conj() - z).norm()))
            .filter(|&(_, d)| d <= 1e-8 * z.norm().max(1.0))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let z = match partner {
            Some((i, _)) => {
                used[i] = true;
                let w = lower[i].0;
                Complex64::new(0.5 * (z.re + w.re), 0.5 * (z.im - w.im))
            }
            None => z,
        };
        out.push((z, r));
        out.push((z.conj(), r));
    }
    for (i, (w, r)) in lower.into_iter().enumerate() {
        if !used[i] {
            out.push((w.conj(), r));
            out.push((w, r));
        }
    }
    out.sort_by(|a, b| b.0.re.total_cmp(&a.0.re).then(b.0.im.total_cmp(&a.0.im)));
    out.into_iter().unzip()
}

fn square_order(matrix: &CsrMatrix) -> Result<usize> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::InvalidArgument(format!(
            "matrix is {} × {}, expected square",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    Ok(matrix.nrows())
}

/// Index sets of the connected components of the (symmetrized) sparsity
/// pattern, each sorted, ordered by smallest member.
fn diagonal_blocks(matrix: &CsrMatrix) -> Vec<Vec<usize>> {
    let n = matrix.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, j, _) in matrix.iter() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[root]].push(i);
    }
    blocks
}

fn principal_submatrix(matrix: &CsrMatrix, rows: &[usize]) -> CsrMatrix {
    if rows.len() == matrix.nrows() {
        return matrix.clone();
    }
    let mut local = std::collections::HashMap::with_capacity(rows.len());
    for (k, &r) in rows.iter().enumerate() {
        local.insert(r, k);
    }
    let mut triplets = Vec::new();
    for (k, &r) in rows.iter().enumerate() {
        let (cols, vals) = matrix.row(r);
        for (c, &v) in cols.iter().zip(vals) {
            if let Some(&lc) = local.get(c) {
                triplets.push((k, lc, v));
            }
        }
    }
    CsrMatrix::from_triplets(rows.len(), rows.len(), triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(values: &[f64]) -> CsrMatrix {
        let n = values.len();
        CsrMatrix::from_triplets(n, n, values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
    }

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
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

    fn iterative() -> SolverConfig {
        SolverConfig {
            force_iterative: true,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn smallest_of_diagonal() {
        let m = diag(&[-3.0, -1.0, 0.5, 5.0]);
        for cfg in [SolverConfig::default(), iterative()] {
            let s = sym_smallest(&m, 2, &cfg).unwrap();
            assert_eq!(s.values, vec![-3.0, -1.0]);
        }
    }

    #[test]
    fn path_laplacian_spectrum() {
        let m = CsrMatrix::from_dense(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
        for cfg in [SolverConfig::default(), iterative()] {
            let s = sym_smallest(&m, 3, &cfg).unwrap();
            for (g, w) in s.values.iter().zip([0.0, 1.0, 3.0]) {
                assert!((g - w).abs() < 1e-12, "{:?}", s.values);
            }
        }
    }

    #[test]
    fn random_200_smallest_ten_both_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(200);
        let a = random_symmetric(200, &mut rng);
        let mut want: Vec<f64> = nalgebra::DMatrix::from_row_slice(200, 200, &a)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        want.sort_by(f64::total_cmp);
        let m = CsrMatrix::from_dense(200, 200, &a);
        for cfg in [SolverConfig::default(), iterative()] {
            let s = sym_smallest(&m, 10, &cfg).unwrap();
            assert_eq!(s.values.len(), 10);
            for (g, w) in s.values.iter().zip(&want) {
                assert!((g - w).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn largest_is_mirror_of_smallest() {
        let m = diag(&[4.0, -2.0, 7.0, 1.0]);
        let s = sym_largest(&m, 2, &SolverConfig::default()).unwrap();
        assert_eq!(s.values, vec![7.0, 4.0]);
    }

    #[test]
    fn k_out_of_range_is_rejected() {
        let m = diag(&[1.0, 2.0]);
        assert!(sym_smallest(&m, 0, &SolverConfig::default()).is_err());
        assert!(sym_smallest(&m, 3, &SolverConfig::default()).is_err());
    }

    #[test]
    fn inertia_of_diagonal() {
        let i = inertia_ldlt(&diag(&[-1.0, 0.0, 2.0]), 1e-8).unwrap();
        assert_eq!((i.negative, i.zero, i.positive), (1, 1, 1));
    }

    #[test]
    fn inertia_of_connected_laplacian() {
        // Cycle on six nodes.
        let mut t = Vec::new();
        for i in 0..6 {
            let j = (i + 1) % 6;
            t.extend([(i, i, 2.0), (i, j, -1.0), (j, i, -1.0)]);
        }
        let m = CsrMatrix::from_triplets(6, 6, t);
        let i = inertia_ldlt(&m, 1e-8).unwrap();
        assert_eq!((i.negative, i.zero, i.positive), (0, 1, 5));
    }

    #[test]
    fn inertia_lanczos_path_agrees_with_ldlt() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 120;
        let mut a = random_symmetric(n, &mut rng);
        for i in 0..n {
            a[i * n + i] += 5.5;
        }
        let m = CsrMatrix::from_dense(n, n, &a);
        let cfg = SolverConfig {
            inertia_dense_limit: 10,
            ..SolverConfig::default()
        };
        let via_lanczos = inertia(&m, &cfg).unwrap();
        let via_ldlt = inertia_ldlt(&m, cfg.zero_tol).unwrap();
        assert_eq!(via_lanczos, via_ldlt);
        assert!(via_ldlt.negative > 16, "exercise the doubling loop");
    }

    #[test]
    fn blocks_follow_components() {
        let m = CsrMatrix::from_triplets(5, 5, vec![(0, 3, 1.0), (4, 1, 1.0), (2, 2, 1.0)]);
        assert_eq!(diagonal_blocks(&m), vec![vec![0, 3], vec![1, 4], vec![2]]);
        let sub = principal_submatrix(&m, &[1, 4]);
        assert_eq!(sub.to_dense(), vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn repeated_eigenvalues_across_components() {
        // Forty disjoint copies of [[1, 1], [1, 1]]: eigenvalue 0 forty times.
        let mut t = Vec::new();
        for c in 0..40 {
            let (a, b) = (2 * c, 2 * c + 1);
            t.extend([(a, a, 1.0), (a, b, 1.0), (b, a, 1.0), (b, b, 1.0)]);
        }
        let m = CsrMatrix::from_triplets(80, 80, t);
        let s = sym_smallest(&m, 41, &iterative()).unwrap();
        assert!(s.values[..40].iter().all(|v| v.abs() < 1e-12));
        assert!((s.values[40] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cube_roots_of_unity() {
        let m = CsrMatrix::from_triplets(3, 3, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]);
        let s = nonsym_spectrum(&m, SpectrumMode::Full, &SolverConfig::default()).unwrap();
        let h = 3f64.sqrt() / 2.0;
        let want = [Complex64::new(1.0, 0.0), Complex64::new(-0.5, h), Complex64::new(-0.5, -h)];
        for (g, w) in s.values.iter().zip(&want) {
            assert!((g - w).norm() < 1e-14, "{:?}", s.values);
        }
    }

    #[test]
    fn region_modes_agree_with_full_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let dim = 400;
        let mut t = Vec::new();
        for i in 0..dim {
            for _ in 0..4 {
                t.push((i, rng.random_range(0..dim), rng.random_range(-1.0..1.0)));
            }
        }
        // A dozen eigenvalues pushed outside the random bulk.
        t.extend((0..12).map(|i| (i, i, 1.6 + 0.05 * i as f64)));
        let m = CsrMatrix::from_triplets(dim, dim, t);
        let full = nonsym_spectrum(&m, SpectrumMode::Full, &SolverConfig::default()).unwrap();
        let radius = 1.5;
        let abscissa = 1.2;
        let cases = [
            (SpectrumMode::Leading { nev: 2, radius }, full.values.iter().filter(|z| z.norm() >= radius).count()),
            (
                SpectrumMode::RightOf { nev: 2, abscissa },
                full.values.iter().filter(|z| z.re >= abscissa).count(),
            ),
        ];
        for (mode, expected) in cases {
            let got = nonsym_spectrum(&m, mode, &iterative()).unwrap();
            let strict = got
                .values
                .iter()
                .filter(|z| match mode {
                    SpectrumMode::Leading { .. } => z.norm() >= radius,
                    _ => z.re >= abscissa,
                })
                .count();
            assert!(expected > 2, "region should need a grown target");
            assert_eq!(strict, expected, "{mode:?}");
            assert_eq!(got.solver, SolverKind::Krylov);
        }
    }

    #[test]
    fn conjugate_closure() {
        let (v, r) = close_conjugates(
            vec![Complex64::new(1.0, 2.0), Complex64::new(1.0 + 1e-12, -2.0), Complex64::new(0.0, 1.0)],
            vec![0.0; 3],
        );
        assert_eq!(v.len(), 4);
        assert_eq!(r.len(), 4);
        assert_eq!(v[0], v[1].conj());
        assert_eq!(v[2], v[3].conj());
    }
}
