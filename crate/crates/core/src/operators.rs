//! Spectral operators built from a [`Graph`]: the non-backtracking matrix on
//! directed edges, its `2n × 2n` reduction, and the Bethe Hessian.

use crate::error::{Error, Result};
use crate::graph::{degree_stats, Graph};
use crate::sparse::CsrMatrix;

/// The `2n × 2n` matrix `[[0, D − I], [−I, A]]`.
///
/// Apart from `±1`, its eigenvalues are exactly those of the full
/// non-backtracking matrix, at a fraction of the size.
#[derive(Debug, Clone)]
pub struct ReducedNonBacktracking {
    pub matrix: CsrMatrix,
    pub n: usize,
}

/// Non-backtracking matrix on the `2m` directed edges:
/// `B[i→j, k→l] = 1` iff `j = k` and `i ≠ l`.
#[derive(Debug, Clone)]
pub struct FullNonBacktracking {
    pub matrix: CsrMatrix,
    /// Directed edge of every row/column. Canonical edge `e = (u, v)` yields
    /// index `2e` for `u→v` and `2e + 1` for `v→u`.
    pub directed: Vec<(usize, usize)>,
}

/// `H(r) = (r² − 1) I − r A + D`.
#[derive(Debug, Clone)]
pub struct BetheHessian {
    pub matrix: CsrMatrix,
    pub r: f64,
}

pub fn reduced_nonbacktracking(g: &Graph) -> Result<ReducedNonBacktracking> {
    if g.m() == 0 {
        return Err(Error::NoEdges);
    }
    let n = g.n();
    let mut triplets = Vec::with_capacity(2 * g.m() + 2 * n);
    for i in 0..n {
        triplets.push((i, n + i, g.degree(i) as f64 - 1.0));
        triplets.push((n + i, i, -1.0));
        triplets.extend(g.neighbors(i).iter().map(|&j| (n + i, n + j, 1.0)));
    }
    Ok(ReducedNonBacktracking {
        matrix: CsrMatrix::from_triplets(2 * n, 2 * n, triplets),
        n,
    })
}

pub fn full_nonbacktracking(g: &Graph) -> Result<FullNonBacktracking> {
    if g.m() == 0 {
        return Err(Error::NoEdges);
    }
    let edges = g.edges();
    let index_of = |a: usize, b: usize| -> usize {
        let e = edges
            .binary_search(&(a.min(b), a.max(b)))
            .expect("directed edge of an existing undirected edge");
        2 * e + usize::from(a > b)
    };
    let directed: Vec<(usize, usize)> = edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
    let mut triplets = Vec::new();
    for (row, &(i, j)) in directed.iter().enumerate() {
        for &l in g.neighbors(j) {
            if l != i {
                triplets.push((row, index_of(j, l), 1.0));
            }
        }
    }
    let dim = directed.len();
    Ok(FullNonBacktracking {
        matrix: CsrMatrix::from_triplets(dim, dim, triplets),
        directed,
    })
}

pub fn bethe_hessian(g: &Graph, r: f64) -> Result<BetheHessian> {
    if g.m() == 0 {
        return Err(Error::NoEdges);
    }
    if !r.is_finite() {
        return Err(Error::InvalidArgument(format!("r must be finite, got {r}")));
    }
    let n = g.n();
    let shift = r * r - 1.0;
    let mut triplets = Vec::with_capacity(n + 2 * g.m());
    for i in 0..n {
        triplets.push((i, i, shift + g.degree(i) as f64));
        triplets.extend(g.neighbors(i).iter().map(|&j| (i, j, -r)));
    }
    Ok(BetheHessian {
        matrix: CsrMatrix::from_triplets(n, n, triplets),
        r,
    })
}

/// `r_m = √d̃`.
pub fn r_moment(g: &Graph) -> Result<f64> {
    let d_tilde = degree_stats(g)?.d_tilde;
    if d_tilde <= 0.0 {
        return Err(Error::InvalidArgument(
            "every node has degree at most one, so d̃ = 0".into(),
        ));
    }
    Ok(d_tilde.sqrt())
}

/// `r_a = √(mean degree)`.
pub fn r_average(g: &Graph) -> Result<f64> {
    Ok(degree_stats(g)?.lambda_hat.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(pairs: &[(usize, usize)]) -> Graph {
        Graph::from_edge_list(pairs.iter().copied(), None).unwrap()
    }

    fn karate() -> Graph {
        crate::datasets::karate().unwrap().graph
    }

    /// Straight transcription of the block layout into a dense array.
    fn naive_reduced(g: &Graph) -> Vec<f64> {
        let n = g.n();
        let dim = 2 * n;
        let mut out = vec![0.0; dim * dim];
        for i in 0..n {
            out[i * dim + n + i] = g.degree(i) as f64 - 1.0;
            out[(n + i) * dim + i] = -1.0;
            for j in 0..n {
                if g.has_edge(i, j) {
                    out[(n + i) * dim + n + j] = 1.0;
                }
            }
        }
        out
    }

    #[test]
    fn single_edge_reduced_has_zero_degree_block() {
        let b = reduced_nonbacktracking(&graph(&[(0, 1)])).unwrap();
        assert_eq!(b.matrix.nrows(), 4);
        assert_eq!(b.matrix.get(0, 2), 0.0);
        assert_eq!(b.matrix.get(1, 3), 0.0);
        assert_eq!(b.matrix.get(2, 0), -1.0);
        assert_eq!(b.matrix.get(2, 3), 1.0);
        assert_eq!(b.matrix.nnz(), 4);
    }

    #[test]
    fn karate_reduced_matches_naive_assembly() {
        let g = karate();
        let b = reduced_nonbacktracking(&g).unwrap();
        assert_eq!(b.matrix.nrows(), 68);
        assert_eq!(b.matrix.to_dense(), naive_reduced(&g));
        let not_one = g.degrees().filter(|&d| d != 1).count();
        assert_eq!(b.matrix.nnz(), 2 * g.m() + g.n() + not_one);
    }

    #[test]
    fn single_edge_full_is_zero() {
        let b = full_nonbacktracking(&graph(&[(0, 1)])).unwrap();
        assert_eq!(b.matrix.nrows(), 2);
        assert_eq!(b.matrix.nnz(), 0);
    }

    #[test]
    fn path_full_has_two_entries() {
        let b = full_nonbacktracking(&graph(&[(0, 1), (1, 2)])).unwrap();
        assert_eq!(b.directed, vec![(0, 1), (1, 0), (1, 2), (2, 1)]);
        let entries: Vec<_> = b.matrix.iter().collect();
        // (0→1, 1→2) and (2→1, 1→0)
        assert_eq!(entries, vec![(0, 2, 1.0), (3, 1, 1.0)]);
    }

    #[test]
    fn triangle_full_row_sums_are_one() {
        let b = full_nonbacktracking(&graph(&[(0, 1), (1, 2), (2, 0)])).unwrap();
        for row in 0..6 {
            assert_eq!(b.matrix.row(row).1.iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn triangle_bethe_hessian_at_two() {
        let h = bethe_hessian(&graph(&[(0, 1), (1, 2), (2, 0)]), 2.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h.matrix.get(i, j), if i == j { 5.0 } else { -2.0 });
            }
        }
    }

    #[test]
    fn bethe_hessian_at_one_is_laplacian() {
        let g = karate();
        let h = bethe_hessian(&g, 1.0).unwrap();
        for i in 0..g.n() {
            for j in 0..g.n() {
                let lap = if i == j {
                    g.degree(i) as f64
                } else if g.has_edge(i, j) {
                    -1.0
                } else {
                    0.0
                };
                assert_eq!(h.matrix.get(i, j), lap);
            }
        }
    }

    #[test]
    fn bethe_hessian_rejects_bad_input() {
        assert!(bethe_hessian(&graph(&[(0, 1)]), f64::NAN).is_err());
        let empty = Graph::from_edge_list(Vec::new(), Some(2)).unwrap();
        assert!(matches!(bethe_hessian(&empty, 2.0), Err(Error::NoEdges)));
        assert!(matches!(reduced_nonbacktracking(&empty), Err(Error::NoEdges)));
    }

    #[test]
    fn r_choices() {
        let k5: Vec<_> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
        let g = graph(&k5);
        assert_eq!(r_moment(&g).unwrap(), 3f64.sqrt());
        assert_eq!(r_average(&g).unwrap(), 2.0);
        let star = graph(&[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(r_moment(&star).unwrap(), 1.0);
        assert_eq!(r_average(&star).unwrap(), 1.5f64.sqrt());
        assert!(r_moment(&graph(&[(0, 1), (2, 3)])).is_err());
    }

    #[test]
    fn karate_r_moment_from_degree_sums() {
        let g = karate();
        let (s1, s2) = g.degrees().fold((0.0, 0.0), |(a, b), d| (a + d as f64, b + (d * d) as f64));
        assert!((r_moment(&g).unwrap() - (s2 / s1 - 1.0).sqrt()).abs() < 1e-15);
        // Σd = 156 and Σd² = 1212 for the karate club network.
        assert_eq!((s1, s2), (156.0, 1212.0));
    }

    proptest! {
        #[test]
        fn full_row_sums_are_degree_minus_one(
            pairs in prop::collection::vec((0usize..15, 0usize..15), 1..60)
        ) {
            prop_assume!(pairs.iter().any(|(a, b)| a != b));
            let g = Graph::from_edge_list(pairs, None).unwrap();
            let b = full_nonbacktracking(&g).unwrap();
            for (row, &(_, j)) in b.directed.iter().enumerate() {
                let sum: f64 = b.matrix.row(row).1.iter().sum();
                prop_assert_eq!(sum, g.degree(j) as f64 - 1.0);
            }
        }

        #[test]
        fn r_moment_dominates_shifted_average(
            pairs in prop::collection::vec((0usize..20, 0usize..20), 2..80)
        ) {
            prop_assume!(pairs.iter().any(|(a, b)| a != b));
            let g = Graph::from_edge_list(pairs, None).unwrap();
            if let Ok(rm) = r_moment(&g) {
                let ra = r_average(&g).unwrap();
                prop_assert!(rm * rm >= ra * ra - 1.0 - 1e-12);
            }
        }

        #[test]
        fn bethe_hessian_is_symmetric(
            pairs in prop::collection::vec((0usize..20, 0usize..20), 1..80),
            r in -5.0f64..5.0,
        ) {
            prop_assume!(pairs.iter().any(|(a, b)| a != b));
            let g = Graph::from_edge_list(pairs, None).unwrap();
            prop_assert!(bethe_hessian(&g, r).unwrap().matrix.is_symmetric());
        }
    }
}
