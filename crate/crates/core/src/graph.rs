//! Immutable simple undirected graphs.
//!
//! A [`Graph`] stores its adjacency in compressed form (sorted neighbor lists
//! behind an offset array) together with the canonical edge list, where every
//! edge appears once as `(u, v)` with `u < v`, sorted lexicographically.
//! Degrees are fixed at construction and the graph cannot be mutated
//! afterwards, so one instance can be shared freely across threads.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

/// How many input records were discarded while simplifying an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SimplifyCounts {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl Graph {
    /// Build a simple graph from node-id pairs.
    ///
    /// Pairs are symmetrized, duplicates merged and self-loops dropped. The
    /// node count is `max id + 1`, or `n_hint` when that is larger.
    pub fn from_edge_list<I>(pairs: I, n_hint: Option<usize>) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::simplify(pairs, n_hint).map(|(g, _)| g)
    }

    /// Like [`Graph::from_edge_list`], also reporting what was discarded.
    pub fn simplify<I>(pairs: I, n_hint: Option<usize>) -> Result<(Graph, SimplifyCounts)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut counts = SimplifyCounts::default();
        let mut max_id: Option<usize> = None;
        let mut edges = Vec::new();
        for (a, b) in pairs {
            max_id = Some(max_id.map_or(a.max(b), |m| m.max(a).max(b)));
            if a == b {
                counts.self_loops += 1;
                continue;
            }
            edges.push((a.min(b), a.max(b)));
        }
        let n = match (max_id, n_hint) {
            (None, None) | (None, Some(0)) => return Err(Error::EmptyGraph),
            (Some(m), hint) => (m + 1).max(hint.unwrap_or(0)),
            (None, Some(h)) => h,
        };
        let before = edges.len();
        edges.sort_unstable();
        edges.dedup();
        counts.duplicates = before - edges.len();
        Ok((Self::from_canonical(n, edges), counts))
    }

    /// `edges` must be sorted, deduplicated and satisfy `u < v < n`.
    fn from_canonical(n: usize, edges: Vec<(usize, usize)>) -> Graph {
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; 2 * edges.len()];
        for &(u, v) in &edges {
            neighbors[fill[u]] = v;
            fill[u] += 1;
            neighbors[fill[v]] = u;
            fill[v] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Graph {
            offsets,
            neighbors,
            edges,
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }

    /// Sorted neighbors of `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Canonical edges `(u, v)`, `u < v`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Component id per node; components are numbered in order of their
    /// smallest node.
    pub fn components(&self) -> Vec<usize> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut stack = Vec::new();
        let mut next = 0;
        for root in 0..n {
            if comp[root] != usize::MAX {
                continue;
            }
            comp[root] = next;
            stack.push(root);
            while let Some(u) = stack.pop() {
                for &v in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Subgraph induced by `nodes` (must be sorted and unique); node `k` of
    /// the result is `nodes[k]`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (k, &v) in nodes.iter().enumerate() {
            index[v] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|&(u, v)| {
                let (a, b) = (index[u], index[v]);
                (a != usize::MAX && b != usize::MAX).then_some((a, b))
            })
            .collect();
        // Relabeling through a sorted node list preserves both `a < b` and
        // the lexicographic edge order.
        Self::from_canonical(nodes.len(), edges)
    }

    /// Relabel node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n(), "permutation length mismatch");
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (perm[u], perm[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        Self::from_canonical(self.n(), edges)
    }
}

/// Largest connected component together with the map back to the input ids.
#[derive(Debug, Clone)]
pub struct Component {
    pub graph: Graph,
    /// `original[k]` is the input node id of component node `k`.
    pub original: Vec<usize>,
}

/// Induced subgraph on the largest component. Among equally large
/// components the one holding the smallest node id wins.
pub fn largest_connected_component(g: &Graph) -> Component {
    let comp = g.components();
    let count = comp.iter().max().map_or(0, |&c| c + 1);
    let mut sizes = vec![0usize; count];
    for &c in &comp {
        sizes[c] += 1;
    }
    // Component ids follow smallest-member order, so the first maximum is
    // the tie-break winner.
    let best = sizes
        .iter()
        .enumerate()
        .fold((0, 0), |acc, (c, &s)| if s > acc.1 { (c, s) } else { acc })
        .0;
    let original: Vec<usize> = (0..g.n()).filter(|&v| comp[v] == best).collect();
    Component {
        graph: g.induced_subgraph(&original),
        original,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeStats {
    /// Average degree `Σd / n`.
    pub lambda_hat: f64,
    /// `Σd² / Σd − 1`, the usual proxy for the non-backtracking spectral radius.
    pub d_tilde: f64,
    pub min_degree: usize,
    pub max_degree: usize,
}

pub fn degree_stats(g: &Graph) -> Result<DegreeStats> {
    if g.m() == 0 {
        return Err(Error::NoEdges);
    }
    let (mut sum, mut sum_sq) = (0u128, 0u128);
    let (mut min_degree, mut max_degree) = (usize::MAX, 0);
    for d in g.degrees() {
        sum += d as u128;
        sum_sq += (d as u128) * (d as u128);
        min_degree = min_degree.min(d);
        max_degree = max_degree.max(d);
    }
    // Integer numerators keep the ratio exact up to the final division.
    let d_tilde = (sum_sq - sum) as f64 / sum as f64;
    Ok(DegreeStats {
        lambda_hat: sum as f64 / g.n() as f64,
        d_tilde,
        min_degree,
        max_degree,
    })
}

/// A graph read from an edge-list file.
#[derive(Debug, Clone)]
pub struct EdgeListFile {
    pub graph: Graph,
    /// Original label of every node; node ids are assigned by sorting labels.
    pub labels: Vec<u64>,
    pub counts: SimplifyCounts,
}

/// Parse the edge-list text format: one edge per line as two
/// whitespace-separated non-negative integers. Blank lines and lines whose
/// first non-blank character is `#` or `%` are skipped.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<EdgeListFile> {
    let mut raw = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') || body.starts_with('%') {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let mut next = || -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: lineno,
                message: "expected two node ids".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("`{tok}` is not a non-negative integer node id"),
            })
        };
        let (a, b) = (next()?, next()?);
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("unexpected third token `{extra}`"),
            });
        }
        raw.push((a, b));
    }
    if raw.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut labels: Vec<u64> = raw.iter().flat_map(|&(a, b)| [a, b]).collect();
    labels.sort_unstable();
    labels.dedup();
    let index: HashMap<u64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let (graph, counts) = Graph::simplify(
        raw.iter().map(|(a, b)| (index[a], index[b])),
        Some(labels.len()),
    )?;
    if counts.self_loops + counts.duplicates > 0 {
        log::warn!(
            "edge list simplified: {} self-loops dropped, {} duplicate edges merged",
            counts.self_loops,
            counts.duplicates
        );
    }
    Ok(EdgeListFile {
        graph,
        labels,
        counts,
    })
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<EdgeListFile> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> Graph {
        Graph::from_edge_list([(0, 1), (1, 2), (2, 0)], None).unwrap()
    }

    #[test]
    fn dedupes_and_drops_self_loops() {
        let (g, counts) = Graph::simplify([(0, 1), (1, 0), (1, 1), (1, 2)], None).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert_eq!(g.degrees().collect::<Vec<_>>(), vec![1, 2, 1]);
        assert_eq!(counts, SimplifyCounts { self_loops: 1, duplicates: 1 });
    }

    #[test]
    fn triangle_is_two_regular() {
        let g = triangle();
        assert_eq!((g.n(), g.m()), (3, 3));
        assert!(g.degrees().all(|d| d == 2));
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn n_hint_adds_isolated_nodes() {
        let g = Graph::from_edge_list([(0, 1)], Some(5)).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.degree(4), 0);
        let g = Graph::from_edge_list([(0, 3)], Some(2)).unwrap();
        assert_eq!(g.n(), 4);
    }

    #[test]
    fn empty_input_needs_hint() {
        assert!(matches!(
            Graph::from_edge_list(Vec::new(), None),
            Err(Error::EmptyGraph)
        ));
        let g = Graph::from_edge_list(Vec::new(), Some(3)).unwrap();
        assert_eq!((g.n(), g.m()), (3, 0));
    }

    #[test]
    fn parse_skips_comments_and_relabels() {
        let text = "# header\n% matrix market style\n\n10 20\n20 30\n30 10\n10 10\n";
        let f = parse_edge_list(text.as_bytes()).unwrap();
        assert_eq!(f.labels, vec![10, 20, 30]);
        assert_eq!(f.graph, triangle());
        assert_eq!(f.counts.self_loops, 1);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = parse_edge_list("0 1\n1 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_edge_list("0 1\n\n-1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_edge_list("0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = parse_edge_list("0 1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn parse_empty_file_is_empty_graph() {
        let err = parse_edge_list("# nothing\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::EmptyGraph));
    }

    #[test]
    fn lcc_ties_prefer_smallest_id() {
        let g = Graph::from_edge_list([(3, 4), (4, 5), (5, 3), (0, 1), (1, 2), (2, 0)], None)
            .unwrap();
        let c = largest_connected_component(&g);
        assert_eq!(c.original, vec![0, 1, 2]);
        assert_eq!(c.graph, triangle());
    }

    #[test]
    fn lcc_picks_bigger_component_and_relabels() {
        let g = Graph::from_edge_list([(0, 1), (2, 3), (3, 4), (4, 5)], Some(7)).unwrap();
        let c = largest_connected_component(&g);
        assert_eq!(c.original, vec![2, 3, 4, 5]);
        assert_eq!(c.graph.edges(), &[(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn lcc_of_connected_graph_is_identity() {
        let g = triangle();
        let c = largest_connected_component(&g);
        assert_eq!(c.graph, g);
        assert_eq!(c.original, vec![0, 1, 2]);
    }

    #[test]
    fn degree_stats_examples() {
        // Complete graph K5 is 4-regular.
        let k5: Vec<_> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
        let s = degree_stats(&Graph::from_edge_list(k5, None).unwrap()).unwrap();
        assert_eq!(s.d_tilde, 3.0);
        assert_eq!(s.lambda_hat, 4.0);

        let star = Graph::from_edge_list([(0, 1), (0, 2), (0, 3)], None).unwrap();
        let s = degree_stats(&star).unwrap();
        assert_eq!(s.d_tilde, 1.0);
        assert_eq!(s.lambda_hat, 1.5);
        assert_eq!((s.min_degree, s.max_degree), (1, 3));
    }

    #[test]
    fn degree_stats_rejects_edgeless() {
        let g = Graph::from_edge_list(Vec::new(), Some(4)).unwrap();
        assert!(matches!(degree_stats(&g), Err(Error::NoEdges)));
    }

    fn arb_pairs() -> impl Strategy<Value = Vec<(usize, usize)>> {
        prop::collection::vec((0usize..40, 0usize..40), 1..200)
    }

    proptest! {
        #[test]
        fn construction_invariants(pairs in arb_pairs()) {
            let g = Graph::from_edge_list(pairs.clone(), None).unwrap();
            prop_assert_eq!(g.degrees().sum::<usize>(), 2 * g.m());
            for i in 0..g.n() {
                prop_assert!(!g.has_edge(i, i));
                for &j in g.neighbors(i) {
                    prop_assert!(g.has_edge(j, i));
                }
            }
            for &(a, b) in &pairs {
                prop_assert_eq!(g.has_edge(a, b), a != b);
            }
            prop_assert!(g.edges().windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn lcc_is_idempotent(pairs in arb_pairs()) {
            let g = Graph::from_edge_list(pairs, None).unwrap();
            let once = largest_connected_component(&g);
            let twice = largest_connected_component(&once.graph);
            prop_assert!(once.graph.is_connected());
            prop_assert_eq!(&twice.graph, &once.graph);
            prop_assert_eq!(twice.original, (0..once.graph.n()).collect::<Vec<_>>());
        }

        #[test]
        fn d_tilde_bounds(pairs in arb_pairs()) {
            let g = Graph::from_edge_list(pairs, None).unwrap();
            let s = degree_stats(&g).unwrap();
            prop_assert!(s.d_tilde >= s.lambda_hat - 1.0 - 1e-12);
        }

        #[test]
        fn regular_graphs_have_d_tilde_d_minus_one(n in 3usize..30, step in 1usize..5) {
            // Circulant graph: i ~ i±1, ..., i±step is 2·step-regular when n > 2·step.
            prop_assume!(n > 2 * step);
            let pairs: Vec<_> = (0..n).flat_map(|i| (1..=step).map(move |s| (i, (i + s) % n))).collect();
            let g = Graph::from_edge_list(pairs, None).unwrap();
            let s = degree_stats(&g).unwrap();
            prop_assert_eq!(s.d_tilde, (2 * step - 1) as f64);
        }
    }
}
