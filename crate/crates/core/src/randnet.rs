//! Stochastic block model (SBM) and degree-corrected block model (DCSBM)
//! samplers.
//!
//! Node `i` in community `c_i` with degree multiplier `θ_i` links to node `j`
//! independently with probability `min(1, s θ_i θ_j P_{c_i c_j})`, where the
//! block matrix `P` has the within-community weights `w` on its diagonal and
//! `beta` everywhere else, and the scale `s` makes the expected average
//! degree equal to `lambda_n`. Multipliers are `theta_low` with probability
//! `gamma` and 1 otherwise, so `gamma = 0` is the plain SBM.
//!
//! # Random streams
//!
//! A sample with seed `seed` uses ChaCha8 seeded with `seed`: stream 0 draws
//! the multipliers (one uniform per node) and stream `i + 1` draws row `i`
//! of the upper triangle (one uniform per pair `(i, j)`, `j > i`, whether or
//! not the probability is zero). Rows are therefore independent of each
//! other and of the multiplier draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Fraction of off-diagonal pairs allowed to exceed probability one before
/// the target degree is declared infeasible.
pub const MAX_CLAMP_FRACTION: f64 = 0.2;

pub const DEFAULT_THETA_LOW: f64 = 0.2;

fn default_theta_low() -> f64 {
    DEFAULT_THETA_LOW
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockModelSpec {
    pub n: usize,
    /// Number of communities.
    pub k: usize,
    /// Community proportions; equal when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Vec<f64>>,
    /// Within-community weights; all ones when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<f64>>,
    /// Between-community weight.
    pub beta: f64,
    /// Target average expected degree.
    pub lambda_n: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default = "default_theta_low")]
    pub theta_low: f64,
}

impl BlockModelSpec {
    /// Balanced SBM with unit within-community weights.
    pub fn balanced(n: usize, k: usize, beta: f64, lambda_n: f64) -> Self {
        BlockModelSpec {
            n,
            k,
            pi: None,
            w: None,
            beta,
            lambda_n,
            gamma: 0.0,
            theta_low: DEFAULT_THETA_LOW,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.n < 2 {
            return bad(format!("n = {} must be at least 2", self.n));
        }
        if self.k == 0 || self.k > self.n {
            return bad(format!("k = {} must lie in 1..={}", self.k, self.n));
        }
        if let Some(pi) = &self.pi {
            if pi.len() != self.k {
                return bad(format!("pi has {} entries, expected k = {}", pi.len(), self.k));
            }
            if pi.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return bad("pi entries must be finite and non-negative".into());
            }
            let sum: f64 = pi.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return bad(format!("pi sums to {sum}, expected 1"));
            }
        }
        if let Some(w) = &self.w {
            if w.len() != self.k {
                return bad(format!("w has {} entries, expected k = {}", w.len(), self.k));
            }
            if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return bad("w entries must be finite and non-negative".into());
            }
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return bad(format!("beta = {} must be finite and non-negative", self.beta));
        }
        let max_degree = (self.n - 1) as f64;
        if !(self.lambda_n > 0.0 && self.lambda_n <= max_degree) {
            return bad(format!("lambda_n = {} must lie in (0, {max_degree}]", self.lambda_n));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad(format!("gamma = {} must lie in [0, 1]", self.gamma));
        }
        if !(self.theta_low > 0.0 && self.theta_low <= 1.0) {
            return bad(format!("theta_low = {} must lie in (0, 1]", self.theta_low));
        }
        Ok(())
    }

    pub fn proportions(&self) -> Vec<f64> {
        self.pi.clone().unwrap_or_else(|| vec![1.0 / self.k as f64; self.k])
    }

    pub fn weights(&self) -> Vec<f64> {
        self.w.clone().unwrap_or_else(|| vec![1.0; self.k])
    }

    /// Sizes `n π_k` rounded by the largest-remainder method; they sum to
    /// `n`, and ties in the remainder go to the lower community index.
    pub fn community_sizes(&self) -> Vec<usize> {
        let quotas: Vec<f64> = self.proportions().iter().map(|p| p * self.n as f64).collect();
        let mut sizes: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
        let assigned: usize = sizes.iter().sum();
        let mut order: Vec<usize> = (0..self.k).collect();
        order.sort_by(|&a, &b| {
            let (ra, rb) = (quotas[a] - quotas[a].floor(), quotas[b] - quotas[b].floor());
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &c in order.iter().cycle().take(self.n.saturating_sub(assigned)) {
            sizes[c] += 1;
        }
        sizes
    }

    /// Planted community of every node (0-based): contiguous blocks in
    /// community order.
    pub fn labels(&self) -> Vec<usize> {
        self.community_sizes()
            .iter()
            .enumerate()
            .flat_map(|(c, &size)| std::iter::repeat(c).take(size))
            .collect()
    }

    fn block_weight(&self, weights: &[f64], a: usize, b: usize) -> f64 {
        if a == b {
            weights[a]
        } else {
            self.beta
        }
    }
}

/// Bernoulli means of one DCSBM draw, stored compactly: the entry for
/// `i ≠ j` is `min(1, scale θ_i θ_j P_{c_i c_j})`, and the diagonal is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProbabilityMatrix {
    pub theta: Vec<f64>,
    pub labels: Vec<usize>,
    /// `K × K` block weights, row-major.
    pub blocks: Vec<f64>,
    pub k: usize,
    pub scale: f64,
    /// Unordered pairs whose scaled mean exceeded one.
    pub clamped: usize,
}

impl EdgeProbabilityMatrix {
    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let raw = self.scale * self.theta[i] * self.theta[j] * self.blocks[self.labels[i] * self.k + self.labels[j]];
        raw.min(1.0)
    }

    /// Row-major `n × n` copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.get(i, j);
            }
        }
        out
    }

    /// `(1/n) Σ_{i≠j} Ā_ij` after clamping.
    pub fn mean_degree(&self) -> f64 {
        let n = self.n();
        let mut total = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                total += self.get(i, j);
            }
        }
        2.0 * total / n as f64
    }
}

/// Degree multipliers from stream 0 of `seed`.
pub fn draw_theta(spec: &BlockModelSpec, seed: u64) -> Vec<f64> {
    if spec.gamma == 0.0 {
        return vec![1.0; spec.n];
    }
    let mut rng = stream(seed, 0);
    (0..spec.n)
        .map(|_| {
            if rng.random::<f64>() < spec.gamma {
                spec.theta_low
            } else {
                1.0
            }
        })
        .collect()
}

/// Scale the mean matrix `θ_i θ_j P_{c_i c_j}` so that its off-diagonal sum
/// is `n λ_n`, then clamp to `[0, 1]`.
pub fn build_mean_matrix(spec: &BlockModelSpec, theta: &[f64]) -> Result<EdgeProbabilityMatrix> {
    spec.validate()?;
    if theta.len() != spec.n {
        return Err(Error::InvalidArgument(format!(
            "theta has {} entries, expected n = {}",
            theta.len(),
            spec.n
        )));
    }
    let k = spec.k;
    let weights = spec.weights();
    let labels = spec.labels();
    let mut blocks = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..k {
            blocks[a * k + b] = spec.block_weight(&weights, a, b);
        }
    }
    // Σ_{i≠j} θ_i θ_j P = Σ_ab P_ab T_a T_b − Σ_i θ_i² P_{c_i c_i}.
    let mut theta_sum = vec![0.0; k];
    let mut diagonal = 0.0;
    for (i, &t) in theta.iter().enumerate() {
        theta_sum[labels[i]] += t;
        diagonal += t * t * blocks[labels[i] * k + labels[i]];
    }
    let mut off_diagonal = -diagonal;
    for a in 0..k {
        for b in 0..k {
            off_diagonal += blocks[a * k + b] * theta_sum[a] * theta_sum[b];
        }
    }
    if off_diagonal <= 0.0 {
        return Err(Error::InvalidSpec(
            "all off-diagonal means are zero, so no scaling reaches lambda_n".into(),
        ));
    }
    let scale = spec.n as f64 * spec.lambda_n / off_diagonal;
    let mut matrix = EdgeProbabilityMatrix {
        theta: theta.to_vec(),
        labels,
        blocks,
        k,
        scale,
        clamped: 0,
    };
    let n = spec.n;
    let mut clamped = 0;
    for i in 0..n {
        for j in i + 1..n {
            let raw = scale * theta[i] * theta[j] * matrix.blocks[matrix.labels[i] * k + matrix.labels[j]];
            if raw > 1.0 {
                clamped += 1;
            }
        }
    }
    let total = n * (n - 1) / 2;
    if clamped as f64 > MAX_CLAMP_FRACTION * total as f64 {
        return Err(Error::TargetDegreeInfeasible { clamped, total });
    }
    if clamped > 0 {
        log::warn!("{clamped} of {total} edge probabilities clamped to 1");
    }
    matrix.clamped = clamped;
    Ok(matrix)
}

/// One graph and its planted labels (0-based).
pub fn sample(spec: &BlockModelSpec, seed: u64) -> Result<(Graph, Vec<usize>)> {
    let theta = draw_theta(spec, seed);
    let probs = build_mean_matrix(spec, &theta)?;
    Ok((sample_from(&probs, seed), probs.labels))
}

/// Bernoulli draws for the upper triangle of `probs`, row `i` from stream
/// `i + 1` of `seed`.
pub fn sample_from(probs: &EdgeProbabilityMatrix, seed: u64) -> Graph {
    let n = probs.n();
    let mut edges = Vec::new();
    for i in 0..n {
        let mut rng = stream(seed, i as u64 + 1);
        for j in i + 1..n {
            let u: f64 = rng.random();
            if u < probs.get(i, j) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edge_list(edges, Some(n)).expect("n ≥ 2 by validation")
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Planted partition `G(n, a/n, b/n)`: two equal communities with
/// within-pair probability `a/n` and between-pair probability `b/n`. Also
/// returns whether `(a − b)² > 2(a + b)`, the detectability condition.
pub fn planted_partition(n: usize, a: f64, b: f64) -> Result<(BlockModelSpec, bool)> {
    if !(a.is_finite() && b.is_finite() && 0.0 <= b && b <= a && a > 0.0 && a <= n as f64) {
        return Err(Error::InvalidArgument(format!(
            "planted partition needs 0 ≤ b ≤ a ≤ n and a > 0, got a = {a}, b = {b}, n = {n}"
        )));
    }
    let mut spec = BlockModelSpec::balanced(n, 2, b / a, 1.0);
    let sizes = spec.community_sizes();
    let (n1, n2) = (sizes[0] as f64, sizes[1] as f64);
    let nf = n as f64;
    let ordered_pairs = (n1 * (n1 - 1.0) + n2 * (n2 - 1.0)) * a / nf + 2.0 * n1 * n2 * b / nf;
    spec.lambda_n = ordered_pairs / nf;
    let detectable = (a - b).powi(2) > 2.0 * (a + b);
    Ok((spec, detectable))
}

/// Proportions with `π_1 = r/K`, `π_K = (2 − r)/K` and `1/K` elsewhere.
pub fn size_ratio_proportions(k: usize, ratio: f64) -> Result<Vec<f64>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("size ratio needs k ≥ 2, got {k}")));
    }
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::InvalidArgument(format!("size ratio {ratio} must lie in (0, 1]")));
    }
    let kf = k as f64;
    let mut pi = vec![1.0 / kf; k];
    pi[0] = ratio / kf;
    pi[k - 1] = (2.0 - ratio) / kf;
    Ok(pi)
}

/// Seed of replication `replication` at sweep point `point`, mixed from the
/// master seed with SplitMix64 so that nearby inputs give unrelated seeds.
pub fn derive_seed(master: u64, point: u64, replication: u64) -> u64 {
    let h = splitmix64(master);
    let h = splitmix64(h ^ point);
    splitmix64(h ^ replication.rotate_left(32))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
