//! Estimators of the number of communities `K`.
//!
//! * **NB** counts the real eigenvalues of the reduced non-backtracking
//!   matrix that are at least `√d̃` (or, optionally, the square root of its
//!   spectral radius).
//! * **BHm** / **BHa** count the negative eigenvalues of the Bethe Hessian
//!   `H(r)` at `r = r_m = √d̃` or `r = r_a = √(mean degree)`.
//! * **BHmc** / **BHac** apply the ratio correction to the sorted smallest
//!   eigenvalues `s₁ ≤ s₂ ≤ …` of the same Bethe Hessian:
//!   `K̂ = max { k : t·s_k ≤ s_{k+1} }`, which also admits small positive
//!   eigenvalues that sit much closer to zero than to the bulk.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::eigen::{self, SolverConfig, SolverKind, SpectrumMode};
use crate::error::{Error, Result};
use crate::graph::{degree_stats, Graph};
use crate::operators::{bethe_hessian, r_average, r_moment, reduced_nonbacktracking};

pub const DEFAULT_T: f64 = 5.0;
pub const DEFAULT_K_MAX: usize = 15;

/// Relative slack of the inclusive NB threshold comparison.
pub const THRESHOLD_SLACK: f64 = 1e-10;

pub const KMAX_REACHED: &str = "k_max reached";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    NB,
    BHm,
    BHmc,
    BHa,
    BHac,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::NB, Method::BHm, Method::BHmc, Method::BHa, Method::BHac];

    pub fn name(self) -> &'static str {
        match self {
            Method::NB => "NB",
            Method::BHm => "BHm",
            Method::BHmc => "BHmc",
            Method::BHa => "BHa",
            Method::BHac => "BHac",
        }
    }

    pub fn is_corrected(self) -> bool {
        matches!(self, Method::BHmc | Method::BHac)
    }

    /// Which `r` a Bethe Hessian method uses; `None` for NB.
    pub fn r_choice(self) -> Option<RChoice> {
        match self {
            Method::NB => None,
            Method::BHm | Method::BHmc => Some(RChoice::Moment),
            Method::BHa | Method::BHac => Some(RChoice::Average),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RChoice {
    /// `r_m = √d̃`
    Moment,
    /// `r_a = √(mean degree)`
    Average,
}

impl RChoice {
    pub fn value(self, g: &Graph) -> Result<f64> {
        match self {
            RChoice::Moment => r_moment(g),
            RChoice::Average => r_average(g),
        }
    }
}

/// Bulk edge used by NB.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NbThreshold {
    /// `√d̃`
    #[default]
    Dtilde,
    /// Square root of the spectral radius of the reduced matrix.
    OperatorNorm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub t: f64,
    pub k_max: usize,
    pub nb_threshold: NbThreshold,
    pub solver: SolverConfig,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            t: DEFAULT_T,
            k_max: DEFAULT_K_MAX,
            nb_threshold: NbThreshold::Dtilde,
            solver: SolverConfig::default(),
        }
    }
}

impl EstimatorConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.t.is_finite() && self.t > 1.0) {
            return Err(Error::InvalidArgument(format!("t = {} must be finite and greater than 1", self.t)));
        }
        if self.k_max == 0 {
            return Err(Error::InvalidArgument("k_max must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub method: Method,
    pub k_hat: usize,
    /// `√d̃` (or the operator-norm variant) for NB; `r` for the Bethe
    /// Hessian methods.
    pub threshold: f64,
    pub evidence: Evidence,
    pub warnings: Vec<String>,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    NonBacktracking {
        d_tilde: f64,
        /// Real eigenvalues at or above the threshold, descending.
        counted: Vec<f64>,
        /// Every eigenvalue the solver returned near or right of the
        /// threshold, as `[re, im]`.
        examined: Vec<[f64; 2]>,
        solver: SolverKind,
    },
    BetheHessian {
        r: f64,
        negative: usize,
        zero: usize,
        positive: usize,
        /// The `k_max + 1` smallest eigenvalues, ascending.
        smallest: Vec<f64>,
        /// Outcome of `t·s_k ≤ s_{k+1}` for `k = 1..`; corrected methods only.
        #[serde(skip_serializing_if = "Vec::is_empty")]
        ratio_tests: Vec<RatioTest>,
        solver: SolverKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioTest {
    pub k: usize,
    /// `t · s_k`
    pub scaled: f64,
    /// `s_{k+1}`
    pub next: f64,
    pub holds: bool,
}

/// Eigenvalue `λ` counts as real when `|Im λ| ≤ max(1e−6, 1e−8 |λ|)`.
pub fn is_numerically_real(z: num_complex::Complex64) -> bool {
    z.im.abs() <= 1e-6f64.max(1e-8 * z.norm())
}

pub fn estimate_nb(g: &Graph, cfg: &EstimatorConfig) -> Result<EstimateReport> {
    let stats = degree_stats(g)?;
    let reduced = reduced_nonbacktracking(g)?;
    let threshold = match cfg.nb_threshold {
        NbThreshold::Dtilde => stats.d_tilde.sqrt(),
        NbThreshold::OperatorNorm => eigen::spectral_radius(&reduced.matrix, &cfg.solver)?.sqrt(),
    };
    let cutoff = threshold * (1.0 - THRESHOLD_SLACK);
    let spectrum = eigen::nonsym_spectrum(
        &reduced.matrix,
        SpectrumMode::RightOf {
            nev: 4,
            abscissa: cutoff,
        },
        &cfg.solver,
    )?;
    let mut counted: Vec<f64> = spectrum
        .values
        .iter()
        .filter(|z| is_numerically_real(**z) && z.re >= cutoff)
        .map(|z| z.re)
        .collect();
    counted.sort_by(|a, b| b.total_cmp(a));
    let k_hat = counted.len();
    let mut warnings = Vec::new();
    if k_hat == 0 {
        warnings.push(zero_warning());
    }
    Ok(EstimateReport {
        method: Method::NB,
        k_hat,
        threshold,
        evidence: Evidence::NonBacktracking {
            d_tilde: stats.d_tilde,
            counted,
            examined: spectrum.values.iter().map(|z| [z.re, z.im]).collect(),
            solver: spectrum.solver,
        },
        warnings,
        t: cfg.t,
    })
}

/// Number of negative eigenvalues of `H(r)`.
pub fn count_negative(g: &Graph, r: f64, cfg: &EstimatorConfig) -> Result<usize> {
    let h = bethe_hessian(g, r)?;
    Ok(eigen::inertia(&h.matrix, &cfg.solver)?.negative)
}

/// Largest `k` in `1..len` with `t·s_k ≤ s_{k+1}` (1-based), or 0 when no
/// `k` qualifies. `smallest` must be ascending with at least two entries.
pub fn corrected_count(smallest: &[f64], t: f64) -> Result<usize> {
    Ok(ratio_tests(smallest, t)?
        .iter()
        .filter(|r| r.holds)
        .map(|r| r.k)
        .max()
        .unwrap_or(0))
}

fn ratio_tests(smallest: &[f64], t: f64) -> Result<Vec<RatioTest>> {
    if smallest.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "the ratio correction needs at least two eigenvalues, got {}",
            smallest.len()
        )));
    }
    if !(t.is_finite() && t > 1.0) {
        return Err(Error::InvalidArgument(format!("t = {t} must be finite and greater than 1")));
    }
    if smallest.windows(2).any(|w| w[0].partial_cmp(&w[1]).map_or(true, |o| o.is_gt())) {
        return Err(Error::InvalidArgument("eigenvalues must be sorted ascending".into()));
    }
    Ok(smallest
        .windows(2)
        .enumerate()
        .map(|(i, w)| RatioTest {
            k: i + 1,
            scaled: t * w[0],
            next: w[1],
            holds: t * w[0] <= w[1],
        })
        .collect())
}

/// Inertia and smallest eigenvalues of one Bethe Hessian, shared by the
/// plain and corrected estimators at the same `r`.
#[derive(Debug, Clone)]
struct BetheAnalysis {
    r: f64,
    inertia: eigen::Inertia,
    smallest: Vec<f64>,
    solver: SolverKind,
}

fn analyse(g: &Graph, r: f64, cfg: &EstimatorConfig) -> Result<BetheAnalysis> {
    let h = bethe_hessian(g, r)?;
    let inertia = eigen::inertia(&h.matrix, &cfg.solver)?;
    let k = (cfg.k_max + 1).min(g.n());
    let spectrum = eigen::sym_smallest(&h.matrix, k, &cfg.solver)?;
    Ok(BetheAnalysis {
        r,
        inertia,
        smallest: spectrum.values,
        solver: spectrum.solver,
    })
}

fn report_from(method: Method, a: &BetheAnalysis, cfg: &EstimatorConfig) -> Result<EstimateReport> {
    let mut warnings = Vec::new();
    let (k_hat, tests) = if method.is_corrected() {
        let tests = ratio_tests(&a.smallest, cfg.t)?;
        let k_hat = tests.iter().filter(|r| r.holds).map(|r| r.k).max().unwrap_or(0);
        if k_hat == a.smallest.len() - 1 {
            warnings.push(KMAX_REACHED.to_string());
        }
        (k_hat, tests)
    } else {
        let below = a.smallest.iter().filter(|&&v| v < -a.inertia.zero_tol).count();
        if below < a.smallest.len() && below != a.inertia.negative {
            warnings.push(format!(
                "inertia reports {} negative eigenvalues but the eigensolver found {below}",
                a.inertia.negative
            ));
        }
        (a.inertia.negative, Vec::new())
    };
    if k_hat == 0 {
        warnings.push(zero_warning());
    }
    Ok(EstimateReport {
        method,
        k_hat,
        threshold: a.r,
        evidence: Evidence::BetheHessian {
            r: a.r,
            negative: a.inertia.negative,
            zero: a.inertia.zero,
            positive: a.inertia.positive,
            smallest: a.smallest.clone(),
            ratio_tests: tests,
            solver: a.solver,
        },
        warnings,
        t: cfg.t,
    })
}

fn zero_warning() -> String {
    "no informative eigenvalue found: K̂ = 0".to_string()
}

/// Bethe Hessian estimate with `r = r_m` or `r_a`, plain or corrected.
pub fn estimate_bh(g: &Graph, choice: RChoice, corrected: bool, cfg: &EstimatorConfig) -> Result<EstimateReport> {
    cfg.check()?;
    let method = match (choice, corrected) {
        (RChoice::Moment, false) => Method::BHm,
        (RChoice::Moment, true) => Method::BHmc,
        (RChoice::Average, false) => Method::BHa,
        (RChoice::Average, true) => Method::BHac,
    };
    let analysis = analyse(g, choice.value(g)?, cfg)?;
    report_from(method, &analysis, cfg)
}

pub fn estimate(g: &Graph, method: Method, cfg: &EstimatorConfig) -> Result<EstimateReport> {
    match method.r_choice() {
        None => {
            cfg.check()?;
            estimate_nb(g, cfg)
        }
        Some(choice) => estimate_bh(g, choice, method.is_corrected(), cfg),
    }
}

/// Run several methods on one graph, computing each Bethe Hessian only
/// once. Results follow the order of `methods`.
pub fn estimate_many(g: &Graph, methods: &[Method], cfg: &EstimatorConfig) -> Vec<Result<EstimateReport>> {
    if let Err(e) = cfg.check() {
        let msg = e.to_string();
        return methods.iter().map(|_| Err(Error::InvalidArgument(msg.clone()))).collect();
    }
    let mut cache: Vec<(RChoice, std::result::Result<BetheAnalysis, String>)> = Vec::new();
    methods
        .iter()
        .map(|&method| match method.r_choice() {
            None => estimate_nb(g, cfg),
            Some(choice) => {
                if !cache.iter().any(|(c, _)| *c == choice) {
                    let analysis = choice
                        .value(g)
                        .and_then(|r| analyse(g, r, cfg))
                        .map_err(|e| e.to_string());
                    cache.push((choice, analysis));
                }
                let (_, analysis) = cache.iter().find(|(c, _)| *c == choice).expect("inserted above");
                match analysis {
                    Ok(a) => report_from(method, a, cfg),
                    Err(msg) => Err(Error::InvalidArgument(msg.clone())),
                }
            }
        })
        .collect()
}
