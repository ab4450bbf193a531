//! Experiment plans: a base block model, one swept parameter, the methods to
//! score and the replication count.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "base": { "n": 1200, "k": 2, "beta": 0.2, "lambda_n": 5 },
//!   "sweep": { "param": "lambda_n", "values": [5, 10, 15, 20, 25] },
//!   "methods": ["NB", "BHm", "BHmc", "BHa", "BHac"],
//!   "replications": 200,
//!   "seed": 1
//! }
//! ```
//!
//! `k_max` (15), `t` (5) and `solver` are optional.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use speck_core::eigen::SolverConfig;
use speck_core::estimators::{EstimatorConfig, Method, DEFAULT_K_MAX, DEFAULT_T};
use speck_core::randnet::{size_ratio_proportions, BlockModelSpec};

use crate::error::{BenchError, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_REPLICATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub schema_version: u32,
    pub base: BlockModelSpec,
    pub sweep: Sweep,
    pub methods: Vec<Method>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub seed: u64,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default)]
    pub solver: SolverConfig,
}

fn default_replications() -> usize {
    DEFAULT_REPLICATIONS
}

fn default_k_max() -> usize {
    DEFAULT_K_MAX
}

fn default_t() -> f64 {
    DEFAULT_T
}

/// The varied axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "param", content = "values", rename_all = "snake_case")]
pub enum Sweep {
    LambdaN(Vec<f64>),
    /// Community-size ratio `r`: `π₁ = r/K`, `π_K = (2 − r)/K`, the rest `1/K`.
    SizeRatio(Vec<f64>),
    /// Within-community weight vectors.
    W(Vec<Vec<f64>>),
}

impl Sweep {
    pub fn param(&self) -> &'static str {
        match self {
            Sweep::LambdaN(_) => "lambda_n",
            Sweep::SizeRatio(_) => "size_ratio",
            Sweep::W(_) => "w",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Sweep::LambdaN(v) | Sweep::SizeRatio(v) => v.len(),
            Sweep::W(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<SweepValue> {
        match self {
            Sweep::LambdaN(v) => v.iter().map(|&x| SweepValue::Scalar(x)).collect(),
            Sweep::SizeRatio(v) => v.iter().map(|&x| SweepValue::Scalar(x)).collect(),
            Sweep::W(v) => v.iter().cloned().map(SweepValue::Vector).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SweepValue {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl fmt::Display for SweepValue {
    /// Scalars in shortest round-trip form; vectors joined by `;`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::Scalar(x) => write!(f, "{x}"),
            SweepValue::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(";"))
            }
        }
    }
}

impl ExperimentPlan {
    pub fn from_json_str(text: &str) -> Result<ExperimentPlan> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let plan: ExperimentPlan = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            BenchError::plan(if path == "." { "<root>".to_string() } else { path }, e.inner().to_string())
        })?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<ExperimentPlan> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        ExperimentPlan::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(BenchError::plan(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.replications == 0 {
            return Err(BenchError::plan("replications", "must be at least 1"));
        }
        if self.sweep.is_empty() {
            return Err(BenchError::plan("sweep.values", "must not be empty"));
        }
        self.estimator_config()
            .check()
            .map_err(|e| BenchError::plan("t", e.to_string()))?;
        self.base
            .validate()
            .map_err(|e| BenchError::plan("base", e.to_string()))?;
        for i in 0..self.sweep.len() {
            self.spec_at(i)?
                .validate()
                .map_err(|e| BenchError::plan(format!("sweep.values[{i}]"), e.to_string()))?;
        }
        Ok(())
    }

    /// The block model at sweep point `index`.
    pub fn spec_at(&self, index: usize) -> Result<BlockModelSpec> {
        let mut spec = self.base.clone();
        let bad = |e: speck_core::Error| BenchError::plan(format!("sweep.values[{index}]"), e.to_string());
        match &self.sweep {
            Sweep::LambdaN(v) => spec.lambda_n = v[index],
            Sweep::SizeRatio(v) => spec.pi = Some(size_ratio_proportions(spec.k, v[index]).map_err(bad)?),
            Sweep::W(v) => spec.w = Some(v[index].clone()),
        }
        Ok(spec)
    }

    pub fn estimator_config(&self) -> EstimatorConfig {
        EstimatorConfig {
            t: self.t,
            k_max: self.k_max,
            solver: self.solver.clone(),
            ..EstimatorConfig::default()
        }
    }
}
