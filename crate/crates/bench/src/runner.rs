//! Replicated sweeps. Every replication draws its graph from a seed derived
//! from `(master seed, sweep index, replication index)`, so the outcome does
//! not depend on how replications are spread over workers.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use speck_core::estimators::{estimate_many, Method};
use speck_core::randnet::{derive_seed, sample};

use crate::error::{BenchError, Result};
use crate::plan::{ExperimentPlan, SweepValue};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutcome {
    pub plan: ExperimentPlan,
    pub points: Vec<PointOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointOutcome {
    pub value: SweepValue,
    pub truth: usize,
    pub methods: Vec<MethodOutcome>,
    #[serde(skip)]
    pub runtime: RuntimeStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodOutcome {
    pub method: Method,
    /// Replications with `k_hat == truth`, over all replications.
    pub accuracy: f64,
    /// Mean over the replications that produced an estimate.
    pub mean_khat: Option<f64>,
    pub distribution: BTreeMap<usize, usize>,
    pub n_fail: usize,
    /// More than half of the replications errored.
    pub failed: bool,
}

/// Wall-clock seconds per replication (sampling plus every method).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RuntimeStats {
    pub total: f64,
    pub mean: f64,
    pub max: f64,
}

impl ExperimentOutcome {
    pub fn rows(&self) -> usize {
        self.points.iter().map(|p| p.methods.len()).sum()
    }
}

struct Replication {
    estimates: Vec<std::result::Result<usize, String>>,
    elapsed: Duration,
}

/// Run every sweep point and replication on a pool of `workers` threads.
pub fn run_plan(plan: &ExperimentPlan, workers: usize) -> Result<ExperimentOutcome> {
    plan.validate()?;
    let specs = (0..plan.sweep.len()).map(|i| plan.spec_at(i)).collect::<Result<Vec<_>>>()?;
    let cfg = plan.estimator_config();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| BenchError::plan("workers", e.to_string()))?;
    let tasks: Vec<(usize, usize)> = (0..specs.len())
        .flat_map(|p| (0..plan.replications).map(move |r| (p, r)))
        .collect();
    let total = tasks.len();
    let done = std::sync::atomic::AtomicUsize::new(0);

    let results: Vec<Replication> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(p, r)| {
                let start = Instant::now();
                let seed = derive_seed(plan.seed, p as u64, r as u64);
                let estimates = match sample(&specs[p], seed) {
                    Ok((graph, _)) => estimate_many(&graph, &plan.methods, &cfg)
                        .into_iter()
                        .map(|e| e.map(|rep| rep.k_hat).map_err(|e| e.to_string()))
                        .collect(),
                    Err(e) => plan.methods.iter().map(|_| Err(e.to_string())).collect(),
                };
                let finished = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                if finished % plan.replications.max(1) == 0 || finished == total {
                    log::info!("{finished}/{total} replications");
                }
                Replication {
                    estimates,
                    elapsed: start.elapsed(),
                }
            })
            .collect()
    });

    let points = plan
        .sweep
        .points()
        .into_iter()
        .zip(&specs)
        .zip(results.chunks(plan.replications))
        .map(|((value, spec), reps)| aggregate(plan, value, spec.k, reps))
        .collect();
    Ok(ExperimentOutcome {
        plan: plan.clone(),
        points,
    })
}

fn aggregate(plan: &ExperimentPlan, value: SweepValue, truth: usize, reps: &[Replication]) -> PointOutcome {
    let methods = plan
        .methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let mut distribution = BTreeMap::new();
            let mut n_fail = 0;
            for rep in reps {
                match &rep.estimates[mi] {
                    Ok(k) => *distribution.entry(*k).or_insert(0) += 1,
                    Err(e) => {
                        n_fail += 1;
                        log::debug!("{method} at {value}: {e}");
                    }
                }
            }
            let ok = reps.len() - n_fail;
            let correct = distribution.get(&truth).copied().unwrap_or(0);
            let sum: usize = distribution.iter().map(|(k, c)| k * c).sum();
            let failed = 2 * n_fail > reps.len();
            if failed {
                log::warn!("{method} at {} = {value}: {n_fail} of {} replications failed", plan.sweep.param(), reps.len());
            }
            MethodOutcome {
                method,
                accuracy: correct as f64 / reps.len() as f64,
                mean_khat: (ok > 0).then(|| sum as f64 / ok as f64),
                distribution,
                n_fail,
                failed,
            }
        })
        .collect();
    let secs: Vec<f64> = reps.iter().map(|r| r.elapsed.as_secs_f64()).collect();
    let total: f64 = secs.iter().sum();
    PointOutcome {
        value,
        truth,
        methods,
        runtime: RuntimeStats {
            total,
            mean: total / secs.len().max(1) as f64,
            max: secs.iter().copied().fold(0.0, f64::max),
        },
    }
}
