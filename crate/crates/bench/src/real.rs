//! Estimates on real networks, one row per dataset.

use serde::Serialize;
use speck_core::datasets::{self, DatasetInfo};
use speck_core::estimators::{estimate_many, EstimatorConfig, Method};
use speck_core::graph::{largest_connected_component, Graph};

use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
pub struct RealRow {
    pub dataset: String,
    /// Order and size of the graph the methods ran on.
    pub n: usize,
    pub m: usize,
    pub lcc_applied: bool,
    pub truth: Option<usize>,
    pub estimates: Vec<RealEstimate>,
    /// `Some(false)` when a registered dataset's file differs from the
    /// pinned version.
    pub checksum_ok: Option<bool>,
    /// Disagreements with the reference row of a registered dataset.
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RealEstimate {
    pub method: Method,
    pub k_hat: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RealRow {
    pub fn k_hat(&self, method: Method) -> Option<usize> {
        self.estimates.iter().find(|e| e.method == method).and_then(|e| e.k_hat)
    }
}

/// Run `methods` on a registered dataset (by name) or an edge-list/GML path.
/// Registered datasets that the reference evaluated on their largest
/// component get the same treatment; `force_lcc` applies it to any input.
pub fn eval_real(source: &str, methods: &[Method], cfg: &EstimatorConfig, force_lcc: bool) -> Result<RealRow> {
    let registered = datasets::info(source).ok();
    let (name, graph, info, checksum_ok) = match registered {
        Some(info) => {
            let loaded = datasets::load(info.name)?;
            (info.name.to_string(), loaded.file.graph, Some(info), loaded.checksum_ok)
        }
        None => (source.to_string(), datasets::load_file(source)?.graph, None, None),
    };
    let lcc = force_lcc || info.is_some_and(DatasetInfo::uses_lcc);
    let graph = if lcc {
        largest_connected_component(&graph).graph
    } else {
        graph
    };
    Ok(evaluate(name, &graph, methods, cfg, info, checksum_ok, lcc))
}

fn evaluate(
    dataset: String,
    graph: &Graph,
    methods: &[Method],
    cfg: &EstimatorConfig,
    info: Option<&DatasetInfo>,
    checksum_ok: Option<bool>,
    lcc_applied: bool,
) -> RealRow {
    let estimates: Vec<RealEstimate> = methods
        .iter()
        .zip(estimate_many(graph, methods, cfg))
        .map(|(&method, r)| match r {
            Ok(rep) => RealEstimate {
                method,
                k_hat: Some(rep.k_hat),
                error: None,
            },
            Err(e) => RealEstimate {
                method,
                k_hat: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let mut mismatches = Vec::new();
    if let Some(info) = info {
        if let Some(expected) = info.lcc_nodes.filter(|_| lcc_applied) {
            if graph.n() != expected {
                mismatches.push(format!("n = {} (reference {expected})", graph.n()));
            }
        }
        for e in &estimates {
            let want = info.reference[Method::ALL.iter().position(|m| *m == e.method).expect("known method")];
            if e.k_hat != Some(want) {
                let got = e.k_hat.map_or("error".to_string(), |k| k.to_string());
                mismatches.push(format!("{}: {got} (reference {want})", e.method));
            }
        }
        for m in &mismatches {
            log::warn!("{}: {m}", info.name);
        }
    }
    RealRow {
        dataset,
        n: graph.n(),
        m: graph.m(),
        lcc_applied,
        truth: info.and_then(|i| i.truth),
        estimates,
        checksum_ok,
        mismatches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn karate_row() {
        let row = eval_real("karate", &Method::ALL, &EstimatorConfig::default(), false).unwrap();
        assert_eq!((row.n, row.m, row.truth), (34, 78, Some(2)));
        assert!(row.mismatches.is_empty(), "{:?}", row.mismatches);
        assert_eq!(row.checksum_ok, Some(true));
        for m in Method::ALL {
            assert_eq!(row.k_hat(m), Some(2));
        }
    }

    #[test]
    fn path_input_and_forced_lcc() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("two.txt");
        // A triangle plus a detached edge.
        std::fs::write(&path, "1 2\n2 3\n1 3\n7 8\n").unwrap();
        let src = path.to_str().unwrap();
        let row = eval_real(src, &[Method::BHa], &EstimatorConfig::default(), true).unwrap();
        assert_eq!((row.n, row.m, row.lcc_applied, row.truth), (3, 3, true, None));
        let row = eval_real(src, &[Method::BHa], &EstimatorConfig::default(), false).unwrap();
        assert_eq!(row.n, 5);
    }

    #[test]
    fn missing_file_is_an_error() {
        assert!(eval_real("/nonexistent/graph.txt", &[Method::NB], &EstimatorConfig::default(), false).is_err());
    }
}
