//! CSV and JSON output of experiment outcomes. Row order is sweep order,
//! then plan method order, so identical outcomes give identical bytes. The
//! only varying content is the optional timestamp (a `#` comment line in
//! CSV, a `generated` field plus runtimes in JSON).

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{BenchError, Result};
use crate::runner::{ExperimentOutcome, MethodOutcome, RuntimeStats};
use crate::plan::SweepValue;

pub const CSV_HEADER: [&str; 8] = [
    "sweep_param",
    "sweep_value",
    "method",
    "accuracy",
    "mean_khat",
    "n_fail",
    "replications",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExportOptions {
    pub format: Format,
    pub timestamp: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExportSummary {
    pub rows: usize,
    pub warnings: Vec<String>,
}

pub fn export(outcome: &ExperimentOutcome, options: ExportOptions, path: impl AsRef<Path>) -> Result<ExportSummary> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    let summary = write(outcome, options, &mut bytes)?;
    std::fs::write(path, bytes).map_err(|e| BenchError::io(path, e))?;
    Ok(summary)
}

pub fn write<W: Write>(outcome: &ExperimentOutcome, options: ExportOptions, mut out: W) -> Result<ExportSummary> {
    let mut summary = ExportSummary {
        rows: outcome.rows(),
        warnings: Vec::new(),
    };
    if outcome.plan.methods.is_empty() {
        let msg = "plan lists no methods; the output has no data rows".to_string();
        log::warn!("{msg}");
        summary.warnings.push(msg);
    }
    let stamp = options.timestamp.then(timestamp);
    match options.format {
        Format::Csv => {
            if let Some(stamp) = &stamp {
                writeln!(out, "# generated {stamp}").map_err(|e| BenchError::io("<output>", e))?;
            }
            let mut csv = csv::Writer::from_writer(out);
            csv.write_record(CSV_HEADER)?;
            let plan = &outcome.plan;
            for point in &outcome.points {
                for m in &point.methods {
                    csv.write_record([
                        plan.sweep.param().to_string(),
                        point.value.to_string(),
                        m.method.to_string(),
                        m.accuracy.to_string(),
                        m.mean_khat.map(|v| v.to_string()).unwrap_or_default(),
                        m.n_fail.to_string(),
                        plan.replications.to_string(),
                        plan.seed.to_string(),
                    ])?;
                }
            }
            csv.flush().map_err(|e| BenchError::io("<output>", e))?;
        }
        Format::Json => {
            let doc = JsonOutcome::new(outcome, stamp);
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out).map_err(|e| BenchError::io("<output>", e))?;
        }
    }
    Ok(summary)
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

#[derive(Serialize)]
struct JsonOutcome<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated: Option<String>,
    sweep_param: &'static str,
    replications: usize,
    seed: u64,
    k_max: usize,
    t: f64,
    points: Vec<JsonPoint<'a>>,
}

#[derive(Serialize)]
struct JsonPoint<'a> {
    sweep_value: &'a SweepValue,
    truth: usize,
    methods: &'a [MethodOutcome],
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_seconds: Option<RuntimeStats>,
}

impl<'a> JsonOutcome<'a> {
    fn new(outcome: &'a ExperimentOutcome, generated: Option<String>) -> Self {
        let with_runtime = generated.is_some();
        JsonOutcome {
            generated,
            sweep_param: outcome.plan.sweep.param(),
            replications: outcome.plan.replications,
            seed: outcome.plan.seed,
            k_max: outcome.plan.k_max,
            t: outcome.plan.t,
            points: outcome
                .points
                .iter()
                .map(|p| JsonPoint {
                    sweep_value: &p.value,
                    truth: p.truth,
                    methods: &p.methods,
                    runtime_seconds: with_runtime.then_some(p.runtime),
                })
                .collect(),
        }
    }
}
