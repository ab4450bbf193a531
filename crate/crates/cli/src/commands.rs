use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::{anyhow, Context};
use serde::Serialize;
use speck_bench::{BenchError, ExperimentPlan, ExportOptions, Format};
use speck_core::estimators::{estimate_many, EstimateReport, EstimatorConfig, Method, NbThreshold};
use speck_core::graph::{largest_connected_component, Graph};
use speck_core::randnet::{build_mean_matrix, draw_theta, sample_from, size_ratio_proportions, BlockModelSpec};
use speck_core::Error as CoreError;

use crate::{BenchArgs, BenchFormat, EstimateArgs, EstimatorArgs, EvalRealArgs, Failure, GenerateArgs, MethodArg, NbThresholdArg, OutputFormat};

type CmdResult = Result<(), Failure>;

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

impl EstimatorArgs {
    fn methods(&self) -> Vec<Method> {
        match self.method {
            MethodArg::All => Method::ALL.to_vec(),
            MethodArg::Nb => vec![Method::NB],
            MethodArg::Bhm => vec![Method::BHm],
            MethodArg::Bhmc => vec![Method::BHmc],
            MethodArg::Bha => vec![Method::BHa],
            MethodArg::Bhac => vec![Method::BHac],
        }
    }

    fn config(&self) -> Result<EstimatorConfig, Failure> {
        let cfg = EstimatorConfig {
            t: self.t,
            k_max: self.kmax,
            nb_threshold: match self.nb_threshold {
                NbThresholdArg::Dtilde => NbThreshold::Dtilde,
                NbThresholdArg::OperatorNorm => NbThreshold::OperatorNorm,
            },
            ..EstimatorConfig::default()
        };
        cfg.check().map_err(usage)?;
        Ok(cfg)
    }
}

/// An empty edge list is reported the same way as an edgeless graph.
fn load_graph(path: &Path) -> Result<Graph, Failure> {
    match speck_core::datasets::load_file(path) {
        Ok(file) => Ok(file.graph),
        Err(CoreError::EmptyGraph) => Err(runtime(CoreError::NoEdges)),
        Err(e) => Err(runtime(e)),
    }
}

#[derive(Serialize)]
struct GraphSummary {
    n: usize,
    m: usize,
    lcc: bool,
}

#[derive(Serialize)]
struct EstimateOutput<'a> {
    graph: GraphSummary,
    reports: &'a [EstimateReport],
}

pub(crate) fn estimate(args: EstimateArgs) -> CmdResult {
    let cfg = args.estimator.config()?;
    let mut graph = load_graph(&args.input)?;
    if args.estimator.lcc {
        graph = largest_connected_component(&graph).graph;
    }
    let summary = GraphSummary {
        n: graph.n(),
        m: graph.m(),
        lcc: args.estimator.lcc,
    };
    let (reports, errors) = run_methods(&graph, &args.estimator.methods(), &cfg);
    let text = match args.estimator.format {
        OutputFormat::Json => json(&EstimateOutput {
            graph: summary,
            reports: &reports,
        })?,
        OutputFormat::Text => {
            let mut s = format!(
                "graph: n={} m={}{}\n",
                summary.n,
                summary.m,
                if summary.lcc { " (largest connected component)" } else { "" }
            );
            for r in &reports {
                s.push_str(&report_line(r));
            }
            s
        }
    };
    print!("{text}");
    finish(errors)
}

fn run_methods(graph: &Graph, methods: &[Method], cfg: &EstimatorConfig) -> (Vec<EstimateReport>, Vec<anyhow::Error>) {
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for (method, r) in methods.iter().zip(estimate_many(graph, methods, cfg)) {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => errors.push(anyhow!(e).context(format!("{method}"))),
        }
    }
    (reports, errors)
}

fn finish(errors: Vec<anyhow::Error>) -> CmdResult {
    let mut errors = errors.into_iter();
    match errors.next() {
        None => Ok(()),
        Some(first) => {
            for e in errors {
                eprintln!("error: {e:#}");
            }
            Err(runtime(first))
        }
    }
}

fn report_line(r: &EstimateReport) -> String {
    let label = if r.method == Method::NB { "threshold" } else { "r" };
    let mut s = format!("{:<5} k_hat={:<3} {label}={:.6}\n", r.method.name(), r.k_hat, r.threshold);
    for w in &r.warnings {
        let _ = writeln!(s, "      warning: {w}");
    }
    s
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(runtime)?;
    s.push('\n');
    Ok(s)
}

pub(crate) fn generate(args: GenerateArgs) -> CmdResult {
    let spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(usage)?;
            serde_json::from_str::<BlockModelSpec>(&text)
                .with_context(|| format!("{}: invalid block-model spec", path.display()))
                .map_err(usage)?
        }
        None => inline_spec(&args)?,
    };
    spec.validate().map_err(runtime)?;
    let theta = draw_theta(&spec, args.seed);
    let probs = build_mean_matrix(&spec, &theta).map_err(runtime)?;
    let graph = sample_from(&probs, args.seed);

    let mut edges = String::with_capacity(graph.m() * 12);
    for &(i, j) in graph.edges() {
        let _ = writeln!(edges, "{} {}", i + 1, j + 1);
    }
    let mut label_text = String::with_capacity(spec.n * 8);
    for (i, c) in probs.labels.iter().enumerate() {
        let _ = writeln!(label_text, "{} {}", i + 1, c + 1);
    }
    let labels_path = args.labels.clone().unwrap_or_else(|| args.out.with_extension("labels"));
    write_file(&args.out, edges.as_bytes())?;
    write_file(&labels_path, label_text.as_bytes())?;

    let realized = 2.0 * graph.m() as f64 / spec.n as f64;
    println!(
        "n={} m={} K={} mean_degree={realized:.4} target={} expected={:.4}",
        spec.n,
        graph.m(),
        spec.k,
        spec.lambda_n,
        probs.mean_degree()
    );
    Ok(())
}

fn inline_spec(args: &GenerateArgs) -> Result<BlockModelSpec, Failure> {
    let missing = |flag: &str| usage(anyhow!("--{flag} is required unless --spec is given"));
    let n = args.n.ok_or_else(|| missing("n"))?;
    let k = args.k.ok_or_else(|| missing("k"))?;
    let lambda_n = args.lambda_n.ok_or_else(|| missing("lambda-n"))?;
    let mut spec = BlockModelSpec::balanced(n, k, args.beta, lambda_n);
    spec.gamma = args.gamma;
    spec.theta_low = args.theta_low;
    spec.w = args.w.clone();
    spec.pi = match (&args.pi, args.size_ratio) {
        (Some(pi), _) => Some(pi.clone()),
        (None, Some(r)) => Some(size_ratio_proportions(k, r).map_err(runtime)?),
        (None, None) => None,
    };
    Ok(spec)
}

fn write_file(path: &Path, bytes: &[u8]) -> CmdResult {
    std::fs::write(path, bytes)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(runtime)
}

pub(crate) fn bench(args: BenchArgs) -> CmdResult {
    let plan = ExperimentPlan::from_path(&args.plan).map_err(|e| match e {
        BenchError::Plan { .. } => usage(anyhow!(e).context(format!("{}", args.plan.display()))),
        other => runtime(other),
    })?;
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(usage(anyhow!("--workers must be at least 1")));
    }
    log::info!(
        "{} sweep points × {} replications × {} methods on {workers} worker(s)",
        plan.sweep.len(),
        plan.replications,
        plan.methods.len()
    );
    let outcome = speck_bench::run_plan(&plan, workers).map_err(runtime)?;
    let options = ExportOptions {
        format: match args.format {
            BenchFormat::Csv => Format::Csv,
            BenchFormat::Json => Format::Json,
        },
        timestamp: !args.no_timestamp,
    };
    let summary = speck_bench::export(&outcome, options, &args.out).map_err(runtime)?;
    for w in &summary.warnings {
        log::warn!("{w}");
    }
    log::info!("wrote {} rows to {}", summary.rows, args.out.display());
    Ok(())
}

pub(crate) fn eval_real(args: EvalRealArgs) -> CmdResult {
    let cfg = args.estimator.config()?;
    let methods = args.estimator.methods();
    let row = speck_bench::eval_real(&args.dataset, &methods, &cfg, args.estimator.lcc).map_err(|e| match e {
        BenchError::Core(CoreError::EmptyGraph) => runtime(CoreError::NoEdges),
        other => runtime(other),
    })?;
    let text = match args.estimator.format {
        OutputFormat::Json => json(&row)?,
        OutputFormat::Text => {
            let mut s = format!(
                "{}: n={} m={}{}",
                row.dataset,
                row.n,
                row.m,
                if row.lcc_applied { " (largest connected component)" } else { "" }
            );
            if let Some(truth) = row.truth {
                let _ = write!(s, " truth={truth}");
            }
            s.push('\n');
            for e in &row.estimates {
                let value = e.k_hat.map_or_else(|| "error".to_string(), |k| k.to_string());
                let _ = writeln!(s, "{:<5} k_hat={value}", e.method.name());
            }
            for m in &row.mismatches {
                let _ = writeln!(s, "differs from reference: {m}");
            }
            s
        }
    };
    print!("{text}");
    std::io::stdout().flush().map_err(runtime)?;
    let errors: Vec<anyhow::Error> = row
        .estimates
        .iter()
        .filter_map(|e| e.error.as_ref().map(|msg| anyhow!("{}: {msg}", e.method)))
        .collect();
    finish(errors)
}
