use speck_bench::{eval_real, run_plan, ExperimentPlan, ExportOptions, Format, Sweep};
use speck_core::estimators::{EstimatorConfig, Method};
use speck_core::randnet::BlockModelSpec;

fn plan(seed: u64) -> ExperimentPlan {
    ExperimentPlan {
        schema_version: 1,
        base: BlockModelSpec::balanced(300, 3, 0.2, 6.0),
        sweep: Sweep::LambdaN(vec![5.0, 8.0]),
        methods: vec![Method::NB, Method::BHm, Method::BHac],
        replications: 60,
        seed,
        k_max: 15,
        t: 5.0,
        solver: Default::default(),
    }
}

#[test]
fn disjoint_seed_ranges_agree_within_three_standard_errors() {
    let a = run_plan(&plan(11), 2).unwrap();
    let b = run_plan(&plan(9_000_017), 2).unwrap();
    let reps = 60.0;
    for (pa, pb) in a.points.iter().zip(&b.points) {
        for (ma, mb) in pa.methods.iter().zip(&pb.methods) {
            let (p, q) = (ma.accuracy, mb.accuracy);
            let se = (p * (1.0 - p) / reps + q * (1.0 - q) / reps).sqrt();
            assert!(
                (p - q).abs() <= 3.0 * se.max(1.0 / reps),
                "{} at {}: {p} vs {q}",
                ma.method,
                pa.value
            );
        }
    }
}

#[test]
fn eval_real_is_deterministic() {
    let cfg = EstimatorConfig::default();
    let first = eval_real("karate", &Method::ALL, &cfg, false).unwrap();
    let second = eval_real("karate", &Method::ALL, &cfg, false).unwrap();
    assert_eq!(serde_json::to_string(&first).unwrap(), serde_json::to_string(&second).unwrap());
}

#[test]
fn three_points_by_five_methods_gives_fifteen_rows() {
    let mut plan = plan(3);
    plan.sweep = Sweep::LambdaN(vec![4.0, 6.0, 8.0]);
    plan.methods = Method::ALL.to_vec();
    plan.replications = 2;
    let outcome = run_plan(&plan, 1).unwrap();
    let mut bytes = Vec::new();
    let options = ExportOptions {
        format: Format::Csv,
        timestamp: false,
    };
    let summary = speck_bench::export::write(&outcome, options, &mut bytes).unwrap();
    assert_eq!(summary.rows, 15);
    assert_eq!(String::from_utf8(bytes).unwrap().lines().count(), 16);
}

proptest::proptest! {
    #![proptest_config(proptest::test_runner::Config::with_cases(8))]

    #[test]
    fn outcome_is_independent_of_worker_count(seed in proptest::prelude::any::<u64>(), workers in 2usize..6) {
        let mut plan = plan(seed);
        plan.base = BlockModelSpec::balanced(120, 2, 0.2, 8.0);
        plan.replications = 4;
        let serial = serde_json::to_string(&run_plan(&plan, 1).unwrap()).unwrap();
        let parallel = serde_json::to_string(&run_plan(&plan, workers).unwrap()).unwrap();
        proptest::prop_assert_eq!(serial, parallel);
    }
}
