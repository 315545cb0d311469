//! Compare sequential and data-parallel scenario runs on the identity
//! checks that dominate a typical report.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use algebroid::runner::{run_scenario, RunConfig};
use algebroid::scenario::Scenario;

fn bench_scenario() -> Scenario {
    Scenario::from_str(
        r#"
name = "bench"
seed = 17
samples = 6
checks = [
    "d_squared",
    "koszul_agreement",
    "cartan_relations",
    "wedge_associative",
    "bianchi",
    "covariant_square",
    "curvature_koszul",
    "gauge_infinitesimal",
]

[base]
dim = 2

[lie_algebra]
kind = "sl"
n = 2
"#,
    )
    .expect("bench scenario parses")
}

fn identity_suite(c: &mut Criterion) {
    let scenario = bench_scenario();
    let mut group = c.benchmark_group("scenario_run");
    group.sample_size(10);
    for (label, jobs) in [("sequential", Some(1)), ("parallel", None)] {
        group.bench_with_input(BenchmarkId::from_parameter(label), &jobs, |b, &jobs| {
            b.iter(|| {
                let report = run_scenario(
                    &scenario,
                    &RunConfig {
                        jobs,
                        ..RunConfig::default()
                    },
                )
                .expect("bench scenario runs");
                assert!(report.passed);
                report
            })
        });
    }
    group.finish();
}

criterion_group!(benches, identity_suite);
criterion_main!(benches);
