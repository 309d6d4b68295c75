use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use flowjam_bench::{medium_disjoint, medium_nondisjoint, small_robust};
use flowjam_core::edgeset::EdgeSet;
use flowjam_core::greedy::{deterministic_interdict, GreedyConfig};
use flowjam_core::oracle::optimal_pure_deterministic;
use flowjam_core::robust::{robust_interdict, KappaGrid, RobustOptions};
use flowjam_core::testkit::{deterministic_paths, robust_candidates};
use flowjam_core::throughput::{lambda, lambda_bar, Interdiction};
use std::hint::black_box;

fn reduction_evaluation(c: &mut Criterion) {
    let s = medium_disjoint();
    let paths = deterministic_paths(&s);
    let every_other: Vec<usize> = (0..s.network.edge_count()).step_by(2).collect();
    let set = EdgeSet::from_indices(s.network.edge_count(), &every_other);
    c.bench_function("lambda_closed_form", |b| {
        b.iter(|| {
            black_box(lambda(&s.network, paths, Interdiction::Edges(black_box(&set))).unwrap())
        })
    });

    let ns = medium_nondisjoint();
    let npaths = deterministic_paths(&ns);
    let every_other: Vec<usize> = (0..ns.network.edge_count()).step_by(2).collect();
    let nset = EdgeSet::from_indices(ns.network.edge_count(), &every_other);
    c.bench_function("lambda_bar_surrogate", |b| {
        b.iter(|| black_box(lambda_bar(&ns.network, npaths, black_box(&nset))))
    });
    c.bench_function("lambda_lp_route", |b| {
        b.iter(|| {
            black_box(lambda(&ns.network, npaths, Interdiction::Edges(black_box(&nset))).unwrap())
        })
    });
}

fn recursive_search(c: &mut Criterion) {
    let s = medium_disjoint();
    let paths = deterministic_paths(&s);
    let mut group = c.benchmark_group("recursive_greedy");
    for depth in [1usize, 2, 3] {
        group.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |b, &depth| {
            b.iter(|| {
                black_box(
                    deterministic_interdict(&s.network, paths, GreedyConfig::new(depth, 2))
                        .unwrap()
                        .reduction,
                )
            })
        });
    }
    group.finish();
}

fn exact_oracle(c: &mut Criterion) {
    let s = medium_disjoint();
    let paths = deterministic_paths(&s);
    c.bench_function("oracle_enumeration", |b| {
        b.iter(|| black_box(optimal_pure_deterministic(&s.network, paths, 5000).unwrap()))
    });
}

fn robust_framework(c: &mut Criterion) {
    let s = small_robust();
    let u = robust_candidates(&s);
    c.bench_function("robust_geometric_grid", |b| {
        b.iter(|| {
            black_box(
                robust_interdict(
                    &s.network,
                    u,
                    GreedyConfig::new(3, 2),
                    RobustOptions {
                        epsilon: 0.5,
                        n0: 1,
                        kappa_grid: KappaGrid::Geometric { factor: 1.5 },
                    },
                )
                .unwrap()
                .worst_case,
            )
        })
    });
}

criterion_group!(
    benches,
    reduction_evaluation,
    recursive_search,
    exact_oracle,
    robust_framework
);
criterion_main!(benches);
