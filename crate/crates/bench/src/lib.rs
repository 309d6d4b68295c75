//! Shared fixtures for the benchmark targets.

use flowjam_core::scenario::Scenario;
use flowjam_core::testkit::InstanceFamily;

/// Medium disjoint instance with a few dozen s-t paths.
pub fn medium_disjoint() -> Scenario {
    let family = InstanceFamily::small_disjoint();
    family
        .collect(1, 12_000, |s| {
            s.network.count_paths(s.network.source(), s.network.sink()) >= 30
        })
        .pop()
        .expect("family yields an instance")
}

/// Medium overlapping-path instance.
pub fn medium_nondisjoint() -> Scenario {
    let family = InstanceFamily::small_nondisjoint();
    family
        .collect(1, 13_000, |s| {
            s.network.count_paths(s.network.source(), s.network.sink()) >= 30
        })
        .pop()
        .expect("family yields an instance")
}

/// Small robust instance with two candidates and modest value totals.
pub fn small_robust() -> Scenario {
    let family = InstanceFamily {
        layers: 4,
        width: 3,
        edge_prob: 0.55,
        skip_prob: 0.15,
        k: 2,
        disjoint: true,
        xi: Some(2),
        capacity_mean: 6.0,
        capacity_std: 1.0,
        max_st_paths: Some(300),
        min_st_paths: 8,
    };
    family
        .collect(1, 14_000, |_| true)
        .pop()
        .expect("family yields an instance")
}
