//! Throughput and throughput-reduction evaluation.
//!
//! The residual network after an interdiction admits a path-based max-flow
//! whose optimal value is the users' remaining throughput `T`; the reduction
//! is `lambda = sum(initial values) - T`. When the user paths are pairwise
//! edge-disjoint the max-flow has a closed form; otherwise it is a small LP
//! with one variable per path and one row per loaded edge. A two-phase
//! surrogate `lambda_bar` upper-bounds the reduction for non-disjoint paths
//! while staying monotone and submodular.

use crate::edgeset::EdgeSet;
use crate::lp::{self, LinearProgram, LpStatus, RowSense, VarBounds};
use crate::network::{Flow, Network, UserPaths, FLOW_TOL};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ThroughputError {
    #[error("throughput LP failed: {0}")]
    Lp(#[from] lp::LpError),
    #[error("throughput LP reported {0:?} on a bounded feasible instance")]
    UnexpectedStatus(LpStatus),
    #[error("bad distribution: weights sum to {0}, expected 1")]
    BadDistribution(f64),
}

/// An interdiction acting on edge capacities: either an edge subset whose
/// members lose one budget's worth of capacity, or an explicit flow.
#[derive(Debug, Clone, Copy)]
pub enum Interdiction<'a> {
    Edges(&'a EdgeSet),
    Flow(&'a Flow),
}

impl<'a> From<&'a EdgeSet> for Interdiction<'a> {
    fn from(edges: &'a EdgeSet) -> Self {
        Interdiction::Edges(edges)
    }
}

impl<'a> From<&'a Flow> for Interdiction<'a> {
    fn from(flow: &'a Flow) -> Self {
        Interdiction::Flow(flow)
    }
}

/// Per-edge residual capacity under the interdiction. Never negative for
/// edge-subset interdictions because the budget is at most the minimum
/// capacity.
pub fn residual_capacities(net: &Network, interdiction: Interdiction<'_>) -> Vec<f64> {
    match interdiction {
        Interdiction::Edges(set) => {
            let mut residual = net.capacities().to_vec();
            for e in set.iter() {
                residual[e] = (residual[e] - net.budget()).max(0.0);
            }
            residual
        }
        Interdiction::Flow(f) => net
            .capacities()
            .iter()
            .zip(&f.values)
            .map(|(c, v)| c - v)
            .collect(),
    }
}

/// Partition of the user-loaded edges: `e1` lie on exactly one user path,
/// `e2` on at least two; `b` is the largest number of shared edges on any
/// single path.
#[derive(Debug, Clone)]
pub struct PathPartition {
    pub e0: EdgeSet,
    pub e1: EdgeSet,
    pub e2: EdgeSet,
    pub b: usize,
}

pub fn partition_user_edges(net: &Network, paths: &UserPaths) -> PathPartition {
    let m = net.edge_count();
    let mut count = vec![0usize; m];
    for i in 0..paths.len() {
        for &e in paths.path(i) {
            count[e] += 1;
        }
    }
    let mut e0 = EdgeSet::empty(m);
    let mut e1 = EdgeSet::empty(m);
    let mut e2 = EdgeSet::empty(m);
    for (e, &c) in count.iter().enumerate() {
        if c >= 1 {
            e0.insert(e);
            if c == 1 {
                e1.insert(e);
            } else {
                e2.insert(e);
            }
        }
    }
    let b = (0..paths.len())
        .map(|i| paths.path(i).iter().filter(|&&e| e2.contains(e)).count())
        .max()
        .unwrap_or(0);
    PathPartition { e0, e1, e2, b }
}

/// True iff the user paths are pairwise edge-disjoint.
pub fn paths_disjoint(net: &Network, paths: &UserPaths) -> bool {
    partition_user_edges(net, paths).e2.is_empty()
}

/// Users' throughput after the interdiction: the optimal value of the
/// path-based max-flow on residual capacities.
///
/// Pairwise edge-disjoint paths use the closed form
/// `min(lambda_i, min over path edges of residual)`; otherwise one LP with a
/// variable per path, capped at its initial value, and a row per loaded edge.
pub fn throughput_t(
    net: &Network,
    paths: &UserPaths,
    interdiction: Interdiction<'_>,
) -> Result<f64, ThroughputError> {
    if paths.is_empty() {
        return Ok(0.0);
    }
    let residual = residual_capacities(net, interdiction);
    if paths_disjoint(net, paths) {
        Ok(throughput_closed_form(paths, &residual))
    } else {
        throughput_lp(net, paths, &residual)
    }
}

fn throughput_closed_form(paths: &UserPaths, residual: &[f64]) -> f64 {
    (0..paths.len())
        .map(|i| {
            let bottleneck = paths
                .path(i)
                .iter()
                .map(|&e| residual[e])
                .fold(f64::INFINITY, f64::min);
            paths.initial_value(i).min(bottleneck).max(0.0)
        })
        .sum()
}

fn throughput_lp(
    net: &Network,
    paths: &UserPaths,
    residual: &[f64],
) -> Result<f64, ThroughputError> {
    let k = paths.len();
    let mut lp = LinearProgram::maximize(vec![1.0; k]);
    lp.bounds = (0..k)
        .map(|i| VarBounds::interval(0.0, paths.initial_value(i)))
        .collect();
    let loaded = partition_user_edges(net, paths).e0;
    for e in loaded.iter() {
        let coeffs: Vec<f64> = (0..k)
            .map(|i| if paths.path_set(i).contains(e) { 1.0 } else { 0.0 })
            .collect();
        // Residuals can dip a hair below zero for flow interdictions; the
        // row stays feasible because every variable is floored at zero.
        lp.push_row(coeffs, RowSense::Le, residual[e].max(0.0));
    }
    let sol = lp::solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective_value),
        other => Err(ThroughputError::UnexpectedStatus(other)),
    }
}

/// Throughput reduction: initial throughput minus residual throughput,
/// clamped to `[0, sum of initial values]`.
pub fn lambda(
    net: &Network,
    paths: &UserPaths,
    interdiction: Interdiction<'_>,
) -> Result<f64, ThroughputError> {
    let total = paths.total_initial_value();
    let t = throughput_t(net, paths, interdiction)?;
    Ok((total - t).clamp(0.0, total))
}

/// Expected reduction under a probability distribution over single-path
/// flows, given as `(edge set, weight)` pairs. Weights must sum to one.
pub fn lambda_strategy(
    net: &Network,
    paths: &UserPaths,
    support: &[(EdgeSet, f64)],
) -> Result<f64, ThroughputError> {
    let total: f64 = support.iter().map(|(_, w)| w).sum();
    if (total - 1.0).abs() > FLOW_TOL || support.iter().any(|&(_, w)| w < -FLOW_TOL) {
        return Err(ThroughputError::BadDistribution(total));
    }
    let mut expected = 0.0;
    for (edges, w) in support {
        if *w > 0.0 {
            expected += w * lambda(net, paths, Interdiction::Edges(edges))?;
        }
    }
    Ok(expected)
}

/// Marginal gain of `a` on top of `x`: `lambda(a united with x) - lambda(x)`.
pub fn marginal_gain(
    net: &Network,
    paths: &UserPaths,
    x: &EdgeSet,
    a: &EdgeSet,
) -> Result<f64, ThroughputError> {
    let union = x.union(a);
    Ok(lambda(net, paths, Interdiction::Edges(&union))?
        - lambda(net, paths, Interdiction::Edges(x))?)
}

/// Monotone submodular surrogate for the reduction when user paths overlap.
///
/// Phase I caps each path's flow by the residuals of its exclusively-owned
/// edges. Phase II multiplies in, for every shared edge whose residual no
/// longer covers the original load, the ratio of residual to original load.
/// Equals the exact reduction when the paths are disjoint.
pub fn lambda_bar(net: &Network, paths: &UserPaths, a: &EdgeSet) -> f64 {
    if paths.is_empty() {
        return 0.0;
    }
    let partition = partition_user_edges(net, paths);
    let residual = residual_capacities(net, Interdiction::Edges(a));
    let mut load = vec![0.0; net.edge_count()];
    for i in 0..paths.len() {
        for &e in paths.path(i) {
            load[e] += paths.initial_value(i);
        }
    }
    let mut kept = 0.0;
    for i in 0..paths.len() {
        let phase1 = paths
            .path(i)
            .iter()
            .filter(|&&e| partition.e1.contains(e))
            .map(|&e| residual[e])
            .fold(paths.initial_value(i), f64::min)
            .max(0.0);
        let mut phase2 = phase1;
        for &e in paths.path(i) {
            if partition.e2.contains(e) && residual[e] <= load[e] + FLOW_TOL && load[e] > 0.0 {
                phase2 *= (residual[e] / load[e]).min(1.0);
            }
        }
        kept += phase2;
    }
    let total = paths.total_initial_value();
    (total - kept).clamp(0.0, total)
}

/// Coverage-target ceiling for the robust framework's integer programs:
/// `(n0^2 + n0) * ceil(scale * max over candidates of total initial value)`.
pub fn upper_bound_m(candidates: &[UserPaths], n0: u64, scale: f64) -> u64 {
    let n = n0 * n0 + n0;
    let worst = candidates
        .iter()
        .map(|p| p.total_initial_value())
        .fold(0.0, f64::max);
    n * (scale * worst).ceil() as u64
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::network::SinglePathFlow;

    /// Six-node instance with three disjoint user paths; reproduces the
    /// reference values used across the crate's tests.
    pub(crate) fn example_network() -> (Network, UserPaths) {
        let edges = vec![
            (0, 1), // e0, cap 4
            (0, 3), // e1, cap 5
            (1, 3), // e2, cap 5
            (1, 4), // e3, cap 5
            (2, 5), // e4, cap 4
            (3, 2), // e5, cap 3
            (3, 4), // e6, cap 3
            (4, 2), // e7, cap 5
            (4, 5), // e8, cap 3
        ];
        let caps = vec![4.0, 5.0, 5.0, 5.0, 4.0, 3.0, 3.0, 5.0, 3.0];
        let net = Network::new(6, edges, caps, 0, 5, 2.0).unwrap();
        let paths = UserPaths::new(
            &net,
            vec![vec![6, 7, 4], vec![0, 3, 8], vec![5]],
            vec![3.0, 3.0, 3.0],
        )
        .unwrap();
        (net, paths)
    }

    #[test]
    fn residual_empty_set_is_capacity() {
        let (net, _) = example_network();
        let a = EdgeSet::empty(net.edge_count());
        assert_eq!(
            residual_capacities(&net, Interdiction::Edges(&a)),
            net.capacities()
        );
    }

    #[test]
    fn residual_subtracts_budget_on_members() {
        let (net, _) = example_network();
        let a = EdgeSet::from_indices(net.edge_count(), &[1]);
        let r = residual_capacities(&net, Interdiction::Edges(&a));
        assert!((r[1] - 3.0).abs() < FLOW_TOL);
        assert!((r[0] - 4.0).abs() < FLOW_TOL);
    }

    #[test]
    fn residual_of_flow_is_elementwise() {
        let (net, _) = example_network();
        let mut f = Flow::zero(&net);
        f.values[0] = 2.0;
        let r = residual_capacities(&net, Interdiction::Flow(&f));
        assert!((r[0] - 2.0).abs() < FLOW_TOL);
    }

    #[test]
    fn no_interdiction_keeps_initial_throughput() {
        let (net, paths) = example_network();
        let a = EdgeSet::empty(net.edge_count());
        let t = throughput_t(&net, &paths, Interdiction::Edges(&a)).unwrap();
        assert!((t - 9.0).abs() < FLOW_TOL);
        assert!(lambda(&net, &paths, Interdiction::Edges(&a)).unwrap() < FLOW_TOL);
    }

    #[test]
    fn example_flow_reduces_throughput_to_five() {
        // Flow of value 2 along s, v1, v3, v4, t.
        let (net, paths) = example_network();
        let spf = SinglePathFlow::new(&net, vec![0, 2, 6, 8]).unwrap();
        let f = spf.to_flow(&net);
        let t = throughput_t(&net, &paths, Interdiction::Flow(&f)).unwrap();
        assert!((t - 5.0).abs() < FLOW_TOL);
        let l = lambda(&net, &paths, Interdiction::Flow(&f)).unwrap();
        assert!((l - 4.0).abs() < FLOW_TOL);
        // The same path as an edge subset gives the same reduction.
        let set = spf.edge_set(&net);
        let l2 = lambda(&net, &paths, Interdiction::Edges(&set)).unwrap();
        assert!((l2 - 4.0).abs() < FLOW_TOL);
    }

    #[test]
    fn strategy_point_mass_matches_lambda() {
        let (net, paths) = example_network();
        let set = EdgeSet::from_indices(net.edge_count(), &[0, 2, 6, 8]);
        let l = lambda(&net, &paths, Interdiction::Edges(&set)).unwrap();
        let ls = lambda_strategy(&net, &paths, &[(set, 1.0)]).unwrap();
        assert!((l - ls).abs() < FLOW_TOL);
    }

    #[test]
    fn strategy_rejects_bad_weights() {
        let (net, paths) = example_network();
        let set = EdgeSet::empty(net.edge_count());
        assert!(matches!(
            lambda_strategy(&net, &paths, &[(set, 0.5)]),
            Err(ThroughputError::BadDistribution(_))
        ));
    }

    #[test]
    fn strategy_is_linear() {
        let (net, paths) = example_network();
        let a = EdgeSet::from_indices(net.edge_count(), &[0, 2, 6, 8]);
        let b = EdgeSet::from_indices(net.edge_count(), &[1, 6, 8]);
        let la = lambda(&net, &paths, Interdiction::Edges(&a)).unwrap();
        let lb = lambda(&net, &paths, Interdiction::Edges(&b)).unwrap();
        let mix = lambda_strategy(&net, &paths, &[(a, 0.5), (b, 0.5)]).unwrap();
        assert!((mix - 0.5 * (la + lb)).abs() < FLOW_TOL);
    }

    #[test]
    fn single_path_budget_equals_slack() {
        // One user path with value 4 on capacity 5; budget 2 leaves residual
        // 3, so exactly one unit of flow is displaced.
        let net = Network::new(3, vec![(0, 1), (1, 2)], vec![5.0, 6.0], 0, 2, 2.0).unwrap();
        let paths = UserPaths::new(&net, vec![vec![0, 1]], vec![4.0]).unwrap();
        let a = EdgeSet::from_indices(net.edge_count(), &[0]);
        let l = lambda(&net, &paths, Interdiction::Edges(&a)).unwrap();
        assert!((l - 1.0).abs() < FLOW_TOL);
        // Hitting the slacker edge instead displaces nothing.
        let b = EdgeSet::from_indices(net.edge_count(), &[1]);
        let l2 = lambda(&net, &paths, Interdiction::Edges(&b)).unwrap();
        assert!(l2.abs() < FLOW_TOL);
    }

    #[test]
    fn marginal_gain_of_subset_is_zero() {
        let (net, paths) = example_network();
        let x = EdgeSet::from_indices(net.edge_count(), &[0, 2, 6, 8]);
        let a = EdgeSet::from_indices(net.edge_count(), &[2, 6]);
        let g = marginal_gain(&net, &paths, &x, &a).unwrap();
        assert!(g.abs() < FLOW_TOL);
    }

    #[test]
    fn marginal_gain_from_empty_is_lambda() {
        let (net, paths) = example_network();
        let x = EdgeSet::empty(net.edge_count());
        let a = EdgeSet::from_indices(net.edge_count(), &[6]);
        let g = marginal_gain(&net, &paths, &x, &a).unwrap();
        let l = lambda(&net, &paths, Interdiction::Edges(&a)).unwrap();
        assert!((g - l).abs() < FLOW_TOL);
    }

    #[test]
    fn partition_disjoint_paths() {
        let (net, paths) = example_network();
        let p = partition_user_edges(&net, &paths);
        assert!(p.e2.is_empty());
        assert_eq!(p.b, 0);
        assert_eq!(p.e0.len(), 7);
        assert!(paths_disjoint(&net, &paths));
    }

    #[test]
    fn partition_shared_edge() {
        let net = Network::new(
            4,
            vec![(0, 1), (1, 2), (2, 3), (1, 3)],
            vec![4.0, 4.0, 4.0, 4.0],
            0,
            3,
            1.0,
        )
        .unwrap();
        let paths = UserPaths::new(&net, vec![vec![0, 1], vec![1, 2]], vec![2.0, 2.0]).unwrap();
        let p = partition_user_edges(&net, &paths);
        assert_eq!(p.e2.to_vec(), vec![1]);
        assert_eq!(p.b, 1);
    }

    #[test]
    fn partition_three_paths_pairwise_sharing() {
        // Three paths sharing pairwise-distinct edges: each path carries two
        // shared edges, so b = 2 by direct count.
        let net = Network::new(
            5,
            vec![(0, 1), (1, 2), (2, 3), (1, 4), (4, 2)],
            vec![4.0; 5],
            0,
            3,
            1.0,
        )
        .unwrap();
        let paths = UserPaths::new(
            &net,
            vec![vec![0, 1], vec![1, 2], vec![0, 3, 4, 2]],
            vec![1.0, 1.0, 1.0],
        )
        .unwrap();
        let p = partition_user_edges(&net, &paths);
        assert_eq!(p.e2.to_vec(), vec![0, 1, 2]);
        assert_eq!(p.b, 2);
    }

    #[test]
    fn lambda_bar_disjoint_equals_lambda() {
        let (net, paths) = example_network();
        for edges in [vec![], vec![6], vec![0, 2, 6, 8], vec![1, 5]] {
            let a = EdgeSet::from_indices(net.edge_count(), &edges);
            let exact = lambda(&net, &paths, Interdiction::Edges(&a)).unwrap();
            let bar = lambda_bar(&net, &paths, &a);
            assert!((exact - bar).abs() < FLOW_TOL, "A = {edges:?}");
        }
    }

    #[test]
    fn lambda_bar_empty_set_is_zero() {
        let net = Network::new(
            4,
            vec![(0, 1), (1, 2), (2, 3), (1, 3)],
            vec![4.0, 4.0, 4.0, 4.0],
            0,
            3,
            1.0,
        )
        .unwrap();
        let paths = UserPaths::new(&net, vec![vec![0, 1], vec![1, 2]], vec![2.0, 2.0]).unwrap();
        assert!(lambda_bar(&net, &paths, &EdgeSet::empty(net.edge_count())).abs() < FLOW_TOL);
    }

    #[test]
    fn lambda_bar_two_phase_by_hand() {
        // Two paths of value 2 sharing edge e with capacity 4 and budget 2:
        // interdicting e halves both flows, so the surrogate reduction is 2.
        let net = Network::new(
            4,
            vec![(0, 1), (1, 2), (2, 3), (1, 3)],
            vec![4.0, 4.0, 4.0, 4.0],
            0,
            3,
            2.0,
        )
        .unwrap();
        let paths = UserPaths::new(&net, vec![vec![0, 1], vec![1, 2]], vec![2.0, 2.0]).unwrap();
        let a = EdgeSet::from_indices(net.edge_count(), &[1]);
        let bar = lambda_bar(&net, &paths, &a);
        assert!((bar - 2.0).abs() < FLOW_TOL);
    }

    #[test]
    fn lambda_bar_multiplies_factors_across_shared_edges() {
        // One path crossing two shared edges picks up both ratios; the
        // other two paths each cross one. Budget 2 against capacity 4 with
        // load 4 gives a factor of 1/2 per saturated shared edge.
        //   paths: 0->1->2->3 (middle path), 0->1->4 (shares edge (0,1)),
        //          5->2->3 (shares edge (2,3))
        let net = Network::new(
            6,
            vec![(0, 1), (1, 2), (2, 3), (1, 4), (5, 2)],
            vec![4.0, 4.0, 4.0, 4.0, 4.0],
            0,
            3,
            2.0,
        )
        .unwrap();
        let paths = UserPaths::new(
            &net,
            vec![vec![0, 1, 2], vec![0, 3], vec![4, 2]],
            vec![2.0, 2.0, 2.0],
        )
        .unwrap();
        let a = EdgeSet::from_indices(net.edge_count(), &[0, 2]);
        // Phase I leaves all values at 2 (no exclusive edge is hit hard
        // enough to bind below the initial value: residual on (1,2) is 4 and
        // on (1,4), (5,2) is 4). Phase II: loads on (0,1) and (2,3) are 4,
        // residuals 2, so each crossing multiplies by 1/2. Path 0 crosses
        // both: 2 * 1/4 = 0.5; paths 1 and 2: 2 * 1/2 = 1 each.
        // Surrogate reduction = 6 - (0.5 + 1 + 1) = 3.5.
        let bar = lambda_bar(&net, &paths, &a);
        assert!((bar - 3.5).abs() < FLOW_TOL, "got {bar}");
        // And it stays an upper bound on the exact reduction.
        let exact = lambda(&net, &paths, Interdiction::Edges(&a)).unwrap();
        assert!(exact <= bar + FLOW_TOL);
    }

    #[test]
    fn closed_form_matches_lp_on_disjoint_instances() {
        let (net, paths) = example_network();
        for edges in [vec![], vec![6], vec![0, 6], vec![0, 2, 6, 8], vec![1, 5, 8]] {
            let a = EdgeSet::from_indices(net.edge_count(), &edges);
            let residual = residual_capacities(&net, Interdiction::Edges(&a));
            let closed = throughput_closed_form(&paths, &residual);
            let via_lp = throughput_lp(&net, &paths, &residual).unwrap();
            assert!((closed - via_lp).abs() < 1e-7, "A = {edges:?}");
        }
    }

    #[test]
    fn non_disjoint_matches_lattice_search() {
        // Exhaustive grid over feasible path flows at 0.25 resolution.
        let net = Network::new(
            4,
            vec![(0, 1), (1, 2), (2, 3), (1, 3)],
            vec![4.0, 4.0, 4.0, 4.0],
            0,
            3,
            2.0,
        )
        .unwrap();
        let paths = UserPaths::new(
            &net,
            vec![vec![0, 1], vec![1, 2], vec![0, 3]],
            vec![2.0, 1.5, 1.0],
        )
        .unwrap();
        let a = EdgeSet::from_indices(net.edge_count(), &[1]);
        let t = throughput_t(&net, &paths, Interdiction::Edges(&a)).unwrap();

        let residual = residual_capacities(&net, Interdiction::Edges(&a));
        let step = 0.25;
        let mut best = 0.0f64;
        let steps = |v: f64| (v / step).round() as usize;
        for i in 0..=steps(2.0) {
            for j in 0..=steps(1.5) {
                for k in 0..=steps(1.0) {
                    let vals = [i as f64 * step, j as f64 * step, k as f64 * step];
                    let feasible = (0..net.edge_count()).all(|e| {
                        let load: f64 = (0..3)
                            .filter(|&p| paths.path_set(p).contains(e))
                            .map(|p| vals[p])
                            .sum();
                        load <= residual[e] + FLOW_TOL
                    });
                    if feasible {
                        best = best.max(vals.iter().sum());
                    }
                }
            }
        }
        assert!(t >= best - FLOW_TOL);
        assert!(t <= best + 3.0 * step + FLOW_TOL);
    }

    #[test]
    fn upper_bound_formula() {
        let (_, paths) = example_network();
        assert_eq!(upper_bound_m(std::slice::from_ref(&paths), 2, 1.0), 54);
        // Two candidates; the larger total wins.
        let smaller = UserPaths::new(
            &example_network().0,
            vec![vec![6, 7, 4], vec![0, 3, 8]],
            vec![3.0, 3.0],
        )
        .unwrap();
        assert_eq!(upper_bound_m(&[smaller, paths], 2, 1.0), 54);
    }
}
