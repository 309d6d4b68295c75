//! Recursive greedy search for an s-t path maximizing a monotone submodular
//! edge-set function.
//!
//! The recursion splits the search at anchor nodes: with `a` anchors per
//! level it tries every feasible ordered (a-1)-tuple, solves each leg one
//! depth lower, and chains legs greedily (each leg's search is conditioned
//! on the edges already picked). The minimum-hop path is always the
//! incumbent, so deeper searches can only match or improve it. With depth at
//! least log2 of the optimal path length, the returned path is within a
//! 1/(ceil(log2 d)+1) factor of optimal.

use crate::edgeset::EdgeSet;
use crate::network::{
    shortest_path, topological_order, Network, NetworkError, SinglePathFlow, UserPaths,
};
use crate::throughput::{
    lambda, lambda_bar, paths_disjoint, residual_capacities, Interdiction, ThroughputError,
};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GreedyError {
    #[error("no path between the requested endpoints")]
    Infeasible,
    #[error(transparent)]
    Throughput(#[from] ThroughputError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// An edge-set objective for the recursive greedy search. Implementations
/// are expected to be monotone and submodular; that property is checked
/// statistically in the test suites, not enforced here.
pub trait EdgeSetGain {
    fn evaluate(&mut self, edges: &EdgeSet) -> f64;
}

/// Exact reduction as a gain. Only valid for pairwise edge-disjoint user
/// paths, where the closed form applies and the function is submodular.
pub struct LambdaGain<'a> {
    net: &'a Network,
    paths: &'a UserPaths,
}

impl<'a> LambdaGain<'a> {
    pub fn new(net: &'a Network, paths: &'a UserPaths) -> Self {
        debug_assert!(
            paths_disjoint(net, paths),
            "exact gain needs disjoint paths"
        );
        LambdaGain { net, paths }
    }
}

impl EdgeSetGain for LambdaGain<'_> {
    fn evaluate(&mut self, edges: &EdgeSet) -> f64 {
        let residual = residual_capacities(self.net, Interdiction::Edges(edges));
        let kept: f64 = (0..self.paths.len())
            .map(|i| {
                let bottleneck = self
                    .paths
                    .path(i)
                    .iter()
                    .map(|&e| residual[e])
                    .fold(f64::INFINITY, f64::min);
                self.paths.initial_value(i).min(bottleneck).max(0.0)
            })
            .sum();
        (self.paths.total_initial_value() - kept).max(0.0)
    }
}

/// Two-phase surrogate reduction as a gain; submodular for any user paths.
pub struct LambdaBarGain<'a> {
    net: &'a Network,
    paths: &'a UserPaths,
}

impl<'a> LambdaBarGain<'a> {
    pub fn new(net: &'a Network, paths: &'a UserPaths) -> Self {
        LambdaBarGain { net, paths }
    }
}

impl EdgeSetGain for LambdaBarGain<'_> {
    fn evaluate(&mut self, edges: &EdgeSet) -> f64 {
        lambda_bar(self.net, self.paths, edges)
    }
}

/// Search parameters: recursion depth and anchors per level (`anchors = a`
/// tries ordered (a-1)-tuples). Default depth is `ceil(log2 n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyConfig {
    pub depth: usize,
    pub anchors: usize,
}

impl GreedyConfig {
    pub fn new(depth: usize, anchors: usize) -> Self {
        assert!(anchors >= 2, "anchors must be at least 2");
        GreedyConfig { depth, anchors }
    }

    /// Depth `ceil(log2 n)` with two-way splits.
    pub fn default_for(net: &Network) -> Self {
        GreedyConfig {
            depth: ceil_log2(net.node_count()),
            anchors: 2,
        }
    }
}

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Instrumentation for one search run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RgStats {
    /// Recursive procedure invocations, including pruned-trivial ones.
    pub rg_calls: u64,
    /// Underlying gain evaluations (memoization misses).
    pub gain_evals: u64,
}

/// Runs the recursive search from `u1` to `u2` with already-picked edges
/// `x`. Returns the best edge set found (always a simple `u1`-`u2` path on a
/// DAG) or `Infeasible` when `u2` is unreachable.
pub fn recursive_greedy<G: EdgeSetGain>(
    net: &Network,
    gain: &mut G,
    u1: usize,
    u2: usize,
    x: &EdgeSet,
    cfg: GreedyConfig,
) -> Result<(EdgeSet, RgStats), GreedyError> {
    assert!(cfg.anchors >= 2, "anchors must be at least 2");
    let mut run = RgRun::new(net, gain);
    let result = run.rg(u1, u2, x, cfg.depth, cfg.anchors);
    match result {
        Some(edges) => Ok((edges, run.stats)),
        None => Err(GreedyError::Infeasible),
    }
}

struct RgRun<'a, G: EdgeSetGain> {
    net: &'a Network,
    gain: &'a mut G,
    memo: HashMap<EdgeSet, f64>,
    sp_cache: HashMap<(usize, usize), Option<EdgeSet>>,
    reach_from: Vec<Vec<u64>>,
    reach_to: Vec<Vec<u64>>,
    path_counts: Vec<Vec<u64>>,
    stats: RgStats,
}

impl<'a, G: EdgeSetGain> RgRun<'a, G> {
    fn new(net: &'a Network, gain: &'a mut G) -> Self {
        let n = net.node_count();
        let words = n.div_ceil(64);
        let mut reach_from = vec![vec![0u64; words]; n];
        let mut reach_to = vec![vec![0u64; words]; n];
        for u in 0..n {
            for (v, ok) in net.reachable_from(u).into_iter().enumerate() {
                if ok {
                    reach_from[u][v / 64] |= 1 << (v % 64);
                    reach_to[v][u / 64] |= 1 << (u % 64);
                }
            }
        }
        let order = topological_order(net).expect("network is acyclic");
        let mut path_counts = vec![vec![0u64; n]; n];
        for (u, counts) in path_counts.iter_mut().enumerate() {
            counts[u] = 1;
            for &w in &order {
                if counts[w] == 0 {
                    continue;
                }
                for &e in net.out_edges(w) {
                    let v = net.edge(e).1;
                    counts[v] = counts[v].saturating_add(counts[w]);
                }
            }
        }
        RgRun {
            net,
            gain,
            memo: HashMap::new(),
            sp_cache: HashMap::new(),
            reach_from,
            reach_to,
            path_counts,
            stats: RgStats::default(),
        }
    }

    fn eval(&mut self, edges: &EdgeSet) -> f64 {
        if let Some(&v) = self.memo.get(edges) {
            return v;
        }
        let v = self.gain.evaluate(edges);
        self.stats.gain_evals += 1;
        self.memo.insert(edges.clone(), v);
        v
    }

    fn marginal(&mut self, x: &EdgeSet, candidate: &EdgeSet) -> f64 {
        let union = x.union(candidate);
        self.eval(&union) - self.eval(x)
    }

    fn shortest(&mut self, u1: usize, u2: usize) -> Option<EdgeSet> {
        let m = self.net.edge_count();
        let net = self.net;
        self.sp_cache
            .entry((u1, u2))
            .or_insert_with(|| {
                shortest_path(net, u1, u2).map(|edges| EdgeSet::from_indices(m, &edges))
            })
            .clone()
    }

    fn rg(
        &mut self,
        u1: usize,
        u2: usize,
        x: &EdgeSet,
        depth: usize,
        anchors: usize,
    ) -> Option<EdgeSet> {
        self.stats.rg_calls += 1;
        let incumbent = self.shortest(u1, u2)?;
        // A unique u1-u2 path leaves the anchor loop nothing new to find.
        if depth == 0 || self.path_counts[u1][u2] == 1 {
            return Some(incumbent);
        }
        let mut best = incumbent;
        let mut best_gain = self.marginal(x, &best);
        if anchors == 2 {
            for v in self.nodes_between(u1, u2) {
                if v == u1 || v == u2 {
                    continue;
                }
                let first = self.rg(u1, v, x, depth - 1, anchors)?;
                let x2 = x.union(&first);
                let second = self.rg(v, u2, &x2, depth - 1, anchors)?;
                let union = first.union(&second);
                let g = self.marginal(x, &union);
                if g > best_gain {
                    best_gain = g;
                    best = union;
                }
            }
        } else {
            let mut tuple = vec![0usize; anchors - 1];
            self.tuple_loop(
                u1,
                u2,
                x,
                depth,
                anchors,
                0,
                u1,
                &mut tuple,
                &mut best,
                &mut best_gain,
            );
        }
        Some(best)
    }

    /// Iterates ordered anchor tuples in ascending lexicographic order,
    /// chaining leg searches greedily; every prefix stays reach-feasible.
    #[allow(clippy::too_many_arguments)]
    fn tuple_loop(
        &mut self,
        u1: usize,
        u2: usize,
        x: &EdgeSet,
        depth: usize,
        anchors: usize,
        position: usize,
        prev: usize,
        tuple: &mut Vec<usize>,
        best: &mut EdgeSet,
        best_gain: &mut f64,
    ) {
        if position == anchors - 1 {
            let mut accumulated = x.clone();
            let mut union = EdgeSet::empty(self.net.edge_count());
            let mut from = u1;
            for leg in tuple.iter().copied().chain(std::iter::once(u2)) {
                let Some(part) = self.rg(from, leg, &accumulated, depth - 1, anchors) else {
                    return;
                };
                accumulated.union_in_place(&part);
                union.union_in_place(&part);
                from = leg;
            }
            let g = self.marginal(x, &union);
            if g > *best_gain {
                *best_gain = g;
                *best = union;
            }
            return;
        }
        for v in self.nodes_between(prev, u2) {
            tuple[position] = v;
            self.tuple_loop(
                u1,
                u2,
                x,
                depth,
                anchors,
                position + 1,
                v,
                tuple,
                best,
                best_gain,
            );
        }
    }

    /// Nodes v with prev -> v and v -> target both reachable, ascending.
    fn nodes_between(&self, prev: usize, target: usize) -> Vec<usize> {
        let words = self.reach_from[prev].len();
        let mut out = Vec::new();
        for w in 0..words {
            let mut bits = self.reach_from[prev][w] & self.reach_to[target][w];
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                out.push(w * 64 + b);
            }
        }
        out
    }
}

/// Interprets a simple s-t path as the flow carrying the whole budget.
pub fn path_to_flow(net: &Network, edges: &EdgeSet) -> Result<SinglePathFlow, NetworkError> {
    SinglePathFlow::new(net, edges.to_vec())
}

/// Outcome of a deterministic interdiction run.
#[derive(Debug, Clone)]
pub struct InterdictResult {
    pub flow: SinglePathFlow,
    /// Exact reduction achieved by `flow`, never the surrogate.
    pub reduction: f64,
    pub stats: RgStats,
}

/// Computes a pure interdiction strategy for known user paths: recursive
/// greedy from source to sink with the exact reduction as gain when paths
/// are disjoint, the surrogate otherwise. The returned edge set is reduced
/// to a simple s-t path if it is not one already, keeping the best exact
/// reduction among the paths inside it.
pub fn deterministic_interdict(
    net: &Network,
    paths: &UserPaths,
    cfg: GreedyConfig,
) -> Result<InterdictResult, GreedyError> {
    let x = EdgeSet::empty(net.edge_count());
    let (union, stats) = if paths_disjoint(net, paths) {
        let mut gain = LambdaGain::new(net, paths);
        recursive_greedy(net, &mut gain, net.source(), net.sink(), &x, cfg)?
    } else {
        let mut gain = LambdaBarGain::new(net, paths);
        recursive_greedy(net, &mut gain, net.source(), net.sink(), &x, cfg)?
    };
    let flow = extract_path(net, paths, &union)?;
    let set = flow.edge_set(net);
    let reduction = lambda(net, paths, Interdiction::Edges(&set))?;
    Ok(InterdictResult {
        flow,
        reduction,
        stats,
    })
}

/// On a DAG the search union is itself a simple s-t path; the fallback scan
/// below covers the general contract by picking the best-reduction path
/// within the union's edges.
fn extract_path(
    net: &Network,
    paths: &UserPaths,
    union: &EdgeSet,
) -> Result<SinglePathFlow, GreedyError> {
    if let Ok(flow) = SinglePathFlow::new(net, union.to_vec()) {
        return Ok(flow);
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut stack = Vec::new();
    let mut visited = vec![false; net.node_count()];
    scan_union_paths(
        net,
        paths,
        union,
        net.source(),
        &mut stack,
        &mut visited,
        &mut best,
    )?;
    let (_, edges) = best.ok_or(GreedyError::Infeasible)?;
    Ok(SinglePathFlow::new(net, edges)?)
}

fn scan_union_paths(
    net: &Network,
    paths: &UserPaths,
    union: &EdgeSet,
    node: usize,
    stack: &mut Vec<usize>,
    visited: &mut Vec<bool>,
    best: &mut Option<(f64, Vec<usize>)>,
) -> Result<(), GreedyError> {
    if node == net.sink() {
        let set = EdgeSet::from_indices(net.edge_count(), stack);
        let value = lambda(net, paths, Interdiction::Edges(&set))?;
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            *best = Some((value, stack.clone()));
        }
        return Ok(());
    }
    visited[node] = true;
    for &e in net.out_edges(node) {
        let v = net.edge(e).1;
        if union.contains(e) && !visited[v] {
            stack.push(e);
            scan_union_paths(net, paths, union, v, stack, visited, best)?;
            stack.pop();
        }
    }
    visited[node] = false;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{enumerate_st_paths, Network, UserPaths};
    use crate::throughput::tests::example_network;

    #[test]
    fn depth_zero_returns_shortest_path() {
        let (net, paths) = example_network();
        let mut gain = LambdaGain::new(&net, &paths);
        let x = EdgeSet::empty(net.edge_count());
        let (result, _) =
            recursive_greedy(&net, &mut gain, 0, 5, &x, GreedyConfig::new(0, 2)).unwrap();
        assert_eq!(result.len(), 3);
        let sp = shortest_path(&net, 0, 5).unwrap();
        assert_eq!(result.to_vec(), {
            let mut v = sp.clone();
            v.sort_unstable();
            v
        });
    }

    #[test]
    fn example_depth_two_reaches_optimum() {
        let (net, paths) = example_network();
        let result = deterministic_interdict(&net, &paths, GreedyConfig::new(2, 2)).unwrap();
        assert!((result.reduction - 4.0).abs() < 1e-9);
        // This instance has three optimal s-t paths; first-found anchor
        // order makes the result deterministic, pinned here as a regression
        // guard.
        assert_eq!(result.flow.edges(), &[0, 2, 5, 4]);
    }

    #[test]
    fn no_user_paths_yields_zero_reduction() {
        let (net, _) = example_network();
        let result =
            deterministic_interdict(&net, &UserPaths::empty(), GreedyConfig::new(2, 2)).unwrap();
        assert!(result.reduction.abs() < 1e-12);
        // Still returns some valid s-t path.
        assert!(!result.flow.edges().is_empty());
    }

    #[test]
    fn gain_never_decreases_with_depth() {
        let (net, paths) = example_network();
        let mut last = 0.0;
        for depth in 0..=4 {
            let r = deterministic_interdict(&net, &paths, GreedyConfig::new(depth, 2)).unwrap();
            assert!(
                r.reduction >= last - 1e-9,
                "depth {depth} regressed: {} < {last}",
                r.reduction
            );
            last = r.reduction;
        }
    }

    #[test]
    fn bound_matches_enumeration_on_example() {
        // Oracle by enumeration, then the ratio guarantee at depth log2(d).
        let (net, paths) = example_network();
        let all = enumerate_st_paths(&net, 1000).unwrap();
        let mut opt = 0.0f64;
        let mut opt_len = usize::MAX;
        for p in &all {
            let set = EdgeSet::from_indices(net.edge_count(), p);
            let v = lambda(&net, &paths, Interdiction::Edges(&set)).unwrap();
            if v > opt + 1e-12 {
                opt = v;
                opt_len = p.len();
            } else if (v - opt).abs() <= 1e-12 {
                opt_len = opt_len.min(p.len());
            }
        }
        let depth = ceil_log2(opt_len);
        let r = deterministic_interdict(&net, &paths, GreedyConfig::new(depth, 2)).unwrap();
        let bound = opt / (ceil_log2(opt_len) + 1) as f64;
        assert!(r.reduction >= bound - 1e-9);
    }

    #[test]
    fn path_to_flow_rejects_disconnected_sets() {
        let (net, _) = example_network();
        let set = EdgeSet::from_indices(net.edge_count(), &[0, 8]);
        assert!(path_to_flow(&net, &set).is_err());
        let ok = EdgeSet::from_indices(net.edge_count(), &[0, 2, 6, 8]);
        assert_eq!(path_to_flow(&net, &ok).unwrap().edges(), &[0, 2, 6, 8]);
    }

    #[test]
    fn call_count_stays_under_envelope() {
        let (net, paths) = example_network();
        for (depth, anchors) in [(1, 2), (2, 2), (3, 2), (1, 3), (2, 3)] {
            let x = EdgeSet::empty(net.edge_count());
            let mut gain = LambdaGain::new(&net, &paths);
            let (_, stats) =
                recursive_greedy(&net, &mut gain, 0, 5, &x, GreedyConfig::new(depth, anchors))
                    .unwrap();
            let n = net.node_count() as u64;
            let a = anchors as u64;
            let envelope = 4 * (a * n).pow(((a - 1) as u32) * depth as u32);
            assert!(
                stats.rg_calls <= envelope,
                "depth {depth} anchors {anchors}: {} > {envelope}",
                stats.rg_calls
            );
        }
    }

    #[test]
    fn three_anchor_search_matches_or_beats_two() {
        let (net, paths) = example_network();
        let two = deterministic_interdict(&net, &paths, GreedyConfig::new(2, 2)).unwrap();
        let three = deterministic_interdict(&net, &paths, GreedyConfig::new(2, 3)).unwrap();
        assert!(three.reduction >= two.reduction - 1e-9);
    }

    #[test]
    fn non_disjoint_instance_uses_surrogate_and_reports_exact() {
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
        let r = deterministic_interdict(&net, &paths, GreedyConfig::new(2, 2)).unwrap();
        let all = enumerate_st_paths(&net, 100).unwrap();
        let opt = all
            .iter()
            .map(|p| {
                let set = EdgeSet::from_indices(net.edge_count(), p);
                lambda(&net, &paths, Interdiction::Edges(&set)).unwrap()
            })
            .fold(0.0f64, f64::max);
        assert!(r.reduction <= opt + 1e-9);
        // Theorem bound with b = 1 and d at most 3: (b+1) * (ceil(log2 d)+1) = 6.
        assert!(r.reduction >= opt / 6.0 - 1e-9);
    }
}
