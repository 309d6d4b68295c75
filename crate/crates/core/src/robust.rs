//! Robust interdiction over an uncertainty set of candidate user-path sets.
//!
//! The maximin problem is reduced to a sweep of integer covering programs:
//! for every integer target kappa, greedily select single-path flows until
//! every candidate accumulates a scaled reduction of at least kappa, then
//! keep the kappa maximizing kappa over the number of selections and
//! normalize the selection counts into a mixed strategy. Reductions are made
//! integral by scaling with a fixed-point factor and flooring; flow
//! selection inside each covering step reuses the recursive greedy search
//! with the clamped coverage shortfall as its gain.

use crate::edgeset::EdgeSet;
use crate::greedy::{recursive_greedy, EdgeSetGain, GreedyConfig, GreedyError, RgStats};
use crate::network::{shortest_path, Network, SinglePathFlow, UserPaths, FLOW_TOL};
use crate::throughput::{
    lambda, lambda_bar, lambda_strategy, partition_user_edges, upper_bound_m, Interdiction,
    ThroughputError,
};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RobustError {
    #[error("uncertainty set must contain at least one candidate")]
    EmptyUncertaintySet,
    #[error("bad strategy: {0}")]
    BadStrategy(String),
    #[error(transparent)]
    Throughput(#[from] ThroughputError),
    #[error(transparent)]
    Greedy(#[from] GreedyError),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

/// Ordered collection of candidate user-path sets.
#[derive(Debug, Clone)]
pub struct UncertaintySet {
    candidates: Vec<UserPaths>,
}

impl UncertaintySet {
    pub fn new(candidates: Vec<UserPaths>) -> Result<Self, RobustError> {
        if candidates.is_empty() {
            return Err(RobustError::EmptyUncertaintySet);
        }
        Ok(UncertaintySet { candidates })
    }

    pub fn candidates(&self) -> &[UserPaths] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest shared-edge count over all candidates.
    pub fn max_shared_edges(&self, net: &Network) -> usize {
        self.candidates
            .iter()
            .map(|p| partition_user_edges(net, p).b)
            .max()
            .unwrap_or(0)
    }
}

/// A finite probability distribution over single-path flows.
#[derive(Debug, Clone)]
pub struct InterdictionStrategy {
    support: Vec<(SinglePathFlow, f64)>,
}

impl InterdictionStrategy {
    pub fn new(support: Vec<(SinglePathFlow, f64)>) -> Result<Self, RobustError> {
        let total: f64 = support.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > FLOW_TOL {
            return Err(RobustError::BadStrategy(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        if support.iter().any(|&(_, w)| w < 0.0) {
            return Err(RobustError::BadStrategy("negative weight".into()));
        }
        for i in 0..support.len() {
            for j in (i + 1)..support.len() {
                if support[i].0 == support[j].0 {
                    return Err(RobustError::BadStrategy(
                        "duplicate flow in support".into(),
                    ));
                }
            }
        }
        Ok(InterdictionStrategy { support })
    }

    pub fn point_mass(flow: SinglePathFlow) -> Self {
        InterdictionStrategy {
            support: vec![(flow, 1.0)],
        }
    }

    pub fn support(&self) -> &[(SinglePathFlow, f64)] {
        &self.support
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    fn weighted_sets(&self, net: &Network) -> Vec<(EdgeSet, f64)> {
        self.support
            .iter()
            .map(|(f, w)| (f.edge_set(net), *w))
            .collect()
    }
}

/// Scaling that makes reductions integral: reductions are multiplied by
/// `scale` and floored. `scale` solves the fixed point
/// `scale = ceil(2 (b+1) log2(scale * m_unscaled) (floor(log2 d) + 1) / epsilon)`
/// with `d` bounded by the node count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integerization {
    pub scale: u64,
    pub epsilon: f64,
    /// Coverage ceiling in unscaled units.
    pub m_unscaled: u64,
    /// Coverage ceiling in scaled units; the covering targets sweep 1..=this.
    pub m_scaled: u64,
}

/// Solves the scale fixed point by iteration from 2; the map is monotone in
/// the logarithm, so it settles within one unit in well under 64 steps.
pub fn integerize(
    net: &Network,
    u: &UncertaintySet,
    epsilon: f64,
    n0: u64,
) -> Integerization {
    assert!(epsilon > 0.0 && epsilon < 1.0, "epsilon must be in (0, 1)");
    assert!(n0 >= 1, "n0 must be at least 1");
    let m_unscaled = upper_bound_m(u.candidates(), n0, 1.0);
    if m_unscaled == 0 {
        return Integerization {
            scale: 1,
            epsilon,
            m_unscaled: 0,
            m_scaled: 0,
        };
    }
    let b = u.max_shared_edges(net) as f64;
    let d = net.node_count() as f64;
    let depth_term = d.log2().floor() + 1.0;
    let step = |x: u64| -> u64 {
        let inner = (x as f64 * m_unscaled as f64).log2();
        (2.0 * (b + 1.0) * inner * depth_term / epsilon).ceil() as u64
    };
    let mut scale = 2u64;
    for _ in 0..64 {
        let next = step(scale).max(1);
        if next.abs_diff(scale) <= 1 {
            scale = next.max(scale);
            break;
        }
        scale = next;
    }
    let m_scaled = upper_bound_m(u.candidates(), n0, scale as f64);
    Integerization {
        scale,
        epsilon,
        m_unscaled,
        m_scaled,
    }
}

/// Test hook: a forced scale with the ceilings recomputed for it.
pub fn integerize_forced(u: &UncertaintySet, epsilon: f64, n0: u64, scale: u64) -> Integerization {
    Integerization {
        scale,
        epsilon,
        m_unscaled: upper_bound_m(u.candidates(), n0, 1.0),
        m_scaled: upper_bound_m(u.candidates(), n0, scale as f64),
    }
}

impl Integerization {
    /// Scaled-and-floored exact reduction of an edge set against one
    /// candidate.
    pub fn scaled_lambda(
        &self,
        net: &Network,
        paths: &UserPaths,
        edges: &EdgeSet,
    ) -> Result<u64, ThroughputError> {
        let v = lambda(net, paths, Interdiction::Edges(edges))?;
        Ok((self.scale as f64 * v).floor() as u64)
    }
}

/// Greedy covering state for one target: how often each support flow has
/// been selected and the accumulated scaled reduction per candidate.
#[derive(Debug, Clone)]
pub struct CoverState {
    pub support: Vec<SinglePathFlow>,
    pub counts: Vec<u64>,
    pub covered: Vec<u64>,
    pub target: u64,
    pub iterations: u64,
}

impl CoverState {
    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Marginal coverage of a candidate flow with per-candidate values `values`:
/// the sum over still-uncovered candidates of the clamped shortfall.
pub fn coverage_gain(covered: &[u64], target: u64, values: &[u64]) -> u64 {
    covered
        .iter()
        .zip(values)
        .filter(|(&c, _)| c < target)
        .map(|(&c, &v)| v.min(target - c))
        .sum()
}

/// Edge-set gain driving flow selection: clamped coverage shortfall summed
/// over candidates, with the scaled surrogate reduction as each candidate's
/// value (the surrogate equals the exact reduction on disjoint paths).
struct CoverageGain<'a> {
    net: &'a Network,
    candidates: &'a [UserPaths],
    scale: u64,
    deficits: Vec<u64>,
    selection_cache: &'a mut Vec<HashMap<EdgeSet, u64>>,
}

impl EdgeSetGain for CoverageGain<'_> {
    fn evaluate(&mut self, edges: &EdgeSet) -> f64 {
        let mut total = 0u64;
        for (l, paths) in self.candidates.iter().enumerate() {
            if self.deficits[l] == 0 {
                continue;
            }
            let value = *self.selection_cache[l]
                .entry(edges.clone())
                .or_insert_with(|| {
                    (self.scale as f64 * lambda_bar(self.net, paths, edges)).floor() as u64
                });
            total += value.min(self.deficits[l]);
        }
        total as f64
    }
}

/// Shared scratch for one robust solve: memoized selection values, memoized
/// exact scaled reductions, and search results keyed by the clamped deficit
/// signature (the gain function is fully determined by it).
pub struct RobustCaches {
    selection: Vec<HashMap<EdgeSet, u64>>,
    accounting: Vec<HashMap<EdgeSet, u64>>,
    search_by_deficits: HashMap<Vec<u64>, SinglePathFlow>,
    pub stats: RgStats,
}

impl RobustCaches {
    pub fn new(u: &UncertaintySet) -> Self {
        RobustCaches {
            selection: vec![HashMap::new(); u.len()],
            accounting: vec![HashMap::new(); u.len()],
            search_by_deficits: HashMap::new(),
            stats: RgStats::default(),
        }
    }
}

/// Outcome of one covering program.
pub enum IlpOutcome {
    Solved(CoverState),
    /// The best available flow adds no coverage, so this target (and every
    /// larger one) cannot be met by further selections from this state.
    InfeasibleAtKappa,
}

/// Greedy multiset-multicover for one target `kappa`: repeatedly select the
/// flow the recursive greedy search finds for the current shortfalls, then
/// credit every candidate with the flow's exact scaled reduction.
///
/// Consecutive iterations whose clamped shortfalls coincide would select the
/// same flow, so they are batched; the resulting state is identical to
/// literal one-at-a-time iteration.
pub fn solve_ilp_greedy(
    net: &Network,
    u: &UncertaintySet,
    kappa: u64,
    cfg: GreedyConfig,
    intz: &Integerization,
    caches: &mut RobustCaches,
) -> Result<IlpOutcome, RobustError> {
    assert!(kappa >= 1, "targets start at 1");
    assert!(kappa <= intz.m_scaled, "target exceeds the coverage ceiling");
    let xi = u.len();
    // Per-candidate ceiling on any scaled reduction; deficits above it are
    // interchangeable, which is what makes signature caching and batching
    // exact.
    let caps: Vec<u64> = u
        .candidates()
        .iter()
        .map(|p| (intz.scale as f64 * p.total_initial_value()).floor() as u64)
        .collect();
    let mut state = CoverState {
        support: Vec::new(),
        counts: Vec::new(),
        covered: vec![0; xi],
        target: kappa,
        iterations: 0,
    };
    let iteration_cap = intz
        .m_scaled
        .saturating_mul(xi as u64)
        .saturating_add(1);
    loop {
        if state.covered.iter().all(|&c| c >= kappa) {
            return Ok(IlpOutcome::Solved(state));
        }
        if state.iterations > iteration_cap {
            return Err(RobustError::Internal(format!(
                "covering for target {kappa} exceeded {iteration_cap} iterations"
            )));
        }
        let deficits: Vec<u64> = state
            .covered
            .iter()
            .zip(&caps)
            .map(|(&c, &cap)| kappa.saturating_sub(c).min(cap))
            .collect();

        let flow = match caches.search_by_deficits.get(&deficits) {
            Some(f) => f.clone(),
            None => {
                let x = EdgeSet::empty(net.edge_count());
                let (union, stats) = {
                    let mut gain = CoverageGain {
                        net,
                        candidates: u.candidates(),
                        scale: intz.scale,
                        deficits: deficits.clone(),
                        selection_cache: &mut caches.selection,
                    };
                    recursive_greedy(net, &mut gain, net.source(), net.sink(), &x, cfg)?
                };
                caches.stats.rg_calls += stats.rg_calls;
                caches.stats.gain_evals += stats.gain_evals;
                let flow = extract_cover_path(net, u, intz, &deficits, &union, caches)?;
                caches
                    .search_by_deficits
                    .insert(deficits.clone(), flow.clone());
                flow
            }
        };

        let set = flow.edge_set(net);
        let mut values = Vec::with_capacity(xi);
        for (l, paths) in u.candidates().iter().enumerate() {
            let v = match caches.accounting[l].get(&set) {
                Some(&v) => v,
                None => {
                    let v = intz.scaled_lambda(net, paths, &set)?;
                    caches.accounting[l].insert(set.clone(), v);
                    v
                }
            };
            values.push(v);
        }
        if coverage_gain(&state.covered, kappa, &values) == 0 {
            return Ok(IlpOutcome::InfeasibleAtKappa);
        }

        // Batch the run of identical iterations: as long as every candidate
        // with progress stays at or above its clamp, the deficit signature
        // and hence the selection cannot change.
        let mut batch = 1u64;
        let extra = state
            .covered
            .iter()
            .zip(&caps)
            .zip(&values)
            .filter(|((&c, _), &v)| c < kappa && v > 0)
            .map(|((&c, &cap), &v)| {
                let room = kappa.saturating_sub(c).saturating_sub(cap);
                room / v
            })
            .min()
            .unwrap_or(0);
        batch += extra;

        let slot = state.support.iter().position(|f| *f == flow);
        match slot {
            Some(i) => state.counts[i] += batch,
            None => {
                state.support.push(flow);
                state.counts.push(batch);
            }
        }
        for (c, &v) in state.covered.iter_mut().zip(&values) {
            *c += batch * v;
        }
        state.iterations += batch;
    }
}

/// Reduces the search union to a simple s-t path, scoring by the selection
/// gain when the union is not already one.
fn extract_cover_path(
    net: &Network,
    u: &UncertaintySet,
    intz: &Integerization,
    deficits: &[u64],
    union: &EdgeSet,
    caches: &mut RobustCaches,
) -> Result<SinglePathFlow, RobustError> {
    if let Ok(flow) = SinglePathFlow::new(net, union.to_vec()) {
        return Ok(flow);
    }
    let mut gain = CoverageGain {
        net,
        candidates: u.candidates(),
        scale: intz.scale,
        deficits: deficits.to_vec(),
        selection_cache: &mut caches.selection,
    };
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut stack = Vec::new();
    let mut visited = vec![false; net.node_count()];
    scan_paths(net, union, net.source(), &mut stack, &mut visited, &mut |edges| {
        let set = EdgeSet::from_indices(net.edge_count(), edges);
        let g = gain.evaluate(&set);
        if best.as_ref().is_none_or(|(b, _)| g > *b) {
            best = Some((g, edges.to_vec()));
        }
    });
    let (_, edges) = best.ok_or(GreedyError::Infeasible)?;
    SinglePathFlow::new(net, edges).map_err(|e| RobustError::Greedy(GreedyError::Network(e)))
}

fn scan_paths(
    net: &Network,
    union: &EdgeSet,
    node: usize,
    stack: &mut Vec<usize>,
    visited: &mut Vec<bool>,
    visit: &mut impl FnMut(&[usize]),
) {
    if node == net.sink() {
        visit(stack);
        return;
    }
    visited[node] = true;
    for &e in net.out_edges(node) {
        let v = net.edge(e).1;
        if union.contains(e) && !visited[v] {
            stack.push(e);
            scan_paths(net, union, v, stack, visited, visit);
            stack.pop();
        }
    }
    visited[node] = false;
}

/// Which targets the sweep visits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaGrid {
    /// Every integer target from 1 to the ceiling; the guarantee-preserving
    /// default.
    Full,
    /// Geometric subsampling by `factor` (> 1), endpoint included. Faster,
    /// and weakens the guarantee by up to the factor; experimental.
    Geometric { factor: f64 },
}

impl KappaGrid {
    fn values(&self, m: u64) -> Vec<u64> {
        match *self {
            KappaGrid::Full => (1..=m).collect(),
            KappaGrid::Geometric { factor } => {
                assert!(factor > 1.0, "geometric factor must exceed 1");
                let mut out = Vec::new();
                let mut k = 1u64;
                while k < m {
                    out.push(k);
                    k = ((k as f64 * factor).ceil() as u64).max(k + 1);
                }
                if m >= 1 {
                    out.push(m);
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RobustOptions {
    pub epsilon: f64,
    pub n0: u64,
    pub kappa_grid: KappaGrid,
}

impl Default for RobustOptions {
    fn default() -> Self {
        RobustOptions {
            epsilon: 0.5,
            n0: 8,
            kappa_grid: KappaGrid::Full,
        }
    }
}

/// Result of the robust approximation framework.
#[derive(Debug, Clone)]
pub struct RobustResult {
    pub strategy: InterdictionStrategy,
    /// Worst-case exact reduction of the strategy over the candidates.
    pub worst_case: f64,
    /// Target and selection count of the kept covering solution, when any
    /// target was coverable.
    pub best_kappa: Option<(u64, u64)>,
    /// Every feasible (target, selection count) pair the sweep examined.
    pub examined: Vec<(u64, u64)>,
    /// True when no target was coverable and the fallback point mass on the
    /// minimum-hop path was returned.
    pub degenerate: bool,
    pub integerization: Integerization,
    pub stats: RgStats,
}

/// Sweeps covering targets, keeps the solution maximizing target over
/// selection count (ties to the smaller target), and normalizes its counts
/// into a mixed strategy. The reported worst case uses exact, unscaled
/// reductions.
pub fn robust_interdict(
    net: &Network,
    u: &UncertaintySet,
    cfg: GreedyConfig,
    opts: RobustOptions,
) -> Result<RobustResult, RobustError> {
    let intz = integerize(net, u, opts.epsilon, opts.n0);
    let mut caches = RobustCaches::new(u);
    let mut best: Option<(u64, CoverState)> = None;
    let mut examined = Vec::new();
    for kappa in opts.kappa_grid.values(intz.m_scaled) {
        match solve_ilp_greedy(net, u, kappa, cfg, &intz, &mut caches)? {
            IlpOutcome::Solved(state) => {
                examined.push((kappa, state.total_count()));
                let better = match &best {
                    None => true,
                    // kappa / count > best_kappa / best_count, exactly.
                    Some((bk, bs)) => {
                        (kappa as u128) * (bs.total_count() as u128)
                            > (*bk as u128) * (state.total_count() as u128)
                    }
                };
                if better {
                    best = Some((kappa, state));
                }
            }
            IlpOutcome::InfeasibleAtKappa => {}
        }
    }
    let stats = caches.stats;
    match best {
        Some((kappa, state)) => {
            let total = state.total_count();
            let support: Vec<(SinglePathFlow, f64)> = state
                .support
                .iter()
                .cloned()
                .zip(state.counts.iter().map(|&c| c as f64 / total as f64))
                .collect();
            let strategy = InterdictionStrategy::new(support)?;
            let worst_case = worst_case_reduction(net, u, &strategy)?;
            Ok(RobustResult {
                strategy,
                worst_case,
                best_kappa: Some((kappa, total)),
                examined,
                degenerate: false,
                integerization: intz,
                stats,
            })
        }
        None => {
            let edges = shortest_path(net, net.source(), net.sink())
                .ok_or(GreedyError::Infeasible)?;
            let flow = SinglePathFlow::new(net, edges)
                .map_err(|e| RobustError::Greedy(GreedyError::Network(e)))?;
            let strategy = InterdictionStrategy::point_mass(flow);
            let worst_case = worst_case_reduction(net, u, &strategy)?;
            Ok(RobustResult {
                strategy,
                worst_case,
                best_kappa: None,
                examined,
                degenerate: true,
                integerization: intz,
                stats,
            })
        }
    }
}

/// Smallest expected exact reduction over the candidates.
pub fn worst_case_reduction(
    net: &Network,
    u: &UncertaintySet,
    strategy: &InterdictionStrategy,
) -> Result<f64, RobustError> {
    let sets = strategy.weighted_sets(net);
    let mut worst = f64::INFINITY;
    for paths in u.candidates() {
        worst = worst.min(lambda_strategy(net, paths, &sets)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::throughput::tests::example_network;

    fn example_uncertainty() -> (Network, UncertaintySet) {
        let (net, _) = example_network();
        // Candidates {p1, p2} and {p1, p3} over the same network.
        let c1 = UserPaths::new(&net, vec![vec![6, 7, 4], vec![0, 3, 8]], vec![3.0, 3.0]).unwrap();
        let c2 = UserPaths::new(&net, vec![vec![6, 7, 4], vec![5]], vec![3.0, 3.0]).unwrap();
        let u = UncertaintySet::new(vec![c1, c2]).unwrap();
        (net, u)
    }

    #[test]
    fn strategy_validation() {
        let (net, _) = example_network();
        let f = SinglePathFlow::new(&net, vec![0, 2, 6, 8]).unwrap();
        assert!(InterdictionStrategy::new(vec![(f.clone(), 0.5)]).is_err());
        assert!(InterdictionStrategy::new(vec![(f.clone(), 0.5), (f.clone(), 0.5)]).is_err());
        assert!(InterdictionStrategy::new(vec![(f, 1.0)]).is_ok());
    }

    #[test]
    fn coverage_gain_clamps() {
        // One candidate, shortfall 3, value 5: clamped to 3.
        assert_eq!(coverage_gain(&[0], 3, &[5]), 3);
        // Two candidates with shortfalls 2 and 4, values 3 and 1.
        assert_eq!(coverage_gain(&[0, 0], 2, &[3, 1]), 2 + 1);
        assert_eq!(coverage_gain(&[4, 0], 4, &[3, 1]), 1);
        // Fully covered contributes nothing.
        assert_eq!(coverage_gain(&[5, 5], 5, &[9, 9]), 0);
    }

    #[test]
    fn forced_scale_keeps_values() {
        let (_, u) = example_uncertainty();
        let intz = integerize_forced(&u, 0.5, 2, 1);
        assert_eq!(intz.scale, 1);
        assert_eq!(intz.m_unscaled, intz.m_scaled);
    }

    #[test]
    fn scaled_reduction_floors() {
        // A saturated single path of value 2.7 reduces by exactly 2.7;
        // scale 10 floors that to 27.
        let net = Network::new(2, vec![(0, 1)], vec![3.0], 0, 1, 3.0).unwrap();
        let paths = UserPaths::new(&net, vec![vec![0]], vec![2.7]).unwrap();
        let u = UncertaintySet::new(vec![paths.clone()]).unwrap();
        let intz = integerize_forced(&u, 0.5, 1, 10);
        let a = EdgeSet::from_indices(1, &[0]);
        assert_eq!(intz.scaled_lambda(&net, &paths, &a).unwrap(), 27);
    }

    #[test]
    fn fixed_point_satisfies_definition() {
        let (net, u) = example_uncertainty();
        let intz = integerize(&net, &u, 0.5, 2);
        let b = u.max_shared_edges(&net) as f64;
        let d = net.node_count() as f64;
        let formula = |x: f64| {
            (2.0 * (b + 1.0) * (x * intz.m_unscaled as f64).log2() * (d.log2().floor() + 1.0)
                / 0.5)
                .ceil()
        };
        let fixed = formula(intz.scale as f64);
        assert!(
            (intz.scale as f64 - fixed).abs() <= 1.0,
            "scale {} vs formula {}",
            intz.scale,
            fixed
        );
    }

    #[test]
    fn single_candidate_covering() {
        // One candidate; the best single path has a known scaled reduction,
        // so covering exactly that target takes one selection.
        let (net, _) = example_network();
        let paths =
            UserPaths::new(&net, vec![vec![6, 7, 4], vec![0, 3, 8]], vec![3.0, 3.0]).unwrap();
        let u = UncertaintySet::new(vec![paths]).unwrap();
        let intz = integerize_forced(&u, 0.5, 1, 1);
        let mut caches = RobustCaches::new(&u);
        // Best pure reduction against this candidate is 4 (verified by the
        // deterministic tests); target it directly.
        match solve_ilp_greedy(&net, &u, 4, GreedyConfig::new(2, 2), &intz, &mut caches).unwrap() {
            IlpOutcome::Solved(state) => {
                assert_eq!(state.total_count(), 1);
                assert_eq!(state.iterations, 1);
            }
            IlpOutcome::InfeasibleAtKappa => panic!("target 4 should be coverable"),
        }
    }

    #[test]
    fn infeasible_target_detected() {
        let (net, _) = example_network();
        let paths = UserPaths::new(&net, vec![vec![6, 7, 4]], vec![3.0]).unwrap();
        let u = UncertaintySet::new(vec![paths]).unwrap();
        let intz = integerize_forced(&u, 0.5, 1, 1);
        // Ceiling is 2 * ceil(3) = 6; a single flow reduces by at most 3, but
        // repeated selections still accumulate, so any target up to 6 is
        // coverable; all larger targets are outside the sweep by
        // construction. Check that a coverable target below max works and
        // leaves the accounting consistent.
        let mut caches = RobustCaches::new(&u);
        match solve_ilp_greedy(&net, &u, 6, GreedyConfig::new(2, 2), &intz, &mut caches).unwrap() {
            IlpOutcome::Solved(state) => {
                assert!(state.covered[0] >= 6);
                assert_eq!(state.iterations, state.total_count());
            }
            IlpOutcome::InfeasibleAtKappa => panic!("accumulation should cover 6"),
        }
    }

    #[test]
    fn robust_example_beats_pure_strategies() {
        let (net, u) = example_uncertainty();
        let result = robust_interdict(
            &net,
            &u,
            GreedyConfig::new(3, 2),
            RobustOptions {
                epsilon: 0.5,
                n0: 2,
                kappa_grid: KappaGrid::Full,
            },
        )
        .unwrap();
        assert!(!result.degenerate);
        let weights: f64 = result.strategy.support().iter().map(|(_, w)| w).sum();
        assert!((weights - 1.0).abs() < FLOW_TOL);
        // Best pure worst case on this instance is 2; the optimal mixed
        // strategy achieves 8/3. The framework should land in between, and
        // never beyond the optimum.
        assert!(result.worst_case <= 8.0 / 3.0 + 1e-9);
        assert!(result.worst_case > 0.0);
        // Guarantee floor against the exact maximin optimum 8/3.
        let n0 = 2.0f64;
        let b = u.max_shared_edges(&net) as f64;
        let m = result.integerization.m_scaled as f64;
        let d = net.node_count() as f64;
        let floor =
            n0 / ((n0 + 1.0) * (b + 1.0) * m.log2() * (d.log2().ceil() + 1.0)) * (8.0 / 3.0);
        assert!(
            result.worst_case >= floor - 1e-9,
            "worst case {} below floor {floor}",
            result.worst_case
        );
        // Selection invariant: kept ratio dominates every examined ratio.
        let (bk, bc) = result.best_kappa.unwrap();
        for &(k, c) in &result.examined {
            assert!(
                (bk as u128) * (c as u128) >= (k as u128) * (bc as u128),
                "kept {bk}/{bc} loses to {k}/{c}"
            );
        }
        // Support stays within the covering-derived cap.
        let cap = result.integerization.m_scaled as usize * u.len();
        assert!(result.strategy.support_size() <= cap);
        assert!(result.worst_case <= u
            .candidates()
            .iter()
            .map(|p| p.total_initial_value())
            .fold(f64::INFINITY, f64::min) + 1e-9);
    }

    #[test]
    fn single_candidate_collapses_toward_deterministic() {
        let (net, _) = example_network();
        let paths =
            UserPaths::new(&net, vec![vec![6, 7, 4], vec![0, 3, 8]], vec![3.0, 3.0]).unwrap();
        let u = UncertaintySet::new(vec![paths]).unwrap();
        let result = robust_interdict(
            &net,
            &u,
            GreedyConfig::new(2, 2),
            RobustOptions {
                epsilon: 0.5,
                n0: 1,
                kappa_grid: KappaGrid::Full,
            },
        )
        .unwrap();
        // The best pure reduction is 4; a single-candidate run should find a
        // strategy achieving it exactly (a point mass on the best path is
        // the best covering solution per selection).
        assert!((result.worst_case - 4.0).abs() < 1e-9);
    }

    #[test]
    fn worst_case_of_point_mass_is_min_lambda() {
        let (net, u) = example_uncertainty();
        let f = SinglePathFlow::new(&net, vec![1, 6, 8]).unwrap();
        let w = InterdictionStrategy::point_mass(f.clone());
        let worst = worst_case_reduction(&net, &u, &w).unwrap();
        let per: Vec<f64> = u
            .candidates()
            .iter()
            .map(|p| {
                lambda(&net, p, Interdiction::Edges(&f.edge_set(&net))).unwrap()
            })
            .collect();
        assert!((worst - per.iter().cloned().fold(f64::INFINITY, f64::min)).abs() < FLOW_TOL);
    }

    /// Literal greedy covering: one selection per iteration, no signature
    /// caching, no batching. The production solver must produce an
    /// identical state.
    fn literal_cover(
        net: &Network,
        u: &UncertaintySet,
        kappa: u64,
        cfg: GreedyConfig,
        intz: &Integerization,
    ) -> Option<(Vec<(SinglePathFlow, u64)>, Vec<u64>, u64)> {
        let xi = u.len();
        let mut covered = vec![0u64; xi];
        let mut counts: Vec<(SinglePathFlow, u64)> = Vec::new();
        let mut iterations = 0u64;
        loop {
            if covered.iter().all(|&c| c >= kappa) {
                return Some((counts, covered, iterations));
            }
            let deficits: Vec<u64> = covered.iter().map(|&c| kappa.saturating_sub(c)).collect();
            let mut fresh = vec![std::collections::HashMap::new(); xi];
            let union = {
                let mut gain = CoverageGain {
                    net,
                    candidates: u.candidates(),
                    scale: intz.scale,
                    deficits: deficits.clone(),
                    selection_cache: &mut fresh,
                };
                let x = EdgeSet::empty(net.edge_count());
                recursive_greedy(net, &mut gain, net.source(), net.sink(), &x, cfg)
                    .unwrap()
                    .0
            };
            let flow = SinglePathFlow::new(net, union.to_vec()).unwrap();
            let set = flow.edge_set(net);
            let values: Vec<u64> = u
                .candidates()
                .iter()
                .map(|p| intz.scaled_lambda(net, p, &set).unwrap())
                .collect();
            if coverage_gain(&covered, kappa, &values) == 0 {
                return None;
            }
            match counts.iter_mut().find(|(f, _)| *f == flow) {
                Some((_, n)) => *n += 1,
                None => counts.push((flow, 1)),
            }
            for (c, &v) in covered.iter_mut().zip(&values) {
                *c += v;
            }
            iterations += 1;
        }
    }

    #[test]
    fn batched_covering_matches_literal_iteration() {
        let (net, u) = example_uncertainty();
        let intz = integerize_forced(&u, 0.5, 2, 3);
        let cfg = GreedyConfig::new(3, 2);
        for kappa in [1u64, 2, 5, 9, 14, 20, 27, 36] {
            if kappa > intz.m_scaled {
                continue;
            }
            let mut caches = RobustCaches::new(&u);
            let fast = solve_ilp_greedy(&net, &u, kappa, cfg, &intz, &mut caches).unwrap();
            let slow = literal_cover(&net, &u, kappa, cfg, &intz);
            match (fast, slow) {
                (IlpOutcome::Solved(state), Some((counts, covered, iterations))) => {
                    assert_eq!(state.covered, covered, "target {kappa}");
                    assert_eq!(state.iterations, iterations, "target {kappa}");
                    assert_eq!(state.support.len(), counts.len(), "target {kappa}");
                    for (flow, n) in &counts {
                        let i = state
                            .support
                            .iter()
                            .position(|f| f == flow)
                            .expect("same support");
                        assert_eq!(state.counts[i], *n, "target {kappa}");
                    }
                }
                (IlpOutcome::InfeasibleAtKappa, None) => {}
                (IlpOutcome::Solved(_), None) => panic!("target {kappa}: literal infeasible"),
                (IlpOutcome::InfeasibleAtKappa, Some(_)) => {
                    panic!("target {kappa}: batched infeasible")
                }
            }
        }
    }

    #[test]
    fn zero_effect_strategy_reduces_nothing() {
        // Slack swallows the whole budget, so no interdiction hurts anyone.
        let net = Network::new(3, vec![(0, 1), (1, 2)], vec![5.0, 5.0], 0, 2, 2.0).unwrap();
        let paths = UserPaths::new(&net, vec![vec![1]], vec![2.0]).unwrap();
        let u = UncertaintySet::new(vec![paths]).unwrap();
        let f = SinglePathFlow::new(&net, vec![0, 1]).unwrap();
        let w = InterdictionStrategy::point_mass(f);
        let worst = worst_case_reduction(&net, &u, &w).unwrap();
        assert!(worst.abs() < FLOW_TOL);
    }

    #[test]
    fn geometric_grid_covers_endpoint() {
        let grid = KappaGrid::Geometric { factor: 1.5 }.values(100);
        assert_eq!(grid.first(), Some(&1));
        assert_eq!(grid.last(), Some(&100));
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }
}
