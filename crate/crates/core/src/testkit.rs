//! Instance generators and statistical property suites shared by the
//! integration tests and benchmarks.
//!
//! Every generator is seeded and deterministic. The check functions return
//! `Err` with a description of the first violation, so callers can assert
//! zero violations at whatever trial counts they need.

use crate::edgeset::EdgeSet;
use crate::greedy::ceil_log2;
use crate::lp::{self, LinearProgram, LpStatus, RowSense, VarBounds};
use crate::network::{decompose_flow, Flow, Network, UserPaths, FLOW_TOL};
use crate::robust::{coverage_gain, UncertaintySet};
use crate::scenario::{
    derive_seed, generate_scenario, random_layered_digraph, GenerateOptions, Scenario,
    ScenarioMode,
};
use crate::throughput::{
    lambda, lambda_bar, partition_user_edges, paths_disjoint, Interdiction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Smallest exponent i with base^i >= d; the recursion-depth requirement for
/// an optimal path of length d.
pub fn ceil_log_base(base: usize, d: usize) -> usize {
    assert!(base >= 2);
    let mut power = 1usize;
    let mut i = 0;
    while power < d {
        power = power.saturating_mul(base);
        i += 1;
    }
    i
}

/// A deterministic small scenario family: layered DAG, truncated-normal
/// capacities, user paths by random walks.
pub struct InstanceFamily {
    pub layers: usize,
    pub width: usize,
    pub edge_prob: f64,
    pub skip_prob: f64,
    pub k: usize,
    pub disjoint: bool,
    pub xi: Option<usize>,
    pub capacity_mean: f64,
    pub capacity_std: f64,
    pub max_st_paths: Option<u64>,
    pub min_st_paths: u64,
}

impl InstanceFamily {
    pub fn small_disjoint() -> Self {
        InstanceFamily {
            layers: 7,
            width: 3,
            edge_prob: 0.55,
            skip_prob: 0.15,
            k: 3,
            disjoint: true,
            xi: None,
            capacity_mean: 20.0,
            capacity_std: 3.0,
            max_st_paths: Some(2000),
            min_st_paths: 20,
        }
    }

    pub fn small_nondisjoint() -> Self {
        InstanceFamily {
            k: 4,
            disjoint: false,
            ..InstanceFamily::small_disjoint()
        }
    }

    pub fn generate(&self, seed: u64) -> Option<Scenario> {
        let graph = random_layered_digraph(
            self.layers,
            self.width,
            self.edge_prob,
            self.skip_prob,
            derive_seed(seed, "family-graph"),
        );
        generate_scenario(
            &graph,
            &GenerateOptions {
                k: self.k,
                disjoint: self.disjoint,
                xi: self.xi,
                seed: derive_seed(seed, "family-scenario"),
                capacity_mean: self.capacity_mean,
                capacity_std: self.capacity_std,
                max_st_paths: self.max_st_paths,
                min_st_paths: self.min_st_paths,
            },
        )
        .ok()
    }

    /// Generates scenarios from ascending seeds, keeping those `accept`
    /// admits, until `count` are collected. Panics after a bounded number of
    /// attempts so a broken filter fails loudly.
    pub fn collect(
        &self,
        count: usize,
        base_seed: u64,
        mut accept: impl FnMut(&Scenario) -> bool,
    ) -> Vec<Scenario> {
        let mut out = Vec::with_capacity(count);
        let mut seed = base_seed;
        let mut attempts = 0;
        while out.len() < count {
            attempts += 1;
            assert!(
                attempts < 200 * count as u64 + 1000,
                "instance filter rejected too many seeds"
            );
            if let Some(s) = self.generate(seed) {
                if accept(&s) {
                    out.push(s);
                }
            }
            seed += 1;
        }
        out
    }
}

pub fn deterministic_paths(s: &Scenario) -> &UserPaths {
    match &s.mode {
        ScenarioMode::Deterministic(p) => p,
        ScenarioMode::Robust(_) => panic!("expected a deterministic scenario"),
    }
}

pub fn robust_candidates(s: &Scenario) -> &UncertaintySet {
    match &s.mode {
        ScenarioMode::Robust(u) => u,
        ScenarioMode::Deterministic(_) => panic!("expected a robust scenario"),
    }
}

fn random_subset(rng: &mut ChaCha12Rng, m: usize, density: f64) -> EdgeSet {
    let mut set = EdgeSet::empty(m);
    for e in 0..m {
        if rng.random::<f64>() < density {
            set.insert(e);
        }
    }
    set
}

/// (A, B, e) with A inside B and e outside B; None when every edge landed
/// in B.
fn random_triple(rng: &mut ChaCha12Rng, m: usize) -> Option<(EdgeSet, EdgeSet, usize)> {
    let b = random_subset(rng, m, 0.35);
    let mut a = EdgeSet::empty(m);
    for e in b.iter() {
        if rng.random::<f64>() < 0.5 {
            a.insert(e);
        }
    }
    let outside: Vec<usize> = (0..m).filter(|&e| !b.contains(e)).collect();
    if outside.is_empty() {
        return None;
    }
    let e = outside[rng.random_range(0..outside.len())];
    Some((a, b, e))
}

/// Monotonicity and submodularity of the exact reduction on disjoint-path
/// instances, over `trials` random subset triples.
pub fn check_lambda_monotone_submodular(trials: usize, seed: u64) -> Result<(), String> {
    check_setfn_monotone_submodular(trials, seed, false, |net, paths, set| {
        lambda(net, paths, Interdiction::Edges(set)).expect("closed form cannot fail")
    })
}

/// Same two properties for the surrogate on non-disjoint instances.
pub fn check_lambda_bar_monotone_submodular(trials: usize, seed: u64) -> Result<(), String> {
    check_setfn_monotone_submodular(trials, seed, true, |net, paths, set| {
        lambda_bar(net, paths, set)
    })
}

fn check_setfn_monotone_submodular(
    trials: usize,
    seed: u64,
    nondisjoint: bool,
    f: impl Fn(&Network, &UserPaths, &EdgeSet) -> f64,
) -> Result<(), String> {
    let family = if nondisjoint {
        InstanceFamily::small_nondisjoint()
    } else {
        InstanceFamily::small_disjoint()
    };
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, "triples"));
    let mut done = 0;
    let mut instance_seed = seed;
    while done < trials {
        let Some(s) = family.generate(instance_seed) else {
            instance_seed += 1;
            continue;
        };
        instance_seed += 1;
        let paths = deterministic_paths(&s);
        if nondisjoint && paths_disjoint(&s.network, paths) {
            continue;
        }
        let m = s.network.edge_count();
        for _ in 0..25 {
            if done >= trials {
                break;
            }
            let Some((a, b, e)) = random_triple(&mut rng, m) else {
                continue;
            };
            let fa = f(&s.network, paths, &a);
            let fb = f(&s.network, paths, &b);
            if fa > fb + FLOW_TOL {
                return Err(format!(
                    "monotonicity violated: f(A) = {fa} > f(B) = {fb} (seed {instance_seed})"
                ));
            }
            let mut ae = a.clone();
            ae.insert(e);
            let mut be = b.clone();
            be.insert(e);
            let ga = f(&s.network, paths, &ae) - fa;
            let gb = f(&s.network, paths, &be) - fb;
            if ga < gb - FLOW_TOL {
                return Err(format!(
                    "submodularity violated: marginal at A = {ga} < at B = {gb} (seed {instance_seed})"
                ));
            }
            done += 1;
        }
    }
    Ok(())
}

/// Surrogate sandwich: exact <= surrogate <= (b+1) * exact on non-disjoint
/// instances.
pub fn check_sandwich(instances: usize, seed: u64) -> Result<(), String> {
    let family = InstanceFamily::small_nondisjoint();
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, "sandwich"));
    let mut done = 0;
    let mut instance_seed = seed;
    while done < instances {
        let Some(s) = family.generate(instance_seed) else {
            instance_seed += 1;
            continue;
        };
        instance_seed += 1;
        let paths = deterministic_paths(&s);
        let b = partition_user_edges(&s.network, paths).b as f64;
        let a = random_subset(&mut rng, s.network.edge_count(), 0.3);
        let exact = lambda(&s.network, paths, Interdiction::Edges(&a))
            .map_err(|e| format!("lambda failed: {e}"))?;
        let bar = lambda_bar(&s.network, paths, &a);
        if exact > bar + FLOW_TOL {
            return Err(format!(
                "lower sandwich violated: exact {exact} > surrogate {bar}"
            ));
        }
        if bar > (b + 1.0) * exact + FLOW_TOL {
            return Err(format!(
                "upper sandwich violated: surrogate {bar} > (b+1) * exact = {}",
                (b + 1.0) * exact
            ));
        }
        done += 1;
    }
    Ok(())
}

/// Monotonicity and submodularity of the covering gain on disjoint-path
/// uncertainty sets with integral data, where reductions are exactly
/// integral and no rounding noise can blur the comparison.
pub fn check_coverage_gain_monotone_submodular(trials: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, "cover"));
    let mut done = 0;
    let mut instance_seed = seed;
    while done < trials {
        let Some((net, u)) = integral_uncertainty_instance(instance_seed) else {
            instance_seed += 1;
            continue;
        };
        instance_seed += 1;
        let xi = u.len();
        let target = rng.random_range(1..=12u64);
        let covered: Vec<u64> = (0..xi).map(|_| rng.random_range(0..=target)).collect();
        let value_of = |set: &EdgeSet| -> Vec<u64> {
            u.candidates()
                .iter()
                .map(|p| {
                    lambda(&net, p, Interdiction::Edges(set)).expect("closed form") as u64
                })
                .collect()
        };
        let g = |set: &EdgeSet| coverage_gain(&covered, target, &value_of(set));
        for _ in 0..10 {
            if done >= trials {
                break;
            }
            let Some((a, b, e)) = random_triple(&mut rng, net.edge_count()) else {
                continue;
            };
            let ga = g(&a);
            let gb = g(&b);
            if ga > gb {
                return Err(format!("coverage gain monotonicity violated: {ga} > {gb}"));
            }
            let mut ae = a.clone();
            ae.insert(e);
            let mut be = b.clone();
            be.insert(e);
            let ma = g(&ae) - ga;
            let mb = g(&be) - gb;
            if ma < mb {
                return Err(format!(
                    "coverage gain submodularity violated: {ma} < {mb}"
                ));
            }
            done += 1;
        }
    }
    Ok(())
}

/// Disjoint-path uncertainty set with integer capacities, budget, and
/// initial values, so every reduction is an exact integer.
pub fn integral_uncertainty_instance(seed: u64) -> Option<(Network, UncertaintySet)> {
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, "integral"));
    let graph = random_layered_digraph(4, 3, 0.6, 0.2, derive_seed(seed, "integral-graph"));
    let caps: Vec<f64> = (0..graph.edges.len())
        .map(|_| rng.random_range(3..=9) as f64)
        .collect();
    let budget = caps.iter().cloned().fold(f64::INFINITY, f64::min);
    // Interdictor pair: first connected pair scanning in node order.
    let probe = Network::new(
        graph.node_count,
        graph.edges.clone(),
        caps.clone(),
        0,
        graph.node_count - 1,
        0.0,
    );
    let probe = match probe {
        Ok(n) => n,
        Err(_) => return None,
    };
    let mut pair = None;
    'outer: for u in 0..graph.node_count {
        let reach = probe.reachable_from(u);
        for (v, ok) in reach.iter().enumerate() {
            if *ok && v != u {
                pair = Some((u, v));
                break 'outer;
            }
        }
    }
    let (s, t) = pair?;
    let net = Network::new(graph.node_count, graph.edges.clone(), caps, s, t, budget).ok()?;

    let mut candidates = Vec::new();
    for _ in 0..2 {
        let mut paths = Vec::new();
        let mut used = vec![false; net.edge_count()];
        let mut lambdas = Vec::new();
        for _ in 0..40 {
            if paths.len() >= 2 {
                break;
            }
            let a = rng.random_range(0..net.node_count());
            let reach = net.reachable_from(a);
            let targets: Vec<usize> = (0..net.node_count())
                .filter(|&v| v != a && reach[v])
                .collect();
            if targets.is_empty() {
                continue;
            }
            let b = targets[rng.random_range(0..targets.len())];
            let path = walk(&net, a, b, &mut rng);
            if path.iter().any(|&e| used[e]) {
                continue;
            }
            let bottleneck = path
                .iter()
                .map(|&e| net.capacity(e))
                .fold(f64::INFINITY, f64::min) as u64;
            if bottleneck == 0 {
                continue;
            }
            let v = rng.random_range(1..=bottleneck) as f64;
            for &e in &path {
                used[e] = true;
            }
            paths.push(path);
            lambdas.push(v);
        }
        if paths.is_empty() {
            return None;
        }
        candidates.push(UserPaths::new(&net, paths, lambdas).ok()?);
    }
    UncertaintySet::new(candidates).ok().map(|u| (net, u))
}

fn walk(net: &Network, from: usize, to: usize, rng: &mut ChaCha12Rng) -> Vec<usize> {
    let reaches = net.reaching_to(to);
    let mut node = from;
    let mut path = Vec::new();
    while node != to {
        let options: Vec<usize> = net
            .out_edges(node)
            .iter()
            .copied()
            .filter(|&e| reaches[net.edge(e).1])
            .collect();
        let e = options[rng.random_range(0..options.len())];
        path.push(e);
        node = net.edge(e).1;
    }
    path
}

/// Random valid flows decompose and reconstruct edgewise.
pub fn check_flow_decomposition(flows: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, "flows"));
    let mut done = 0;
    let mut instance_seed = seed;
    while done < flows {
        let graph = random_layered_digraph(
            3 + (instance_seed % 3) as usize,
            2 + (instance_seed % 2) as usize,
            0.7,
            0.2,
            derive_seed(instance_seed, "flow-graph"),
        );
        instance_seed += 1;
        if graph.node_count > 15 {
            continue;
        }
        let caps: Vec<f64> = (0..graph.edges.len())
            .map(|_| 2.0 + 8.0 * rng.random::<f64>())
            .collect();
        let budget = caps.iter().cloned().fold(f64::INFINITY, f64::min);
        let Ok(net) = Network::new(
            graph.node_count,
            graph.edges.clone(),
            caps,
            0,
            graph.node_count - 1,
            budget,
        ) else {
            continue;
        };
        // Superpose a few random path flows, scaled into capacity.
        let mut f = Flow::zero(&net);
        for _ in 0..rng.random_range(1..4) {
            let path = walk(&net, net.source(), net.sink(), &mut rng);
            let headroom = path
                .iter()
                .map(|&e| net.capacity(e) - f.values[e])
                .fold(f64::INFINITY, f64::min);
            if headroom <= 0.0 {
                continue;
            }
            let w = headroom * rng.random::<f64>();
            for &e in &path {
                f.values[e] += w;
            }
        }
        if f.value(&net) <= FLOW_TOL {
            continue;
        }
        let parts = decompose_flow(&net, &f).map_err(|e| format!("decompose failed: {e}"))?;
        let mut sum = vec![0.0; net.edge_count()];
        for (w, path) in &parts {
            for &e in path {
                sum[e] += w;
            }
        }
        for (e, (&got, &want)) in sum.iter().zip(&f.values).enumerate() {
            if (got - want).abs() > FLOW_TOL {
                return Err(format!(
                    "reconstruction mismatch on edge {e}: {got} vs {want}"
                ));
            }
        }
        if parts.len() > net.edge_count() {
            return Err(format!(
                "{} components exceed the edge count {}",
                parts.len(),
                net.edge_count()
            ));
        }
        done += 1;
    }
    Ok(())
}

/// Strong duality on random feasible bounded maximization LPs.
pub fn check_lp_duality(count: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, "lps"));
    for trial in 0..count {
        let nvars = rng.random_range(1..=12);
        let nrows = rng.random_range(1..=12);
        let mut lp = LinearProgram::maximize(
            (0..nvars).map(|_| rng.random_range(-1.0..3.0)).collect(),
        );
        for _ in 0..nrows {
            let coeffs = (0..nvars).map(|_| rng.random_range(0.0..2.0)).collect();
            lp.push_row(coeffs, RowSense::Le, rng.random_range(1.0..10.0));
        }
        // Box row keeps the problem bounded; x = 0 keeps it feasible.
        lp.push_row(vec![1.0; nvars], RowSense::Le, rng.random_range(5.0..50.0));
        let sol = lp::solve(&lp).map_err(|e| format!("trial {trial}: {e}"))?;
        if sol.status != LpStatus::Optimal {
            return Err(format!("trial {trial}: unexpected status {:?}", sol.status));
        }
        let dual_obj: f64 = sol.dual.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum();
        let gap = (sol.objective_value - dual_obj).abs();
        if gap > 1e-6 * (1.0 + sol.objective_value.abs()) {
            return Err(format!(
                "trial {trial}: duality gap {gap} at objective {}",
                sol.objective_value
            ));
        }
    }
    Ok(())
}

/// Solver agreement with exhaustive vertex enumeration on 3-variable LPs
/// with nonnegativity and box rows.
pub fn check_lp_vertex_enumeration(count: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, "vertices"));
    for trial in 0..count {
        let mut lp = LinearProgram::maximize(
            (0..3).map(|_| rng.random_range(-1.0..3.0)).collect(),
        );
        for _ in 0..rng.random_range(1..=4) {
            let coeffs: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..2.0)).collect();
            lp.push_row(coeffs, RowSense::Le, rng.random_range(1.0..8.0));
        }
        lp.bounds = vec![VarBounds::interval(0.0, 10.0); 3];
        let sol = lp::solve(&lp).map_err(|e| format!("trial {trial}: {e}"))?;

        // All constraint planes: rows plus the six bound planes.
        let mut planes: Vec<(Vec<f64>, f64)> = lp
            .constraints
            .iter()
            .cloned()
            .zip(lp.rhs.iter().cloned())
            .collect();
        for j in 0..3 {
            let mut low = vec![0.0; 3];
            low[j] = -1.0;
            planes.push((low, 0.0));
            let mut high = vec![0.0; 3];
            high[j] = 1.0;
            planes.push((high, 10.0));
        }
        let feasible = |x: &[f64; 3]| {
            planes
                .iter()
                .all(|(a, b)| a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() <= b + 1e-7)
        };
        let mut best = f64::NEG_INFINITY;
        let np = planes.len();
        for i in 0..np {
            for j in (i + 1)..np {
                for k in (j + 1)..np {
                    if let Some(x) = solve3(&planes[i], &planes[j], &planes[k]) {
                        if feasible(&x) {
                            let v: f64 =
                                lp.objective.iter().zip(&x).map(|(c, xi)| c * xi).sum();
                            best = best.max(v);
                        }
                    }
                }
            }
        }
        if (sol.objective_value - best).abs() > 1e-6 * (1.0 + best.abs()) {
            return Err(format!(
                "trial {trial}: simplex {} vs vertex enumeration {best}",
                sol.objective_value
            ));
        }
    }
    Ok(())
}

fn solve3(
    p1: &(Vec<f64>, f64),
    p2: &(Vec<f64>, f64),
    p3: &(Vec<f64>, f64),
) -> Option<[f64; 3]> {
    let a = [
        [p1.0[0], p1.0[1], p1.0[2]],
        [p2.0[0], p2.0[1], p2.0[2]],
        [p3.0[0], p3.0[1], p3.0[2]],
    ];
    let b = [p1.1, p2.1, p3.1];
    let det = det3(&a);
    if det.abs() < 1e-9 {
        return None;
    }
    let mut x = [0.0; 3];
    for col in 0..3 {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        x[col] = det3(&m) / det;
    }
    Some(x)
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Closed-form residual throughput equals the LP value on disjoint
/// instances.
pub fn check_closed_form_vs_lp(instances: usize, seed: u64) -> Result<(), String> {
    let family = InstanceFamily::small_disjoint();
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, "closedform"));
    let mut done = 0;
    let mut instance_seed = seed;
    while done < instances {
        let Some(s) = family.generate(instance_seed) else {
            instance_seed += 1;
            continue;
        };
        instance_seed += 1;
        let paths = deterministic_paths(&s);
        if paths.is_empty() {
            continue;
        }
        let a = random_subset(&mut rng, s.network.edge_count(), 0.3);
        let closed = lambda(&s.network, paths, Interdiction::Edges(&a))
            .map_err(|e| format!("closed form failed: {e}"))?;
        let via_lp = lambda_via_lp(&s.network, paths, &a)
            .map_err(|e| format!("LP route failed: {e}"))?;
        if (closed - via_lp).abs() > 1e-7 {
            return Err(format!(
                "closed form {closed} vs LP {via_lp} (instance seed {instance_seed})"
            ));
        }
        done += 1;
    }
    Ok(())
}

/// LP evaluation of the reduction regardless of disjointness; the oracle
/// side of the closed-form agreement check.
pub fn lambda_via_lp(net: &Network, paths: &UserPaths, a: &EdgeSet) -> Result<f64, String> {
    use crate::throughput::residual_capacities;
    let residual = residual_capacities(net, Interdiction::Edges(a));
    let k = paths.len();
    let mut lp = LinearProgram::maximize(vec![1.0; k]);
    lp.bounds = (0..k)
        .map(|i| VarBounds::interval(0.0, paths.initial_value(i)))
        .collect();
    for (e, &res) in residual.iter().enumerate() {
        let coeffs: Vec<f64> = (0..k)
            .map(|i| if paths.path_set(i).contains(e) { 1.0 } else { 0.0 })
            .collect();
        if coeffs.iter().any(|&c| c > 0.0) {
            lp.push_row(coeffs, RowSense::Le, res.max(0.0));
        }
    }
    let sol = lp::solve(&lp).map_err(|e| e.to_string())?;
    if sol.status != LpStatus::Optimal {
        return Err(format!("unexpected status {:?}", sol.status));
    }
    Ok(paths.total_initial_value() - sol.objective_value)
}

/// Searches non-disjoint instances for an exact-reduction submodularity
/// violation. Reports what it found; the caller must not assert either way
/// on any particular instance.
pub fn search_lambda_submodularity_counterexample(
    trials: usize,
    seed: u64,
) -> (usize, Option<String>) {
    let family = InstanceFamily::small_nondisjoint();
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, "counterexample"));
    let mut scanned = 0;
    let mut instance_seed = seed;
    while scanned < trials {
        let Some(s) = family.generate(instance_seed) else {
            instance_seed += 1;
            continue;
        };
        instance_seed += 1;
        let paths = deterministic_paths(&s);
        if paths_disjoint(&s.network, paths) {
            continue;
        }
        for _ in 0..10 {
            if scanned >= trials {
                break;
            }
            let Some((a, b, e)) = random_triple(&mut rng, s.network.edge_count()) else {
                continue;
            };
            scanned += 1;
            let value = |set: &EdgeSet| {
                lambda(&s.network, paths, Interdiction::Edges(set)).expect("lp evaluates")
            };
            let mut ae = a.clone();
            ae.insert(e);
            let mut be = b.clone();
            be.insert(e);
            let ma = value(&ae) - value(&a);
            let mb = value(&be) - value(&b);
            if ma < mb - 1e-7 {
                return (
                    scanned,
                    Some(format!(
                        "marginal at A = {ma} < marginal at B = {mb} (instance seed {})",
                        instance_seed - 1
                    )),
                );
            }
        }
    }
    (scanned, None)
}

/// Depth needed so the guarantee of the two-anchor search applies to an
/// optimal path of length `d`.
pub fn guarantee_depth(d: usize) -> usize {
    ceil_log2(d)
}
