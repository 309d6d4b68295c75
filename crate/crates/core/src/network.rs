//! Capacitated-DAG data model, path and flow primitives, and graph utilities.

use crate::edgeset::EdgeSet;
use std::collections::VecDeque;
use thiserror::Error;

/// Absolute tolerance for flow arithmetic. Capacities are O(10^2), so double
/// precision leaves ample headroom at this resolution.
pub const FLOW_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("graph has a directed cycle")]
    CycleDetected,
    #[error("duplicate directed edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0}, {1}) endpoint out of range")]
    NodeOutOfRange(usize, usize),
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("source and sink must differ")]
    SourceEqualsSink,
    #[error("sink is not reachable from source")]
    SinkUnreachable,
    #[error("capacity of edge {0} is negative")]
    NegativeCapacity(usize),
    #[error("budget {budget} exceeds minimum edge capacity {min_capacity}")]
    BudgetExceedsMinCapacity { budget: f64, min_capacity: f64 },
    #[error("more than {cap} s-t paths exist (stopped at {reached})")]
    PathBudgetExceeded { cap: usize, reached: usize },
    #[error("not a flow: {0}")]
    NotAFlow(String),
    #[error("path {path}: {reason}")]
    InvalidPath { path: usize, reason: String },
    #[error("initial flows overload edge {edge}: {load} > capacity {capacity}")]
    InfeasibleInitialFlows { edge: usize, load: f64, capacity: f64 },
}

/// A raw simple directed graph, prior to capacity assignment. Produced by the
/// edge-list loader and consumed by the feedback-edge removal pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    pub node_count: usize,
    pub edges: Vec<(usize, usize)>,
}

/// A capacitated simple DAG with the interdictor's source, sink, and budget.
///
/// The edge list order is canonical and fixed at construction; all per-edge
/// vectors across the crate are indexed by it.
#[derive(Debug, Clone)]
pub struct Network {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    capacities: Vec<f64>,
    source: usize,
    sink: usize,
    budget: f64,
    // adjacency by edge index, sorted by head/tail for deterministic walks
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl Network {
    pub fn new(
        node_count: usize,
        edges: Vec<(usize, usize)>,
        capacities: Vec<f64>,
        source: usize,
        sink: usize,
        budget: f64,
    ) -> Result<Self, NetworkError> {
        assert_eq!(edges.len(), capacities.len(), "one capacity per edge");
        if source == sink {
            return Err(NetworkError::SourceEqualsSink);
        }
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &edges {
            if u >= node_count || v >= node_count {
                return Err(NetworkError::NodeOutOfRange(u, v));
            }
            if u == v {
                return Err(NetworkError::SelfLoop(u));
            }
            if !seen.insert((u, v)) {
                return Err(NetworkError::DuplicateEdge(u, v));
            }
        }
        for (i, &c) in capacities.iter().enumerate() {
            if c.is_nan() || c < 0.0 {
                return Err(NetworkError::NegativeCapacity(i));
            }
        }
        if let Some(min_c) = capacities.iter().cloned().reduce(f64::min) {
            if budget > min_c + FLOW_TOL {
                return Err(NetworkError::BudgetExceedsMinCapacity {
                    budget,
                    min_capacity: min_c,
                });
            }
        }
        let mut out_edges = vec![Vec::new(); node_count];
        let mut in_edges = vec![Vec::new(); node_count];
        for (i, &(u, v)) in edges.iter().enumerate() {
            out_edges[u].push(i);
            in_edges[v].push(i);
        }
        for list in out_edges.iter_mut() {
            list.sort_by_key(|&i| edges[i].1);
        }
        for list in in_edges.iter_mut() {
            list.sort_by_key(|&i| edges[i].0);
        }
        let net = Network {
            node_count,
            edges,
            capacities,
            source,
            sink,
            budget,
            out_edges,
            in_edges,
        };
        topological_order(&net)?;
        if !net.reachable_from(source)[sink] {
            return Err(NetworkError::SinkUnreachable);
        }
        Ok(net)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> (usize, usize) {
        self.edges[index]
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    pub fn capacity(&self, index: usize) -> f64 {
        self.capacities[index]
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// Out-edge indices of `node`, ascending by head.
    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out_edges[node]
    }

    /// In-edge indices of `node`, ascending by tail.
    pub fn in_edges(&self, node: usize) -> &[usize] {
        &self.in_edges[node]
    }

    /// Nodes reachable from `from` (including itself).
    pub fn reachable_from(&self, from: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            for &e in &self.out_edges[u] {
                let v = self.edges[e].1;
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Nodes that can reach `to` (including itself).
    pub fn reaching_to(&self, to: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([to]);
        seen[to] = true;
        while let Some(u) = queue.pop_front() {
            for &e in &self.in_edges[u] {
                let v = self.edges[e].0;
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Number of simple `from`-`to` paths, computed by dynamic programming
    /// over the topological order. Saturates at `u64::MAX`.
    pub fn count_paths(&self, from: usize, to: usize) -> u64 {
        let order = topological_order(self).expect("network is acyclic");
        let mut count = vec![0u64; self.node_count];
        count[from] = 1;
        for &u in &order {
            if count[u] == 0 {
                continue;
            }
            for &e in &self.out_edges[u] {
                let v = self.edges[e].1;
                count[v] = count[v].saturating_add(count[u]);
            }
        }
        count[to]
    }

    /// Orders `edge_set` into a node walk if it forms one simple directed
    /// path, returning the traversed node sequence.
    pub fn order_path_edges(&self, edge_set: &[usize]) -> Option<Vec<usize>> {
        if edge_set.is_empty() {
            return None;
        }
        let mut out_deg = std::collections::HashMap::new();
        let mut in_deg = std::collections::HashMap::new();
        let mut next = std::collections::HashMap::new();
        for &e in edge_set {
            let (u, v) = self.edges[e];
            *out_deg.entry(u).or_insert(0) += 1;
            *in_deg.entry(v).or_insert(0) += 1;
            if next.insert(u, e).is_some() {
                return None;
            }
        }
        if out_deg.values().any(|&d| d > 1) || in_deg.values().any(|&d| d > 1) {
            return None;
        }
        let mut starts = out_deg
            .keys()
            .filter(|u| !in_deg.contains_key(u))
            .collect::<Vec<_>>();
        if starts.len() != 1 {
            return None;
        }
        let mut node = *starts.pop().unwrap();
        let mut nodes = vec![node];
        let mut used = 0;
        while let Some(&e) = next.get(&node) {
            node = self.edges[e].1;
            nodes.push(node);
            used += 1;
            if used > edge_set.len() {
                return None;
            }
        }
        if used == edge_set.len() {
            Some(nodes)
        } else {
            None
        }
    }
}

/// User paths with their initial flow values. Paths are stored as edge-index
/// lists in traversal order.
#[derive(Debug, Clone)]
pub struct UserPaths {
    paths: Vec<Vec<usize>>,
    initial_values: Vec<f64>,
    path_sets: Vec<EdgeSet>,
}

impl UserPaths {
    /// Validates that every path's edge set induces a connected simple
    /// directed path and that the initial flows respect every capacity.
    pub fn new(
        net: &Network,
        paths: Vec<Vec<usize>>,
        initial_values: Vec<f64>,
    ) -> Result<Self, NetworkError> {
        assert_eq!(paths.len(), initial_values.len(), "one value per path");
        let mut ordered = Vec::with_capacity(paths.len());
        for (i, path) in paths.iter().enumerate() {
            if path.is_empty() {
                return Err(NetworkError::InvalidPath {
                    path: i,
                    reason: "empty edge set".into(),
                });
            }
            if path.iter().any(|&e| e >= net.edge_count()) {
                return Err(NetworkError::InvalidPath {
                    path: i,
                    reason: "edge index out of range".into(),
                });
            }
            match net.order_path_edges(path) {
                Some(_) => {
                    let mut p = path.clone();
                    sort_edges_along_path(net, &mut p);
                    ordered.push(p);
                }
                None => {
                    return Err(NetworkError::InvalidPath {
                        path: i,
                        reason: "edges do not form one simple directed path".into(),
                    })
                }
            }
        }
        for (i, &v) in initial_values.iter().enumerate() {
            if v.is_nan() || v < 0.0 {
                return Err(NetworkError::InvalidPath {
                    path: i,
                    reason: format!("negative initial value {v}"),
                });
            }
        }
        let mut load = vec![0.0; net.edge_count()];
        for (path, &v) in ordered.iter().zip(&initial_values) {
            for &e in path {
                load[e] += v;
            }
        }
        for (e, &l) in load.iter().enumerate() {
            if l > net.capacity(e) + FLOW_TOL {
                return Err(NetworkError::InfeasibleInitialFlows {
                    edge: e,
                    load: l,
                    capacity: net.capacity(e),
                });
            }
        }
        let path_sets = ordered
            .iter()
            .map(|p| EdgeSet::from_indices(net.edge_count(), p))
            .collect();
        Ok(UserPaths {
            paths: ordered,
            initial_values,
            path_sets,
        })
    }

    pub fn empty() -> Self {
        UserPaths {
            paths: Vec::new(),
            initial_values: Vec::new(),
            path_sets: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Edge indices of path `i` in traversal order.
    pub fn path(&self, i: usize) -> &[usize] {
        &self.paths[i]
    }

    pub fn paths(&self) -> &[Vec<usize>] {
        &self.paths
    }

    pub fn path_set(&self, i: usize) -> &EdgeSet {
        &self.path_sets[i]
    }

    pub fn initial_value(&self, i: usize) -> f64 {
        self.initial_values[i]
    }

    pub fn initial_values(&self) -> &[f64] {
        &self.initial_values
    }

    pub fn total_initial_value(&self) -> f64 {
        self.initial_values.iter().sum()
    }
}

fn sort_edges_along_path(net: &Network, edges: &mut [usize]) {
    let nodes = net
        .order_path_edges(edges)
        .expect("caller validated the path");
    let pos: std::collections::HashMap<usize, usize> =
        nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    edges.sort_by_key(|&e| pos[&net.edge(e).0]);
}

/// An edge-indexed flow vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    pub values: Vec<f64>,
}

impl Flow {
    pub fn zero(net: &Network) -> Self {
        Flow {
            values: vec![0.0; net.edge_count()],
        }
    }

    /// Total flow out of the source.
    pub fn value(&self, net: &Network) -> f64 {
        net.out_edges(net.source())
            .iter()
            .map(|&e| self.values[e])
            .sum()
    }
}

/// An s-t flow carrying the full budget along exactly one simple path,
/// represented by its edge set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SinglePathFlow {
    edges: Vec<usize>,
}

impl SinglePathFlow {
    /// Checks that `edges` forms one simple source-sink path.
    pub fn new(net: &Network, edges: Vec<usize>) -> Result<Self, NetworkError> {
        let nodes = net.order_path_edges(&edges).ok_or(NetworkError::InvalidPath {
            path: 0,
            reason: "edges do not form one simple directed path".into(),
        })?;
        if nodes.first() != Some(&net.source()) || nodes.last() != Some(&net.sink()) {
            return Err(NetworkError::InvalidPath {
                path: 0,
                reason: "path does not run from source to sink".into(),
            });
        }
        let mut ordered = edges;
        sort_edges_along_path(net, &mut ordered);
        Ok(SinglePathFlow { edges: ordered })
    }

    /// Edge indices in traversal order.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn edge_set(&self, net: &Network) -> EdgeSet {
        EdgeSet::from_indices(net.edge_count(), &self.edges)
    }

    /// The flow vector with the budget on every path edge.
    pub fn to_flow(&self, net: &Network) -> Flow {
        let mut f = Flow::zero(net);
        for &e in &self.edges {
            f.values[e] = net.budget();
        }
        f
    }
}

/// Kahn's algorithm with a smallest-index tie-break, so the order is
/// deterministic for a given edge list.
pub fn topological_order(net: &Network) -> Result<Vec<usize>, NetworkError> {
    kahn_order(net.node_count, net.edges())
}

fn kahn_order(node_count: usize, edges: &[(usize, usize)]) -> Result<Vec<usize>, NetworkError> {
    let mut in_deg = vec![0usize; node_count];
    let mut out = vec![Vec::new(); node_count];
    for &(u, v) in edges {
        in_deg[v] += 1;
        out[u].push(v);
    }
    let mut ready: std::collections::BTreeSet<usize> = (0..node_count)
        .filter(|&v| in_deg[v] == 0)
        .collect();
    let mut order = Vec::with_capacity(node_count);
    while let Some(&u) = ready.iter().next() {
        ready.remove(&u);
        order.push(u);
        for &v in &out[u] {
            in_deg[v] -= 1;
            if in_deg[v] == 0 {
                ready.insert(v);
            }
        }
    }
    if order.len() == node_count {
        Ok(order)
    } else {
        Err(NetworkError::CycleDetected)
    }
}

/// Minimum-hop directed path from `u1` to `u2` as an edge-index list, or
/// `None` if unreachable. Ties are broken by the smallest predecessor node
/// index, so the result is deterministic. `u1 == u2` yields an empty path.
pub fn shortest_path(net: &Network, u1: usize, u2: usize) -> Option<Vec<usize>> {
    if u1 == u2 {
        return Some(Vec::new());
    }
    let mut dist = vec![usize::MAX; net.node_count()];
    dist[u1] = 0;
    let mut queue = VecDeque::from([u1]);
    while let Some(u) = queue.pop_front() {
        if u == u2 {
            break;
        }
        for &e in net.out_edges(u) {
            let v = net.edge(e).1;
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    if dist[u2] == usize::MAX {
        return None;
    }
    // Walk back choosing the smallest-index predecessor on a shortest path.
    let mut path = Vec::with_capacity(dist[u2]);
    let mut node = u2;
    while node != u1 {
        let d = dist[node];
        let &e = net
            .in_edges(node)
            .iter()
            .find(|&&e| dist[net.edge(e).0] == d - 1)
            .expect("BFS predecessor exists");
        path.push(e);
        node = net.edge(e).0;
    }
    path.reverse();
    Some(path)
}

/// All simple source-sink paths in deterministic DFS order (neighbors in
/// ascending node index), as edge-index lists in traversal order.
///
/// Fails with `PathBudgetExceeded` once more than `cap` paths are found.
pub fn enumerate_st_paths(net: &Network, cap: usize) -> Result<Vec<Vec<usize>>, NetworkError> {
    assert!(cap >= 1, "cap must be at least 1");
    let mut paths = Vec::new();
    let mut stack = Vec::new();
    let reaches_sink = net.reaching_to(net.sink());
    dfs_paths(net, net.source(), &reaches_sink, &mut stack, &mut paths, cap)?;
    Ok(paths)
}

fn dfs_paths(
    net: &Network,
    node: usize,
    reaches_sink: &[bool],
    stack: &mut Vec<usize>,
    paths: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<(), NetworkError> {
    if node == net.sink() {
        if paths.len() == cap {
            return Err(NetworkError::PathBudgetExceeded {
                cap,
                reached: cap + 1,
            });
        }
        paths.push(stack.clone());
        return Ok(());
    }
    for &e in net.out_edges(node) {
        let v = net.edge(e).1;
        if reaches_sink[v] {
            stack.push(e);
            dfs_paths(net, v, reaches_sink, stack, paths, cap)?;
            stack.pop();
        }
    }
    Ok(())
}

/// Validation outcome for a flow vector: capacity, conservation, and a value
/// bound, all at `FLOW_TOL`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDiagnostics {
    pub valid: bool,
    pub capacity_violations: Vec<usize>,
    pub conservation_violations: Vec<usize>,
    pub value: f64,
    pub value_within_bound: bool,
}

pub fn validate_flow(net: &Network, f: &Flow, bound: f64) -> FlowDiagnostics {
    let mut capacity_violations = Vec::new();
    for (e, &v) in f.values.iter().enumerate() {
        if v < -FLOW_TOL || v > net.capacity(e) + FLOW_TOL {
            capacity_violations.push(e);
        }
    }
    let mut conservation_violations = Vec::new();
    for node in 0..net.node_count() {
        if node == net.source() || node == net.sink() {
            continue;
        }
        let inflow: f64 = net.in_edges(node).iter().map(|&e| f.values[e]).sum();
        let outflow: f64 = net.out_edges(node).iter().map(|&e| f.values[e]).sum();
        if (inflow - outflow).abs() > FLOW_TOL {
            conservation_violations.push(node);
        }
    }
    let value = f.value(net);
    let value_within_bound = value <= bound + FLOW_TOL;
    FlowDiagnostics {
        valid: capacity_violations.is_empty()
            && conservation_violations.is_empty()
            && value_within_bound,
        capacity_violations,
        conservation_violations,
        value,
        value_within_bound,
    }
}

/// Decomposes a positive-valued flow into weighted simple s-t paths whose
/// weighted indicator sum reconstructs the flow edgewise.
///
/// Deterministic peeling: at every step the support edge with the smallest
/// flow value (ties by edge index) is the bottleneck; the lexicographically
/// smallest support path through it is peeled at that weight, which zeroes
/// the bottleneck edge, so at most `m` components emerge.
pub fn decompose_flow(net: &Network, f: &Flow) -> Result<Vec<(f64, Vec<usize>)>, NetworkError> {
    let diag = validate_flow(net, f, f64::INFINITY);
    if !diag.valid {
        return Err(NetworkError::NotAFlow(format!(
            "capacity violations {:?}, conservation violations {:?}",
            diag.capacity_violations, diag.conservation_violations
        )));
    }
    let mut residual = f.values.clone();
    let mut parts = Vec::new();
    loop {
        let bottleneck = residual
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > FLOW_TOL)
            .min_by(|(i, a), (j, b)| a.partial_cmp(b).unwrap().then(i.cmp(j)))
            .map(|(i, _)| i);
        let Some(pivot) = bottleneck else { break };
        let weight = residual[pivot];
        let (pu, pv) = net.edge(pivot);
        let prefix = support_path(net, &residual, net.source(), pu)
            .ok_or_else(|| NetworkError::NotAFlow("support edge not on any s-t path".into()))?;
        let suffix = support_path(net, &residual, pv, net.sink())
            .ok_or_else(|| NetworkError::NotAFlow("support edge not on any s-t path".into()))?;
        let mut path = prefix;
        path.push(pivot);
        path.extend(suffix);
        for &e in &path {
            residual[e] -= weight;
            if residual[e] < FLOW_TOL {
                residual[e] = 0.0;
            }
        }
        parts.push((weight, path));
    }
    Ok(parts)
}

/// Lexicographically smallest path from `from` to `to` whose edges all carry
/// residual support.
fn support_path(net: &Network, residual: &[f64], from: usize, to: usize) -> Option<Vec<usize>> {
    // In a DAG, greedily taking the smallest-head supported out-edge that can
    // still reach `to` through support yields the lex-smallest support path.
    let mut can_reach = vec![false; net.node_count()];
    can_reach[to] = true;
    let order = topological_order(net).expect("network is acyclic");
    for &u in order.iter().rev() {
        if u == to {
            continue;
        }
        for &e in net.out_edges(u) {
            if residual[e] > FLOW_TOL && can_reach[net.edge(e).1] {
                can_reach[u] = true;
                break;
            }
        }
    }
    if !can_reach[from] {
        return None;
    }
    let mut path = Vec::new();
    let mut node = from;
    while node != to {
        let &e = net
            .out_edges(node)
            .iter()
            .find(|&&e| residual[e] > FLOW_TOL && can_reach[net.edge(e).1])?;
        path.push(e);
        node = net.edge(e).1;
    }
    Some(path)
}

/// Removes a feedback edge set from a raw directed graph so the remainder is
/// acyclic: DFS from every root in ascending index order deletes back edges,
/// then a restore pass re-adds any removed edge that no longer closes a
/// cycle. The result is inclusion-minimal, not minimum-cardinality.
pub fn remove_feedback_edges(graph: &DiGraph) -> (DiGraph, Vec<(usize, usize)>) {
    let n = graph.node_count;
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (head, edge idx)
    for (i, &(u, v)) in graph.edges.iter().enumerate() {
        out[u].push((v, i));
    }
    for list in out.iter_mut() {
        list.sort();
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Gray,
        Black,
    }
    let mut mark = vec![Mark::White; n];
    let mut removed = vec![false; graph.edges.len()];
    // Iterative DFS; edges to gray nodes are back edges.
    for root in 0..n {
        if mark[root] != Mark::White {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Gray;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if *next < out[u].len() {
                let (v, e) = out[u][*next];
                *next += 1;
                match mark[v] {
                    Mark::Gray => removed[e] = true,
                    Mark::White => {
                        mark[v] = Mark::Gray;
                        stack.push((v, 0));
                    }
                    Mark::Black => {}
                }
            } else {
                mark[u] = Mark::Black;
                stack.pop();
            }
        }
    }

    // Restore pass: re-add any removed edge that keeps the graph acyclic, in
    // edge-list order, so no removed edge could be put back afterwards.
    let kept_edges = |removed: &[bool]| -> Vec<(usize, usize)> {
        graph
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !removed[*i])
            .map(|(_, &e)| e)
            .collect()
    };
    for i in 0..graph.edges.len() {
        if !removed[i] {
            continue;
        }
        removed[i] = false;
        if kahn_order(n, &kept_edges(&removed)).is_err() {
            removed[i] = true;
        }
    }

    let removed_list: Vec<(usize, usize)> = graph
        .edges
        .iter()
        .enumerate()
        .filter(|(i, _)| removed[*i])
        .map(|(_, &e)| e)
        .collect();
    (
        DiGraph {
            node_count: n,
            edges: kept_edges(&removed),
        },
        removed_list,
    )
}
