//! Scenario ingestion, random generation, the satisfiability-based hard
//! instance generator, and canonical JSON serialization.
//!
//! A scenario bundles a network with either one known user-path set or an
//! uncertainty set of candidates, plus the metadata needed to reproduce it.
//! The JSON encoding is canonical: fixed field order, sorted parameter keys,
//! and floats printed with 17 significant digits so round trips are exact
//! and golden files are byte-stable.

use crate::network::{remove_feedback_edges, DiGraph, Network, NetworkError, UserPaths};
use crate::robust::{RobustError, UncertaintySet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde_json::Value;
use std::collections::BTreeMap;
use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("graph is not acyclic")]
    NotAcyclic,
    #[error("generation failed: {0}")]
    GenerationFailed(String),
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Robust(#[from] RobustError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn schema_err(pointer: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema {
        pointer: pointer.to_string(),
        message: message.into(),
    }
}

/// Reproducibility record carried by every scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metadata {
    pub id: String,
    pub generator: String,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub enum ScenarioMode {
    Deterministic(UserPaths),
    Robust(UncertaintySet),
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub network: Network,
    pub mode: ScenarioMode,
    pub metadata: Metadata,
}

impl Scenario {
    /// Candidate user-path sets, one for deterministic scenarios.
    pub fn candidates(&self) -> Vec<&UserPaths> {
        match &self.mode {
            ScenarioMode::Deterministic(p) => vec![p],
            ScenarioMode::Robust(u) => u.candidates().iter().collect(),
        }
    }

    pub fn is_robust(&self) -> bool {
        matches!(self.mode, ScenarioMode::Robust(_))
    }
}

// ---------------------------------------------------------------------------
// Edge-list ingestion
// ---------------------------------------------------------------------------

/// A parsed edge list: node ids remapped to dense 0-based indices in
/// first-appearance order, duplicate directed edges dropped and counted.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: DiGraph,
    pub duplicates_dropped: usize,
}

/// Parses tab- or space-separated "tail head" lines; lines starting with
/// `#` are comments.
pub fn load_edgelist(reader: impl BufRead) -> Result<LoadedGraph, ScenarioError> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut duplicates = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let (a, b) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(ScenarioError::Parse {
                    line: line_no,
                    message: format!("expected two fields, got {trimmed:?}"),
                })
            }
        };
        let parse = |tok: &str| -> Result<u64, ScenarioError> {
            tok.parse().map_err(|_| ScenarioError::Parse {
                line: line_no,
                message: format!("non-integer node id {tok:?}"),
            })
        };
        let (ta, hb) = (parse(a)?, parse(b)?);
        let next = ids.len();
        let tail = *ids.entry(ta).or_insert(next);
        let next = ids.len();
        let head = *ids.entry(hb).or_insert(next);
        if seen.insert((tail, head)) {
            edges.push((tail, head));
        } else {
            duplicates += 1;
        }
    }
    Ok(LoadedGraph {
        graph: DiGraph {
            node_count: ids.len(),
            edges,
        },
        duplicates_dropped: duplicates,
    })
}

/// Acyclic skeleton emitted by ingestion: the kept graph and what the
/// feedback pass removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    pub graph: DiGraph,
    pub removed_edges: Vec<(usize, usize)>,
    pub duplicates_dropped: usize,
}

pub fn ingest_edgelist(reader: impl BufRead) -> Result<Skeleton, ScenarioError> {
    let loaded = load_edgelist(reader)?;
    let (dag, removed) = remove_feedback_edges(&loaded.graph);
    Ok(Skeleton {
        graph: dag,
        removed_edges: removed,
        duplicates_dropped: loaded.duplicates_dropped,
    })
}

// ---------------------------------------------------------------------------
// Random generation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateOptions {
    pub k: usize,
    pub disjoint: bool,
    /// Number of candidate path sets; absent means a deterministic scenario.
    pub xi: Option<usize>,
    pub seed: u64,
    pub capacity_mean: f64,
    pub capacity_std: f64,
    /// Resample the interdictor pair until its s-t path count fits, keeping
    /// brute-force verification tractable.
    pub max_st_paths: Option<u64>,
    /// Lower bound on the interdictor pair's s-t path count; screens out
    /// near-trivial pairs.
    pub min_st_paths: u64,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions {
            k: 3,
            disjoint: true,
            xi: None,
            seed: 0,
            capacity_mean: 20.0,
            capacity_std: 3.0,
            max_st_paths: None,
            min_st_paths: 1,
        }
    }
}

/// Stable labeled seed derivation (FNV-1a over the label and seed bytes),
/// so every randomized subsystem draws from its own stream of one user
/// seed.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for byte in label.bytes().chain(seed.to_le_bytes()) {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn sample_normal(rng: &mut ChaCha12Rng, mean: f64, std: f64) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    mean + std * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn digraph_path_counts(graph: &DiGraph, order: &[usize], from: usize) -> Vec<u64> {
    let mut out = vec![Vec::new(); graph.node_count];
    for &(u, v) in &graph.edges {
        out[u].push(v);
    }
    let mut count = vec![0u64; graph.node_count];
    count[from] = 1;
    for &u in order {
        if count[u] == 0 {
            continue;
        }
        for &v in &out[u] {
            count[v] = count[v].saturating_add(count[u]);
        }
    }
    count
}

fn digraph_topo(graph: &DiGraph) -> Result<Vec<usize>, ScenarioError> {
    let mut in_deg = vec![0usize; graph.node_count];
    let mut out = vec![Vec::new(); graph.node_count];
    for &(u, v) in &graph.edges {
        in_deg[v] += 1;
        out[u].push(v);
    }
    let mut ready: std::collections::BTreeSet<usize> = (0..graph.node_count)
        .filter(|&v| in_deg[v] == 0)
        .collect();
    let mut order = Vec::with_capacity(graph.node_count);
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
    if order.len() == graph.node_count {
        Ok(order)
    } else {
        Err(ScenarioError::NotAcyclic)
    }
}

/// Samples a scenario on an acyclic graph: truncated-normal capacities, the
/// budget pinned to the minimum capacity, a random connected interdictor
/// pair, and user paths drawn by random walks between random connected
/// pairs. Initial path values are drawn uniformly in (0, bottleneck] and
/// jointly rescaled into feasibility; the scheme is recorded in metadata.
pub fn generate_scenario(
    graph: &DiGraph,
    opts: &GenerateOptions,
) -> Result<Scenario, ScenarioError> {
    let order = digraph_topo(graph)?;
    let n = graph.node_count;
    if n < 2 || graph.edges.is_empty() {
        return Err(ScenarioError::GenerationFailed(
            "graph too small to host a scenario".into(),
        ));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(opts.seed, "scenario-generate"));

    let mut capacities = Vec::with_capacity(graph.edges.len());
    for _ in 0..graph.edges.len() {
        let mut c = sample_normal(&mut rng, opts.capacity_mean, opts.capacity_std);
        while c < 1.0 {
            c = sample_normal(&mut rng, opts.capacity_mean, opts.capacity_std);
        }
        capacities.push(c);
    }
    let budget = capacities.iter().cloned().fold(f64::INFINITY, f64::min);

    // All connected ordered pairs, and those eligible for the interdictor.
    let mut connected = Vec::new();
    let mut eligible = Vec::new();
    for u in 0..n {
        let counts = digraph_path_counts(graph, &order, u);
        for (v, &c) in counts.iter().enumerate() {
            if v != u && c >= 1 {
                connected.push((u, v));
                let fits = c >= opts.min_st_paths.max(1)
                    && opts.max_st_paths.is_none_or(|cap| c <= cap);
                if fits {
                    eligible.push((u, v));
                }
            }
        }
    }
    if eligible.is_empty() {
        return Err(ScenarioError::GenerationFailed(
            "no connected pair satisfies the path-count cap".into(),
        ));
    }
    let (source, sink) = eligible[rng.random_range(0..eligible.len())];
    let network = Network::new(n, graph.edges.clone(), capacities, source, sink, budget)?;

    let group_count = opts.xi.unwrap_or(1).max(1);
    let mut groups = Vec::with_capacity(group_count);
    for _ in 0..group_count {
        groups.push(sample_path_group(&network, &connected, opts, &mut rng)?);
    }

    let mut params = BTreeMap::new();
    params.insert("k".into(), opts.k.to_string());
    params.insert("disjoint".into(), opts.disjoint.to_string());
    params.insert(
        "xi".into(),
        opts.xi.map(|x| x.to_string()).unwrap_or_else(|| "-".into()),
    );
    params.insert("capacity_mean".into(), format!("{}", opts.capacity_mean));
    params.insert("capacity_std".into(), format!("{}", opts.capacity_std));
    params.insert(
        "max_st_paths".into(),
        opts.max_st_paths
            .map(|x| x.to_string())
            .unwrap_or_else(|| "-".into()),
    );
    params.insert("min_st_paths".into(), opts.min_st_paths.to_string());
    params.insert(
        "lambda_law".into(),
        "uniform-in-bottleneck-jointly-rescaled".into(),
    );
    let metadata = Metadata {
        id: format!(
            "gen-seed{}-k{}-{}{}",
            opts.seed,
            opts.k,
            if opts.disjoint { "dj" } else { "nd" },
            opts.xi.map(|x| format!("-xi{x}")).unwrap_or_default()
        ),
        generator: "synthetic-walk".into(),
        seed: opts.seed,
        params,
    };

    let mode = match opts.xi {
        None => ScenarioMode::Deterministic(groups.pop().expect("one group")),
        Some(_) => ScenarioMode::Robust(UncertaintySet::new(groups)?),
    };
    Ok(Scenario {
        network,
        mode,
        metadata,
    })
}

fn sample_path_group(
    net: &Network,
    connected: &[(usize, usize)],
    opts: &GenerateOptions,
    rng: &mut ChaCha12Rng,
) -> Result<UserPaths, ScenarioError> {
    if opts.k == 0 {
        return Ok(UserPaths::empty());
    }
    let mut picked: Vec<Vec<usize>> = Vec::new();
    let mut used = vec![false; net.edge_count()];
    let mut rejections = 0usize;
    let limit = 10 * opts.k;
    while picked.len() < opts.k {
        if rejections > limit {
            return Err(ScenarioError::GenerationFailed(format!(
                "exceeded {limit} rejection rounds while sampling user paths"
            )));
        }
        let (a, b) = connected[rng.random_range(0..connected.len())];
        let path = random_walk_path(net, a, b, rng);
        let clash = opts.disjoint && path.iter().any(|&e| used[e]);
        let duplicate = picked.iter().any(|p| p == &path);
        if clash || duplicate {
            rejections += 1;
            continue;
        }
        for &e in &path {
            used[e] = true;
        }
        picked.push(path);
    }
    // Uniform in (0, bottleneck], then one joint rescale into feasibility.
    let mut values: Vec<f64> = picked
        .iter()
        .map(|p| {
            let bottleneck = p
                .iter()
                .map(|&e| net.capacity(e))
                .fold(f64::INFINITY, f64::min);
            (1.0 - rng.random::<f64>()) * bottleneck
        })
        .collect();
    let mut load = vec![0.0; net.edge_count()];
    for (p, &v) in picked.iter().zip(&values) {
        for &e in p {
            load[e] += v;
        }
    }
    let mut factor = 1.0f64;
    for (e, &l) in load.iter().enumerate() {
        if l > net.capacity(e) {
            factor = factor.min(net.capacity(e) / l);
        }
    }
    if factor < 1.0 {
        for v in values.iter_mut() {
            *v *= factor;
        }
    }
    Ok(UserPaths::new(net, picked, values)?)
}

fn random_walk_path(net: &Network, from: usize, to: usize, rng: &mut ChaCha12Rng) -> Vec<usize> {
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
        let &e = &options[rng.random_range(0..options.len())];
        path.push(e);
        node = net.edge(e).1;
    }
    path
}

/// Layered random DAG for synthetic scenarios: full rank-to-rank candidate
/// edges kept with probability `edge_prob` (at least one out- and in-edge
/// per interior node), plus optional two-rank skip edges.
pub fn random_layered_digraph(
    layers: usize,
    width: usize,
    edge_prob: f64,
    skip_prob: f64,
    seed: u64,
) -> DiGraph {
    assert!(layers >= 2 && width >= 1);
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, "layered-graph"));
    let node = |layer: usize, slot: usize| layer * width + slot;
    let n = layers * width;
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for layer in 0..layers - 1 {
        for a in 0..width {
            let mut any = false;
            for b in 0..width {
                if rng.random::<f64>() < edge_prob {
                    any = true;
                    if seen.insert((node(layer, a), node(layer + 1, b))) {
                        edges.push((node(layer, a), node(layer + 1, b)));
                    }
                }
            }
            if !any {
                let b = rng.random_range(0..width);
                if seen.insert((node(layer, a), node(layer + 1, b))) {
                    edges.push((node(layer, a), node(layer + 1, b)));
                }
            }
        }
        // Guarantee every next-layer node is enterable.
        for b in 0..width {
            if !(0..width).any(|a| seen.contains(&(node(layer, a), node(layer + 1, b)))) {
                let a = rng.random_range(0..width);
                seen.insert((node(layer, a), node(layer + 1, b)));
                edges.push((node(layer, a), node(layer + 1, b)));
            }
        }
    }
    for layer in 0..layers.saturating_sub(2) {
        for a in 0..width {
            for b in 0..width {
                if rng.random::<f64>() < skip_prob
                    && seen.insert((node(layer, a), node(layer + 2, b)))
                {
                    edges.push((node(layer, a), node(layer + 2, b)));
                }
            }
        }
    }
    DiGraph {
        node_count: n,
        edges,
    }
}

// ---------------------------------------------------------------------------
// Satisfiability reduction
// ---------------------------------------------------------------------------

/// CNF with at most three literals per clause. Literals are 1-based and
/// signed: `+(i+1)` is variable i, `-(i+1)` its negation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub variable_count: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.variable_count == 0 {
            return Err(ScenarioError::InvalidFormula("no variables".into()));
        }
        for (j, clause) in self.clauses.iter().enumerate() {
            if clause.is_empty() || clause.len() > 3 {
                return Err(ScenarioError::InvalidFormula(format!(
                    "clause {j} must have 1 to 3 literals"
                )));
            }
            for &lit in clause {
                let var = lit.unsigned_abs() as usize;
                if lit == 0 || var > self.variable_count {
                    return Err(ScenarioError::InvalidFormula(format!(
                        "clause {j}: literal {lit} out of range"
                    )));
                }
            }
            for &lit in clause {
                if clause.contains(&-lit) {
                    return Err(ScenarioError::InvalidFormula(format!(
                        "clause {j} contains a variable and its negation"
                    )));
                }
            }
            let mut sorted = clause.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != clause.len() {
                return Err(ScenarioError::InvalidFormula(format!(
                    "clause {j} repeats a literal"
                )));
            }
        }
        Ok(())
    }

    /// Brute-force satisfiability over all assignments.
    pub fn brute_force_satisfiable(&self) -> bool {
        let n = self.variable_count;
        assert!(n <= 24, "brute force is exponential in the variable count");
        (0u64..(1 << n)).any(|mask| self.satisfied_by(mask))
    }

    pub fn satisfied_by(&self, mask: u64) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let var = lit.unsigned_abs() as usize - 1;
                let value = mask >> var & 1 == 1;
                (lit > 0) == value
            })
        })
    }
}

/// Builds the hard deterministic instance for a formula: one unit-value user
/// path of `3 n` edges per clause, a two-branch gadget per variable whose
/// branches thread through the clause paths containing the corresponding
/// literal, and unit capacities with a unit budget. The best pure reduction
/// equals the clause count exactly when the formula is satisfiable.
pub fn generate_3sat_instance(formula: &CnfFormula) -> Result<Scenario, ScenarioError> {
    formula.validate()?;
    let n = formula.variable_count;
    let k = formula.clauses.len();

    // Node layout: u_0..u_n, then v_{i,0}, v_{i,1} per variable, then the
    // clause-path chains of 3n+1 nodes each.
    let u = |i: usize| i;
    let v = |i: usize, a: usize| (n + 1) + 2 * i + a;
    let chain = |j: usize, pos: usize| (n + 1) + 2 * n + j * (3 * n + 1) + pos;
    let node_count = (n + 1) + 2 * n + k * (3 * n + 1);

    let mut edges = Vec::new();
    let mut clause_paths: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (j, path) in clause_paths.iter_mut().enumerate() {
        for pos in 0..3 * n {
            path.push(edges.len());
            edges.push((chain(j, pos), chain(j, pos + 1)));
        }
    }
    for i in 0..n {
        for a in [0usize, 1] {
            edges.push((u(i), v(i, a)));
            // Clause-path edge position for this literal: negation at 3i,
            // the plain literal at 3i+1; position 3i+2 stays a spacer.
            let wanted: i32 = if a == 1 { (i + 1) as i32 } else { -((i + 1) as i32) };
            let pos = 3 * i + a;
            let mut prev = v(i, a);
            for (j, clause) in formula.clauses.iter().enumerate() {
                if clause.contains(&wanted) {
                    edges.push((prev, chain(j, pos)));
                    prev = chain(j, pos + 1);
                }
            }
            edges.push((prev, u(i + 1)));
        }
    }

    let capacities = vec![1.0; edges.len()];
    let network = Network::new(node_count, edges, capacities, u(0), u(n), 1.0)?;
    let paths = UserPaths::new(&network, clause_paths, vec![1.0; k])?;

    let mut params = BTreeMap::new();
    params.insert("variables".into(), n.to_string());
    params.insert("clauses".into(), k.to_string());
    let metadata = Metadata {
        id: format!("sat-v{n}-c{k}"),
        generator: "3sat-reduction".into(),
        seed: 0,
        params,
    };
    Ok(Scenario {
        network,
        mode: ScenarioMode::Deterministic(paths),
        metadata,
    })
}

// ---------------------------------------------------------------------------
// Canonical JSON
// ---------------------------------------------------------------------------

/// 17 significant digits, enough to round-trip any finite f64.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_json_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

pub fn scenario_to_json(s: &Scenario) -> String {
    let net = &s.network;
    let mut out = String::new();
    out.push_str("{\"nodes\":");
    out.push_str(&net.node_count().to_string());
    out.push_str(",\"edges\":[");
    for (i, &(t, h)) in net.edges().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("[{},{},{}]", t, h, fmt_f64(net.capacity(i))));
    }
    out.push_str("],\"source\":");
    out.push_str(&net.source().to_string());
    out.push_str(",\"sink\":");
    out.push_str(&net.sink().to_string());
    out.push_str(",\"budget\":");
    out.push_str(&fmt_f64(net.budget()));
    out.push_str(",\"mode\":");
    match &s.mode {
        ScenarioMode::Deterministic(_) => out.push_str("\"deterministic\""),
        ScenarioMode::Robust(_) => out.push_str("\"robust\""),
    }
    out.push_str(",\"candidates\":[");
    for (ci, paths) in s.candidates().iter().enumerate() {
        if ci > 0 {
            out.push(',');
        }
        out.push_str("{\"paths\":[");
        for (pi, path) in paths.paths().iter().enumerate() {
            if pi > 0 {
                out.push(',');
            }
            out.push('[');
            for (ei, e) in path.iter().enumerate() {
                if ei > 0 {
                    out.push(',');
                }
                out.push_str(&e.to_string());
            }
            out.push(']');
        }
        out.push_str("],\"lambdas\":[");
        for (vi, v) in paths.initial_values().iter().enumerate() {
            if vi > 0 {
                out.push(',');
            }
            out.push_str(&fmt_f64(*v));
        }
        out.push_str("]}");
    }
    out.push_str("],\"metadata\":{\"id\":");
    write_json_string(&mut out, &s.metadata.id);
    out.push_str(",\"generator\":");
    write_json_string(&mut out, &s.metadata.generator);
    out.push_str(",\"seed\":");
    out.push_str(&s.metadata.seed.to_string());
    out.push_str(",\"params\":{");
    for (i, (k, v)) in s.metadata.params.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_json_string(&mut out, k);
        out.push(':');
        write_json_string(&mut out, v);
    }
    out.push_str("}}}");
    out
}

struct Node<'a> {
    value: &'a Value,
    pointer: String,
}

impl<'a> Node<'a> {
    fn field(&self, name: &str) -> Result<Node<'a>, ScenarioError> {
        let pointer = format!("{}/{}", self.pointer, name);
        match self.value.as_object().and_then(|o| o.get(name)) {
            Some(v) => Ok(Node { value: v, pointer }),
            None => Err(schema_err(&pointer, "missing field")),
        }
    }

    fn as_array(&self) -> Result<Vec<Node<'a>>, ScenarioError> {
        match self.value.as_array() {
            Some(items) => Ok(items
                .iter()
                .enumerate()
                .map(|(i, v)| Node {
                    value: v,
                    pointer: format!("{}/{}", self.pointer, i),
                })
                .collect()),
            None => Err(schema_err(&self.pointer, "expected an array")),
        }
    }

    fn as_usize(&self) -> Result<usize, ScenarioError> {
        self.value
            .as_u64()
            .map(|v| v as usize)
            .ok_or_else(|| schema_err(&self.pointer, "expected a nonnegative integer"))
    }

    fn as_u64(&self) -> Result<u64, ScenarioError> {
        self.value
            .as_u64()
            .ok_or_else(|| schema_err(&self.pointer, "expected a nonnegative integer"))
    }

    fn as_f64(&self) -> Result<f64, ScenarioError> {
        self.value
            .as_f64()
            .ok_or_else(|| schema_err(&self.pointer, "expected a number"))
    }

    fn as_str(&self) -> Result<&'a str, ScenarioError> {
        self.value
            .as_str()
            .ok_or_else(|| schema_err(&self.pointer, "expected a string"))
    }
}

pub fn scenario_from_json(text: &str) -> Result<Scenario, ScenarioError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| schema_err("", format!("invalid JSON: {e}")))?;
    let root = Node {
        value: &value,
        pointer: String::new(),
    };

    let nodes = root.field("nodes")?.as_usize()?;
    let mut edges = Vec::new();
    let mut capacities = Vec::new();
    for entry in root.field("edges")?.as_array()? {
        let triple = entry.as_array()?;
        if triple.len() != 3 {
            return Err(schema_err(&entry.pointer, "expected [tail, head, capacity]"));
        }
        edges.push((triple[0].as_usize()?, triple[1].as_usize()?));
        capacities.push(triple[2].as_f64()?);
    }
    let source = root.field("source")?.as_usize()?;
    let sink = root.field("sink")?.as_usize()?;
    let budget = root.field("budget")?.as_f64()?;
    let mode_str = root.field("mode")?;
    let mode_name = mode_str.as_str()?;
    if mode_name != "deterministic" && mode_name != "robust" {
        return Err(schema_err(
            &mode_str.pointer,
            "mode must be \"deterministic\" or \"robust\"",
        ));
    }

    let network = Network::new(nodes, edges, capacities, source, sink, budget)
        .map_err(|e| schema_err("/edges", e.to_string()))?;

    let cand_node = root.field("candidates")?;
    let cand_items = cand_node.as_array()?;
    if cand_items.is_empty() {
        return Err(schema_err(&cand_node.pointer, "at least one candidate required"));
    }
    if mode_name == "deterministic" && cand_items.len() != 1 {
        return Err(schema_err(
            &cand_node.pointer,
            "deterministic scenarios carry exactly one candidate",
        ));
    }
    let mut groups = Vec::with_capacity(cand_items.len());
    for item in &cand_items {
        let mut paths = Vec::new();
        for p in item.field("paths")?.as_array()? {
            let mut path = Vec::new();
            for e in p.as_array()? {
                path.push(e.as_usize()?);
            }
            paths.push(path);
        }
        let mut lambdas = Vec::new();
        for l in item.field("lambdas")?.as_array()? {
            lambdas.push(l.as_f64()?);
        }
        if paths.len() != lambdas.len() {
            return Err(schema_err(
                &item.pointer,
                "paths and lambdas must have equal length",
            ));
        }
        let group = if paths.is_empty() {
            UserPaths::empty()
        } else {
            UserPaths::new(&network, paths, lambdas)
                .map_err(|e| schema_err(&item.pointer, e.to_string()))?
        };
        groups.push(group);
    }

    let meta = root.field("metadata")?;
    let mut params = BTreeMap::new();
    let params_node = meta.field("params")?;
    match params_node.value.as_object() {
        Some(map) => {
            for (k, v) in map {
                let vs = v.as_str().ok_or_else(|| {
                    schema_err(&format!("{}/{}", params_node.pointer, k), "expected a string")
                })?;
                params.insert(k.clone(), vs.to_string());
            }
        }
        None => return Err(schema_err(&params_node.pointer, "expected an object")),
    }
    let metadata = Metadata {
        id: meta.field("id")?.as_str()?.to_string(),
        generator: meta.field("generator")?.as_str()?.to_string(),
        seed: meta.field("seed")?.as_u64()?,
        params,
    };

    let mode = if mode_name == "deterministic" {
        ScenarioMode::Deterministic(groups.pop().expect("one candidate"))
    } else {
        ScenarioMode::Robust(UncertaintySet::new(groups)?)
    };
    Ok(Scenario {
        network,
        mode,
        metadata,
    })
}

pub fn save_scenario(path: impl AsRef<Path>, s: &Scenario) -> Result<(), ScenarioError> {
    std::fs::write(path, scenario_to_json(s) + "\n")?;
    Ok(())
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)?;
    scenario_from_json(&text)
}

// Skeleton JSON: {"nodes":N,"edges":[[t,h],...],"removed_edges":[[t,h],...],
// "duplicates_dropped":d}

pub fn skeleton_to_json(s: &Skeleton) -> String {
    let mut out = String::new();
    out.push_str("{\"nodes\":");
    out.push_str(&s.graph.node_count.to_string());
    out.push_str(",\"edges\":[");
    for (i, &(t, h)) in s.graph.edges.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("[{t},{h}]"));
    }
    out.push_str("],\"removed_edges\":[");
    for (i, &(t, h)) in s.removed_edges.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("[{t},{h}]"));
    }
    out.push_str("],\"duplicates_dropped\":");
    out.push_str(&s.duplicates_dropped.to_string());
    out.push('}');
    out
}

pub fn skeleton_from_json(text: &str) -> Result<Skeleton, ScenarioError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| schema_err("", format!("invalid JSON: {e}")))?;
    let root = Node {
        value: &value,
        pointer: String::new(),
    };
    let node_count = root.field("nodes")?.as_usize()?;
    let read_pairs = |name: &str| -> Result<Vec<(usize, usize)>, ScenarioError> {
        let mut out = Vec::new();
        for entry in root.field(name)?.as_array()? {
            let pair = entry.as_array()?;
            if pair.len() != 2 {
                return Err(schema_err(&entry.pointer, "expected [tail, head]"));
            }
            out.push((pair[0].as_usize()?, pair[1].as_usize()?));
        }
        Ok(out)
    };
    Ok(Skeleton {
        graph: DiGraph {
            node_count,
            edges: read_pairs("edges")?,
        },
        removed_edges: read_pairs("removed_edges")?,
        duplicates_dropped: root.field("duplicates_dropped")?.as_usize()?,
    })
}
