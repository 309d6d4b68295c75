//! Subcommand implementations and the exit-code policy.

use crate::output::{csv_row, RunResult, CSV_HEADER};
use flowjam_core::greedy::{ceil_log2, deterministic_interdict, GreedyConfig, GreedyError};
use flowjam_core::lp::LpError;
use flowjam_core::network::NetworkError;
use flowjam_core::oracle::{optimal_pure_deterministic, optimal_robust_lp, OracleError, OracleReport};
use flowjam_core::robust::{robust_interdict, KappaGrid, RobustError, RobustOptions, UncertaintySet};
use flowjam_core::scenario::{
    generate_scenario, ingest_edgelist, load_scenario, random_layered_digraph, save_scenario,
    skeleton_from_json, skeleton_to_json, GenerateOptions, Scenario,
    ScenarioError, ScenarioMode,
};
use flowjam_core::throughput::ThroughputError;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_TRUNCATED: u8 = 4;

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }

    fn truncated(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_TRUNCATED,
            message: message.into(),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<ThroughputError> for CliError {
    fn from(e: ThroughputError) -> Self {
        CliError::numerical(e.to_string())
    }
}

impl From<LpError> for CliError {
    fn from(e: LpError) -> Self {
        CliError::numerical(e.to_string())
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<GreedyError> for CliError {
    fn from(e: GreedyError) -> Self {
        match e {
            GreedyError::Throughput(t) => t.into(),
            other => CliError::input(other.to_string()),
        }
    }
}

impl From<RobustError> for CliError {
    fn from(e: RobustError) -> Self {
        match e {
            RobustError::Throughput(t) => t.into(),
            RobustError::Greedy(g) => g.into(),
            RobustError::Internal(m) => CliError::numerical(m),
            other => CliError::input(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Lp(l) => l.into(),
            OracleError::Throughput(t) => t.into(),
            OracleError::Robust(r) => r.into(),
            other => CliError::input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(e.to_string())
    }
}

pub fn ingest(input: &Path, output: &Path, _seed: Option<u64>) -> Result<(), CliError> {
    let file = std::fs::File::open(input)
        .map_err(|e| CliError::input(format!("{}: {e}", input.display())))?;
    let skeleton = ingest_edgelist(std::io::BufReader::new(file))?;
    std::fs::write(output, skeleton_to_json(&skeleton) + "\n")?;
    println!(
        "{{\"nodes\":{},\"edges\":{},\"removed_edges\":{},\"duplicates_dropped\":{}}}",
        skeleton.graph.node_count,
        skeleton.graph.edges.len(),
        skeleton.removed_edges.len(),
        skeleton.duplicates_dropped
    );
    Ok(())
}

pub struct GenerateArgs {
    pub output: PathBuf,
    pub skeleton: Option<PathBuf>,
    pub synthetic: Option<String>,
    pub k: usize,
    pub disjoint: bool,
    pub xi: Option<usize>,
    pub seed: u64,
    pub max_paths: Option<u64>,
    pub min_paths: u64,
    pub capacity_mean: f64,
    pub capacity_std: f64,
}

pub fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let graph = match (&args.skeleton, &args.synthetic) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            skeleton_from_json(&text)?.graph
        }
        (None, Some(text)) => parse_synthetic(text, args.seed)?,
        _ => {
            return Err(CliError::input(
                "exactly one of --skeleton and --synthetic is required",
            ))
        }
    };
    let opts = GenerateOptions {
        k: args.k,
        disjoint: args.disjoint,
        xi: args.xi,
        seed: args.seed,
        capacity_mean: args.capacity_mean,
        capacity_std: args.capacity_std,
        max_st_paths: args.max_paths,
        min_st_paths: args.min_paths,
    };
    let scenario = generate_scenario(&graph, &opts)?;
    save_scenario(&args.output, &scenario)?;
    println!(
        "{{\"id\":{},\"nodes\":{},\"edges\":{},\"mode\":\"{}\"}}",
        crate::output::json_string(&scenario.metadata.id),
        scenario.network.node_count(),
        scenario.network.edge_count(),
        if scenario.is_robust() { "robust" } else { "deterministic" }
    );
    Ok(())
}

fn parse_synthetic(text: &str, seed: u64) -> Result<flowjam_core::network::DiGraph, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() < 2 || parts.len() > 4 {
        return Err(CliError::input(
            "--synthetic expects layers,width[,edge_prob[,skip_prob]]",
        ));
    }
    let layers: usize = parts[0]
        .parse()
        .map_err(|_| CliError::input("bad layer count"))?;
    let width: usize = parts[1]
        .parse()
        .map_err(|_| CliError::input("bad width"))?;
    let edge_prob: f64 = parts
        .get(2)
        .map(|s| s.parse())
        .transpose()
        .map_err(|_| CliError::input("bad edge probability"))?
        .unwrap_or(0.6);
    let skip_prob: f64 = parts
        .get(3)
        .map(|s| s.parse())
        .transpose()
        .map_err(|_| CliError::input("bad skip probability"))?
        .unwrap_or(0.1);
    if layers < 2 || width == 0 {
        return Err(CliError::input("synthetic graphs need layers >= 2, width >= 1"));
    }
    Ok(random_layered_digraph(layers, width, edge_prob, skip_prob, seed))
}

fn scenario_id(scenario: &Scenario, path: &Path) -> String {
    if scenario.metadata.id.is_empty() {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string())
    } else {
        scenario.metadata.id.clone()
    }
}

fn parse_kappa_grid(text: &str) -> Result<KappaGrid, CliError> {
    if text == "full" {
        return Ok(KappaGrid::Full);
    }
    if let Some(f) = text.strip_prefix("geom:") {
        let factor: f64 = f
            .parse()
            .map_err(|_| CliError::input("bad geometric factor"))?;
        if factor <= 1.0 {
            return Err(CliError::input("geometric factor must exceed 1"));
        }
        return Ok(KappaGrid::Geometric { factor });
    }
    Err(CliError::input(
        "--kappa-grid must be \"full\" or \"geom:<factor>\"",
    ))
}

fn check_oracle(report: &OracleReport) -> Result<f64, CliError> {
    if report.truncated {
        Err(CliError::truncated(format!(
            "oracle path enumeration exceeded its cap at {} paths",
            report.paths_enumerated
        )))
    } else {
        Ok(report.optimal_value)
    }
}

fn run_det(
    scenario: &Scenario,
    id: String,
    depth: Option<usize>,
    anchors: usize,
    oracle: bool,
    oracle_cap: usize,
) -> Result<RunResult, CliError> {
    let paths = match &scenario.mode {
        ScenarioMode::Deterministic(p) => p,
        ScenarioMode::Robust(_) => {
            return Err(CliError::input(
                "deterministic interdiction needs a deterministic scenario",
            ))
        }
    };
    if anchors < 2 {
        return Err(CliError::input("--anchors must be at least 2"));
    }
    let depth = depth.unwrap_or_else(|| ceil_log2(scenario.network.node_count()));
    let cfg = GreedyConfig::new(depth, anchors);
    let started = Instant::now();
    let run = deterministic_interdict(&scenario.network, paths, cfg)?;
    let wall_ms = started.elapsed().as_millis();
    let mut result = RunResult {
        scenario: id,
        algorithm: "det",
        depth,
        anchors,
        epsilon: None,
        n0: None,
        seed: scenario.metadata.seed,
        achieved: run.reduction,
        oracle: None,
        ratio: None,
        wall_ms,
        evals: run.stats.gain_evals,
    };
    if oracle {
        let report = optimal_pure_deterministic(&scenario.network, paths, oracle_cap)?;
        result.set_oracle(check_oracle(&report)?);
    }
    Ok(result)
}

#[allow(clippy::too_many_arguments)]
fn run_robust(
    scenario: &Scenario,
    id: String,
    depth: Option<usize>,
    anchors: usize,
    epsilon: f64,
    n0: u64,
    grid: KappaGrid,
    oracle: bool,
    oracle_cap: usize,
) -> Result<RunResult, CliError> {
    // A deterministic scenario runs as a single-candidate uncertainty set.
    let uncertainty = match &scenario.mode {
        ScenarioMode::Robust(u) => u.clone(),
        ScenarioMode::Deterministic(p) => UncertaintySet::new(vec![p.clone()])?,
    };
    if !(0.0..1.0).contains(&epsilon) || epsilon == 0.0 {
        return Err(CliError::input("--epsilon must be in (0, 1)"));
    }
    if n0 == 0 {
        return Err(CliError::input("--n0 must be at least 1"));
    }
    if anchors < 2 {
        return Err(CliError::input("--anchors must be at least 2"));
    }
    let depth = depth.unwrap_or_else(|| ceil_log2(scenario.network.node_count()));
    let cfg = GreedyConfig::new(depth, anchors);
    let opts = RobustOptions {
        epsilon,
        n0,
        kappa_grid: grid,
    };
    let started = Instant::now();
    let run = robust_interdict(&scenario.network, &uncertainty, cfg, opts)?;
    let wall_ms = started.elapsed().as_millis();
    let mut result = RunResult {
        scenario: id,
        algorithm: "robust",
        depth,
        anchors,
        epsilon: Some(epsilon),
        n0: Some(n0),
        seed: scenario.metadata.seed,
        achieved: run.worst_case,
        oracle: None,
        ratio: None,
        wall_ms,
        evals: run.stats.gain_evals,
    };
    if oracle {
        let report = optimal_robust_lp(&scenario.network, &uncertainty, oracle_cap)?;
        result.set_oracle(check_oracle(&report)?);
    }
    Ok(result)
}

pub fn det(
    scenario_path: &Path,
    depth: Option<usize>,
    anchors: usize,
    oracle: bool,
    oracle_cap: usize,
) -> Result<(), CliError> {
    let scenario = load_scenario(scenario_path)?;
    let id = scenario_id(&scenario, scenario_path);
    let result = run_det(&scenario, id, depth, anchors, oracle, oracle_cap)?;
    println!("{}", result.to_json());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn robust(
    scenario_path: &Path,
    depth: Option<usize>,
    anchors: usize,
    epsilon: f64,
    n0: u64,
    kappa_grid: &str,
    oracle: bool,
    oracle_cap: usize,
) -> Result<(), CliError> {
    let grid = parse_kappa_grid(kappa_grid)?;
    let scenario = load_scenario(scenario_path)?;
    let id = scenario_id(&scenario, scenario_path);
    let result = run_robust(
        &scenario, id, depth, anchors, epsilon, n0, grid, oracle, oracle_cap,
    )?;
    println!("{}", result.to_json());
    Ok(())
}

pub struct BenchArgs {
    pub pattern: String,
    pub out: PathBuf,
    pub depths: String,
    pub anchors: String,
    pub epsilon: f64,
    pub n0: u64,
    pub kappa_grid: String,
    pub oracle: bool,
    pub oracle_cap: usize,
}

pub fn bench(args: BenchArgs) -> Result<(), CliError> {
    let grid = parse_kappa_grid(&args.kappa_grid)?;
    let depths = parse_list(&args.depths, "--depths")?;
    let anchor_list = parse_list(&args.anchors, "--anchors")?;
    if anchor_list.iter().any(|&a| a < 2) {
        return Err(CliError::input("anchor counts must be at least 2"));
    }
    let files = expand_glob(&args.pattern)?;

    // One job per scenario and parameter point, in deterministic order.
    struct Job {
        file: PathBuf,
        depth: usize,
        anchors: usize,
    }
    let mut jobs = Vec::new();
    for file in &files {
        for &depth in &depths {
            for &a in &anchor_list {
                jobs.push(Job {
                    file: file.clone(),
                    depth,
                    anchors: a,
                });
            }
        }
    }

    type JobResult = Result<(RunResult, usize, usize), CliError>;
    let workers = worker_count(jobs.len());
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results: Vec<std::sync::Mutex<Option<JobResult>>> =
        (0..jobs.len()).map(|_| std::sync::Mutex::new(None)).collect();

    let run_job = |job: &Job| -> JobResult {
        let scenario = load_scenario(&job.file)?;
        let id = scenario_id(&scenario, &job.file);
        let candidates = scenario.candidates();
        let k = candidates.iter().map(|p| p.len()).max().unwrap_or(0);
        let xi = candidates.len();
        let result = match &scenario.mode {
            ScenarioMode::Deterministic(_) => run_det(
                &scenario,
                id,
                Some(job.depth),
                job.anchors,
                args.oracle,
                args.oracle_cap,
            )?,
            ScenarioMode::Robust(_) => run_robust(
                &scenario,
                id,
                Some(job.depth),
                job.anchors,
                args.epsilon,
                args.n0,
                grid,
                args.oracle,
                args.oracle_cap,
            )?,
        };
        Ok((result, k, xi))
    };

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let outcome = run_job(&jobs[i]);
                *results[i].lock().unwrap() = Some(outcome);
            });
        }
    });

    let mut rows = Vec::with_capacity(jobs.len());
    for slot in results {
        match slot.into_inner().unwrap() {
            Some(Ok(row)) => rows.push(row),
            Some(Err(e)) => return Err(e),
            None => return Err(CliError::numerical("benchmark worker lost a job")),
        }
    }

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for (result, k, xi) in &rows {
        csv.push_str(&csv_row(result, *k, *xi));
        csv.push('\n');
    }
    std::fs::write(&args.out, &csv)?;

    let summary_path = summary_path(&args.out);
    let summary = summarize(&rows);
    std::fs::write(&summary_path, summary)?;

    let mut stdout = std::io::stdout().lock();
    writeln!(
        stdout,
        "{{\"rows\":{},\"out\":{},\"summary\":{}}}",
        rows.len(),
        crate::output::json_string(&args.out.display().to_string()),
        crate::output::json_string(&summary_path.display().to_string()),
    )?;
    Ok(())
}

fn parse_list(text: &str, flag: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::input(format!("{flag}: bad value {s:?}")))
        })
        .collect()
}

fn worker_count(jobs: usize) -> usize {
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let cap = std::env::var("FLOWJAM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(available);
    cap.min(jobs.max(1))
}

/// Aggregates mean ratio per parameter point over rows that carry one.
fn summarize(rows: &[(RunResult, usize, usize)]) -> String {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<String, (usize, f64)> = BTreeMap::new();
    for (r, _, _) in rows {
        if let Some(ratio) = r.ratio {
            let eps = r.epsilon.map(|e| format!("{e}")).unwrap_or_default();
            let n0 = r.n0.map(|v| v.to_string()).unwrap_or_default();
            let key = format!("{},{},{},{},{}", r.algorithm, r.depth, r.anchors, eps, n0);
            let entry = groups.entry(key).or_insert((0, 0.0));
            entry.0 += 1;
            entry.1 += ratio;
        }
    }
    let mut out = String::from("algorithm,depth,anchors,epsilon,n0,count,mean_ratio\n");
    for (key, (count, total)) in groups {
        out.push_str(&format!("{key},{count},{}\n", total / count as f64));
    }
    out
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results.csv".into());
    let base = stem.strip_suffix(".csv").unwrap_or(&stem);
    out.with_file_name(format!("{base}.summary.csv"))
}

/// Minimal glob: a literal directory part plus a file pattern where `*`
/// matches any run of characters and `?` one character. Matches sort
/// lexicographically so runs are order-stable.
fn expand_glob(pattern: &str) -> Result<Vec<PathBuf>, CliError> {
    let path = Path::new(pattern);
    let (dir, file_pat) = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => (p.to_path_buf(), path.file_name()),
        _ => (PathBuf::from("."), path.file_name()),
    };
    let file_pat = file_pat
        .map(|s| s.to_string_lossy().into_owned())
        .ok_or_else(|| CliError::input("empty glob pattern"))?;
    if dir.to_string_lossy().contains(['*', '?']) {
        return Err(CliError::input("wildcards are only supported in the file name"));
    }
    let mut matches = Vec::new();
    let entries = match std::fs::read_dir(&dir) {
        Ok(e) => e,
        Err(_) => return Ok(Vec::new()),
    };
    for entry in entries {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if wildcard_match(&file_pat, &name) && entry.file_type()?.is_file() {
            matches.push(dir.join(name));
        }
    }
    matches.sort();
    Ok(matches)
}

fn wildcard_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    // Iterative star backtracking.
    let (mut pi, mut ti) = (0usize, 0usize);
    let (mut star, mut mark) = (usize::MAX, 0usize);
    while ti < t.len() {
        if pi < p.len() && (p[pi] == '?' || p[pi] == t[ti]) {
            pi += 1;
            ti += 1;
        } else if pi < p.len() && p[pi] == '*' {
            star = pi;
            mark = ti;
            pi += 1;
        } else if star != usize::MAX {
            pi = star + 1;
            mark += 1;
            ti = mark;
        } else {
            return false;
        }
    }
    while pi < p.len() && p[pi] == '*' {
        pi += 1;
    }
    pi == p.len()
}
