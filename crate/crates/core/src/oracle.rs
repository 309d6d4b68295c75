//! Exact, exponential-time reference solvers for acceptance testing and
//! performance-ratio measurement. Both enumerate every s-t path up to a cap
//! and evaluate exact reductions, so they only scale to desk-size instances.

use crate::edgeset::EdgeSet;
use crate::lp::{self, LinearProgram, LpStatus, RowSense, VarBounds};
use crate::network::{enumerate_st_paths, Network, NetworkError, SinglePathFlow, UserPaths};
use crate::robust::{InterdictionStrategy, RobustError, UncertaintySet};
use crate::throughput::{lambda, Interdiction, ThroughputError};
use thiserror::Error;

pub const DEFAULT_PATH_CAP: usize = 5000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Throughput(#[from] ThroughputError),
    #[error(transparent)]
    Lp(#[from] lp::LpError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Robust(#[from] RobustError),
    #[error("robust oracle LP reported {0:?}")]
    UnexpectedStatus(LpStatus),
}

#[derive(Debug, Clone)]
pub enum OracleObject {
    Pure(SinglePathFlow),
    Mixed(InterdictionStrategy),
}

/// Result of an exact solve. `truncated` reports that the path cap was hit,
/// in which case no value or object is provided and nothing may be asserted
/// from the report.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub optimal_value: f64,
    pub optimal_object: Option<OracleObject>,
    pub paths_enumerated: usize,
    pub truncated: bool,
    /// Fewest edges among optimal pure paths (deterministic oracle only);
    /// the guarantee tests instantiate their depth bounds with it.
    pub min_optimal_length: Option<usize>,
}

impl OracleReport {
    fn truncated(count: usize) -> Self {
        OracleReport {
            optimal_value: f64::NAN,
            optimal_object: None,
            paths_enumerated: count,
            truncated: true,
            min_optimal_length: None,
        }
    }
}

/// Best pure strategy by full enumeration: every s-t path is evaluated with
/// the exact reduction; ties go to the lexicographically smallest edge set.
pub fn optimal_pure_deterministic(
    net: &Network,
    paths: &UserPaths,
    cap: usize,
) -> Result<OracleReport, OracleError> {
    let all = match enumerate_st_paths(net, cap) {
        Ok(p) => p,
        Err(NetworkError::PathBudgetExceeded { reached, .. }) => {
            return Ok(OracleReport::truncated(reached))
        }
        Err(e) => return Err(e.into()),
    };
    let mut best: Option<(f64, EdgeSet, Vec<usize>)> = None;
    let mut values = Vec::with_capacity(all.len());
    for path in &all {
        let set = EdgeSet::from_indices(net.edge_count(), path);
        let value = lambda(net, paths, Interdiction::Edges(&set))?;
        values.push(value);
        let replace = match &best {
            None => true,
            Some((bv, bset, _)) => {
                value > *bv + 1e-12
                    || ((value - *bv).abs() <= 1e-12
                        && set.lex_cmp(bset) == std::cmp::Ordering::Less)
            }
        };
        if replace {
            best = Some((value, set, path.clone()));
        }
    }
    let (value, _, path) = best.expect("network invariant guarantees one s-t path");
    let min_optimal_length = all
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v >= value - 1e-9)
        .map(|(p, _)| p.len())
        .min();
    Ok(OracleReport {
        optimal_value: value,
        optimal_object: Some(OracleObject::Pure(SinglePathFlow::new(net, path)?)),
        paths_enumerated: all.len(),
        truncated: false,
        min_optimal_length,
    })
}

/// Optimal mixed strategy by linear programming: one weight per enumerated
/// path, maximizing the smallest expected reduction over the candidates.
/// Only the optimal value is pivot-order independent; the returned vertex is
/// one optimal choice among possibly many.
pub fn optimal_robust_lp(
    net: &Network,
    u: &UncertaintySet,
    cap: usize,
) -> Result<OracleReport, OracleError> {
    let all = match enumerate_st_paths(net, cap) {
        Ok(p) => p,
        Err(NetworkError::PathBudgetExceeded { reached, .. }) => {
            return Ok(OracleReport::truncated(reached))
        }
        Err(e) => return Err(e.into()),
    };
    let q = all.len();
    let xi = u.len();
    let mut value_matrix = vec![vec![0.0; q]; xi];
    for (i, path) in all.iter().enumerate() {
        let set = EdgeSet::from_indices(net.edge_count(), path);
        for (l, paths) in u.candidates().iter().enumerate() {
            value_matrix[l][i] = lambda(net, paths, Interdiction::Edges(&set))?;
        }
    }

    // Variables: w_1..w_q, z. Maximize z subject to
    // sum_i w_i L(f_i, P) - z >= 0 per candidate and sum_i w_i = 1.
    let mut objective = vec![0.0; q + 1];
    objective[q] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    lp.bounds = vec![VarBounds::nonnegative(); q + 1];
    for row in &value_matrix {
        let mut coeffs = row.clone();
        coeffs.push(-1.0);
        lp.push_row(coeffs, RowSense::Ge, 0.0);
    }
    let mut simplex_row = vec![1.0; q];
    simplex_row.push(0.0);
    lp.push_row(simplex_row, RowSense::Eq, 1.0);

    let sol = lp::solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(OracleError::UnexpectedStatus(sol.status));
    }
    let mut support = Vec::new();
    let mut total = 0.0;
    for (i, &w) in sol.primal[..q].iter().enumerate() {
        if w > 1e-9 {
            support.push((SinglePathFlow::new(net, all[i].clone())?, w));
            total += w;
        }
    }
    // Strip solver noise so the weights sum to one exactly.
    for (_, w) in support.iter_mut() {
        *w /= total;
    }
    let strategy = InterdictionStrategy::new(support)?;
    Ok(OracleReport {
        optimal_value: sol.objective_value,
        optimal_object: Some(OracleObject::Mixed(strategy)),
        paths_enumerated: q,
        truncated: false,
        min_optimal_length: None,
    })
}
