//! Dense linear-program solver: two-phase primal simplex with Bland's rule.
//!
//! Problems here are small (at most a few hundred variables), so a dense
//! tableau with anti-cycling pivoting wins on simplicity and determinism.
//! Every internal row carries an artificial variable, which makes the
//! phase-1 basis trivial and lets dual multipliers be read off the final
//! objective row.

use thiserror::Error;

/// Feasibility residual tolerance for reported optima.
pub const PRIMAL_TOL: f64 = 1e-7;
/// Relative duality-gap tolerance for reported optima.
pub const GAP_TOL: f64 = 1e-6;
/// Pivoting tolerance.
const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

/// Per-variable bounds. A missing lower bound means negative infinity and is
/// the only way to express it; a missing upper bound means positive infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarBounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl VarBounds {
    pub fn nonnegative() -> Self {
        VarBounds {
            lower: Some(0.0),
            upper: None,
        }
    }

    pub fn interval(lower: f64, upper: f64) -> Self {
        VarBounds {
            lower: Some(lower),
            upper: Some(upper),
        }
    }
}

/// A dense LP in maximization form.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Vec<f64>>,
    pub senses: Vec<RowSense>,
    pub rhs: Vec<f64>,
    pub bounds: Vec<VarBounds>,
}

impl LinearProgram {
    /// Maximization problem over nonnegative variables with no rows yet.
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            bounds: vec![VarBounds::nonnegative(); n],
        }
    }

    pub fn push_row(&mut self, coeffs: Vec<f64>, sense: RowSense, rhs: f64) {
        self.constraints.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        if self.bounds.len() != n
            || self.constraints.len() != self.senses.len()
            || self.constraints.len() != self.rhs.len()
            || self.constraints.iter().any(|r| r.len() != n)
        {
            return Err(LpError::Malformed("inconsistent dimensions".into()));
        }
        let finite = |v: f64| v.is_finite();
        if !self.objective.iter().all(|&v| finite(v))
            || !self.rhs.iter().all(|&v| finite(v))
            || !self.constraints.iter().flatten().all(|&v| finite(v))
        {
            return Err(LpError::Malformed("non-finite coefficient".into()));
        }
        for b in &self.bounds {
            if b.lower.is_some_and(|v| !finite(v)) || b.upper.is_some_and(|v| !finite(v)) {
                return Err(LpError::Malformed("non-finite bound".into()));
            }
            if let (Some(l), Some(u)) = (b.lower, b.upper) {
                if l > u {
                    return Err(LpError::Malformed(format!("bound [{l}, {u}] is empty")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal variable values in the original space; empty unless Optimal.
    pub primal: Vec<f64>,
    /// One multiplier per input row; empty unless Optimal. Binding `Le` rows
    /// of a maximization get nonnegative multipliers.
    pub dual: Vec<f64>,
    pub objective_value: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

/// Solves the LP. Deterministic: Bland's rule picks the lowest-index
/// entering and leaving variables, so the same input always produces the
/// same pivot sequence.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;

    // Shift every variable to y >= 0: x_j = l_j + y_j for finite lower
    // bounds, x_j = y_j+ - y_j- for free variables. Finite upper bounds
    // become extra rows in y-space.
    let n = lp.objective.len();
    let mut y_cols: Vec<(usize, f64)> = Vec::new(); // (original var, sign)
    let mut shift = vec![0.0; n];
    let mut col_of_var: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    for (j, b) in lp.bounds.iter().enumerate() {
        match b.lower {
            Some(l) => {
                shift[j] = l;
                col_of_var.push((y_cols.len(), None));
                y_cols.push((j, 1.0));
            }
            None => {
                let plus = y_cols.len();
                y_cols.push((j, 1.0));
                let minus = y_cols.len();
                y_cols.push((j, -1.0));
                col_of_var.push((plus, Some(minus)));
            }
        }
    }
    let ny = y_cols.len();

    let mut rows: Vec<(Vec<f64>, RowSense, f64)> = Vec::new();
    for (i, coeffs) in lp.constraints.iter().enumerate() {
        let mut row = vec![0.0; ny];
        let mut rhs = lp.rhs[i];
        for (j, &a) in coeffs.iter().enumerate() {
            rhs -= a * shift[j];
            let (plus, minus) = col_of_var[j];
            row[plus] += a;
            if let Some(mcol) = minus {
                row[mcol] -= a;
            }
        }
        rows.push((row, lp.senses[i], rhs));
    }
    let user_rows = rows.len();
    for (j, b) in lp.bounds.iter().enumerate() {
        if let Some(u) = b.upper {
            let mut row = vec![0.0; ny];
            let (plus, minus) = col_of_var[j];
            row[plus] = 1.0;
            if let Some(mcol) = minus {
                row[mcol] = -1.0;
            }
            rows.push((row, RowSense::Le, u - shift[j]));
        }
    }

    let mut tab = Tableau::build(ny, &rows);
    match tab.run_two_phase(&objective_in_y(lp, &y_cols))? {
        LpStatus::Infeasible => Ok(LpSolution {
            status: LpStatus::Infeasible,
            primal: Vec::new(),
            dual: Vec::new(),
            objective_value: f64::NAN,
        }),
        LpStatus::Unbounded => Ok(LpSolution {
            status: LpStatus::Unbounded,
            primal: Vec::new(),
            dual: Vec::new(),
            objective_value: f64::INFINITY,
        }),
        LpStatus::Optimal => {
            let y = tab.primal_values();
            let mut x = vec![0.0; n];
            for (j, &(ycol, maybe_minus)) in col_of_var.iter().enumerate() {
                x[j] = shift[j] + y[ycol];
                if let Some(mcol) = maybe_minus {
                    x[j] -= y[mcol];
                }
            }
            let objective_value: f64 = lp
                .objective
                .iter()
                .zip(&x)
                .map(|(c, v)| c * v)
                .sum();

            let duals_internal = tab.duals();
            check_optimum(lp, &x, &tab, &duals_internal)?;
            // Normalized rows were sign-flipped where rhs was negative; the
            // multiplier of the original row flips with it.
            let dual = duals_internal[..user_rows]
                .iter()
                .enumerate()
                .map(|(i, &y)| if tab.flipped[i] { -y } else { y })
                .collect();
            Ok(LpSolution {
                status: LpStatus::Optimal,
                primal: x,
                dual,
                objective_value,
            })
        }
    }
}

fn objective_in_y(lp: &LinearProgram, y_cols: &[(usize, f64)]) -> Vec<f64> {
    y_cols
        .iter()
        .map(|&(j, sign)| lp.objective[j] * sign)
        .collect()
}

/// Verifies the reported optimum: primal residuals within `PRIMAL_TOL` and
/// the duality gap of the internal standard form within `GAP_TOL` relative.
fn check_optimum(
    lp: &LinearProgram,
    x: &[f64],
    tab: &Tableau,
    duals_internal: &[f64],
) -> Result<(), LpError> {
    for (i, coeffs) in lp.constraints.iter().enumerate() {
        let lhs: f64 = coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let resid = match lp.senses[i] {
            RowSense::Le => lhs - lp.rhs[i],
            RowSense::Ge => lp.rhs[i] - lhs,
            RowSense::Eq => (lhs - lp.rhs[i]).abs(),
        };
        if resid > PRIMAL_TOL {
            return Err(LpError::NumericalFailure(format!(
                "row {i} violated by {resid:.3e}"
            )));
        }
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        if let Some(l) = b.lower {
            if x[j] < l - PRIMAL_TOL {
                return Err(LpError::NumericalFailure(format!(
                    "variable {j} below lower bound"
                )));
            }
        }
        if let Some(u) = b.upper {
            if x[j] > u + PRIMAL_TOL {
                return Err(LpError::NumericalFailure(format!(
                    "variable {j} above upper bound"
                )));
            }
        }
    }
    let primal_obj = tab.phase2_objective();
    let dual_obj: f64 = duals_internal
        .iter()
        .zip(&tab.rhs_normalized)
        .map(|(y, b)| y * b)
        .sum();
    let gap = (primal_obj - dual_obj).abs();
    if gap > GAP_TOL * (1.0 + primal_obj.abs()) {
        return Err(LpError::NumericalFailure(format!(
            "duality gap {gap:.3e} exceeds tolerance"
        )));
    }
    Ok(())
}

struct Tableau {
    // columns: ny structural | m slack/surplus (absent entries zero) | m artificial | rhs
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,   // phase-2 reduced costs
    phase1: Vec<f64>, // phase-1 reduced costs
    basis: Vec<usize>,
    ny: usize,
    art_start: usize,
    n_cols: usize,
    flipped: Vec<bool>,
    rhs_normalized: Vec<f64>,
}

impl Tableau {
    fn build(ny: usize, rows: &[(Vec<f64>, RowSense, f64)]) -> Tableau {
        let m = rows.len();
        // One slack/surplus column per inequality row.
        let slack_idx: Vec<Option<usize>> = {
            let mut next = 0;
            rows.iter()
                .map(|(_, sense, _)| match sense {
                    RowSense::Eq => None,
                    _ => {
                        let i = next;
                        next += 1;
                        Some(i)
                    }
                })
                .collect()
        };
        let n_slack = slack_idx.iter().flatten().count();
        let art_start = ny + n_slack;
        let n_cols = art_start + m;

        let mut tab_rows = Vec::with_capacity(m);
        let mut flipped = vec![false; m];
        let mut rhs_normalized = Vec::with_capacity(m);
        for (i, (coeffs, sense, rhs)) in rows.iter().enumerate() {
            let mut row = vec![0.0; n_cols + 1];
            let flip = *rhs < 0.0;
            flipped[i] = flip;
            let sgn = if flip { -1.0 } else { 1.0 };
            for (j, &a) in coeffs.iter().enumerate() {
                row[j] = sgn * a;
            }
            if let Some(s) = slack_idx[i] {
                row[ny + s] = match sense {
                    RowSense::Le => sgn,
                    RowSense::Ge => -sgn,
                    RowSense::Eq => unreachable!(),
                };
            }
            row[art_start + i] = 1.0;
            row[n_cols] = sgn * rhs;
            rhs_normalized.push(sgn * rhs);
            tab_rows.push(row);
        }

        Tableau {
            rows: tab_rows,
            obj: vec![0.0; n_cols + 1],
            phase1: vec![0.0; n_cols + 1],
            basis: (0..m).map(|i| art_start + i).collect(),
            ny,
            art_start,
            n_cols,
            flipped,
            rhs_normalized,
        }
    }

    fn run_two_phase(&mut self, objective_y: &[f64]) -> Result<LpStatus, LpError> {
        // Phase 1: maximize -sum(artificials). Reduced costs start as the
        // negated column sums because all artificials are basic.
        for j in 0..self.n_cols {
            if j >= self.art_start {
                continue;
            }
            self.phase1[j] = self.rows.iter().map(|r| r[j]).sum();
        }
        self.phase1[self.n_cols] = self.rows.iter().map(|r| r[self.n_cols]).sum();

        self.simplex(true)?;
        if self.phase1[self.n_cols] > PRIMAL_TOL {
            return Ok(LpStatus::Infeasible);
        }
        self.evict_basic_artificials();

        // Phase 2: price the actual objective against the current basis.
        for (j, &c) in objective_y.iter().enumerate() {
            self.obj[j] = c;
        }
        for i in 0..self.rows.len() {
            let b = self.basis[i];
            if b < self.ny && objective_y[b] != 0.0 {
                let c = objective_y[b];
                for j in 0..=self.n_cols {
                    self.obj[j] -= c * self.rows[i][j];
                }
            }
        }
        match self.simplex(false)? {
            true => Ok(LpStatus::Optimal),
            false => Ok(LpStatus::Unbounded),
        }
    }

    /// Bland pivoting on the active objective row. Returns false on
    /// unboundedness (phase 2 only).
    fn simplex(&mut self, phase1: bool) -> Result<bool, LpError> {
        let max_iters = 50_000usize.max(200 * (self.n_cols + 1));
        for _ in 0..max_iters {
            let allow_art = phase1;
            let entering = (0..self.n_cols)
                .filter(|&j| allow_art || j < self.art_start)
                .find(|&j| {
                    let rc = if phase1 { self.phase1[j] } else { self.obj[j] };
                    rc > PIVOT_TOL && !self.basis.contains(&j)
                });
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[col] > PIVOT_TOL {
                    let ratio = row[self.n_cols] / row[col];
                    let better = match leave {
                        None => true,
                        Some((bi, br)) => {
                            ratio < br - PIVOT_TOL
                                || (ratio < br + PIVOT_TOL && self.basis[i] < self.basis[bi])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((pivot_row, _)) = leave else {
                return if phase1 {
                    Err(LpError::NumericalFailure(
                        "phase-1 objective unbounded".into(),
                    ))
                } else {
                    Ok(false)
                };
            };
            self.pivot(pivot_row, col);
        }
        Err(LpError::NumericalFailure(
            "pivot limit exceeded".into(),
        ))
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let div = self.rows[pr][pc];
        for v in self.rows[pr].iter_mut() {
            *v /= div;
        }
        for i in 0..self.rows.len() {
            if i == pr {
                continue;
            }
            let factor = self.rows[i][pc];
            if factor != 0.0 {
                for j in 0..=self.n_cols {
                    self.rows[i][j] -= factor * self.rows[pr][j];
                }
                self.rows[i][pc] = 0.0;
            }
        }
        for objrow in [&mut self.obj, &mut self.phase1] {
            let factor = objrow[pc];
            if factor != 0.0 {
                for (dst, src) in objrow.iter_mut().zip(&self.rows[pr]) {
                    *dst -= factor * src;
                }
                objrow[pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }

    /// Pivots zero-level artificials out of the basis where a structural
    /// column allows it; rows that stay artificial-basic are redundant.
    fn evict_basic_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if self.basis[i] < self.art_start {
                continue;
            }
            if let Some(col) = (0..self.art_start).find(|&j| self.rows[i][j].abs() > PIVOT_TOL) {
                self.pivot(i, col);
            }
        }
    }

    fn primal_values(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.ny];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.ny {
                y[b] = self.rows[i][self.n_cols];
            }
        }
        y
    }

    /// Multipliers of the normalized internal rows, read from the reduced
    /// costs of the artificial columns (cost 0, column e_i).
    fn duals(&self) -> Vec<f64> {
        (0..self.rows.len())
            .map(|i| -self.obj[self.art_start + i])
            .collect()
    }

    fn phase2_objective(&self) -> f64 {
        -self.obj[self.n_cols]
    }
}
