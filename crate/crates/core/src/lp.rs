//! Dense revised simplex kernel.
//!
//! Problems are stated as `min c·x` subject to rows `a_i·x {≤,=,≥} b_i` and
//! per-variable bounds. Internally every problem is brought to the equality
//! form `A x' = b, x' ≥ 0, b ≥ 0` (bound shifts, free-variable splits, slack
//! and artificial columns) and solved with a two-phase revised simplex that
//! keeps an explicit dense basis inverse. Pricing is Dantzig's rule; after a
//! run of degenerate pivots the engine switches to Bland's rule for the rest
//! of the phase, which keeps every solve cycle-free and deterministic.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Relative primal feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-8;
/// Optimality / duality-gap tolerance.
pub const OPT_TOL: f64 = 1e-7;
/// Half-width, relative to `1 + |z₁|`, of the band pinning a lexicographic
/// stage-1 value.
pub const LEX_BAND: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-9;
const PRICE_TOL: f64 = 1e-9;
const HARRIS_TOL: f64 = 1e-11;
const REFACTOR_EVERY: usize = 50;
/// Relative improvement on the best objective so far below which a pivot
/// counts as degenerate.
const DEGENERATE_GAIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

/// A linear program `min c·x` over dense rows and simple bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    objective: Vec<f64>,
    // row-major, rows × objective.len()
    matrix: Vec<f64>,
    rhs: Vec<f64>,
    senses: Vec<RowSense>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LpProblem {
    /// A problem with `objective.len()` variables, no rows, and bounds `[0, +∞)`.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            matrix: Vec::new(),
            rhs: Vec::new(),
            senses: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    /// Builds a problem from dense rows in one go.
    pub fn from_rows(
        objective: Vec<f64>,
        rows: &[Vec<f64>],
        senses: &[RowSense],
        rhs: &[f64],
    ) -> Result<Self> {
        if rows.len() != senses.len() {
            return Err(Error::DimensionMismatch {
                what: "row senses",
                expected: rows.len(),
                got: senses.len(),
            });
        }
        if rows.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                what: "right-hand side",
                expected: rows.len(),
                got: rhs.len(),
            });
        }
        let mut p = Self::new(objective);
        for ((row, &sense), &b) in rows.iter().zip(senses).zip(rhs) {
            p.add_row(row, sense, b)?;
        }
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.num_vars();
        &self.matrix[i * n..(i + 1) * n]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn senses(&self) -> &[RowSense] {
        &self.senses
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Appends a dense row and returns its index.
    pub fn add_row(&mut self, coeffs: &[f64], sense: RowSense, rhs: f64) -> Result<usize> {
        if coeffs.len() != self.num_vars() {
            return Err(Error::DimensionMismatch {
                what: "row length",
                expected: self.num_vars(),
                got: coeffs.len(),
            });
        }
        self.matrix.extend_from_slice(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
        Ok(self.rhs.len() - 1)
    }

    /// Appends a row given as `(variable, coefficient)` pairs.
    pub fn add_sparse_row(
        &mut self,
        entries: &[(usize, f64)],
        sense: RowSense,
        rhs: f64,
    ) -> Result<usize> {
        let n = self.num_vars();
        let mut row = vec![0.0; n];
        for &(j, v) in entries {
            if j >= n {
                return Err(Error::DimensionMismatch {
                    what: "variable index",
                    expected: n,
                    got: j,
                });
            }
            row[j] += v;
        }
        self.add_row(&row, sense, rhs)
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> Result<()> {
        if var >= self.num_vars() {
            return Err(Error::DimensionMismatch {
                what: "variable index",
                expected: self.num_vars(),
                got: var,
            });
        }
        if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(Error::input(format!(
                "empty bound interval [{lower}, {upper}] for variable {var}"
            )));
        }
        self.lower[var] = lower;
        self.upper[var] = upper;
        Ok(())
    }

    /// Same constraints, different objective.
    pub fn with_objective(&self, objective: &[f64]) -> Result<Self> {
        if objective.len() != self.num_vars() {
            return Err(Error::DimensionMismatch {
                what: "objective length",
                expected: self.num_vars(),
                got: objective.len(),
            });
        }
        let mut p = self.clone();
        p.objective = objective.to_vec();
        Ok(p)
    }

    fn validate(&self, max_vars: usize) -> Result<()> {
        if self.num_vars() > max_vars {
            return Err(Error::input(format!(
                "{} variables exceed the configured maximum of {max_vars}",
                self.num_vars()
            )));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.objective) || !finite(&self.matrix) || !finite(&self.rhs) {
            return Err(Error::input("non-finite coefficient in linear program"));
        }
        Ok(())
    }

    /// Largest violation of any row or bound at `x`.
    pub fn primal_residual(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.num_rows() {
            let ax: f64 = self.row(i).iter().zip(x).map(|(a, v)| a * v).sum();
            let viol = match self.senses[i] {
                RowSense::Le => ax - self.rhs[i],
                RowSense::Ge => self.rhs[i] - ax,
                RowSense::Eq => (ax - self.rhs[i]).abs(),
            };
            worst = worst.max(viol);
        }
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        worst
    }

    fn feas_abs(&self) -> f64 {
        let bmax = self.rhs.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        FEAS_TOL * (1.0 + bmax)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// One column of the internal equality form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisColumn {
    /// Variable shifted by its lower bound, or the positive part of a free variable.
    Var(usize),
    /// Variable mirrored at its upper bound, or the negative part of a free variable.
    NegVar(usize),
    /// Slack or surplus of a constraint row.
    Slack(usize),
    /// Slack of a finite upper bound.
    BoundSlack(usize),
    Artificial(usize),
}

/// Identifies a basis; may seed a later solve of a related problem.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BasisTag(Vec<BasisColumn>);

impl BasisTag {
    pub fn columns(&self) -> &[BasisColumn] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn with(mut self, extra: impl IntoIterator<Item = BasisColumn>) -> Self {
        self.0.extend(extra);
        self.0.sort();
        self
    }
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            match c {
                BasisColumn::Var(j) => write!(f, "x{j}")?,
                BasisColumn::NegVar(j) => write!(f, "-x{j}")?,
                BasisColumn::Slack(i) => write!(f, "s{i}")?,
                BasisColumn::BoundSlack(j) => write!(f, "u{j}")?,
                BasisColumn::Artificial(i) => write!(f, "a{i}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// `+∞` when infeasible, `−∞` when unbounded.
    pub objective_value: f64,
    /// Empty unless optimal.
    pub primal: Vec<f64>,
    /// One multiplier per constraint row; empty unless optimal.
    pub duals: Vec<f64>,
    pub basis: BasisTag,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Objective of the bounded dual at `duals`: `b·y` plus the bound terms
    /// picked by the sign of each reduced cost.
    pub fn dual_objective(&self, problem: &LpProblem) -> f64 {
        let mut value: f64 = problem.rhs.iter().zip(&self.duals).map(|(b, y)| b * y).sum();
        for j in 0..problem.num_vars() {
            let mut rc = problem.objective[j];
            for (i, y) in self.duals.iter().enumerate() {
                rc -= problem.row(i)[j] * y;
            }
            if rc > 0.0 && problem.lower[j].is_finite() {
                value += rc * problem.lower[j];
            } else if rc < 0.0 && problem.upper[j].is_finite() {
                value += rc * problem.upper[j];
            }
        }
        value
    }

    fn failed(status: LpStatus, basis: BasisTag, iterations: usize) -> Self {
        let objective_value = match status {
            LpStatus::Unbounded => f64::NEG_INFINITY,
            _ => f64::INFINITY,
        };
        Self {
            status,
            objective_value,
            primal: Vec::new(),
            duals: Vec::new(),
            basis,
            iterations,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Upper limit on the number of problem variables.
    pub max_variables: usize,
    /// Consecutive degenerate pivots before Bland's rule takes over.
    pub bland_after: usize,
    /// Overrides the size-derived iteration limit.
    pub max_iterations: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_variables: 4096,
            bland_after: 50,
            max_iterations: None,
        }
    }
}

/// Solves with default options from a cold start.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    Solver::default().solve(problem)
}

/// Solves `stage1`, then minimizes `stage2_objective` over the stage-1
/// optimal face. The face is pinned by a band of `±LEX_BAND·(1+|z₁|)` around
/// the stage-1 value. The second solution is `None` when stage 1 is not optimal.
pub fn solve_lexicographic(
    stage1: &LpProblem,
    stage2_objective: &[f64],
) -> Result<(LpSolution, Option<LpSolution>)> {
    Solver::default().solve_lexicographic(stage1, stage2_objective)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Solver {
    pub options: SolverOptions,
}

impl Solver {
    pub fn new(options: SolverOptions) -> Self {
        Self { options }
    }

    pub fn solve(&self, problem: &LpProblem) -> Result<LpSolution> {
        problem.validate(self.options.max_variables)?;
        let sf = StdForm::build(problem);
        self.cold(&sf, problem)
    }

    /// Two-phase solve from the slack/artificial basis. A solve whose
    /// early-stopped phase 1 leaves too much residual is repeated with phase 1
    /// run to optimality.
    fn cold(&self, sf: &StdForm, problem: &LpProblem) -> Result<LpSolution> {
        let mut engine = Engine::new(sf, &self.options, sf.initial_basis.clone())?;
        match engine.run_two_phase(problem, true) {
            Err(Error::Numerical { iterations, .. }) => {
                let mut engine = Engine::new(sf, &self.options, sf.initial_basis.clone())?;
                engine.iterations = iterations;
                engine.run_two_phase(problem, false)
            }
            other => other,
        }
    }

    /// Starts from `tag` when it names a primal-feasible basis of `problem`;
    /// otherwise falls back to a cold start.
    pub fn solve_warm(&self, problem: &LpProblem, tag: &BasisTag) -> Result<LpSolution> {
        problem.validate(self.options.max_variables)?;
        let sf = StdForm::build(problem);
        if let Some(basis) = sf.basis_from_tag(tag) {
            if let Ok(mut engine) = Engine::new(&sf, &self.options, basis) {
                let feas = problem.feas_abs();
                if engine.xb.iter().all(|&v| v >= -feas) {
                    for v in &mut engine.xb {
                        *v = v.max(0.0);
                    }
                    return engine.run_phase_two(problem);
                }
            }
        }
        self.cold(&sf, problem)
    }

    pub fn solve_lexicographic(
        &self,
        stage1: &LpProblem,
        stage2_objective: &[f64],
    ) -> Result<(LpSolution, Option<LpSolution>)> {
        if stage2_objective.len() != stage1.num_vars() {
            return Err(Error::DimensionMismatch {
                what: "stage-2 objective length",
                expected: stage1.num_vars(),
                got: stage2_objective.len(),
            });
        }
        let first = self.solve(stage1)?;
        if !first.is_optimal() {
            return Ok((first, None));
        }
        let z = first.objective_value;
        let band = LEX_BAND * (1.0 + z.abs());
        let mut pinned = stage1.with_objective(stage2_objective)?;
        let hi = pinned.add_row(stage1.objective(), RowSense::Le, z + band)?;
        let lo = pinned.add_row(stage1.objective(), RowSense::Ge, z - band)?;
        let seed = first
            .basis
            .clone()
            .with([BasisColumn::Slack(hi), BasisColumn::Slack(lo)]);
        let second = self.solve_warm(&pinned, &seed)?;
        Ok((first, Some(second)))
    }
}

/// How an original variable maps onto internal columns: `x = offset + sign·x'`
/// (or `x⁺ − x⁻` for free variables).
#[derive(Debug, Clone, Copy)]
struct VarMap {
    pos: Option<usize>,
    neg: Option<usize>,
    offset: f64,
}

struct StdForm {
    m: usize,
    kinds: Vec<BasisColumn>,
    // column-major, kinds.len() × m
    a: Vec<f64>,
    b: Vec<f64>,
    cost: Vec<f64>,
    vars: Vec<VarMap>,
    row_sign: Vec<f64>,
    orig_rows: usize,
    initial_basis: Vec<usize>,
}

impl StdForm {
    fn build(p: &LpProblem) -> Self {
        let n = p.num_vars();
        let mut kinds = Vec::new();
        let mut vars = Vec::with_capacity(n);
        // (column, sign) per original variable
        let mut cols_of: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut bound_rows = Vec::new();
        for j in 0..n {
            let (lo, hi) = (p.lower[j], p.upper[j]);
            let mut cs = Vec::new();
            let map = if lo.is_finite() {
                kinds.push(BasisColumn::Var(j));
                cs.push((kinds.len() - 1, 1.0));
                if hi.is_finite() {
                    bound_rows.push((j, kinds.len() - 1, hi - lo));
                }
                VarMap { pos: Some(kinds.len() - 1), neg: None, offset: lo }
            } else if hi.is_finite() {
                kinds.push(BasisColumn::NegVar(j));
                cs.push((kinds.len() - 1, -1.0));
                VarMap { pos: None, neg: Some(kinds.len() - 1), offset: hi }
            } else {
                kinds.push(BasisColumn::Var(j));
                kinds.push(BasisColumn::NegVar(j));
                let k = kinds.len();
                cs.push((k - 2, 1.0));
                cs.push((k - 1, -1.0));
                VarMap { pos: Some(k - 2), neg: Some(k - 1), offset: 0.0 }
            };
            vars.push(map);
            cols_of.push(cs);
        }
        let n_struct = kinds.len();
        let orig_rows = p.num_rows();
        let m = orig_rows + bound_rows.len();

        // dense row-major working copy, widened later with slack/artificial columns
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        let mut senses = Vec::with_capacity(m);
        for i in 0..orig_rows {
            let mut entries = Vec::new();
            let mut rhs = p.rhs[i];
            for (j, &aij) in p.row(i).iter().enumerate() {
                if aij == 0.0 {
                    continue;
                }
                rhs -= aij * vars[j].offset;
                for &(c, s) in &cols_of[j] {
                    entries.push((c, aij * s));
                }
            }
            rows.push(entries);
            b.push(rhs);
            senses.push(p.senses[i]);
        }
        for &(_, col, width) in &bound_rows {
            rows.push(vec![(col, 1.0)]);
            b.push(width);
            senses.push(RowSense::Le);
        }
        // slack columns
        for (i, sense) in senses.iter().enumerate() {
            let coef = match sense {
                RowSense::Le => 1.0,
                RowSense::Ge => -1.0,
                RowSense::Eq => continue,
            };
            let kind = if i < orig_rows {
                BasisColumn::Slack(i)
            } else {
                BasisColumn::BoundSlack(bound_rows[i - orig_rows].0)
            };
            kinds.push(kind);
            rows[i].push((kinds.len() - 1, coef));
        }
        let mut row_sign = vec![1.0; m];
        for i in 0..m {
            if b[i] < 0.0 {
                row_sign[i] = -1.0;
                b[i] = -b[i];
                for e in &mut rows[i] {
                    e.1 = -e.1;
                }
            }
        }
        // initial basis: unit slack, else a singleton structural column, else artificial
        let mut nnz = vec![0usize; kinds.len()];
        for r in &rows {
            for &(c, v) in r {
                if v != 0.0 {
                    nnz[c] += 1;
                }
            }
        }
        let mut used = vec![false; kinds.len()];
        let mut initial_basis = vec![usize::MAX; m];
        for i in 0..m {
            let slack = rows[i]
                .iter()
                .find(|&&(c, v)| c >= n_struct && v == 1.0 && !used[c]);
            let pick = slack.or_else(|| {
                rows[i]
                    .iter()
                    .find(|&&(c, v)| c < n_struct && v > 0.0 && nnz[c] == 1 && !used[c])
            });
            if let Some(&(c, _)) = pick {
                used[c] = true;
                initial_basis[i] = c;
            }
        }
        for i in 0..m {
            if initial_basis[i] == usize::MAX {
                kinds.push(BasisColumn::Artificial(i));
                rows[i].push((kinds.len() - 1, 1.0));
                initial_basis[i] = kinds.len() - 1;
            }
        }
        let ncols = kinds.len();
        let mut a = vec![0.0; ncols * m];
        for (i, r) in rows.iter().enumerate() {
            for &(c, v) in r {
                a[c * m + i] += v;
            }
        }
        let mut cost = vec![0.0; ncols];
        for j in 0..n {
            for &(c, s) in &cols_of[j] {
                cost[c] = p.objective[j] * s;
            }
        }
        Self {
            m,
            kinds,
            a,
            b,
            cost,
            vars,
            row_sign,
            orig_rows,
            initial_basis,
        }
    }

    fn ncols(&self) -> usize {
        self.kinds.len()
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.a[j * self.m..(j + 1) * self.m]
    }

    fn is_artificial(&self, j: usize) -> bool {
        matches!(self.kinds[j], BasisColumn::Artificial(_))
    }

    fn basis_from_tag(&self, tag: &BasisTag) -> Option<Vec<usize>> {
        if tag.0.len() != self.m {
            return None;
        }
        let index: HashMap<BasisColumn, usize> =
            self.kinds.iter().enumerate().map(|(j, k)| (*k, j)).collect();
        tag.0
            .iter()
            .map(|k| match k {
                BasisColumn::Artificial(_) => None,
                _ => index.get(k).copied(),
            })
            .collect()
    }
}

enum Outcome {
    Optimal,
    Unbounded,
}

struct Engine<'a> {
    sf: &'a StdForm,
    opts: &'a SolverOptions,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    // row-major m × m
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
    max_iterations: usize,
}

impl<'a> Engine<'a> {
    fn new(sf: &'a StdForm, opts: &'a SolverOptions, basis: Vec<usize>) -> Result<Self> {
        let mut is_basic = vec![false; sf.ncols()];
        for &c in &basis {
            is_basic[c] = true;
        }
        let max_iterations = opts
            .max_iterations
            .unwrap_or_else(|| 10_000usize.max(50 * (sf.m + sf.ncols())));
        let mut e = Self {
            sf,
            opts,
            basis,
            is_basic,
            binv: Vec::new(),
            xb: Vec::new(),
            iterations: 0,
            since_refactor: 0,
            max_iterations,
        };
        e.refactor()?;
        Ok(e)
    }

    fn numerical(&self, detail: &str) -> Error {
        Error::Numerical {
            iterations: self.iterations,
            detail: detail.to_string(),
        }
    }

    /// Recomputes the basis inverse by Gauss-Jordan elimination with partial pivoting.
    fn refactor(&mut self) -> Result<()> {
        let m = self.sf.m;
        let mut bm = vec![0.0; m * m];
        for (k, &c) in self.basis.iter().enumerate() {
            for (i, v) in self.sf.col(c).iter().enumerate() {
                bm[i * m + k] = *v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let (piv, best) = (col..m)
                .map(|r| (r, bm[r * m + col].abs()))
                .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best < 1e-12 {
                return Err(self.numerical("singular basis"));
            }
            if piv != col {
                for k in 0..m {
                    bm.swap(piv * m + k, col * m + k);
                    inv.swap(piv * m + k, col * m + k);
                }
            }
            let d = bm[col * m + col];
            for k in 0..m {
                bm[col * m + k] /= d;
                inv[col * m + k] /= d;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = bm[r * m + col];
                if f == 0.0 {
                    continue;
                }
                for k in 0..m {
                    bm[r * m + k] -= f * bm[col * m + k];
                    inv[r * m + k] -= f * inv[col * m + k];
                }
            }
        }
        self.binv = inv;
        self.xb = (0..m)
            .map(|i| (0..m).map(|k| self.binv[i * m + k] * self.sf.b[k]).sum())
            .collect();
        self.since_refactor = 0;
        Ok(())
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.sf.m;
        let mut y = vec![0.0; m];
        for (i, &c) in self.basis.iter().enumerate() {
            let cb = cost[c];
            if cb == 0.0 {
                continue;
            }
            for (k, yk) in y.iter_mut().enumerate() {
                *yk += cb * self.binv[i * m + k];
            }
        }
        y
    }

    fn ftran(&self, col: &[f64]) -> Vec<f64> {
        let m = self.sf.m;
        (0..m)
            .map(|i| {
                let row = &self.binv[i * m..(i + 1) * m];
                row.iter().zip(col).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    fn pivot(&mut self, r: usize, q: usize, w: &[f64]) {
        let m = self.sf.m;
        let step = self.xb[r] / w[r];
        for i in 0..m {
            if i != r {
                self.xb[i] -= step * w[i];
            }
        }
        self.xb[r] = step;
        let wr = w[r];
        for k in 0..m {
            self.binv[r * m + k] /= wr;
        }
        for i in 0..m {
            if i == r || w[i] == 0.0 {
                continue;
            }
            let f = w[i];
            for k in 0..m {
                self.binv[i * m + k] -= f * self.binv[r * m + k];
            }
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
        self.iterations += 1;
        self.since_refactor += 1;
    }

    /// Simplex iterations on `cost`; artificial columns never enter. Stops
    /// early once the objective is at or below `stop_at`.
    fn run(&mut self, cost: &[f64], stop_at: Option<f64>) -> Result<Outcome> {
        let m = self.sf.m;
        let mut degenerate_run = 0usize;
        let mut best_z = f64::INFINITY;
        let mut bland = false;
        loop {
            if self.iterations >= self.max_iterations {
                return Err(self.numerical("iteration limit exceeded"));
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            if let Some(target) = stop_at {
                let z: f64 = self.basis.iter().zip(&self.xb).map(|(&c, &x)| cost[c] * x.max(0.0)).sum();
                if z <= target {
                    return Ok(Outcome::Optimal);
                }
            }
            bland |= degenerate_run >= self.opts.bland_after;
            let y = self.duals(cost);
            let mut entering = None;
            let mut best = -PRICE_TOL;
            for j in 0..self.sf.ncols() {
                if self.is_basic[j] || self.sf.is_artificial(j) {
                    continue;
                }
                let col = self.sf.col(j);
                let d = cost[j] - y.iter().zip(col).map(|(a, b)| a * b).sum::<f64>();
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                return Ok(Outcome::Optimal);
            };
            let w = self.ftran(self.sf.col(q));
            let mut bound = f64::INFINITY;
            for i in 0..m {
                if w[i] > PIVOT_TOL {
                    bound = bound.min((self.xb[i].max(0.0) + HARRIS_TOL) / w[i]);
                }
            }
            if bound == f64::INFINITY {
                return Ok(Outcome::Unbounded);
            }
            // Bland: minimum ratio with basics below HARRIS_TOL read as zero,
            // ties to the lowest column
            let ratio = |i: usize| {
                let x = self.xb[i].max(0.0);
                if bland && x <= HARRIS_TOL { 0.0 } else { x / w[i] }
            };
            if bland {
                let min = (0..m).filter(|&i| w[i] > PIVOT_TOL).map(ratio).fold(f64::INFINITY, f64::min);
                bound = min * (1.0 + 1e-9);
            }
            let mut leave: Option<usize> = None;
            for i in 0..m {
                if w[i] <= PIVOT_TOL || ratio(i) > bound {
                    continue;
                }
                leave = match leave {
                    None => Some(i),
                    Some(l) => {
                        let better = if bland {
                            self.basis[i] < self.basis[l]
                        } else {
                            w[i] > w[l] || (w[i] == w[l] && self.basis[i] < self.basis[l])
                        };
                        Some(if better { i } else { l })
                    }
                };
            }
            let r = leave.expect("ratio test bound implies a candidate row");
            self.xb[r] = self.xb[r].max(0.0);
            self.pivot(r, q, &w);
            // progress is judged against the best value so far, so round-off
            // cleared by a refactor cannot pass for progress
            let z: f64 = self.basis.iter().zip(&self.xb).map(|(&c, &x)| cost[c] * x).sum();
            if z < best_z - DEGENERATE_GAIN * (1.0 + best_z.abs().min(1e12)) {
                best_z = z;
                degenerate_run = 0;
            } else {
                degenerate_run += 1;
            }
        }
    }

    fn run_two_phase(&mut self, problem: &LpProblem, early_stop: bool) -> Result<LpSolution> {
        let sf = self.sf;
        let has_artificial = self.basis.iter().any(|&c| sf.is_artificial(c));
        if has_artificial {
            let phase1: Vec<f64> = (0..sf.ncols())
                .map(|j| if sf.is_artificial(j) { 1.0 } else { 0.0 })
                .collect();
            self.run(&phase1, early_stop.then(|| problem.feas_abs() * 0.5))?;
            self.refactor()?;
            let infeas: f64 = self
                .basis
                .iter()
                .zip(&self.xb)
                .filter(|(c, _)| sf.is_artificial(**c))
                .map(|(_, v)| v.max(0.0))
                .sum();
            if infeas > problem.feas_abs() {
                return Ok(LpSolution::failed(LpStatus::Infeasible, self.tag(), self.iterations));
            }
            self.drive_out_artificials()?;
        }
        self.run_phase_two(problem)
    }

    fn drive_out_artificials(&mut self) -> Result<()> {
        let m = self.sf.m;
        for r in 0..m {
            if !self.sf.is_artificial(self.basis[r]) {
                continue;
            }
            let row = self.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.sf.ncols() {
                if self.is_basic[j] || self.sf.is_artificial(j) {
                    continue;
                }
                let v: f64 = row.iter().zip(self.sf.col(j)).map(|(a, b)| a * b).sum();
                if v.abs() > 1e-7 && best.is_none_or(|(_, bv)| v.abs() > bv.abs()) {
                    best = Some((j, v));
                }
            }
            // a row with no candidate is redundant; its artificial stays basic at zero
            if let Some((q, _)) = best {
                let w = self.ftran(self.sf.col(q));
                self.pivot(r, q, &w);
            }
        }
        self.refactor()
    }

    fn run_phase_two(&mut self, problem: &LpProblem) -> Result<LpSolution> {
        let sf = self.sf;
        let cost: Vec<f64> = (0..sf.ncols())
            .map(|j| if sf.is_artificial(j) { 0.0 } else { sf.cost[j] })
            .collect();
        if let Outcome::Unbounded = self.run(&cost, None)? {
            return Ok(LpSolution::failed(LpStatus::Unbounded, self.tag(), self.iterations));
        }
        self.refactor()?;
        let mut xcol = vec![0.0; sf.ncols()];
        for (k, &c) in self.basis.iter().enumerate() {
            xcol[c] = self.xb[k].max(0.0);
        }
        let primal: Vec<f64> = sf
            .vars
            .iter()
            .map(|v| match (v.pos, v.neg) {
                (Some(p), Some(n)) => xcol[p] - xcol[n],
                (Some(p), None) => v.offset + xcol[p],
                (None, Some(n)) => v.offset - xcol[n],
                (None, None) => unreachable!("every variable maps to a column"),
            })
            .collect();
        let residual = problem.primal_residual(&primal);
        if residual > problem.feas_abs() {
            return Err(self.numerical(&format!("primal residual {residual:.3e} after solve")));
        }
        let y = self.duals(&cost);
        let duals = (0..sf.orig_rows).map(|i| y[i] * sf.row_sign[i]).collect();
        let objective_value = problem
            .objective
            .iter()
            .zip(&primal)
            .map(|(c, x)| c * x)
            .sum();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            objective_value,
            primal,
            duals,
            basis: self.tag(),
            iterations: self.iterations,
        })
    }

    fn tag(&self) -> BasisTag {
        let mut cols: Vec<BasisColumn> = self.basis.iter().map(|&c| self.sf.kinds[c]).collect();
        cols.sort();
        BasisTag(cols)
    }
}
