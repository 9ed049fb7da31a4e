//! Dense two-phase revised simplex.
//!
//! Problems are converted to `min c'u, A u = b, u >= 0, b >= 0` with slack and
//! artificial columns. The basis inverse is kept explicitly and refreshed from
//! an LU factorization every [`REFACTOR_EVERY`] pivots. Pricing is Dantzig's
//! rule until the pivot count passes a threshold, then Bland's rule, which
//! cannot cycle.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const REFACTOR_EVERY: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    sense: Sense,
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    senses: Vec<RowSense>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LpProblem {
    /// Variables default to `[0, +inf)`.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            sense,
            objective,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: RowSense, rhs: f64) -> &mut Self {
        self.rows.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
        self
    }

    /// Sparse row given as `(column, coefficient)` pairs.
    pub fn add_sparse_row(&mut self, entries: &[(usize, f64)], sense: RowSense, rhs: f64) -> &mut Self {
        let mut row = vec![0.0; self.objective.len()];
        for &(j, v) in entries {
            row[j] += v;
        }
        self.add_row(row, sense, rhs)
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("LP objective has non-finite entries"));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "LP row {i} has {} coefficients, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|a| !a.is_finite()) || !self.rhs[i].is_finite() {
                return Err(Error::invalid(format!("LP row {i} has non-finite entries")));
            }
        }
        for j in 0..n {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY || lo > hi {
                return Err(Error::invalid(format!("variable {j} has bounds [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// Largest violation of rows and bounds at `x`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for (i, row) in self.rows.iter().enumerate() {
            let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            let r = self.rhs[i];
            let viol = match self.senses[i] {
                RowSense::Le => lhs - r,
                RowSense::Ge => r - lhs,
                RowSense::Eq => (lhs - r).abs(),
            };
            worst = worst.max(viol);
        }
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        worst
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value in the problem's own sense; NaN unless optimal.
    pub value: f64,
    pub primal: Vec<f64>,
    /// One multiplier per user row. With zero lower bounds and no finite upper
    /// bounds, `value == sum_i rhs_i * dual_i` at optimality.
    pub dual: Vec<f64>,
    pub residual: f64,
    pub pivots: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct LpOptions {
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub pivot_tol: f64,
    /// Switch to Bland's rule after this many pivots (`None`: scale with size).
    pub bland_after: Option<usize>,
    pub max_pivots: Option<usize>,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            feasibility_tol: 1e-9,
            optimality_tol: 1e-10,
            pivot_tol: 1e-11,
            bland_after: None,
            max_pivots: None,
        }
    }
}

pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    solve_lp_with(problem, &LpOptions::default())
}

/// How an original variable is written in terms of standard-form columns.
enum VarMap {
    Shifted { col: usize, offset: f64 },
    Reflected { col: usize, offset: f64 },
    Split { pos: usize, neg: usize },
}

pub fn solve_lp_with(problem: &LpProblem, opts: &LpOptions) -> Result<LpSolution> {
    problem.validate()?;
    let n_orig = problem.num_vars();

    // Standard-form structural columns.
    let mut maps = Vec::with_capacity(n_orig);
    let mut n_struct = 0;
    let mut extra_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n_orig {
        let (lo, hi) = (problem.lower[j], problem.upper[j]);
        if lo.is_finite() {
            maps.push(VarMap::Shifted { col: n_struct, offset: lo });
            if hi.is_finite() {
                extra_rows.push((n_struct, hi - lo));
            }
            n_struct += 1;
        } else if hi.is_finite() {
            maps.push(VarMap::Reflected { col: n_struct, offset: hi });
            n_struct += 1;
        } else {
            maps.push(VarMap::Split { pos: n_struct, neg: n_struct + 1 });
            n_struct += 2;
        }
    }

    let sign_obj = match problem.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut cost = vec![0.0; n_struct];
    for (j, map) in maps.iter().enumerate() {
        let c = sign_obj * problem.objective[j];
        match *map {
            VarMap::Shifted { col, .. } => cost[col] += c,
            VarMap::Reflected { col, .. } => cost[col] -= c,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }

    let m_user = problem.num_rows();
    let m = m_user + extra_rows.len();
    let mut rows_std: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs_std = Vec::with_capacity(m);
    let mut senses = Vec::with_capacity(m);
    for i in 0..m_user {
        let mut row = vec![0.0; n_struct];
        let mut rhs = problem.rhs[i];
        for (j, map) in maps.iter().enumerate() {
            let a = problem.rows[i][j];
            if a == 0.0 {
                continue;
            }
            match *map {
                VarMap::Shifted { col, offset } => {
                    row[col] += a;
                    rhs -= a * offset;
                }
                VarMap::Reflected { col, offset } => {
                    row[col] -= a;
                    rhs -= a * offset;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        rows_std.push(row);
        rhs_std.push(rhs);
        senses.push(problem.senses[i]);
    }
    for &(col, width) in &extra_rows {
        let mut row = vec![0.0; n_struct];
        row[col] = 1.0;
        rows_std.push(row);
        rhs_std.push(width);
        senses.push(RowSense::Le);
    }

    // Slack columns, then flip rows to b >= 0, then artificials where no
    // slack can start basic.
    let n_slack = senses.iter().filter(|s| **s != RowSense::Eq).count();
    let mut slack_of_row = vec![None; m];
    {
        let mut next = n_struct;
        for (i, s) in senses.iter().enumerate() {
            if *s != RowSense::Eq {
                slack_of_row[i] = Some(next);
                next += 1;
            }
        }
    }
    let n_cols_no_art = n_struct + n_slack;
    let mut row_sign = vec![1.0; m];
    let mut initial_basic = vec![usize::MAX; m];
    let mut n_art = 0;
    for i in 0..m {
        let slack_coef = match senses[i] {
            RowSense::Le => 1.0,
            RowSense::Ge => -1.0,
            RowSense::Eq => 0.0,
        };
        if rhs_std[i] < 0.0 {
            row_sign[i] = -1.0;
        }
        if slack_coef * row_sign[i] > 0.0 {
            initial_basic[i] = slack_of_row[i].expect("inequality row has a slack");
        } else {
            initial_basic[i] = n_cols_no_art + n_art;
            n_art += 1;
        }
    }
    let n_cols = n_cols_no_art + n_art;
    let mut a = DMatrix::<f64>::zeros(m, n_cols);
    let mut b = vec![0.0; m];
    for i in 0..m {
        let s = row_sign[i];
        for j in 0..n_struct {
            a[(i, j)] = s * rows_std[i][j];
        }
        if let Some(col) = slack_of_row[i] {
            let coef = if senses[i] == RowSense::Le { 1.0 } else { -1.0 };
            a[(i, col)] = s * coef;
        }
        if initial_basic[i] >= n_cols_no_art {
            a[(i, initial_basic[i])] = 1.0;
        }
        b[i] = s * rhs_std[i];
    }

    let size = m + n_cols;
    let bland_after = opts.bland_after.unwrap_or(20 * size + 200);
    let max_pivots = opts.max_pivots.unwrap_or(500 * size + 10_000);

    let mut tab = Simplex {
        a,
        b,
        basic: initial_basic,
        binv: DMatrix::identity(m, m),
        x_b: vec![0.0; m],
        pivots: 0,
        since_refactor: 0,
        bland_after,
        max_pivots,
        opts: *opts,
    };
    tab.refactor()?;

    // Phase 1.
    if n_art > 0 {
        let mut c1 = vec![0.0; n_cols];
        for c in c1.iter_mut().skip(n_cols_no_art) {
            *c = 1.0;
        }
        tab.run(&c1, n_cols)?;
        let infeas: f64 = tab
            .basic
            .iter()
            .zip(&tab.x_b)
            .filter(|(j, _)| **j >= n_cols_no_art)
            .map(|(_, v)| *v)
            .sum();
        let scale = 1.0 + tab.b.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if infeas > opts.feasibility_tol * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: f64::NAN,
                primal: Vec::new(),
                dual: Vec::new(),
                residual: infeas,
                pivots: tab.pivots,
            });
        }
        tab.drive_out_artificials(n_cols_no_art)?;
    }

    // Phase 2; artificial columns may not re-enter.
    let mut c2 = vec![0.0; n_cols];
    c2[..n_struct].copy_from_slice(&cost);
    let unbounded = tab.run(&c2, n_cols_no_art)?;
    if unbounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: f64::NAN,
            primal: Vec::new(),
            dual: Vec::new(),
            residual: 0.0,
            pivots: tab.pivots,
        });
    }
    tab.refactor()?;

    let mut u = vec![0.0; n_cols];
    for (i, &j) in tab.basic.iter().enumerate() {
        u[j] = tab.x_b[i].max(0.0);
    }
    let primal: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shifted { col, offset } => offset + u[col],
            VarMap::Reflected { col, offset } => offset - u[col],
            VarMap::Split { pos, neg } => u[pos] - u[neg],
        })
        .collect();
    let y = tab.duals(&c2);
    let dual: Vec<f64> = (0..m_user).map(|i| sign_obj * row_sign[i] * y[i]).collect();
    let value = problem.objective_value(&primal);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value,
        residual: problem.residual(&primal),
        primal,
        dual,
        pivots: tab.pivots,
    })
}

struct Simplex {
    a: DMatrix<f64>,
    b: Vec<f64>,
    basic: Vec<usize>,
    binv: DMatrix<f64>,
    x_b: Vec<f64>,
    pivots: usize,
    since_refactor: usize,
    bland_after: usize,
    max_pivots: usize,
    opts: LpOptions,
}

impl Simplex {
    fn m(&self) -> usize {
        self.basic.len()
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m();
        if m == 0 {
            return Ok(());
        }
        let basis = DMatrix::from_fn(m, m, |i, k| self.a[(i, self.basic[k])]);
        self.binv = basis.lu().try_inverse().ok_or_else(|| Error::Convergence {
            solver: "simplex",
            reason: "singular basis".into(),
            lower: f64::NAN,
            upper: f64::NAN,
        })?;
        for i in 0..m {
            self.x_b[i] = (0..m).map(|k| self.binv[(i, k)] * self.b[k]).sum();
        }
        self.since_refactor = 0;
        Ok(())
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m();
        (0..m)
            .map(|k| (0..m).map(|i| cost[self.basic[i]] * self.binv[(i, k)]).sum())
            .collect()
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let m = self.m();
        (0..m)
            .map(|i| (0..m).map(|k| self.binv[(i, k)] * self.a[(k, j)]).sum())
            .collect()
    }

    fn pivot(&mut self, r: usize, q: usize, w: &[f64]) -> Result<()> {
        let m = self.m();
        let theta = self.x_b[r] / w[r];
        for i in 0..m {
            if i != r {
                self.x_b[i] -= theta * w[i];
            }
        }
        self.x_b[r] = theta;
        let pr = w[r];
        for k in 0..m {
            self.binv[(r, k)] /= pr;
        }
        for i in 0..m {
            if i != r && w[i] != 0.0 {
                let f = w[i];
                for k in 0..m {
                    let v = self.binv[(r, k)];
                    self.binv[(i, k)] -= f * v;
                }
            }
        }
        self.basic[r] = q;
        self.pivots += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        if self.pivots > self.max_pivots {
            return Err(Error::CyclingGuard { pivots: self.pivots });
        }
        Ok(())
    }

    /// Minimizes `cost` over the current basis; columns `>= enter_limit` are
    /// never priced. Returns `true` when the problem is unbounded.
    fn run(&mut self, cost: &[f64], enter_limit: usize) -> Result<bool> {
        let m = self.m();
        let mut is_basic = vec![false; self.a.ncols()];
        for &j in &self.basic {
            is_basic[j] = true;
        }
        loop {
            let y = self.duals(cost);
            let bland = self.pivots >= self.bland_after;
            let mut entering = None;
            let mut best = -self.opts.optimality_tol;
            for j in 0..enter_limit {
                if is_basic[j] {
                    continue;
                }
                let d = cost[j] - (0..m).map(|i| y[i] * self.a[(i, j)]).sum::<f64>();
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                return Ok(false);
            };
            let w = self.column(q);
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..m {
                if w[i] > self.opts.pivot_tol {
                    let ratio = self.x_b[i].max(0.0) / w[i];
                    let better = match leave {
                        None => true,
                        Some(r) => {
                            if ratio < best_ratio - 1e-12 {
                                true
                            } else if ratio <= best_ratio + 1e-12 {
                                if bland {
                                    self.basic[i] < self.basic[r]
                                } else {
                                    w[i] > w[r]
                                }
                            } else {
                                false
                            }
                        }
                    };
                    if better {
                        leave = Some(i);
                        best_ratio = best_ratio.min(ratio);
                    }
                }
            }
            let Some(r) = leave else {
                return Ok(true);
            };
            is_basic[self.basic[r]] = false;
            is_basic[q] = true;
            self.pivot(r, q, &w)?;
        }
    }

    /// Pivots zero-level artificial columns out of the basis where some real
    /// column can replace them. Rows where none can are redundant and their
    /// artificial stays basic at zero.
    fn drive_out_artificials(&mut self, first_art: usize) -> Result<()> {
        let m = self.m();
        for r in 0..m {
            if self.basic[r] < first_art {
                continue;
            }
            let mut is_basic = vec![false; self.a.ncols()];
            for &j in &self.basic {
                is_basic[j] = true;
            }
            let mut pick = None;
            let mut best = 1e-9;
            for j in 0..first_art {
                if is_basic[j] {
                    continue;
                }
                let v: f64 = (0..m).map(|k| self.binv[(r, k)] * self.a[(k, j)]).sum();
                if v.abs() > best {
                    best = v.abs();
                    pick = Some(j);
                }
            }
            if let Some(q) = pick {
                let w = self.column(q);
                self.pivot(r, q, &w)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable_bound() {
        let mut lp = LpProblem::new(Sense::Maximize, vec![1.0]);
        lp.add_row(vec![1.0], RowSense::Le, 3.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 3.0).abs() < 1e-12);
        assert!((s.dual[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_face() {
        let mut lp = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]);
        lp.add_row(vec![1.0, 1.0], RowSense::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LpProblem::new(Sense::Maximize, vec![1.0]);
        lp.add_row(vec![1.0], RowSense::Ge, 2.0);
        lp.add_row(vec![1.0], RowSense::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);

        let mut lp = LpProblem::new(Sense::Maximize, vec![1.0, -1.0]);
        lp.add_row(vec![1.0, -1.0], RowSense::Ge, 0.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn bounds_free_variables_and_equalities() {
        // min |x - 2| style: min t, t >= x - 2, t >= 2 - x, x free in [-5, 5], x = 1.5
        let mut lp = LpProblem::new(Sense::Minimize, vec![0.0, 1.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row(vec![-1.0, 1.0], RowSense::Ge, -2.0);
        lp.add_row(vec![1.0, 1.0], RowSense::Ge, 2.0);
        lp.add_row(vec![1.0, 0.0], RowSense::Eq, 1.5);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 0.5).abs() < 1e-12);
        assert!((s.primal[0] - 1.5).abs() < 1e-12);

        let mut lp = LpProblem::new(Sense::Maximize, vec![1.0, 2.0]);
        lp.set_bounds(0, -1.0, 4.0).set_bounds(1, f64::NEG_INFINITY, 2.5);
        lp.add_row(vec![1.0, 1.0], RowSense::Le, 5.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 7.5).abs() < 1e-12, "{}", s.value);
        assert!(s.residual < 1e-12);
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let mut lp = LpProblem::new(Sense::Minimize, vec![1.0, 2.0, 3.0]);
        lp.add_row(vec![1.0, 1.0, 1.0], RowSense::Eq, 1.0);
        lp.add_row(vec![2.0, 2.0, 2.0], RowSense::Eq, 2.0);
        lp.add_row(vec![0.0, 1.0, 1.0], RowSense::Eq, 0.5);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 1.5).abs() < 1e-12);
    }

    #[test]
    fn bland_rule_from_the_start_agrees() {
        // Beale's cycling example.
        let mut lp = LpProblem::new(Sense::Minimize, vec![-0.75, 150.0, -0.02, 6.0]);
        lp.add_row(vec![0.25, -60.0, -0.04, 9.0], RowSense::Le, 0.0);
        lp.add_row(vec![0.5, -90.0, -0.02, 3.0], RowSense::Le, 0.0);
        lp.add_row(vec![0.0, 0.0, 1.0, 0.0], RowSense::Le, 1.0);
        let dantzig = solve_lp(&lp).unwrap();
        let opts = LpOptions {
            bland_after: Some(0),
            ..LpOptions::default()
        };
        let bland = solve_lp_with(&lp, &opts).unwrap();
        assert!((dantzig.value + 0.05).abs() < 1e-10);
        assert!((bland.value + 0.05).abs() < 1e-10);
    }

    #[test]
    fn pivot_guard_trips() {
        let mut lp = LpProblem::new(Sense::Maximize, vec![1.0, 1.0, 1.0]);
        lp.add_row(vec![1.0, 0.0, 0.0], RowSense::Le, 1.0);
        lp.add_row(vec![0.0, 1.0, 0.0], RowSense::Le, 1.0);
        lp.add_row(vec![0.0, 0.0, 1.0], RowSense::Le, 1.0);
        let opts = LpOptions {
            max_pivots: Some(1),
            ..LpOptions::default()
        };
        assert!(matches!(solve_lp_with(&lp, &opts), Err(Error::CyclingGuard { .. })));
    }

    #[test]
    fn malformed_problem_is_rejected() {
        let mut lp = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]);
        lp.add_row(vec![1.0], RowSense::Le, 1.0);
        assert!(solve_lp(&lp).is_err());
        let mut lp = LpProblem::new(Sense::Maximize, vec![f64::NAN]);
        lp.add_row(vec![1.0], RowSense::Le, 1.0);
        assert!(solve_lp(&lp).is_err());
    }
}
