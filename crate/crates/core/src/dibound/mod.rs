//! Theory-independent bounds: the least information any physical model needs
//! for a behavior, and the largest witness value at a given budget.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{hmin, validate_distribution, Behavior, InfoBudget, Scenario, Witness, PROB_TOL};
use crate::optim::{solve_lp, LpProblem, LpStatus, RowSense, Sense};

/// Default bisection tolerance on alpha in bits.
pub const CURVE_TOL: f64 = 1e-6;
const MAX_BISECTIONS: usize = 60;
const VALUE_TOL: f64 = 1e-9;

/// Bob's relabelling `p(b'|y, b)` of his output into a guess `b'` of `x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PostProcessing {
    n: usize,
    l: usize,
    k: usize,
    /// Indexed `(y * k + b) * n + b'`.
    table: Vec<f64>,
}

impl PostProcessing {
    pub fn new(n: usize, l: usize, k: usize, table: Vec<f64>) -> Result<Self> {
        if table.len() != n * l * k {
            return Err(Error::invalid(format!("post-processing table has {} entries, expected {}", table.len(), n * l * k)));
        }
        for (r, row) in table.chunks(n.max(1)).enumerate() {
            validate_distribution(row, PROB_TOL, &format!("post-processing row {r}"))?;
        }
        Ok(PostProcessing { n, l, k, table })
    }

    /// `b' = guess(y, b)` with certainty.
    pub fn deterministic(n: usize, l: usize, k: usize, guess: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let mut table = vec![0.0; n * l * k];
        for y in 0..l {
            for b in 0..k {
                let g = guess(y, b);
                if g >= n {
                    return Err(Error::invalid(format!("guess {g} outside [0, {n})")));
                }
                table[(y * k + b) * n + g] = 1.0;
            }
        }
        PostProcessing::new(n, l, k, table)
    }

    pub fn get(&self, y: usize, b: usize, guess: usize) -> f64 {
        self.table[(y * self.k + b) * self.n + guess]
    }

    /// Probability of guessing `x` correctly with setting `y`, for each `y`.
    pub fn success(&self, p: &Behavior) -> Result<Vec<f64>> {
        let s = p.scenario();
        if (s.n(), s.l(), s.k()) != (self.n, self.l, self.k) {
            return Err(Error::invalid("post-processing does not match the behavior scenario"));
        }
        Ok((0..s.l())
            .map(|y| {
                (0..s.n())
                    .flat_map(|x| (0..s.k()).map(move |b| (x, b)))
                    .map(|(x, b)| s.prior()[x] * p.get(x, y, b) * self.get(y, b, x))
                    .sum()
            })
            .collect())
    }
}

/// `g_y = sum_b max_x p(x) p(b|x,y)`, the best guessing probability from `(y, b)`.
fn best_guess(p: &Behavior, y: usize) -> f64 {
    let s = p.scenario();
    (0..s.k())
        .map(|b| (0..s.n()).map(|x| s.prior()[x] * p.get(x, y, b)).fold(0.0, f64::max))
        .sum()
}

/// The optimal post-processing: guess the `x` maximizing `p(x) p(b|x,y)`,
/// lowest index on ties.
pub fn optimal_post_processing(p: &Behavior) -> PostProcessing {
    let s = p.scenario();
    PostProcessing::deterministic(s.n(), s.l(), s.k(), |y, b| {
        let mut best = 0;
        for x in 1..s.n() {
            if s.prior()[x] * p.get(x, y, b) > s.prior()[best] * p.get(best, y, b) {
                best = x;
            }
        }
        best
    })
    .expect("argmax is a valid guess")
}

/// Least information (bits) compatible with `p` in any theory where Bob may
/// guess `x` from his setting and output.
pub fn di_min_info(p: &Behavior) -> Result<f64> {
    let s = p.scenario();
    let g = (0..s.l()).map(|y| best_guess(p, y)).fold(0.0, f64::max);
    Ok((hmin(s.prior())? + g.log2()).max(0.0))
}

/// Largest value of `w` over behaviors whose output-based guessing
/// probability stays within the cap for every `y`.
pub fn di_max_witness(w: &Witness, budget: &InfoBudget) -> Result<f64> {
    let s = w.scenario();
    let (n, l, k) = (s.n(), s.l(), s.k());
    let np = s.table_len();
    let t = |y: usize, b: usize| np + y * k + b;
    let mut objective = w.coefficients().to_vec();
    objective.extend(std::iter::repeat_n(0.0, l * k));
    let mut lp = LpProblem::new(Sense::Maximize, objective);
    for x in 0..n {
        for y in 0..l {
            let row: Vec<(usize, f64)> = (0..k).map(|b| (s.index(x, y, b), 1.0)).collect();
            lp.add_sparse_row(&row, RowSense::Eq, 1.0);
        }
    }
    for y in 0..l {
        for b in 0..k {
            for x in 0..n {
                lp.add_sparse_row(&[(t(y, b), 1.0), (s.index(x, y, b), -s.prior()[x])], RowSense::Ge, 0.0);
            }
        }
        let row: Vec<(usize, f64)> = (0..k).map(|b| (t(y, b), 1.0)).collect();
        lp.add_sparse_row(&row, RowSense::Le, budget.cap());
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.value),
        other => Err(Error::invalid(format!("theory-independent LP ended with {other:?}"))),
    }
}

/// `(alpha, di_max_witness)` at each alpha.
pub fn di_witness_curve(w: &Witness, alphas: &[f64]) -> Result<Vec<(f64, f64)>> {
    alphas
        .iter()
        .map(|&a| Ok((a, di_max_witness(w, &InfoBudget::from_alpha(a, w.scenario())?)?)))
        .collect()
}

/// For each target value, the least alpha (within `CURVE_TOL`) at which the
/// theory-independent ceiling reaches it.
pub fn di_info_curve(w: &Witness, values: &[f64]) -> Result<Vec<(f64, f64)>> {
    di_info_curve_with(w, values, CURVE_TOL)
}

pub fn di_info_curve_with(w: &Witness, values: &[f64], tol: f64) -> Result<Vec<(f64, f64)>> {
    let s: &Scenario = w.scenario();
    let h = hmin(s.prior())?;
    let at = |a: f64| -> Result<f64> { di_max_witness(w, &InfoBudget::from_alpha(a, s)?) };
    let top = at(h)?;
    let floor = at(0.0)?;
    let mut out = Vec::with_capacity(values.len());
    for &v in values {
        if !v.is_finite() || v > top + VALUE_TOL {
            return Err(Error::invalid(format!("value {v} exceeds the unrestricted maximum {top}")));
        }
        if v <= floor + VALUE_TOL {
            out.push((v, 0.0));
            continue;
        }
        let (mut lo, mut hi) = (0.0, h);
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if at(mid)? >= v - VALUE_TOL {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push((v, hi));
    }
    Ok(out)
}
