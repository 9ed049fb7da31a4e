use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use super::strategy::{encoding_guessing, increment, strategy_count, DEFAULT_STRATEGY_BUDGET};
use crate::error::{Error, Result};
use crate::model::{hmin, witness_value, Behavior, InfoBudget, Scenario, Witness};
use crate::optim::{solve_lp, LpProblem, LpStatus, RowSense, Sense};

/// Tolerance used when comparing witness values against a claimed bound.
pub const BOUND_TOL: f64 = 1e-9;
const QUANTUM: f64 = 1e12;

/// A deterministic behavior and the least guessing probability of any
/// deterministic strategy producing it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Vertex {
    pub behavior: Behavior,
    pub cost: f64,
}

/// A candidate vertex of the information-restricted polytope, with the
/// guessing cost of the (possibly mixed) point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictedPoint {
    pub behavior: Behavior,
    pub cost: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Membership {
    pub bits: f64,
    pub guessing: f64,
    /// `(vertex index, weight)` for the optimal decomposition.
    pub mixture: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessBound {
    pub value: f64,
    pub cap: f64,
    pub mixture: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    /// Classical maximum of the witness at this budget.
    pub value: f64,
    pub bound: f64,
    pub valid: bool,
    pub tight: bool,
    pub facet: bool,
    pub polytope_dim: isize,
    pub face_dim: isize,
    pub candidates: usize,
    pub saturating: usize,
}

/// Vertices of the full classical polytope for a scenario, with their costs.
#[derive(Clone, Debug)]
pub struct ClassicalPolytope {
    scenario: Scenario,
    vertices: Vec<Vertex>,
}

fn quantize(table: &[f64]) -> Vec<i64> {
    table.iter().map(|v| (v * QUANTUM).round() as i64).collect()
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// Distinct deterministic behaviors with d = n, each with its minimal cost.
pub fn vertices(scenario: &Scenario) -> Result<Vec<Vertex>> {
    Ok(ClassicalPolytope::build(scenario)?.vertices)
}

impl ClassicalPolytope {
    pub fn build(scenario: &Scenario) -> Result<Self> {
        ClassicalPolytope::build_with_budget(scenario, DEFAULT_STRATEGY_BUDGET)
    }

    /// Walks encodings in parallel; for each, only decoders on the used
    /// message symbols are visited, since the rest cannot change the
    /// behavior.
    pub fn build_with_budget(scenario: &Scenario, budget: u128) -> Result<Self> {
        let required = strategy_count(scenario);
        if required > budget {
            return Err(Error::Capacity { required, budget });
        }
        let (n, l, k) = (scenario.n(), scenario.l(), scenario.k());
        if k > u8::MAX as usize {
            return Err(Error::UnsupportedScenario(format!("k = {k} is too large")));
        }
        let prior = scenario.prior().to_vec();
        let n_enc = (n as u64).pow(n as u32);
        let merged: HashMap<Vec<u8>, f64> = (0..n_enc)
            .into_par_iter()
            .fold(HashMap::new, |mut acc: HashMap<Vec<u8>, f64>, idx| {
                let mut encoding = vec![0usize; n];
                let mut rest = idx;
                for e in encoding.iter_mut() {
                    *e = (rest % n as u64) as usize;
                    rest /= n as u64;
                }
                let cost = encoding_guessing(&encoding, n, &prior);
                let mut slot = vec![usize::MAX; n];
                let mut used = 0;
                for &m in &encoding {
                    if slot[m] == usize::MAX {
                        slot[m] = used;
                        used += 1;
                    }
                }
                let mut dec = vec![0usize; used * l];
                loop {
                    let key: Vec<u8> = (0..n)
                        .flat_map(|x| (0..l).map(move |y| (x, y)))
                        .map(|(x, y)| dec[slot[encoding[x]] * l + y] as u8)
                        .collect();
                    acc.entry(key)
                        .and_modify(|c| *c = c.min(cost))
                        .or_insert(cost);
                    if !increment(&mut dec, k) {
                        break;
                    }
                }
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                for (key, cost) in b {
                    a.entry(key).and_modify(|c| *c = c.min(cost)).or_insert(cost);
                }
                a
            });
        let mut vertices: Vec<Vertex> = merged
            .into_iter()
            .map(|(key, cost)| {
                let behavior = Behavior::deterministic(scenario.clone(), |x, y| key[x * l + y] as usize)
                    .expect("deterministic table is a valid behavior");
                Vertex { behavior, cost }
            })
            .collect();
        vertices.sort_by(|a, b| lex_cmp(a.behavior.table(), b.behavior.table()));
        Ok(ClassicalPolytope {
            scenario: scenario.clone(),
            vertices,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Candidate vertex set of the restricted polytope at `budget`: vertices
    /// within the cap plus, for every pair straddling it, the mixture whose
    /// cost equals the cap. May contain points that are not vertices.
    pub fn restricted_points(&self, budget: &InfoBudget) -> Vec<RestrictedPoint> {
        let cap = budget.cap();
        let eps = 1e-12;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut push = |behavior: Behavior, cost: f64, out: &mut Vec<RestrictedPoint>| {
            if seen.insert(quantize(behavior.table())) {
                out.push(RestrictedPoint { behavior, cost });
            }
        };
        let low: Vec<&Vertex> = self.vertices.iter().filter(|v| v.cost < cap - eps).collect();
        let high: Vec<&Vertex> = self.vertices.iter().filter(|v| v.cost > cap + eps).collect();
        for v in self.vertices.iter().filter(|v| v.cost <= cap + eps) {
            push(v.behavior.clone(), v.cost, &mut out);
        }
        for lo in &low {
            for hi in &high {
                let w = (hi.cost - cap) / (hi.cost - lo.cost);
                let mixed = lo
                    .behavior
                    .mix(&hi.behavior, w)
                    .expect("same scenario, weight in [0, 1]");
                push(mixed, cap, &mut out);
            }
        }
        out.sort_by(|a, b| lex_cmp(a.behavior.table(), b.behavior.table()));
        out
    }

    pub fn restricted_vertices(&self, budget: &InfoBudget) -> Vec<Behavior> {
        self.restricted_points(budget)
            .into_iter()
            .map(|p| p.behavior)
            .collect()
    }

    /// Least information (bits) with which classical communication reproduces
    /// `p`, by LP over convex weights on the vertices.
    pub fn membership(&self, p: &Behavior) -> Result<Membership> {
        if !p.scenario().same_shape(&self.scenario) {
            return Err(Error::invalid("behavior does not match the polytope scenario"));
        }
        let s = &self.scenario;
        let costs: Vec<f64> = self.vertices.iter().map(|v| v.cost).collect();
        let mut lp = LpProblem::new(Sense::Minimize, costs);
        for x in 0..s.n() {
            for y in 0..s.l() {
                for b in 0..s.k() - 1 {
                    let idx = s.index(x, y, b);
                    let row = self.vertices.iter().map(|v| v.behavior.table()[idx]).collect();
                    lp.add_row(row, RowSense::Eq, p.table()[idx]);
                }
            }
        }
        lp.add_row(vec![1.0; self.vertices.len()], RowSense::Eq, 1.0);
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::invalid(format!(
                "behavior is not a mixture of classical vertices (LP {:?})",
                sol.status
            )));
        }
        let guessing = sol.value.max(s.max_prior());
        Ok(Membership {
            bits: (hmin(s.prior())? + guessing.log2()).max(0.0),
            guessing,
            mixture: support(&sol.primal),
        })
    }

    /// Classical maximum of `w` when the average guessing cost is at most the
    /// budget's cap.
    pub fn witness_bound(&self, w: &Witness, budget: &InfoBudget) -> Result<WitnessBound> {
        if !w.scenario().same_shape(&self.scenario) {
            return Err(Error::invalid("witness does not match the polytope scenario"));
        }
        let values: Vec<f64> = self.vertices.iter().map(|v| w.dot(v.behavior.table())).collect();
        let mut lp = LpProblem::new(Sense::Maximize, values);
        lp.add_row(self.vertices.iter().map(|v| v.cost).collect(), RowSense::Le, budget.cap());
        lp.add_row(vec![1.0; self.vertices.len()], RowSense::Eq, 1.0);
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::invalid(format!("witness LP ended with {:?}", sol.status)));
        }
        Ok(WitnessBound {
            value: sol.value,
            cap: budget.cap(),
            mixture: support(&sol.primal),
        })
    }

    pub fn check_inequality(&self, w: &Witness, budget: &InfoBudget, claimed: f64) -> Result<InequalityReport> {
        let value = self.witness_bound(w, budget)?.value;
        let valid = value <= claimed + BOUND_TOL;
        let tight = (value - claimed).abs() <= BOUND_TOL;
        let points = self.restricted_points(budget);
        let all: Vec<&[f64]> = points.iter().map(|p| p.behavior.table()).collect();
        let sat: Vec<&[f64]> = points
            .iter()
            .filter(|p| (witness_value(w, &p.behavior).unwrap_or(f64::NAN) - claimed).abs() <= BOUND_TOL)
            .map(|p| p.behavior.table())
            .collect();
        let polytope_dim = affine_rank(&all, 1e-9);
        let face_dim = affine_rank(&sat, 1e-9);
        Ok(InequalityReport {
            value,
            bound: claimed,
            valid,
            tight,
            facet: valid && tight && face_dim == polytope_dim - 1,
            polytope_dim,
            face_dim,
            candidates: all.len(),
            saturating: sat.len(),
        })
    }
}

fn support(w: &[f64]) -> Vec<(usize, f64)> {
    w.iter()
        .enumerate()
        .filter(|(_, v)| **v > 1e-12)
        .map(|(i, v)| (i, *v))
        .collect()
}

/// Dimension of the affine hull of `points`; `-1` for an empty set.
pub fn affine_rank(points: &[&[f64]], tol: f64) -> isize {
    let Some(first) = points.first() else {
        return -1;
    };
    let mut rows: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(first.iter()).map(|(a, b)| a - b).collect())
        .collect();
    let cols = first.len();
    let mut rank = 0;
    for c in 0..cols {
        let Some((piv, _)) = rows
            .iter()
            .enumerate()
            .skip(rank)
            .map(|(i, r)| (i, r[c].abs()))
            .filter(|(_, v)| *v > tol)
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            continue;
        };
        rows.swap(rank, piv);
        let pivot_row = rows[rank].clone();
        for r in rows.iter_mut().skip(rank + 1) {
            let f = r[c] / pivot_row[c];
            if f != 0.0 {
                for (v, p) in r.iter_mut().zip(&pivot_row).skip(c) {
                    *v -= f * p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank as isize
}

pub fn restricted_vertices(scenario: &Scenario, budget: &InfoBudget) -> Result<Vec<Behavior>> {
    Ok(ClassicalPolytope::build(scenario)?.restricted_vertices(budget))
}

pub fn min_info_membership(p: &Behavior) -> Result<f64> {
    Ok(ClassicalPolytope::build(p.scenario())?.membership(p)?.bits)
}

pub fn classical_witness_bound(w: &Witness, budget: &InfoBudget) -> Result<f64> {
    Ok(ClassicalPolytope::build(w.scenario())?.witness_bound(w, budget)?.value)
}

pub fn check_inequality(w: &Witness, budget: &InfoBudget, claimed: f64) -> Result<InequalityReport> {
    ClassicalPolytope::build(w.scenario())?.check_inequality(w, budget, claimed)
}
