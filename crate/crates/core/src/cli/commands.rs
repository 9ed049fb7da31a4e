use serde_json::{json, Value};

use super::format::csv_table;
use crate::classical::{ClassicalPolytope, BOUND_TOL};
use crate::dibound::{di_info_curve_with, di_max_witness, di_min_info};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{behavior_from_quantum, hmin, Behavior, InfoBudget, Povm, QuantumEnsemble, Witness};
use crate::optim::{solve_guessing_sdp, SdpDiscriminationProblem};
use crate::quantum::{
    analytic_f1_curve, info_eigen_bound, seesaw_max_witness, strategy_info_and_value, SeesawOptions,
    QuantumStrategy,
};
use crate::rac::{build_paper_ensemble, qubit_rac_reference, rac_score, RacSpec, RacVariant};

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Check(what()))
    }
}

fn pretty(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("JSON value serializes");
    s.push('\n');
    s
}

/// Classical maximum of a witness at `alpha`, the optimal vertex mixture and
/// a facet report against the witness's own bound when it has one.
pub fn cmd_classical_bound(w: &Witness, alpha: f64, verify: bool) -> Result<String> {
    let poly = ClassicalPolytope::build(w.scenario())?;
    let budget = InfoBudget::from_alpha(alpha, w.scenario())?;
    let bound = poly.witness_bound(w, &budget)?;
    let claimed = w.bound().map(|b| b.at(budget.cap()));
    let report = poly.check_inequality(w, &budget, claimed.unwrap_or(bound.value))?;
    if verify {
        let cost: f64 = bound.mixture.iter().map(|(i, p)| p * poly.vertices()[*i].cost).sum();
        let value: f64 = bound.mixture.iter().map(|(i, p)| p * w.dot(poly.vertices()[*i].behavior.table())).sum();
        check(cost <= budget.cap() + BOUND_TOL, || format!("mixture cost {cost} exceeds cap {}", budget.cap()))?;
        check((value - bound.value).abs() <= BOUND_TOL, || format!("mixture value {value} != LP value {}", bound.value))?;
        let best = poly
            .restricted_points(&budget)
            .iter()
            .map(|p| w.dot(p.behavior.table()))
            .fold(f64::MIN, f64::max);
        check((best - bound.value).abs() <= BOUND_TOL, || format!("restricted vertices give {best}, LP gives {}", bound.value))?;
    }
    let mixture: Vec<Value> = bound
        .mixture
        .iter()
        .map(|(i, p)| json!({"weight": p, "cost": poly.vertices()[*i].cost, "behavior": poly.vertices()[*i].behavior}))
        .collect();
    Ok(pretty(json!({
        "alpha": budget.alpha(),
        "cap": budget.cap(),
        "value": bound.value,
        "claimed": claimed,
        "valid": claimed.map(|_| report.valid),
        "tight": claimed.map(|_| report.tight),
        "facet": report.facet,
        "polytope_dim": report.polytope_dim,
        "face_dim": report.face_dim,
        "mixture": mixture,
    })))
}

/// SDP information of an ensemble with the eigenvalue bound.
pub fn cmd_info(e: &QuantumEnsemble, verify: bool) -> Result<String> {
    let sol = solve_guessing_sdp(&SdpDiscriminationProblem::new(e.clone()))?;
    let h = hmin(e.prior())?;
    let bits = (h + sol.value.log2()).clamp(0.0, h.min((e.dim() as f64).log2()));
    let eig = info_eigen_bound(e);
    if verify {
        let y = sol.certificate.matrix();
        for (x, (p, rho)) in e.prior().iter().zip(e.states()).enumerate() {
            let slack = linalg::min_eigenvalue(&(y - linalg::scaled(rho.matrix(), *p)));
            check(slack >= -1e-8, || format!("dual certificate infeasible for x = {x}: {slack:e}"))?;
        }
        let direct: f64 = e
            .prior()
            .iter()
            .zip(e.states())
            .zip(sol.povm.effects())
            .map(|((p, rho), m)| p * linalg::trace_product(rho.matrix(), m.matrix()))
            .sum();
        check((direct - sol.value).abs() <= 1e-9, || format!("POVM gives {direct}, solver reported {}", sol.value))?;
        check(sol.gap() <= 1e-6, || format!("duality gap {:e}", sol.gap()))?;
        check(bits <= eig.bits + 1e-6, || format!("information {bits} above eigenvalue bound {}", eig.bits))?;
    }
    Ok(pretty(json!({
        "bits": bits,
        "guessing": sol.value,
        "guessing_upper": sol.upper,
        "gap": sol.gap(),
        "certificate_trace": linalg::trace_re(sol.certificate.matrix()),
        "eigen_bound": eig.bits,
        "tight": eig.tight,
    })))
}

/// Options shared by the commands that run the seesaw search.
#[derive(Clone, Debug)]
pub struct SearchArgs {
    pub dim: usize,
    pub restarts: usize,
    pub seed: u64,
}

fn is_f1(w: &Witness) -> bool {
    let f1 = Witness::f1();
    w.scenario().same_shape(f1.scenario())
        && w.scenario().prior().iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-12)
        && w.coefficients() == f1.coefficients()
}

/// Classical bound, best known quantum value and theory-independent ceiling
/// at each alpha. The quantum column is the best of the classical value (a
/// valid quantum strategy), the analytic curve for F1 and the seesaw when
/// restarts are requested.
pub fn cmd_curve(w: &Witness, alphas: &[f64], search: &SearchArgs, verify: bool) -> Result<String> {
    let poly = ClassicalPolytope::build(w.scenario())?;
    let f1 = is_f1(w);
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let budget = InfoBudget::from_alpha(alpha, w.scenario())?;
        let classical = poly.witness_bound(w, &budget)?.value;
        let mut quantum = classical;
        if f1 {
            quantum = quantum.max(analytic_f1_curve(alpha.min(3f64.log2()))?);
        }
        if search.restarts > 0 && w.scenario().k() == 2 {
            let opts = SeesawOptions { restarts: search.restarts, seed: search.seed, ..Default::default() };
            quantum = quantum.max(seesaw_max_witness(w, budget.alpha(), search.dim, &opts)?.value);
        }
        let di = di_max_witness(w, &budget)?;
        if verify {
            check(di >= quantum - BOUND_TOL && quantum >= classical - BOUND_TOL, || {
                format!("ordering broken at alpha = {alpha}: di {di}, quantum {quantum}, classical {classical}")
            })?;
        }
        rows.push(vec![alpha, classical, quantum, di]);
    }
    csv_table(&["alpha", "classical_bound", "quantum_lower_bound", "di_upper_bound"], &rows)
}

/// Least classical and theory-independent information for a behavior.
pub fn cmd_membership(p: &Behavior, verify: bool) -> Result<String> {
    let poly = ClassicalPolytope::build(p.scenario())?;
    let m = poly.membership(p)?;
    let di = di_min_info(p)?;
    if verify {
        check(di <= m.bits + 1e-9, || format!("theory-independent bound {di} above classical {}", m.bits))?;
        let mut table = vec![0.0; p.table().len()];
        for (i, wt) in &m.mixture {
            for (t, v) in table.iter_mut().zip(poly.vertices()[*i].behavior.table()) {
                *t += wt * v;
            }
        }
        let gap = table.iter().zip(p.table()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        check(gap <= 1e-8, || format!("vertex mixture misses the behavior by {gap:e}"))?;
    }
    Ok(pretty(json!({
        "classical_bits": m.bits,
        "classical_guessing": m.guessing,
        "di_bits": di,
        "mixture": m.mixture.iter().map(|(i, p)| json!({"vertex": i, "weight": p})).collect::<Vec<_>>(),
    })))
}

/// `(alpha, max_value)` rows, or `(value, alpha_min)` rows when `values`
/// is given.
pub fn cmd_di_bound(w: &Witness, alphas: &[f64], values: Option<&[f64]>, tol: f64, verify: bool) -> Result<String> {
    let (header, rows): ([&str; 2], Vec<Vec<f64>>) = match values {
        Some(values) => {
            let curve = di_info_curve_with(w, values, tol)?;
            (["value", "alpha_min"], curve.into_iter().map(|(v, a)| vec![v, a]).collect())
        }
        None => {
            let mut rows = Vec::with_capacity(alphas.len());
            for &a in alphas {
                rows.push(vec![a, di_max_witness(w, &InfoBudget::from_alpha(a, w.scenario())?)?]);
            }
            (["alpha", "max_value"], rows)
        }
    };
    if verify {
        let mut sorted = rows.clone();
        sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));
        for pair in sorted.windows(2) {
            check(pair[1][1] >= pair[0][1] - 1e-9, || format!("curve decreases between {:?} and {:?}", pair[0], pair[1]))?;
        }
    }
    csv_table(&header, &rows)
}

/// Scores and information of the qubit codes (2 and 3 bits) and the
/// rank-two ququart code (4 bits).
pub fn cmd_rac(verify: bool) -> Result<String> {
    let mut rows = Vec::new();
    for n_bits in [2usize, 3, 4] {
        let (e, m) = if n_bits == 4 { build_paper_ensemble() } else { qubit_rac_reference(n_bits)? };
        let p = behavior_from_quantum(&e, &m)?;
        let info = crate::quantum::info_of_ensemble(&e)?;
        for variant in [RacVariant::Average, RacVariant::WorstCase] {
            let score = rac_score(&p, &RacSpec::new(n_bits, 1, variant)?)?;
            if verify && variant == RacVariant::WorstCase {
                let want = 0.5 + 0.5 / (n_bits as f64).sqrt();
                check((score - want).abs() <= 1e-9, || format!("{n_bits}-bit worst case {score}, expected {want}"))?;
                check(info <= 1.0 + 1e-4, || format!("{n_bits}-bit code carries {info} bits"))?;
            }
            let name = match variant {
                RacVariant::Average => "average",
                RacVariant::WorstCase => "worst_case",
            };
            rows.push((n_bits, name, score, info));
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["n_bits", "variant", "score", "info_bits"]).map_err(io)?;
    for (n, name, score, info) in rows {
        w.write_record([n.to_string(), name.to_string(), super::format::g12(score), super::format::g12(info)])
            .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("UTF-8"))
}

fn povm_json(m: &Povm) -> Value {
    let effects: Vec<Vec<[f64; 2]>> = m
        .effects()
        .iter()
        .map(|e| {
            let a = e.matrix();
            (0..a.nrows())
                .flat_map(|r| (0..a.ncols()).map(move |c| [a[(r, c)].re, a[(r, c)].im]))
                .collect()
        })
        .collect();
    json!(effects)
}

fn strategy_json(s: &QuantumStrategy) -> Value {
    let branches: Vec<Value> = s
        .branches()
        .iter()
        .map(|b| {
            json!({
                "weight": b.weight,
                "ensemble": b.ensemble,
                "measurements": b.measurements.iter().map(povm_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "branches": branches })
}

/// Seesaw search for a large witness value at information `alpha`.
pub fn cmd_seesaw(w: &Witness, alpha: f64, search: &SearchArgs, verify: bool) -> Result<String> {
    let opts = SeesawOptions { restarts: search.restarts, seed: search.seed, ..Default::default() };
    let r = seesaw_max_witness(w, alpha, search.dim, &opts)?;
    if verify {
        let (info, value) = strategy_info_and_value(&r.strategy, w)?;
        check((info - r.info).abs() <= 1e-6 && (value - r.value).abs() <= 1e-6, || {
            format!("re-evaluation gives ({info}, {value}), search reported ({}, {})", r.info, r.value)
        })?;
        check(info <= alpha + 1e-4, || format!("strategy carries {info} bits, budget {alpha}"))?;
    }
    Ok(pretty(json!({
        "alpha": alpha,
        "dim": search.dim,
        "value": r.value,
        "info": r.info,
        "restart": r.restart,
        "evaluations": r.evaluations,
        "failed_restarts": r.failed_restarts,
        "strategy": strategy_json(&r.strategy),
    })))
}
