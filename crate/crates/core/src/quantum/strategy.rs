use std::f64::consts::{FRAC_PI_8, SQRT_2};

use num_complex::Complex64;

use super::info::info_of_mixed;
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{
    behavior_from_quantum, witness_value, Behavior, HermitianOperator, MixedEnsemble, Povm, QuantumEnsemble,
    Scenario, Witness, PRIOR_TOL,
};

/// States and measurements used for one value of the shared variable.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumBranch {
    pub weight: f64,
    pub ensemble: QuantumEnsemble,
    pub measurements: Vec<Povm>,
}

/// A shared-randomness mixture of quantum prepare-and-measure strategies.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumStrategy {
    branches: Vec<QuantumBranch>,
    scenario: Scenario,
}

impl QuantumStrategy {
    pub fn new(branches: Vec<QuantumBranch>) -> Result<Self> {
        let first = branches.first().ok_or_else(|| Error::invalid("strategy has no branches"))?;
        let l = first.measurements.len();
        let k = first.measurements.first().map(Povm::outcomes).unwrap_or(0);
        if l == 0 {
            return Err(Error::invalid("strategy has no measurements"));
        }
        let scenario = Scenario::new(first.ensemble.len(), l, k, first.ensemble.prior().to_vec())?;
        MixedEnsemble::new(branches.iter().map(|b| (b.weight, b.ensemble.clone())).collect())?;
        for (i, b) in branches.iter().enumerate() {
            if b.measurements.len() != l {
                return Err(Error::invalid(format!("branch {i} has {} measurements, expected {l}", b.measurements.len())));
            }
            for (y, m) in b.measurements.iter().enumerate() {
                if m.outcomes() != k || m.dim() != b.ensemble.dim() {
                    return Err(Error::invalid(format!("branch {i} measurement {y} does not fit the branch")));
                }
            }
        }
        Ok(QuantumStrategy { branches, scenario })
    }

    pub fn single(ensemble: QuantumEnsemble, measurements: Vec<Povm>) -> Result<Self> {
        QuantumStrategy::new(vec![QuantumBranch { weight: 1.0, ensemble, measurements }])
    }

    pub fn branches(&self) -> &[QuantumBranch] {
        &self.branches
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn mixed_ensemble(&self) -> MixedEnsemble {
        MixedEnsemble::new(self.branches.iter().map(|b| (b.weight, b.ensemble.clone())).collect())
            .expect("validated on construction")
    }

    /// `sum_lambda p(lambda) p_lambda(b|x,y)`.
    pub fn behavior(&self) -> Result<Behavior> {
        let mut table = vec![0.0; self.scenario.table_len()];
        for b in &self.branches {
            let p = behavior_from_quantum(&b.ensemble, &b.measurements)?;
            for (t, v) in table.iter_mut().zip(p.table()) {
                *t += b.weight * v;
            }
        }
        Behavior::new(self.scenario.clone(), table)
    }
}

/// Information (bits) and witness value of a strategy.
pub fn strategy_info_and_value(s: &QuantumStrategy, w: &Witness) -> Result<(f64, f64)> {
    if !w.scenario().same_shape(s.scenario()) {
        return Err(Error::invalid("witness does not match the strategy scenario"));
    }
    let info = info_of_mixed(&s.mixed_ensemble())?;
    let mut value = 0.0;
    for b in s.branches() {
        let p = behavior_from_quantum(&b.ensemble, &b.measurements)?;
        value += b.weight * witness_value(w, &p)?;
    }
    Ok((info, value))
}

fn ket(v: &[f64]) -> HermitianOperator {
    let c: Vec<Complex64> = v.iter().map(|&a| Complex64::new(a, 0.0)).collect();
    HermitianOperator::pure(&c).expect("unit vector")
}

/// The three qubit states of the basic quantum strategy, uniform prior.
pub fn e0_ensemble() -> QuantumEnsemble {
    QuantumEnsemble::uniform(vec![
        ket(&[1.0 / SQRT_2, 1.0 / SQRT_2]),
        ket(&[1.0, 0.0]),
        ket(&[FRAC_PI_8.sin(), -FRAC_PI_8.cos()]),
    ])
    .expect("valid ensemble")
}

/// Observables `-(sx + sz)/sqrt2` and `(sz - sx)/sqrt2` as binary POVMs.
pub fn e0_measurements() -> Vec<Povm> {
    let sx = linalg::sigma_x();
    let sz = linalg::sigma_z();
    let b1 = linalg::scaled(&(&sx + &sz), -1.0 / SQRT_2);
    let b2 = linalg::scaled(&(&sz - &sx), 1.0 / SQRT_2);
    [b1, b2]
        .iter()
        .map(|b| Povm::from_observable(&HermitianOperator::hermitized(b.clone())).expect("observable"))
        .collect()
}

/// Identical states in dimension `d` with a fixed output for every `y`.
pub fn constant_branch(n: usize, d: usize, outputs: &[usize], k: usize) -> Result<(QuantumEnsemble, Vec<Povm>)> {
    let mut v = vec![0.0; d];
    v[0] = 1.0;
    let e = QuantumEnsemble::uniform(vec![ket(&v); n])?;
    let m = outputs.iter().map(|&b| Povm::constant(d, k, b)).collect::<Result<_>>()?;
    Ok((e, m))
}

/// Qutrit strategy sending `x` perfectly, measured so that F1 = 5.
pub fn relay_branch() -> (QuantumEnsemble, Vec<Povm>) {
    let e = QuantumEnsemble::uniform(vec![ket(&[1.0, 0.0, 0.0]), ket(&[0.0, 1.0, 0.0]), ket(&[0.0, 0.0, 1.0])])
        .expect("valid ensemble");
    let proj = |i: usize| HermitianOperator::hermitized(linalg::basis_projector(3, i));
    let binary = |i: usize| {
        let p = proj(i);
        let rest = HermitianOperator::hermitized(linalg::identity(3) - p.matrix());
        Povm::new(vec![p, rest]).expect("projective pair")
    };
    (e, vec![binary(2), binary(1)])
}

/// `q E0 + (1-q)` no-information branch answering outcome 1 for every y.
pub fn e0_with_silence(q: f64) -> Result<QuantumStrategy> {
    check_weight(q)?;
    let (silent, outs) = constant_branch(3, 2, &[1, 1], 2)?;
    QuantumStrategy::new(vec![
        QuantumBranch { weight: q, ensemble: e0_ensemble(), measurements: e0_measurements() },
        QuantumBranch { weight: 1.0 - q, ensemble: silent, measurements: outs },
    ])
}

/// `q E0 + (1-q)` perfect qutrit relay.
pub fn e0_with_relay(q: f64) -> Result<QuantumStrategy> {
    check_weight(q)?;
    let (relay, meas) = relay_branch();
    QuantumStrategy::new(vec![
        QuantumBranch { weight: q, ensemble: e0_ensemble(), measurements: e0_measurements() },
        QuantumBranch { weight: 1.0 - q, ensemble: relay, measurements: meas },
    ])
}

fn check_weight(q: f64) -> Result<()> {
    if !(-PRIOR_TOL..=1.0 + PRIOR_TOL).contains(&q) {
        return Err(Error::invalid(format!("mixing weight {q} outside [0, 1]")));
    }
    Ok(())
}

/// F1 reached by the two analytic mixed strategies at information `alpha`.
pub fn analytic_f1_curve(alpha: f64) -> Result<f64> {
    let top = 3f64.log2();
    if !alpha.is_finite() || !(0.0..=top + 1e-12).contains(&alpha) {
        return Err(Error::invalid(format!("alpha = {alpha} outside [0, log2 3]")));
    }
    let c = 1.0 + 2.0 * SQRT_2;
    if alpha <= 1.0 {
        let q = 2f64.powf(alpha) - 1.0;
        Ok(1.0 + 2.0 * SQRT_2 * q)
    } else {
        let q = (3.0 - 2f64.powf(alpha)).max(0.0);
        Ok(c * q + 5.0 * (1.0 - q))
    }
}
