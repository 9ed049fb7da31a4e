use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::{Behavior, HermitianOperator, Povm, QuantumEnsemble, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RacVariant {
    Average,
    WorstCase,
}

/// An `n_bits -> m` random access code task.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RacSpec {
    pub n_bits: usize,
    /// Bits of communication the code is compared against.
    pub m: usize,
    pub variant: RacVariant,
}

impl RacSpec {
    pub fn new(n_bits: usize, m: usize, variant: RacVariant) -> Result<Self> {
        if n_bits == 0 || n_bits > 16 {
            return Err(Error::invalid(format!("n_bits = {n_bits} outside 1..=16")));
        }
        Ok(RacSpec { n_bits, m, variant })
    }
}

/// `(2^n_bits, n_bits, 2)` with a uniform prior.
pub fn rac_scenario(n_bits: usize) -> Result<Scenario> {
    Scenario::uniform(1 << n_bits, n_bits, 2)
}

/// Bit `x_{y+1}` of `x`, where `x_1` is the most significant bit.
pub fn target_bit(x: usize, y: usize, n_bits: usize) -> usize {
    (x >> (n_bits - 1 - y)) & 1
}

/// Average or worst-case probability that `b = x_y`.
pub fn rac_score(p: &Behavior, spec: &RacSpec) -> Result<f64> {
    let s = p.scenario();
    if s.n() != 1 << spec.n_bits || s.l() != spec.n_bits || s.k() != 2 {
        return Err(Error::invalid(format!(
            "behavior shape ({}, {}, {}) does not fit a {}-bit code",
            s.n(),
            s.l(),
            s.k(),
            spec.n_bits
        )));
    }
    let hits = (0..s.n()).flat_map(|x| (0..s.l()).map(move |y| p.get(x, y, target_bit(x, y, spec.n_bits))));
    Ok(match spec.variant {
        RacVariant::Average => hits.sum::<f64>() / (s.n() * s.l()) as f64,
        RacVariant::WorstCase => hits.fold(f64::INFINITY, f64::min),
    })
}

fn sign(bit: usize) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

fn binary(obs: CMat) -> Povm {
    Povm::from_observable(&HermitianOperator::hermitized(obs)).expect("Hermitian observable")
}

/// Sixteen rank-two ququart states and the four two-qubit observables that
/// score 3/4 on every `(x, y)` of the 4-bit code. Outcome 0 (eigenvalue +1)
/// answers bit value 0.
pub fn build_paper_ensemble() -> (QuantumEnsemble, Vec<Povm>) {
    let (i2, sx, sy, sz) = (linalg::identity(2), linalg::sigma_x(), linalg::sigma_y(), linalg::sigma_z());
    let terms = [
        linalg::kron(&sx, &sx),
        linalg::kron(&sy, &sx),
        linalg::kron(&sz, &sx),
        linalg::kron(&i2, &sy),
    ];
    let states = (0..16)
        .map(|x| {
            let mut m = linalg::scaled(&linalg::identity(4), 2.0);
            for (j, t) in terms.iter().enumerate() {
                m += linalg::scaled(t, sign(target_bit(x, j, 4)));
            }
            HermitianOperator::new(linalg::scaled(&m, 1.0 / 8.0)).expect("Hermitian")
        })
        .collect();
    let ensemble = QuantumEnsemble::uniform(states).expect("valid states");
    (ensemble, terms.into_iter().map(binary).collect())
}

/// Pure qubit codes with Bloch vectors on the square (`n_bits = 2`) or cube
/// (`n_bits = 3`) and Pauli measurements.
pub fn qubit_rac_reference(n_bits: usize) -> Result<(QuantumEnsemble, Vec<Povm>)> {
    if !(2..=3).contains(&n_bits) {
        return Err(Error::invalid(format!("no qubit reference code for n_bits = {n_bits}")));
    }
    let paulis = [linalg::sigma_x(), linalg::sigma_y(), linalg::sigma_z()];
    let norm = 1.0 / (n_bits as f64).sqrt();
    let states = (0..1usize << n_bits)
        .map(|x| {
            let mut m = linalg::identity(2);
            for (j, p) in paulis.iter().take(n_bits).enumerate() {
                m += linalg::scaled(p, sign(target_bit(x, j, n_bits)) * norm);
            }
            HermitianOperator::new(linalg::scaled(&m, 0.5)).expect("Hermitian")
        })
        .collect();
    let ensemble = QuantumEnsemble::uniform(states)?;
    Ok((ensemble, paulis.into_iter().take(n_bits).map(binary).collect()))
}

/// Alice sends `x_1`; Bob outputs it for `y = 0` and a fair coin otherwise.
pub fn first_bit_relay(n_bits: usize) -> Result<Behavior> {
    let s = rac_scenario(n_bits)?;
    Behavior::from_fn(s, |x, y, b| {
        if y == 0 {
            if b == target_bit(x, 0, n_bits) {
                1.0
            } else {
                0.0
            }
        } else {
            0.5
        }
    })
}
