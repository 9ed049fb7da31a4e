//! Random ensembles, measurements and behaviors for property tests and the
//! seesaw search.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::linalg::{self, CMat};
use crate::model::{Behavior, HermitianOperator, Povm, QuantumEnsemble, Scenario};

/// A `rows x cols` matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

/// `L L† / Tr(L L†)`.
pub fn state_from_factor(l: &CMat) -> HermitianOperator {
    let m = l * l.adjoint();
    let tr = linalg::trace_re(&m);
    HermitianOperator::hermitized(linalg::scaled(&m, 1.0 / tr))
}

/// Density matrix of rank at most `rank`, from the induced Ginibre measure.
pub fn random_state<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> HermitianOperator {
    state_from_factor(&ginibre(d, rank.max(1), rng))
}

pub fn random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    random_state(d, 1, rng)
}

/// A point drawn uniformly from the probability simplex.
pub fn random_distribution<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// A random unitary from the QR factor of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    ginibre(d, d, rng).qr().q()
}

/// `n` states of dimension `d` with ranks drawn from `1..=d`.
pub fn random_ensemble<R: Rng + ?Sized>(n: usize, d: usize, prior: Option<Vec<f64>>, rng: &mut R) -> QuantumEnsemble {
    let states = (0..n)
        .map(|_| {
            let rank = rng.random_range(1..=d);
            random_state(d, rank, rng)
        })
        .collect();
    let prior = prior.unwrap_or_else(|| vec![1.0 / n as f64; n]);
    QuantumEnsemble::new(prior, states).expect("random ensemble is valid")
}

/// Random `k`-outcome POVM: `S^{-1/2} G_b S^{-1/2}` with Wishart `G_b`.
pub fn random_povm<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Povm {
    let raw: Vec<CMat> = (0..k)
        .map(|_| {
            let g = ginibre(d, d, rng);
            &g * g.adjoint()
        })
        .collect();
    let mut total = CMat::zeros(d, d);
    for g in &raw {
        total += g;
    }
    let s = linalg::inverse_sqrt(&linalg::hermitize(&total)).expect("Wishart sum is positive definite");
    let mut effects: Vec<CMat> = raw.iter().map(|g| linalg::hermitize(&(&s * g * &s))).collect();
    // Absorb rounding so the effects sum to the identity exactly enough.
    let mut partial = CMat::zeros(d, d);
    for e in &effects[..k - 1] {
        partial += e;
    }
    effects[k - 1] = linalg::hermitize(&(linalg::identity(d) - partial));
    Povm::new(effects.into_iter().map(HermitianOperator::hermitized).collect()).expect("random POVM is valid")
}

/// Random binary projective measurement with a uniformly chosen rank.
pub fn random_projective<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Povm {
    let g = ginibre(d, d, rng);
    let h = linalg::hermitize(&(&g + g.adjoint()));
    Povm::from_observable(&HermitianOperator::hermitized(h)).expect("observable yields a POVM")
}

/// Each conditional distribution drawn uniformly from the simplex.
pub fn random_behavior<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Behavior {
    let k = scenario.k();
    let mut table = Vec::with_capacity(scenario.table_len());
    for _ in 0..scenario.n() * scenario.l() {
        table.extend(random_distribution(k, rng));
    }
    Behavior::new(scenario.clone(), table).expect("random behavior is valid")
}
