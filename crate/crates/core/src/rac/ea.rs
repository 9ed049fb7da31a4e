use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::{behavior_from_quantum, Behavior, HermitianOperator, Povm, QuantumEnsemble, Scenario};
use crate::optim::guessing_probability;
use crate::random::{random_distribution, random_povm, random_state};

/// Tolerance for the exact identities checked by [`verify_ea_ceiling`].
pub const EA_TOL: f64 = 1e-9;
const CEILING_TOL: f64 = 1e-6;

/// Classical communication of a `d`-symbol message assisted by a shared
/// state on `A (x) B`. Alice measures `A_{a|x}` and sends `label[x][a]`;
/// Bob measures `M_{b|y}` on `message (x) B`.
#[derive(Clone, Debug)]
pub struct EaStrategy {
    prior: Vec<f64>,
    shared: HermitianOperator,
    dim_a: usize,
    dim_b: usize,
    alice: Vec<Povm>,
    labels: Vec<Vec<usize>>,
    d: usize,
    bob: Vec<Povm>,
}

impl EaStrategy {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        prior: Vec<f64>,
        shared: HermitianOperator,
        dim_a: usize,
        dim_b: usize,
        alice: Vec<Povm>,
        labels: Vec<Vec<usize>>,
        d: usize,
        bob: Vec<Povm>,
    ) -> Result<Self> {
        let n = prior.len();
        QuantumEnsemble::new(prior.clone(), vec![shared.clone(); n])?;
        if shared.dim() != dim_a * dim_b {
            return Err(Error::invalid(format!("shared state has dimension {}, expected {}", shared.dim(), dim_a * dim_b)));
        }
        if alice.len() != n || labels.len() != n {
            return Err(Error::invalid("need one Alice measurement and label row per input"));
        }
        for (x, (a, row)) in alice.iter().zip(&labels).enumerate() {
            if a.dim() != dim_a || row.len() != a.outcomes() {
                return Err(Error::invalid(format!("Alice measurement {x} does not fit")));
            }
            if row.iter().any(|&m| m >= d) {
                return Err(Error::invalid(format!("message label outside [0, {d}) for x = {x}")));
            }
        }
        if bob.is_empty() || bob.iter().any(|m| m.dim() != d * dim_b || m.outcomes() != bob[0].outcomes()) {
            return Err(Error::invalid("Bob measurements must act on message (x) B with a common outcome count"));
        }
        Ok(EaStrategy { prior, shared, dim_a, dim_b, alice, labels, d, bob })
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn message_dim(&self) -> usize {
        self.d
    }

    pub fn bob(&self) -> &[Povm] {
        &self.bob
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::new(self.prior.len(), self.bob.len(), self.bob[0].outcomes(), self.prior.clone())
    }

    /// Unnormalized `p(a|x) sigma_{a|x} = Tr_A[(A_{a|x} (x) 1) rho_AB]`.
    fn steered(&self, x: usize, a: usize) -> CMat {
        let lifted = linalg::kron(self.alice[x].effects()[a].matrix(), &linalg::identity(self.dim_b));
        linalg::partial_trace_first(&(lifted * self.shared.matrix()), self.dim_a, self.dim_b)
    }

    fn reduced_b(&self) -> CMat {
        linalg::partial_trace_first(self.shared.matrix(), self.dim_a, self.dim_b)
    }
}

/// Classical-quantum states `tau_x = sum_a p(a|x) |label><label| (x) sigma_{a|x}`.
pub fn ea_to_qc(s: &EaStrategy) -> Result<QuantumEnsemble> {
    let dim = s.d * s.dim_b;
    let states = (0..s.prior.len())
        .map(|x| {
            let mut tau = CMat::zeros(dim, dim);
            for (a, &m) in s.labels[x].iter().enumerate() {
                let part = s.steered(x, a);
                if linalg::trace_re(&part) <= 0.0 {
                    continue;
                }
                tau += linalg::kron(&linalg::basis_projector(s.d, m), &part);
            }
            HermitianOperator::new(linalg::hermitize(&tau))
        })
        .collect::<Result<Vec<_>>>()?;
    QuantumEnsemble::new(s.prior.clone(), states)
}

/// `p(b|x,y) = sum_a Tr[(A_{a|x} (x) <m_a|M_{b|y}|m_a>) rho_AB]`, computed on
/// the shared state without building the message states.
pub fn ea_behavior(s: &EaStrategy) -> Result<Behavior> {
    let sc = s.scenario()?;
    let db = s.dim_b;
    let block = |m: &CMat, label: usize| m.view((label * db, label * db), (db, db)).into_owned();
    Behavior::from_fn(sc, |x, y, b| {
        s.labels[x]
            .iter()
            .enumerate()
            .map(|(a, &m)| {
                let op = linalg::kron(s.alice[x].effects()[a].matrix(), &block(s.bob[y].effects()[b].matrix(), m));
                linalg::trace_product(&op, s.shared.matrix())
            })
            .sum::<f64>()
            .clamp(0.0, 1.0)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EaReport {
    /// `max_x || sum_a p(a|x) sigma_{a|x} - rho_B ||_max`.
    pub no_signalling_defect: f64,
    pub guessing: f64,
    /// `d * max_x p(x)`.
    pub ceiling: f64,
    /// Largest entrywise gap between the EA behavior and the one from `tau_x`.
    pub behavior_defect: f64,
    pub passed: bool,
}

/// Check that the classical-quantum simulation reproduces the strategy and
/// respects `P_g <= d max_x p(x)`.
pub fn verify_ea_ceiling(s: &EaStrategy) -> Result<EaReport> {
    let rho_b = s.reduced_b();
    let mut no_signalling_defect: f64 = 0.0;
    for x in 0..s.prior.len() {
        let mut total = CMat::zeros(s.dim_b, s.dim_b);
        for a in 0..s.labels[x].len() {
            total += s.steered(x, a);
        }
        no_signalling_defect = no_signalling_defect.max(linalg::max_abs_diff(&total, &rho_b));
    }
    let tau = ea_to_qc(s)?;
    let guessing = guessing_probability(&tau)?;
    let ceiling = s.d as f64 * tau.max_prior();
    let direct = ea_behavior(s)?;
    let simulated = behavior_from_quantum(&tau, &s.bob)?;
    let behavior_defect = direct
        .table()
        .iter()
        .zip(simulated.table())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(EaReport {
        no_signalling_defect,
        guessing,
        ceiling,
        behavior_defect,
        passed: no_signalling_defect <= EA_TOL && guessing <= ceiling + CEILING_TOL && behavior_defect <= EA_TOL,
    })
}

/// Random strategy with local dimensions and message size in `1..=max_dim`,
/// `n` inputs, `l` binary measurements and a random prior.
pub fn random_ea_strategy<R: Rng + ?Sized>(n: usize, l: usize, max_dim: usize, rng: &mut R) -> EaStrategy {
    let dim_a = rng.random_range(1..=max_dim);
    let dim_b = rng.random_range(1..=max_dim);
    let d = rng.random_range(1..=max_dim);
    let rank = rng.random_range(1..=dim_a * dim_b);
    let shared = random_state(dim_a * dim_b, rank, rng);
    let mut alice = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let outcomes = rng.random_range(1..=3);
        alice.push(random_povm(dim_a, outcomes, rng));
        labels.push((0..outcomes).map(|_| rng.random_range(0..d)).collect());
    }
    let bob = (0..l).map(|_| random_povm(d * dim_b, 2, rng)).collect();
    let prior = random_distribution(n, rng);
    EaStrategy::new(prior, shared, dim_a, dim_b, alice, labels, d, bob).expect("random strategy is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::info_of_ensemble;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell() -> HermitianOperator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        HermitianOperator::pure(&[Complex64::new(h, 0.0), z, z, Complex64::new(h, 0.0)]).unwrap()
    }

    fn observable(m: CMat) -> Povm {
        Povm::from_observable(&HermitianOperator::hermitized(m)).unwrap()
    }

    #[test]
    fn product_state_has_no_steering() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ra = random_state(2, 2, &mut rng);
        let rb = random_state(2, 2, &mut rng);
        let shared = HermitianOperator::new(linalg::kron(ra.matrix(), rb.matrix())).unwrap();
        let alice = vec![random_povm(2, 2, &mut rng), random_povm(2, 2, &mut rng)];
        let bob = vec![random_povm(4, 2, &mut rng)];
        let s = EaStrategy::new(vec![0.5, 0.5], shared, 2, 2, alice, vec![vec![0, 1], vec![1, 0]], 2, bob).unwrap();
        for x in 0..2 {
            for a in 0..2 {
                let part = s.steered(x, a);
                let p = linalg::trace_re(&part);
                assert!(linalg::max_abs_diff(&linalg::scaled(&part, 1.0 / p), rb.matrix()) < 1e-12);
            }
        }
        let r = verify_ea_ceiling(&s).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn trivial_message_carries_nothing() {
        let s = EaStrategy::new(
            vec![0.5, 0.5],
            bell(),
            2,
            2,
            vec![observable(linalg::sigma_z()), observable(linalg::sigma_x())],
            vec![vec![0, 0], vec![0, 0]],
            1,
            vec![observable(linalg::sigma_z())],
        )
        .unwrap();
        let tau = ea_to_qc(&s).unwrap();
        for t in tau.states() {
            assert!(linalg::max_abs_diff(t.matrix(), &s.reduced_b()) < 1e-12);
        }
        assert!(info_of_ensemble(&tau).unwrap() < 1e-6);
    }

    #[test]
    fn bell_pair_one_bit() {
        let obs = |m: CMat| observable(linalg::kron(&linalg::sigma_z(), &m));
        let s = EaStrategy::new(
            vec![0.25; 4],
            bell(),
            2,
            2,
            vec![
                observable(linalg::sigma_z()),
                observable(linalg::sigma_z()),
                observable(linalg::sigma_x()),
                observable(linalg::sigma_x()),
            ],
            vec![vec![0, 1], vec![1, 0], vec![0, 1], vec![1, 0]],
            2,
            vec![obs(linalg::sigma_z()), obs(linalg::sigma_x())],
        )
        .unwrap();
        let r = verify_ea_ceiling(&s).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(info_of_ensemble(&ea_to_qc(&s).unwrap()).unwrap() <= 1.0 + 1e-6);
    }

    #[test]
    fn rejects_bad_labels() {
        let r = EaStrategy::new(
            vec![1.0],
            bell(),
            2,
            2,
            vec![observable(linalg::sigma_z())],
            vec![vec![0, 2]],
            2,
            vec![observable(linalg::identity(4))],
        );
        assert!(r.is_err());
    }

    #[test]
    fn random_strategies_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let s = random_ea_strategy(3, 2, 3, &mut rng);
            let r = verify_ea_ceiling(&s).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }
}
