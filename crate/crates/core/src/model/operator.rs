use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::behavior::Behavior;
use super::scenario::{max_entry, validate_distribution, Scenario, PRIOR_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const STATE_TOL: f64 = 1e-10;

/// A dense Hermitian operator on a `dim`-dimensional Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMat,
}

impl HermitianOperator {
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::invalid(format!(
                "operator must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("operator has non-finite entries"));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::invalid(format!(
                "operator is not Hermitian (defect {defect:e})"
            )));
        }
        Ok(HermitianOperator {
            matrix: linalg::hermitize(&matrix),
        })
    }

    /// Symmetrizes `(m + m†)/2` instead of rejecting small defects; meant for
    /// matrices produced by arithmetic on Hermitian inputs.
    pub fn hermitized(matrix: CMat) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols());
        HermitianOperator {
            matrix: linalg::hermitize(&matrix),
        }
    }

    pub fn from_real(m: &nalgebra::DMatrix<f64>) -> Result<Self> {
        HermitianOperator::new(linalg::real(m))
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::invalid("zero vector cannot define a pure state"));
        }
        Ok(HermitianOperator::hermitized(linalg::outer(psi) / Complex64::new(norm, 0.0)))
    }

    pub fn identity(d: usize) -> Self {
        HermitianOperator {
            matrix: linalg::identity(d),
        }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        HermitianOperator {
            matrix: linalg::identity(d) / Complex64::new(d as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigenvalues(&self.matrix)
    }

    /// `Tr(self * other)`.
    pub fn expectation(&self, other: &HermitianOperator) -> f64 {
        linalg::trace_product(&self.matrix, &other.matrix)
    }

    fn check_density(&self, what: &str) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::invalid(format!("{what} has trace {tr}")));
        }
        let low = linalg::min_eigenvalue(&self.matrix);
        if low < -STATE_TOL {
            return Err(Error::invalid(format!(
                "{what} has negative eigenvalue {low:e}"
            )));
        }
        Ok(())
    }
}

/// Prior-weighted density matrices `{p(x), rho_x}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleJson", into = "EnsembleJson")]
pub struct QuantumEnsemble {
    prior: Vec<f64>,
    states: Vec<HermitianOperator>,
}

impl QuantumEnsemble {
    pub fn new(prior: Vec<f64>, states: Vec<HermitianOperator>) -> Result<Self> {
        if prior.len() != states.len() {
            return Err(Error::invalid(format!(
                "{} prior entries for {} states",
                prior.len(),
                states.len()
            )));
        }
        validate_distribution(&prior, PRIOR_TOL, "ensemble prior")?;
        let d = states[0].dim();
        for (x, rho) in states.iter().enumerate() {
            if rho.dim() != d {
                return Err(Error::invalid(format!(
                    "state {x} has dimension {} but state 0 has {d}",
                    rho.dim()
                )));
            }
            rho.check_density(&format!("state {x}"))?;
        }
        Ok(QuantumEnsemble { prior, states })
    }

    pub fn uniform(states: Vec<HermitianOperator>) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::invalid("ensemble needs at least one state"));
        }
        QuantumEnsemble::new(vec![1.0 / n as f64; n], states)
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn states(&self) -> &[HermitianOperator] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn max_prior(&self) -> f64 {
        max_entry(&self.prior)
    }
}

#[derive(Serialize, Deserialize)]
struct EnsembleJson {
    prior: Vec<f64>,
    /// Each state flattened row-major as `[re, im]` pairs.
    states: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<EnsembleJson> for QuantumEnsemble {
    type Error = Error;

    fn try_from(raw: EnsembleJson) -> Result<Self> {
        let states = raw
            .states
            .into_iter()
            .enumerate()
            .map(|(x, flat)| {
                let d = (flat.len() as f64).sqrt().round() as usize;
                if d * d != flat.len() || d == 0 {
                    return Err(Error::invalid(format!(
                        "state {x} has {} entries, not a square",
                        flat.len()
                    )));
                }
                let m = CMat::from_row_iterator(
                    d,
                    d,
                    flat.iter().map(|[re, im]| Complex64::new(*re, *im)),
                );
                HermitianOperator::new(m)
            })
            .collect::<Result<Vec<_>>>()?;
        if states.is_empty() {
            return Err(Error::invalid("ensemble has no states"));
        }
        QuantumEnsemble::new(raw.prior, states)
    }
}

impl From<QuantumEnsemble> for EnsembleJson {
    fn from(e: QuantumEnsemble) -> Self {
        let states = e
            .states
            .iter()
            .map(|rho| {
                let m = rho.matrix();
                let d = m.nrows();
                (0..d)
                    .flat_map(|i| (0..d).map(move |j| (i, j)))
                    .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
                    .collect()
            })
            .collect();
        EnsembleJson {
            prior: e.prior,
            states,
        }
    }
}

/// Ensembles conditioned on a shared classical variable, with weights
/// `p(lambda)`. All branches share the same prior over x.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedEnsemble {
    branches: Vec<(f64, QuantumEnsemble)>,
}

impl MixedEnsemble {
    pub fn new(branches: Vec<(f64, QuantumEnsemble)>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::invalid("mixed ensemble has no branches"));
        }
        let weights: Vec<f64> = branches.iter().map(|(w, _)| *w).collect();
        validate_distribution(&weights, PRIOR_TOL, "branch weights")?;
        let prior = branches[0].1.prior();
        for (i, (_, e)) in branches.iter().enumerate() {
            if e.prior().len() != prior.len()
                || e.prior().iter().zip(prior).any(|(a, b)| (a - b).abs() > PRIOR_TOL)
            {
                return Err(Error::invalid(format!(
                    "branch {i} has a different prior over x"
                )));
            }
        }
        Ok(MixedEnsemble { branches })
    }

    pub fn single(e: QuantumEnsemble) -> Self {
        MixedEnsemble {
            branches: vec![(1.0, e)],
        }
    }

    pub fn branches(&self) -> &[(f64, QuantumEnsemble)] {
        &self.branches
    }

    pub fn prior(&self) -> &[f64] {
        self.branches[0].1.prior()
    }
}

/// A POVM `{M_b}` on a `dim`-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    effects: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(effects: Vec<HermitianOperator>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::invalid("POVM has no effects"));
        }
        let d = effects[0].dim();
        let mut total = CMat::zeros(d, d);
        for (b, m) in effects.iter().enumerate() {
            if m.dim() != d {
                return Err(Error::invalid(format!("effect {b} has mismatched dimension")));
            }
            let low = linalg::min_eigenvalue(m.matrix());
            if low < -STATE_TOL {
                return Err(Error::invalid(format!(
                    "effect {b} has negative eigenvalue {low:e}"
                )));
            }
            total += m.matrix();
        }
        let defect = linalg::max_abs_diff(&total, &linalg::identity(d));
        if defect > STATE_TOL {
            return Err(Error::invalid(format!(
                "effects do not sum to the identity (defect {defect:e})"
            )));
        }
        Ok(Povm { effects })
    }

    /// Two-outcome POVM of a Hermitian observable: outcome 0 is the projector
    /// onto the non-negative eigenspace, outcome 1 its complement. For a ±1
    /// observable this is the +1 / -1 split.
    pub fn from_observable(obs: &HermitianOperator) -> Result<Self> {
        let d = obs.dim();
        let plus = linalg::nonnegative_projector(obs.matrix(), 0.0);
        let minus = linalg::identity(d) - &plus;
        Povm::new(vec![
            HermitianOperator::hermitized(plus),
            HermitianOperator::hermitized(minus),
        ])
    }

    /// The projective measurement in the computational basis.
    pub fn computational(d: usize) -> Self {
        Povm {
            effects: (0..d)
                .map(|i| HermitianOperator::hermitized(linalg::basis_projector(d, i)))
                .collect(),
        }
    }

    /// A `k`-outcome POVM that always returns `outcome`.
    pub fn constant(d: usize, k: usize, outcome: usize) -> Result<Self> {
        if outcome >= k {
            return Err(Error::invalid(format!("outcome {outcome} >= k = {k}")));
        }
        Ok(Povm {
            effects: (0..k)
                .map(|b| {
                    if b == outcome {
                        HermitianOperator::identity(d)
                    } else {
                        HermitianOperator::hermitized(CMat::zeros(d, d))
                    }
                })
                .collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }
}

/// `p(b|x,y) = Tr(rho_x M_{b|y})`.
pub fn behavior_from_quantum(ensemble: &QuantumEnsemble, measurements: &[Povm]) -> Result<Behavior> {
    if measurements.is_empty() {
        return Err(Error::invalid("need at least one measurement"));
    }
    let d = ensemble.dim();
    let k = measurements[0].outcomes();
    for (y, m) in measurements.iter().enumerate() {
        if m.dim() != d {
            return Err(Error::invalid(format!(
                "measurement {y} acts on dimension {} but states have {d}",
                m.dim()
            )));
        }
        if m.outcomes() != k {
            return Err(Error::invalid(format!(
                "measurement {y} has {} outcomes, expected {k}",
                m.outcomes()
            )));
        }
    }
    let scenario = Scenario::new(ensemble.len(), measurements.len(), k, ensemble.prior().to_vec())?;
    Behavior::from_fn(scenario, |x, y, b| {
        ensemble.states()[x].expectation(&measurements[y].effects()[b])
    })
}
