use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on prior and mixing-weight normalization.
pub const PRIOR_TOL: f64 = 1e-12;

/// Cardinalities of a prepare-and-measure scenario plus Alice's input prior.
///
/// `n` inputs for Alice, `l` settings and `k` outcomes for Bob.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScenario")]
pub struct Scenario {
    n: usize,
    l: usize,
    k: usize,
    prior: Vec<f64>,
}

#[derive(Deserialize)]
struct RawScenario {
    n: usize,
    l: usize,
    k: usize,
    prior: Option<Vec<f64>>,
}

impl TryFrom<RawScenario> for Scenario {
    type Error = Error;

    fn try_from(raw: RawScenario) -> Result<Self> {
        match raw.prior {
            Some(prior) => Scenario::new(raw.n, raw.l, raw.k, prior),
            None => Scenario::uniform(raw.n, raw.l, raw.k),
        }
    }
}

impl Scenario {
    pub fn new(n: usize, l: usize, k: usize, prior: Vec<f64>) -> Result<Self> {
        if n == 0 || l == 0 || k == 0 {
            return Err(Error::invalid(format!(
                "scenario cardinalities must be positive, got ({n},{l},{k})"
            )));
        }
        if prior.len() != n {
            return Err(Error::invalid(format!(
                "prior has {} entries but n = {n}",
                prior.len()
            )));
        }
        validate_distribution(&prior, PRIOR_TOL, "prior")?;
        Ok(Scenario { n, l, k, prior })
    }

    pub fn uniform(n: usize, l: usize, k: usize) -> Result<Self> {
        let p = if n == 0 { 0.0 } else { 1.0 / n as f64 };
        Scenario::new(n, l, k, vec![p; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn max_prior(&self) -> f64 {
        max_entry(&self.prior)
    }

    /// Number of entries of a behavior table, `n * l * k`.
    pub fn table_len(&self) -> usize {
        self.n * self.l * self.k
    }

    /// Flat position of `p(b|x,y)`: x-major, then y, then b.
    #[inline]
    pub fn index(&self, x: usize, y: usize, b: usize) -> usize {
        (x * self.l + y) * self.k + b
    }

    pub fn same_shape(&self, other: &Scenario) -> bool {
        self.n == other.n && self.l == other.l && self.k == other.k
    }
}

pub(crate) fn max_entry(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn validate_distribution(p: &[f64], tol: f64, what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::invalid(format!("{what} is empty")));
    }
    if let Some(bad) = p.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::invalid(format!("{what} has entry {bad} outside [0, 1]")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > tol {
        return Err(Error::invalid(format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

/// Min-entropy `-log2 max_x p(x)` in bits.
pub fn hmin(prior: &[f64]) -> Result<f64> {
    validate_distribution(prior, PRIOR_TOL, "prior")?;
    Ok(-max_entry(prior).log2())
}

/// An information budget `alpha` (bits) and the guessing-probability ceiling
/// `min(1, 2^alpha * max_x p(x))` it induces for a given prior.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoBudget {
    alpha: f64,
    cap: f64,
}

impl InfoBudget {
    pub fn from_alpha(alpha: f64, scenario: &Scenario) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::invalid(format!("alpha must be >= 0, got {alpha}")));
        }
        let cap = (alpha.exp2() * scenario.max_prior()).min(1.0);
        Ok(InfoBudget { alpha, cap })
    }

    /// Budget expressed directly as a guessing-probability ceiling.
    pub fn from_cap(cap: f64, scenario: &Scenario) -> Result<Self> {
        let floor = scenario.max_prior();
        if !cap.is_finite() || cap < floor - 1e-12 || cap > 1.0 + 1e-12 {
            return Err(Error::invalid(format!(
                "cap {cap} outside [{floor}, 1]"
            )));
        }
        let cap = cap.clamp(floor, 1.0);
        Ok(InfoBudget {
            alpha: (cap / floor).log2(),
            cap,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hmin_examples() {
        assert!((hmin(&[1.0 / 3.0; 3]).unwrap() - 3f64.log2()).abs() < 1e-12);
        assert_eq!(hmin(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((hmin(&[0.5, 0.25, 0.25]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hmin_rejects_bad_priors() {
        assert!(hmin(&[]).is_err());
        assert!(hmin(&[0.5, 0.4]).is_err());
        assert!(hmin(&[1.2, -0.2]).is_err());
    }

    #[test]
    fn scenario_validation() {
        assert!(Scenario::new(0, 1, 2, vec![]).is_err());
        assert!(Scenario::new(2, 1, 2, vec![1.0]).is_err());
        assert!(Scenario::new(2, 1, 2, vec![0.5, 0.5 + 1e-9]).is_err());
        let s = Scenario::uniform(3, 2, 2).unwrap();
        assert_eq!(s.table_len(), 12);
        assert_eq!(s.index(2, 1, 1), 11);
    }

    #[test]
    fn budget_cap_is_clamped() {
        let s = Scenario::uniform(3, 2, 2).unwrap();
        let b = InfoBudget::from_alpha(1.0, &s).unwrap();
        assert!((b.cap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(InfoBudget::from_alpha(5.0, &s).unwrap().cap(), 1.0);
        assert!((InfoBudget::from_alpha(0.0, &s).unwrap().cap() - 1.0 / 3.0).abs() < 1e-15);
        let c = InfoBudget::from_cap(2.0 / 3.0, &s).unwrap();
        assert!((c.alpha() - 1.0).abs() < 1e-12);
        assert!(InfoBudget::from_cap(0.2, &s).is_err());
        assert!(InfoBudget::from_alpha(-0.1, &s).is_err());
    }

    #[test]
    fn scenario_json_defaults_to_uniform() {
        let s: Scenario = serde_json::from_str(r#"{"n":3,"l":2,"k":2}"#).unwrap();
        assert_eq!(s.prior(), &[1.0 / 3.0; 3]);
        let bad: std::result::Result<Scenario, _> =
            serde_json::from_str(r#"{"n":2,"l":1,"k":2,"prior":[0.9,0.3]}"#);
        assert!(bad.is_err());
    }
}
