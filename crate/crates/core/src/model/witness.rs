use serde::{Deserialize, Serialize};

use super::behavior::Behavior;
use super::scenario::Scenario;
use crate::error::{Error, Result};

/// Claimed classical bound `beta(cap) = slope * cap + intercept`, with `cap`
/// the guessing-probability ceiling of the information budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineBound {
    pub slope: f64,
    pub intercept: f64,
}

impl AffineBound {
    pub fn at(&self, cap: f64) -> f64 {
        self.slope * cap + self.intercept
    }
}

/// A linear functional `sum r_{xyb} p(b|x,y)` on behaviors.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    scenario: Scenario,
    coefficients: Vec<f64>,
    bound: Option<AffineBound>,
}

impl Witness {
    pub fn new(scenario: Scenario, coefficients: Vec<f64>, bound: Option<AffineBound>) -> Result<Self> {
        if coefficients.len() != scenario.table_len() {
            return Err(Error::invalid(format!(
                "witness has {} coefficients, scenario needs {}",
                coefficients.len(),
                scenario.table_len()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("witness coefficients must be finite"));
        }
        Ok(Witness {
            scenario,
            coefficients,
            bound,
        })
    }

    /// Witness written as `sum_{x,y} t[x][y] * E_xy` over correlators of a
    /// binary-outcome scenario.
    pub fn from_correlators(scenario: Scenario, t: &[Vec<f64>], bound: Option<AffineBound>) -> Result<Self> {
        if scenario.k() != 2 {
            return Err(Error::UnsupportedScenario(
                "correlator witnesses need k = 2".into(),
            ));
        }
        if t.len() != scenario.n() || t.iter().any(|row| row.len() != scenario.l()) {
            return Err(Error::invalid("correlator table shape does not match the scenario"));
        }
        let mut r = vec![0.0; scenario.table_len()];
        for (x, row) in t.iter().enumerate() {
            for (y, &c) in row.iter().enumerate() {
                r[scenario.index(x, y, 0)] = c;
                r[scenario.index(x, y, 1)] = 0.0 - c;
            }
        }
        Witness::new(scenario, r, bound)
    }

    /// `F1 = -E11 - E12 - E21 + E22 + E31` in the uniform (3,2,2) scenario,
    /// classical bound `6 P_g - 1`.
    pub fn f1() -> Self {
        let t = vec![vec![-1.0, -1.0], vec![-1.0, 1.0], vec![1.0, 0.0]];
        Witness::from_correlators(
            Scenario::uniform(3, 2, 2).expect("static scenario"),
            &t,
            Some(AffineBound {
                slope: 6.0,
                intercept: -1.0,
            }),
        )
        .expect("static witness")
    }

    /// `F2 = -E11 - E12 - E21 + E22 + 2 E31`, classical bound `12 P_g - 4`.
    pub fn f2() -> Self {
        let t = vec![vec![-1.0, -1.0], vec![-1.0, 1.0], vec![2.0, 0.0]];
        Witness::from_correlators(
            Scenario::uniform(3, 2, 2).expect("static scenario"),
            &t,
            Some(AffineBound {
                slope: 12.0,
                intercept: -4.0,
            }),
        )
        .expect("static witness")
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    #[inline]
    pub fn coefficient(&self, x: usize, y: usize, b: usize) -> f64 {
        self.coefficients[self.scenario.index(x, y, b)]
    }

    pub fn bound(&self) -> Option<AffineBound> {
        self.bound
    }

    /// Same coefficients with a different prior attached.
    pub fn with_scenario(&self, scenario: Scenario) -> Result<Self> {
        if !scenario.same_shape(&self.scenario) {
            return Err(Error::invalid("scenario shape does not match the witness"));
        }
        Witness::new(scenario, self.coefficients.clone(), self.bound)
    }

    /// Evaluates the functional on a flat table laid out like a behavior.
    pub fn dot(&self, table: &[f64]) -> f64 {
        self.coefficients.iter().zip(table).map(|(r, p)| r * p).sum()
    }
}

pub fn witness_value(w: &Witness, p: &Behavior) -> Result<f64> {
    if !w.scenario().same_shape(p.scenario()) {
        return Err(Error::invalid(format!(
            "witness shape ({},{},{}) does not match behavior shape ({},{},{})",
            w.scenario().n(),
            w.scenario().l(),
            w.scenario().k(),
            p.scenario().n(),
            p.scenario().l(),
            p.scenario().k()
        )));
    }
    Ok(w.dot(p.table()))
}

/// On-disk witness: coefficients indexed `[x][y][b]`; the scenario comes from
/// a separate file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessFile {
    pub coefficients: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<AffineBound>,
}

impl WitnessFile {
    pub fn into_witness(self, scenario: Scenario) -> Result<Witness> {
        let shape_ok = self.coefficients.len() == scenario.n()
            && self.coefficients.iter().all(|row| {
                row.len() == scenario.l() && row.iter().all(|c| c.len() == scenario.k())
            });
        if !shape_ok {
            return Err(Error::invalid(format!(
                "witness coefficients do not have shape {}x{}x{}",
                scenario.n(),
                scenario.l(),
                scenario.k()
            )));
        }
        let flat = self.coefficients.into_iter().flatten().flatten().collect();
        Witness::new(scenario, flat, self.bound)
    }
}

impl From<&Witness> for WitnessFile {
    fn from(w: &Witness) -> Self {
        let s = w.scenario();
        WitnessFile {
            coefficients: (0..s.n())
                .map(|x| {
                    (0..s.l())
                        .map(|y| (0..s.k()).map(|b| w.coefficient(x, y, b)).collect())
                        .collect()
                })
                .collect(),
            bound: w.bound(),
        }
    }
}
