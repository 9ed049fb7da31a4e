use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use crate::error::{Error, Result};

/// Tolerance on per-setting normalization of a behavior and on entry range.
pub const PROB_TOL: f64 = 1e-10;

/// A conditional distribution `p(b|x,y)` stored flat, x-major then y then b.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BehaviorJson", into = "BehaviorJson")]
pub struct Behavior {
    scenario: Scenario,
    table: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct BehaviorJson {
    scenario: Scenario,
    table: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<BehaviorJson> for Behavior {
    type Error = Error;

    fn try_from(raw: BehaviorJson) -> Result<Self> {
        let s = &raw.scenario;
        let shape_ok = raw.table.len() == s.n()
            && raw
                .table
                .iter()
                .all(|row| row.len() == s.l() && row.iter().all(|p| p.len() == s.k()));
        if !shape_ok {
            return Err(Error::invalid(format!(
                "behavior table does not have shape {}x{}x{}",
                s.n(),
                s.l(),
                s.k()
            )));
        }
        let flat = raw.table.into_iter().flatten().flatten().collect();
        Behavior::new(raw.scenario, flat)
    }
}

impl From<Behavior> for BehaviorJson {
    fn from(b: Behavior) -> Self {
        let s = &b.scenario;
        let table = (0..s.n())
            .map(|x| {
                (0..s.l())
                    .map(|y| (0..s.k()).map(|o| b.get(x, y, o)).collect())
                    .collect()
            })
            .collect();
        BehaviorJson {
            scenario: b.scenario,
            table,
        }
    }
}

impl Behavior {
    pub fn new(scenario: Scenario, table: Vec<f64>) -> Result<Self> {
        if table.len() != scenario.table_len() {
            return Err(Error::invalid(format!(
                "behavior table has {} entries, scenario needs {}",
                table.len(),
                scenario.table_len()
            )));
        }
        for (i, &v) in table.iter().enumerate() {
            if !v.is_finite() || !(-PROB_TOL..=1.0 + PROB_TOL).contains(&v) {
                return Err(Error::invalid(format!("entry {i} = {v} outside [0, 1]")));
            }
        }
        for x in 0..scenario.n() {
            for y in 0..scenario.l() {
                let start = scenario.index(x, y, 0);
                let s: f64 = table[start..start + scenario.k()].iter().sum();
                if (s - 1.0).abs() > PROB_TOL {
                    return Err(Error::invalid(format!(
                        "p(.|x={x},y={y}) sums to {s}"
                    )));
                }
            }
        }
        Ok(Behavior { scenario, table })
    }

    /// Behavior assembled from a closure `f(x, y, b)`.
    pub fn from_fn(scenario: Scenario, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let mut table = vec![0.0; scenario.table_len()];
        for x in 0..scenario.n() {
            for y in 0..scenario.l() {
                for b in 0..scenario.k() {
                    table[scenario.index(x, y, b)] = f(x, y, b);
                }
            }
        }
        Behavior::new(scenario, table)
    }

    /// Deterministic behavior `p(b|x,y) = [b == out(x, y)]`.
    pub fn deterministic(scenario: Scenario, out: impl Fn(usize, usize) -> usize) -> Result<Self> {
        Behavior::from_fn(scenario, |x, y, b| if out(x, y) == b { 1.0 } else { 0.0 })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, b: usize) -> f64 {
        self.table[self.scenario.index(x, y, b)]
    }

    /// Convex combination `mu * self + (1 - mu) * other`.
    pub fn mix(&self, other: &Behavior, mu: f64) -> Result<Behavior> {
        if !self.scenario.same_shape(&other.scenario) {
            return Err(Error::invalid("cannot mix behaviors of different shapes"));
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::invalid(format!("mixing weight {mu} outside [0, 1]")));
        }
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| mu * a + (1.0 - mu) * b)
            .collect();
        Behavior::new(self.scenario.clone(), table)
    }
}

/// `E_xy = p(0|x,y) - p(1|x,y)` for binary-outcome scenarios.
pub fn correlator(p: &Behavior, x: usize, y: usize) -> Result<f64> {
    let s = p.scenario();
    if s.k() != 2 {
        return Err(Error::UnsupportedScenario(format!(
            "correlators need k = 2, got k = {}",
            s.k()
        )));
    }
    if x >= s.n() || y >= s.l() {
        return Err(Error::invalid(format!("(x={x}, y={y}) out of range")));
    }
    Ok(p.get(x, y, 0) - p.get(x, y, 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s322() -> Scenario {
        Scenario::uniform(3, 2, 2).unwrap()
    }

    #[test]
    fn rejects_unnormalized_rows() {
        let mut t = vec![0.5; 12];
        t[0] = 0.6;
        assert!(Behavior::new(s322(), t).is_err());
        assert!(Behavior::new(s322(), vec![0.5; 11]).is_err());
    }

    #[test]
    fn correlator_examples() {
        let certain = Behavior::deterministic(s322(), |_, _| 0).unwrap();
        assert_eq!(correlator(&certain, 1, 1).unwrap(), 1.0);
        let coin = Behavior::from_fn(s322(), |_, _, _| 0.5).unwrap();
        assert_eq!(correlator(&coin, 0, 0).unwrap(), 0.0);
        let s = Scenario::uniform(2, 1, 3).unwrap();
        let b = Behavior::from_fn(s, |_, _, _| 1.0 / 3.0).unwrap();
        assert!(matches!(correlator(&b, 0, 0), Err(Error::UnsupportedScenario(_))));
    }

    #[test]
    fn json_layout_is_x_major() {
        let b = Behavior::deterministic(s322(), |x, y| (x + y) % 2).unwrap();
        let v = serde_json::to_value(&b).unwrap();
        assert_eq!(v["table"][1][0], serde_json::json!([0.0, 1.0]));
        let back: Behavior = serde_json::from_value(v).unwrap();
        assert_eq!(back, b);
    }
}
