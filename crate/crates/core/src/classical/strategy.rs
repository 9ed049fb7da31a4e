use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Behavior, Scenario};

/// Strategies the enumerator may visit before refusing. Covers n = 4 with
/// `k^(4l)` up to 10^7.
pub const DEFAULT_STRATEGY_BUDGET: u128 = 256 * 10_000_000;

/// A deterministic classical strategy: Alice sends `m = encoding[x]` in
/// `[d]`, Bob outputs `decoding[m * l + y]` in `[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    d: usize,
    l: usize,
    k: usize,
    encoding: Vec<usize>,
    decoding: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn new(d: usize, l: usize, k: usize, encoding: Vec<usize>, decoding: Vec<usize>) -> Result<Self> {
        if d == 0 || l == 0 || k == 0 || encoding.is_empty() {
            return Err(Error::invalid("strategy cardinalities must be positive"));
        }
        if let Some(m) = encoding.iter().find(|&&m| m >= d) {
            return Err(Error::invalid(format!("message {m} outside [0, {d})")));
        }
        if decoding.len() != d * l {
            return Err(Error::invalid(format!(
                "decoder table has {} entries, expected d*l = {}",
                decoding.len(),
                d * l
            )));
        }
        if let Some(b) = decoding.iter().find(|&&b| b >= k) {
            return Err(Error::invalid(format!("output {b} outside [0, {k})")));
        }
        Ok(DeterministicStrategy {
            d,
            l,
            k,
            encoding,
            decoding,
        })
    }

    pub fn message_dim(&self) -> usize {
        self.d
    }

    pub fn inputs(&self) -> usize {
        self.encoding.len()
    }

    pub fn encoding(&self) -> &[usize] {
        &self.encoding
    }

    pub fn decoding(&self) -> &[usize] {
        &self.decoding
    }

    #[inline]
    pub fn decode(&self, m: usize, y: usize) -> usize {
        self.decoding[m * self.l + y]
    }

    #[inline]
    pub fn output(&self, x: usize, y: usize) -> usize {
        self.decode(self.encoding[x], y)
    }

    fn check_scenario(&self, scenario: &Scenario) -> Result<()> {
        if self.inputs() != scenario.n() || self.l != scenario.l() || self.k != scenario.k() {
            return Err(Error::invalid("strategy does not fit the scenario"));
        }
        Ok(())
    }
}

/// Lazily walks every `(E, D)` with `d = n`: encoding index major, then
/// decoder index, both as little-endian mixed-radix counters.
pub struct StrategyIter {
    n: usize,
    l: usize,
    k: usize,
    encoding: Vec<usize>,
    decoding: Vec<usize>,
    done: bool,
}

impl Iterator for StrategyIter {
    type Item = DeterministicStrategy;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = DeterministicStrategy {
            d: self.n,
            l: self.l,
            k: self.k,
            encoding: self.encoding.clone(),
            decoding: self.decoding.clone(),
        };
        if !increment(&mut self.decoding, self.k) && !increment(&mut self.encoding, self.n) {
            self.done = true;
        }
        Some(item)
    }
}

/// Mixed-radix increment; returns false on wrap-around.
pub(crate) fn increment(digits: &mut [usize], radix: usize) -> bool {
    for v in digits.iter_mut() {
        *v += 1;
        if *v < radix {
            return true;
        }
        *v = 0;
    }
    false
}

/// `n^n * k^(n l)`, saturating.
pub fn strategy_count(scenario: &Scenario) -> u128 {
    let (n, l, k) = (scenario.n() as u32, scenario.l() as u32, scenario.k() as u128);
    let enc = (n as u128).checked_pow(n);
    let dec = k.checked_pow(n * l);
    match (enc, dec) {
        (Some(a), Some(b)) => a.saturating_mul(b),
        _ => u128::MAX,
    }
}

pub fn enumerate_strategies(scenario: &Scenario, budget: u128) -> Result<StrategyIter> {
    let required = strategy_count(scenario);
    if required > budget {
        return Err(Error::Capacity { required, budget });
    }
    let n = scenario.n();
    Ok(StrategyIter {
        n,
        l: scenario.l(),
        k: scenario.k(),
        encoding: vec![0; n],
        decoding: vec![0; n * scenario.l()],
        done: false,
    })
}

/// `p(b|x,y) = [b == D(E(x), y)]`.
pub fn strategy_behavior(s: &DeterministicStrategy, scenario: &Scenario) -> Result<Behavior> {
    s.check_scenario(scenario)?;
    Behavior::deterministic(scenario.clone(), |x, y| s.output(x, y))
}

/// Guessing probability of the encoding alone: for each message, the best
/// guess is the most likely input sent with it.
pub fn strategy_guessing(s: &DeterministicStrategy, prior: &[f64]) -> Result<f64> {
    if prior.len() != s.inputs() {
        return Err(Error::invalid("prior length does not match the strategy"));
    }
    Ok(encoding_guessing(&s.encoding, s.d, prior))
}

pub(crate) fn encoding_guessing(encoding: &[usize], d: usize, prior: &[f64]) -> f64 {
    let mut best = vec![0.0_f64; d];
    for (x, &m) in encoding.iter().enumerate() {
        best[m] = best[m].max(prior[x]);
    }
    // Summed in sorted order so relabelling symbols cannot change rounding.
    best.sort_by(f64::total_cmp);
    best.iter().sum()
}

/// Relabels every message symbol outside `[n]` to an unused symbol inside
/// it, carrying the decoder rows along. Behavior and guessing probability are
/// unchanged.
pub fn remap_to_n_symbols(s: &DeterministicStrategy) -> DeterministicStrategy {
    let n = s.inputs();
    if s.d == n {
        return s.clone();
    }
    let mut encoding = s.encoding.clone();
    let mut decoding: Vec<usize> = (0..n.min(s.d))
        .flat_map(|m| (0..s.l).map(move |y| (m, y)))
        .map(|(m, y)| s.decode(m, y))
        .collect();
    // d < n only pads with unused symbols.
    decoding.resize(n * s.l, 0);
    while let Some(&outside) = encoding.iter().find(|&&m| m >= n) {
        let free = (0..n)
            .find(|m| !encoding.contains(m))
            .expect("at most n symbols are in use");
        for m in encoding.iter_mut().filter(|m| **m == outside) {
            *m = free;
        }
        for y in 0..s.l {
            decoding[free * s.l + y] = s.decode(outside, y);
        }
    }
    DeterministicStrategy {
        d: n,
        l: s.l,
        k: s.k,
        encoding,
        decoding,
    }
}
