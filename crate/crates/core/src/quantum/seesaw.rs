use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use num_complex::Complex64;

use super::info::info_of_ensemble;
use super::strategy::{constant_branch, strategy_info_and_value, QuantumBranch, QuantumStrategy};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::{hmin, HermitianOperator, Povm, QuantumEnsemble, Witness};
use crate::random::{ginibre, state_from_factor};

/// Largest Hilbert-space dimension accepted by the seesaw.
pub const MAX_SEESAW_DIM: usize = 8;

/// Best binary measurements for fixed states: for each `y`, outcome 0 is the
/// projector onto the nonnegative eigenspace of
/// `G_y = sum_x (r_{xy0} - r_{xy1}) rho_x`. Returns the measurements and the
/// witness value they attain.
pub fn optimal_binary_measurements(states: &[HermitianOperator], w: &Witness) -> Result<(Vec<Povm>, f64)> {
    let s = w.scenario();
    if s.k() != 2 {
        return Err(Error::UnsupportedScenario(format!("binary measurements need k = 2, got {}", s.k())));
    }
    if states.len() != s.n() {
        return Err(Error::invalid(format!("{} states for a witness over {} inputs", states.len(), s.n())));
    }
    let d = states[0].dim();
    if states.iter().any(|r| r.dim() != d) {
        return Err(Error::invalid("states have mismatched dimensions"));
    }
    let mut value = 0.0;
    let mut povms = Vec::with_capacity(s.l());
    for y in 0..s.l() {
        let mut g = CMat::zeros(d, d);
        for (x, rho) in states.iter().enumerate() {
            let c = w.coefficient(x, y, 0) - w.coefficient(x, y, 1);
            value += w.coefficient(x, y, 1) * rho.trace();
            g += linalg::scaled(rho.matrix(), c);
        }
        let (vals, vecs) = linalg::hermitian_eigen(&linalg::hermitize(&g));
        value += vals.iter().filter(|&&v| v >= -1e-12).map(|v| v.max(0.0)).sum::<f64>();
        let p = linalg::spectral_map(&vals, &vecs, |v| if v >= -1e-12 { 1.0 } else { 0.0 });
        let q = linalg::identity(d) - &p;
        povms.push(Povm::new(vec![HermitianOperator::hermitized(p), HermitianOperator::hermitized(q)])?);
    }
    Ok((povms, value))
}

#[derive(Clone, Debug)]
pub struct SeesawOptions {
    pub restarts: usize,
    /// Multiplier of `|I - alpha|` in the search objective.
    pub penalty: f64,
    /// Rank of the state factors; defaults to the dimension.
    pub rank: Option<usize>,
    pub iterations: usize,
    pub seed: u64,
    pub initial_step: f64,
    pub min_step: f64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        SeesawOptions {
            restarts: 50,
            penalty: 100.0,
            rank: None,
            iterations: 600,
            seed: 0,
            initial_step: 0.3,
            min_step: 1e-7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeesawResult {
    /// Witness value of `strategy`, a lower bound on the quantum value at alpha.
    pub value: f64,
    pub info: f64,
    pub strategy: QuantumStrategy,
    pub restart: usize,
    /// Penalized objective of the search point the strategy was built from.
    pub penalized: f64,
    pub evaluations: usize,
    pub failed_restarts: usize,
}

struct Point {
    factors: Vec<CMat>,
    penalized: f64,
    certified: f64,
    mix: f64,
}

struct Best {
    certified: f64,
    factors: Vec<CMat>,
}

struct Search<'a> {
    w: &'a Witness,
    alpha: f64,
    penalty: f64,
    h: f64,
    max_prior: f64,
    silent_value: f64,
    silent_outputs: Vec<usize>,
}

impl Search<'_> {
    fn states(&self, factors: &[CMat]) -> Vec<HermitianOperator> {
        factors.iter().map(state_from_factor).collect()
    }

    fn eval(&self, factors: Vec<CMat>) -> Option<Point> {
        let states = self.states(&factors);
        let e = QuantumEnsemble::new(self.w.scenario().prior().to_vec(), states.clone()).ok()?;
        let info = info_of_ensemble(&e).ok()?;
        let (_, value) = optimal_binary_measurements(&states, self.w).ok()?;
        let penalized = value - self.penalty * (info - self.alpha).abs();
        let mix = self.mix_weight(info);
        let certified = mix * value + (1.0 - mix) * self.silent_value;
        Some(Point { factors, penalized, certified, mix })
    }

    /// Largest weight on the search branch keeping the average guessing
    /// probability within the cap when mixed with the silent branch.
    fn mix_weight(&self, info: f64) -> f64 {
        let pg = 2f64.powf(info - self.h);
        let cap = 2f64.powf(self.alpha - self.h);
        if pg <= cap || pg <= self.max_prior {
            1.0
        } else {
            ((cap - self.max_prior) / (pg - self.max_prior)).clamp(0.0, 1.0)
        }
    }

    fn run(&self, d: usize, rank: usize, restart: usize, opts: &SeesawOptions) -> (Option<Point>, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(restart as u64);
        let n = self.w.scenario().n();
        let mut evaluations = 0;
        let mut current = None;
        for _ in 0..10 {
            let f: Vec<CMat> = (0..n).map(|_| normalized(ginibre(d, rank, &mut rng))).collect();
            evaluations += 1;
            current = self.eval(f);
            if current.is_some() {
                break;
            }
        }
        let Some(mut current) = current else {
            return (None, evaluations);
        };
        let mut best = Best { certified: current.certified, factors: current.factors.clone() };
        // Penalized phase, then a polish on the certified value itself.
        current = self.climb(current, opts, opts.initial_step, |p| p.penalized, &mut best, &mut rng, &mut evaluations);
        evaluations += 1;
        if let Some(start) = self.eval(best.factors.clone()) {
            self.climb(start, opts, opts.initial_step * 0.3, |p| p.certified, &mut best, &mut rng, &mut evaluations);
        }
        evaluations += 1;
        let found = self.eval(best.factors).filter(|p| p.certified >= best.certified - 1e-12);
        (found.or(Some(current)), evaluations)
    }

    #[allow(clippy::too_many_arguments)]
    fn climb(
        &self,
        mut current: Point,
        opts: &SeesawOptions,
        mut step: f64,
        score: impl Fn(&Point) -> f64,
        best: &mut Best,
        rng: &mut ChaCha8Rng,
        evaluations: &mut usize,
    ) -> Point {
        for _ in 0..opts.iterations {
            if step < opts.min_step {
                break;
            }
            let trial: Vec<CMat> = current
                .factors
                .iter()
                .map(|f| {
                    normalized(f.map(|z| {
                        let re: f64 = StandardNormal.sample(rng);
                        let im: f64 = StandardNormal.sample(rng);
                        z + Complex64::new(re, im) * step
                    }))
                })
                .collect();
            *evaluations += 1;
            match self.eval(trial) {
                Some(p) if score(&p) >= score(&current) => {
                    if p.certified > best.certified {
                        best.certified = p.certified;
                        best.factors = p.factors.clone();
                    }
                    current = p;
                    step *= 1.5;
                }
                _ => step *= 1.5f64.powf(-0.25),
            }
        }
        current
    }

    fn build(&self, point: &Point) -> Result<QuantumStrategy> {
        let states = self.states(&point.factors);
        let d = states[0].dim();
        let n = states.len();
        let (measurements, _) = optimal_binary_measurements(&states, self.w)?;
        let ensemble = QuantumEnsemble::new(self.w.scenario().prior().to_vec(), states)?;
        let mut branches = Vec::new();
        if point.mix > 0.0 {
            branches.push(QuantumBranch { weight: point.mix, ensemble, measurements });
        }
        if point.mix < 1.0 {
            let (silent, outs) = constant_branch(n, d, &self.silent_outputs, 2)?;
            let silent = QuantumEnsemble::new(self.w.scenario().prior().to_vec(), silent.states().to_vec())?;
            branches.push(QuantumBranch { weight: 1.0 - point.mix, ensemble: silent, measurements: outs });
        }
        QuantumStrategy::new(branches)
    }
}

fn normalized(f: CMat) -> CMat {
    let norm = f.norm();
    f / Complex64::new(norm, 0.0)
}

/// Penalized local search for large witness values with `d`-dimensional
/// states at information at most `alpha`. Restarts run in parallel; the
/// highest certified value wins, ties going to the lower restart index.
pub fn seesaw_max_witness(w: &Witness, alpha: f64, d: usize, opts: &SeesawOptions) -> Result<SeesawResult> {
    let s = w.scenario();
    if s.k() != 2 {
        return Err(Error::UnsupportedScenario(format!("seesaw needs k = 2, got {}", s.k())));
    }
    if d == 0 || d > MAX_SEESAW_DIM {
        return Err(Error::invalid(format!("dimension {d} outside 1..={MAX_SEESAW_DIM}")));
    }
    let h = hmin(s.prior())?;
    if !alpha.is_finite() || alpha < 0.0 || alpha > h + 1e-12 {
        return Err(Error::invalid(format!("alpha = {alpha} outside [0, {h}]")));
    }
    if opts.restarts == 0 {
        return Err(Error::invalid("at least one restart is required"));
    }
    let rank = opts.rank.unwrap_or(d).clamp(1, d);
    let mut silent_outputs = Vec::with_capacity(s.l());
    let mut silent_value = 0.0;
    for y in 0..s.l() {
        let col = |b| (0..s.n()).map(|x| w.coefficient(x, y, b)).sum::<f64>();
        let (b, v) = if col(0) >= col(1) { (0, col(0)) } else { (1, col(1)) };
        silent_outputs.push(b);
        silent_value += v;
    }
    let search = Search {
        w,
        alpha,
        penalty: opts.penalty,
        h,
        max_prior: s.max_prior(),
        silent_value,
        silent_outputs,
    };
    let runs: Vec<(Option<Point>, usize)> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| search.run(d, rank, r, opts))
        .collect();
    let evaluations = runs.iter().map(|r| r.1).sum();
    let failed_restarts = runs.iter().filter(|r| r.0.is_none()).count();
    let (restart, point) = runs
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.0.as_ref().map(|p| (i, p)))
        .fold(None::<(usize, &Point)>, |acc, (i, p)| match acc {
            Some((_, q)) if q.certified >= p.certified => acc,
            _ => Some((i, p)),
        })
        .ok_or_else(|| Error::Convergence {
            solver: "seesaw",
            reason: "every restart failed to evaluate".into(),
            lower: f64::NAN,
            upper: f64::NAN,
        })?;
    let strategy = search.build(point)?;
    let (info, value) = strategy_info_and_value(&strategy, w)?;
    Ok(SeesawResult {
        value,
        info,
        strategy,
        restart,
        penalized: point.penalized,
        evaluations,
        failed_restarts,
    })
}
