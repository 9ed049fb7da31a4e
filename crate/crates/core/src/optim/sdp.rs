//! Guessing probability of a state ensemble by a dual barrier method.
//!
//! The dual of `max sum_x Tr(A_x N_x)` over POVMs (with `A_x = p(x) rho_x`)
//! is `min Tr(Y)` subject to `Y - A_x >= 0` for every x. We follow the central
//! path of `t Tr(Y) - sum_x log det(Y - A_x)` with damped Newton steps in a
//! real basis of Hermitian matrices. On the path, `Z_x = (Y - A_x)^{-1} / t`
//! nearly sums to the identity; rescaling by `(sum Z)^{-1/2}` on both sides
//! turns it into an exact POVM and so a certified lower bound.

use nalgebra::{Cholesky, DMatrix, DVector};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::{HermitianOperator, Povm, QuantumEnsemble};

/// Discrimination problem for a fixed ensemble.
#[derive(Clone, Debug)]
pub struct SdpDiscriminationProblem {
    ensemble: QuantumEnsemble,
}

impl SdpDiscriminationProblem {
    pub fn new(ensemble: QuantumEnsemble) -> Self {
        SdpDiscriminationProblem { ensemble }
    }

    pub fn ensemble(&self) -> &QuantumEnsemble {
        &self.ensemble
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// Guessing probability achieved by `povm` (a lower bound).
    pub value: f64,
    /// `Tr(Y)` (an upper bound).
    pub upper: f64,
    pub povm: Povm,
    pub certificate: HermitianOperator,
    pub newton_steps: usize,
}

impl SdpSolution {
    pub fn gap(&self) -> f64 {
        self.upper - self.value
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    /// Stop once `Tr(Y) - value` drops below this.
    pub gap_tol: f64,
    /// Accept a result with a gap up to this when progress stalls.
    pub accept_gap: f64,
    pub max_newton: usize,
    /// Barrier growth factor per outer iteration.
    pub mu: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            gap_tol: 1e-10,
            accept_gap: 1e-6,
            max_newton: 600,
            mu: 12.0,
        }
    }
}

pub fn solve_guessing_sdp(problem: &SdpDiscriminationProblem) -> Result<SdpSolution> {
    solve_guessing_sdp_with(problem, &SdpOptions::default())
}

/// Shorthand for the optimal guessing probability of an ensemble.
pub fn guessing_probability(ensemble: &QuantumEnsemble) -> Result<f64> {
    Ok(solve_guessing_sdp(&SdpDiscriminationProblem::new(ensemble.clone()))?.value)
}

/// Real basis of the d x d Hermitian matrices. Each element is a list of
/// `(coefficient, row, col)` elementary terms.
fn hermitian_basis(d: usize) -> Vec<Vec<(Complex64, usize, usize)>> {
    let mut basis = Vec::with_capacity(d * d);
    for i in 0..d {
        basis.push(vec![(linalg::ONE, i, i)]);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            basis.push(vec![(linalg::ONE, i, j), (linalg::ONE, j, i)]);
            basis.push(vec![(linalg::I, i, j), (-linalg::I, j, i)]);
        }
    }
    basis
}

fn basis_matrix(d: usize, basis: &[Vec<(Complex64, usize, usize)>], coords: &DVector<f64>) -> CMat {
    let mut m = CMat::zeros(d, d);
    for (k, terms) in basis.iter().enumerate() {
        let c = coords[k];
        if c == 0.0 {
            continue;
        }
        for &(coef, i, j) in terms {
            m[(i, j)] += coef * c;
        }
    }
    m
}

/// Cholesky factors of `Y - A_x` for every x, or `None` if one is not
/// positive definite.
fn slack_factors(y: &CMat, weighted: &[CMat]) -> Option<Vec<CMat>> {
    weighted
        .iter()
        .map(|a| linalg::cholesky(&linalg::hermitize(&(y - a))))
        .collect()
}

fn barrier_value(t: f64, y: &CMat, factors: &[CMat]) -> f64 {
    t * linalg::trace_re(y) - factors.iter().map(linalg::cholesky_log_det).sum::<f64>()
}

pub fn solve_guessing_sdp_with(problem: &SdpDiscriminationProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    let ens = problem.ensemble();
    let d = ens.dim();
    let n = ens.len();

    // Scale so the largest eigenvalue among p(x) rho_x is 1.
    let raw: Vec<CMat> = ens
        .states()
        .iter()
        .zip(ens.prior())
        .map(|(rho, &p)| rho.matrix() * Complex64::new(p, 0.0))
        .collect();
    let scale = raw
        .iter()
        .map(linalg::max_eigenvalue)
        .fold(0.0_f64, f64::max);
    if scale <= 0.0 {
        return Err(Error::invalid("ensemble has no weight"));
    }
    let weighted: Vec<CMat> = raw.iter().map(|a| a / Complex64::new(scale, 0.0)).collect();

    let basis = hermitian_basis(d);
    let dim = basis.len();
    let mut y = linalg::identity(d) * Complex64::new(1.5, 0.0);
    let m_total = (n * d) as f64;
    let mut t = m_total / (1.5 * d as f64);
    let mut steps = 0usize;
    let mut best: Option<(f64, f64, Vec<CMat>, CMat)> = None;

    loop {
        // Centering.
        for _ in 0..60 {
            if steps >= opts.max_newton {
                break;
            }
            let factors = slack_factors(&y, &weighted).expect("iterate stays interior");
            let inverses: Vec<CMat> = factors.iter().map(linalg::cholesky_inverse).collect();
            let mut grad = DVector::<f64>::zeros(dim);
            let mut hess = DMatrix::<f64>::zeros(dim, dim);
            for w in &inverses {
                for (k, terms) in basis.iter().enumerate() {
                    let mut g = 0.0;
                    for &(c, i, j) in terms {
                        // Tr(W e_ij) = W_ji
                        g += (c * w[(j, i)]).re;
                    }
                    grad[k] -= g;
                }
                for (k, tk) in basis.iter().enumerate() {
                    for (l, tl) in basis.iter().enumerate().skip(k) {
                        let mut h = Complex64::new(0.0, 0.0);
                        for &(c1, i, j) in tk {
                            for &(c2, p, q) in tl {
                                // Tr(W e_ij W e_pq) = W_qi W_jp
                                h += c1 * c2 * w[(q, i)] * w[(j, p)];
                            }
                        }
                        hess[(k, l)] += h.re;
                    }
                }
            }
            for k in 0..dim {
                for l in 0..k {
                    hess[(k, l)] = hess[(l, k)];
                }
            }
            for k in 0..d {
                grad[k] += t;
            }
            let Some(delta) = newton_direction(&hess, &grad) else {
                break;
            };
            let decrement = -grad.dot(&delta);
            steps += 1;
            if decrement.is_nan() || decrement < 1e-14 {
                break;
            }
            let step_mat = linalg::hermitize(&basis_matrix(d, &basis, &delta));
            let phi0 = barrier_value(t, &y, &factors);
            let mut s = 1.0;
            let mut moved = false;
            while s > 1e-12 {
                let y_new = &y + &step_mat * Complex64::new(s, 0.0);
                if let Some(f_new) = slack_factors(&y_new, &weighted) {
                    let phi = barrier_value(t, &y_new, &f_new);
                    if phi <= phi0 - 0.25 * s * decrement {
                        y = linalg::hermitize(&y_new);
                        moved = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            if !moved || decrement < 1e-10 {
                break;
            }
        }

        // Primal recovery from the current point.
        let factors = slack_factors(&y, &weighted).expect("iterate stays interior");
        let zs: Vec<CMat> = factors
            .iter()
            .map(|l| linalg::scaled(&linalg::cholesky_inverse(l), 1.0 / t))
            .collect();
        if let Some(povm) = project_to_povm(&zs) {
            let primal: f64 = povm
                .iter()
                .zip(&weighted)
                .map(|(nx, a)| linalg::trace_product(nx, a))
                .sum();
            let dual = linalg::trace_re(&y);
            let improves = best.as_ref().is_none_or(|(p, u, _, _)| dual - primal < u - p);
            if improves {
                best = Some((primal, dual, povm, y.clone()));
            }
        }
        let gap = best
            .as_ref()
            .map(|(p, u, _, _)| (u - p) * scale)
            .unwrap_or(f64::INFINITY);
        if gap <= opts.gap_tol || steps >= opts.max_newton || m_total / t * scale < opts.gap_tol * 1e-3 {
            break;
        }
        t *= opts.mu;
    }

    let Some((primal, dual, povm, y_best)) = best else {
        return Err(Error::Convergence {
            solver: "guessing SDP",
            reason: "no primal point recovered".into(),
            lower: f64::NAN,
            upper: f64::NAN,
        });
    };
    let value = primal * scale;
    let upper = dual * scale;
    if upper - value > opts.accept_gap {
        return Err(Error::Convergence {
            solver: "guessing SDP",
            reason: format!("duality gap {:e} after {steps} Newton steps", upper - value),
            lower: value,
            upper,
        });
    }
    let effects = povm.into_iter().map(HermitianOperator::hermitized).collect();
    Ok(SdpSolution {
        value,
        upper,
        povm: Povm::new(effects)?,
        certificate: HermitianOperator::hermitized(y_best * Complex64::new(scale, 0.0)),
        newton_steps: steps,
    })
}

/// Solves `H delta = -g` after Jacobi scaling; falls back to a regularized
/// factorization when `H` is numerically indefinite.
fn newton_direction(hess: &DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    let dim = grad.len();
    let diag: Vec<f64> = (0..dim).map(|k| hess[(k, k)].max(1e-300).sqrt()).collect();
    let scaled = DMatrix::from_fn(dim, dim, |i, j| hess[(i, j)] / (diag[i] * diag[j]));
    let rhs = DVector::from_fn(dim, |i, _| -grad[i] / diag[i]);
    let mut reg = 0.0;
    for _ in 0..12 {
        let mut m = scaled.clone();
        for i in 0..dim {
            m[(i, i)] += reg;
        }
        if let Some(ch) = Cholesky::new(m) {
            let z = ch.solve(&rhs);
            return Some(DVector::from_fn(dim, |i, _| z[i] / diag[i]));
        }
        reg = if reg == 0.0 { 1e-14 } else { reg * 100.0 };
    }
    None
}

/// `N_x = G^{-1/2} Z_x G^{-1/2}` with `G = sum_x Z_x`.
fn project_to_povm(zs: &[CMat]) -> Option<Vec<CMat>> {
    let d = zs[0].nrows();
    let mut g = CMat::zeros(d, d);
    for z in zs {
        g += z;
    }
    let root = linalg::inverse_sqrt(&g)?;
    Some(zs.iter().map(|z| linalg::hermitize(&(&root * z * &root))).collect())
}
