use crate::error::Result;
use crate::linalg;
use crate::model::{hmin, MixedEnsemble, QuantumEnsemble};
use crate::optim::guessing_probability;

const EIGEN_TOL: f64 = 1e-9;

/// One-shot accessible information `H_min(X) + log2 P_g(X|E)` in bits.
pub fn info_of_ensemble(e: &QuantumEnsemble) -> Result<f64> {
    let h = hmin(e.prior())?;
    let pg = guessing_probability(e)?;
    let cap = h.min((e.dim() as f64).log2());
    Ok((h + pg.log2()).clamp(0.0, cap))
}

/// Information when the preparation depends on shared randomness: the
/// guessing probability is averaged over branches before taking the log.
pub fn info_of_mixed(m: &MixedEnsemble) -> Result<f64> {
    let h = hmin(m.prior())?;
    let mut pg = 0.0;
    for (w, e) in m.branches() {
        if *w > 0.0 {
            pg += w * guessing_probability(e)?;
        }
    }
    Ok((h + pg.log2()).clamp(0.0, h))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenBound {
    pub bits: f64,
    /// Whether the sufficient conditions for equality are met: every state
    /// has a flat nonzero spectrum and `p(x) lambda_max(rho_x)` is constant.
    pub tight: bool,
}

/// `log2 d + log2(max_x p(x) lambda_max(rho_x) / max_x p(x))`.
pub fn info_eigen_bound(e: &QuantumEnsemble) -> EigenBound {
    let d = e.dim() as f64;
    let mut weighted = Vec::with_capacity(e.len());
    let mut flat = true;
    for (p, rho) in e.prior().iter().zip(e.states()) {
        let ev = linalg::eigenvalues(rho.matrix());
        let top = ev.last().copied().unwrap_or(0.0);
        flat &= ev.iter().all(|&v| v.abs() <= EIGEN_TOL || (v - top).abs() <= EIGEN_TOL);
        weighted.push(p * top);
    }
    let hi = weighted.iter().cloned().fold(f64::MIN, f64::max);
    let lo = weighted.iter().cloned().fold(f64::MAX, f64::min);
    EigenBound {
        bits: d.log2() + (hi / e.max_prior()).log2(),
        tight: flat && hi - lo <= EIGEN_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HermitianOperator;
    use num_complex::Complex64;

    fn ket(v: &[f64]) -> HermitianOperator {
        let c: Vec<Complex64> = v.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        HermitianOperator::pure(&c).unwrap()
    }

    #[test]
    fn orthogonal_and_identical() {
        let e = QuantumEnsemble::uniform(vec![ket(&[1.0, 0.0, 0.0]), ket(&[0.0, 1.0, 0.0]), ket(&[0.0, 0.0, 1.0])]).unwrap();
        assert!((info_of_ensemble(&e).unwrap() - 3f64.log2()).abs() < 1e-8);
        let same = QuantumEnsemble::uniform(vec![ket(&[1.0, 0.0]); 3]).unwrap();
        assert!(info_of_ensemble(&same).unwrap().abs() < 1e-8);
    }

    #[test]
    fn eigen_bound_examples() {
        let mixed = QuantumEnsemble::uniform(vec![HermitianOperator::maximally_mixed(3); 2]).unwrap();
        let b = info_eigen_bound(&mixed);
        assert!(b.bits.abs() < 1e-12 && b.tight);
        let pure = QuantumEnsemble::uniform(vec![ket(&[1.0, 0.0]), ket(&[0.6, 0.8])]).unwrap();
        let b = info_eigen_bound(&pure);
        assert!((b.bits - 1.0).abs() < 1e-12 && b.tight);
        let skew = QuantumEnsemble::new(vec![0.7, 0.3], vec![ket(&[1.0, 0.0]), ket(&[0.0, 1.0])]).unwrap();
        assert!(!info_eigen_bound(&skew).tight);
    }

    #[test]
    fn mixed_single_branch() {
        let e = QuantumEnsemble::uniform(vec![ket(&[1.0, 0.0]), ket(&[0.6, 0.8])]).unwrap();
        let a = info_of_ensemble(&e).unwrap();
        let b = info_of_mixed(&MixedEnsemble::single(e)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
