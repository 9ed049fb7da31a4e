//! Dense complex matrix helpers shared by the quantum-facing modules.
//!
//! Everything here works on `nalgebra::DMatrix<Complex64>`; the dimensions in
//! this crate stay small (at most 16) so nothing tries to be clever.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn sigma_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn sigma_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn sigma_z() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn scaled(m: &CMat, s: f64) -> CMat {
    m * Complex64::new(s, 0.0)
}

pub fn real(m: &DMatrix<f64>) -> CMat {
    m.map(|v| Complex64::new(v, 0.0))
}

/// `|v><v|` for a (not necessarily normalized) column vector.
pub fn outer(v: &[Complex64]) -> CMat {
    let d = v.len();
    CMat::from_fn(d, d, |i, j| v[i] * v[j].conj())
}

/// Diagonal projector `|i><i|` in dimension `d`.
pub fn basis_projector(d: usize, i: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    m[(i, i)] = ONE;
    m
}

/// `(m + m†) / 2`. The result is exactly Hermitian in floating point.
pub fn hermitize(m: &CMat) -> CMat {
    let d = m.nrows();
    CMat::from_fn(d, d, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..d {
        for j in 0..d {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace_re(m: &CMat) -> f64 {
    m.trace().re
}

/// `Re Tr(a b)`; for Hermitian arguments this is the full trace.
pub fn trace_product(a: &CMat, b: &CMat) -> f64 {
    let d = a.nrows();
    let mut acc = 0.0;
    for i in 0..d {
        for k in 0..d {
            let x = a[(i, k)];
            let y = b[(k, i)];
            acc += x.re * y.re - x.im * y.im;
        }
    }
    acc
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending with
/// the eigenvectors as matching columns.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let d = m.nrows();
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn eigenvalues(m: &CMat) -> Vec<f64> {
    hermitian_eigen(m).0
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    eigenvalues(m).first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(m: &CMat) -> f64 {
    eigenvalues(m).last().copied().unwrap_or(0.0)
}

/// Rebuild `V f(Λ) V†` from an eigen-decomposition.
pub fn spectral_map(values: &[f64], vectors: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let d = vectors.nrows();
    let mut out = CMat::zeros(d, d);
    for (k, &lam) in values.iter().enumerate() {
        let w = f(lam);
        if w == 0.0 {
            continue;
        }
        let col = vectors.column(k);
        for i in 0..d {
            let ci = col[i] * w;
            for j in 0..d {
                out[(i, j)] += ci * col[j].conj();
            }
        }
    }
    hermitize(&out)
}

/// Projector onto the eigenspace with eigenvalues `>= -tol`.
pub fn nonnegative_projector(m: &CMat, tol: f64) -> CMat {
    let (values, vectors) = hermitian_eigen(m);
    spectral_map(&values, &vectors, |v| if v >= -tol { 1.0 } else { 0.0 })
}

/// `m^{-1/2}` for a positive definite matrix.
pub fn inverse_sqrt(m: &CMat) -> Option<CMat> {
    let (values, vectors) = hermitian_eigen(m);
    if values.iter().any(|&v| v <= 0.0) {
        return None;
    }
    Some(spectral_map(&values, &vectors, |v| 1.0 / v.sqrt()))
}

/// Trace out the first tensor factor of a `d1*d2` operator.
pub fn partial_trace_first(m: &CMat, d1: usize, d2: usize) -> CMat {
    assert_eq!(m.nrows(), d1 * d2);
    CMat::from_fn(d2, d2, |i, j| {
        (0..d1).map(|a| m[(a * d2 + i, a * d2 + j)]).sum()
    })
}

/// Trace out the second tensor factor of a `d1*d2` operator.
pub fn partial_trace_second(m: &CMat, d1: usize, d2: usize) -> CMat {
    assert_eq!(m.nrows(), d1 * d2);
    CMat::from_fn(d1, d1, |i, j| {
        (0..d2).map(|b| m[(i * d2 + b, j * d2 + b)]).sum()
    })
}

/// Lower Cholesky factor of a Hermitian positive definite matrix, or `None`
/// when a pivot is not strictly positive.
pub fn cholesky(m: &CMat) -> Option<CMat> {
    let d = m.nrows();
    let mut l = CMat::zeros(d, d);
    for j in 0..d {
        let mut diag = m[(j, j)].re;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if diag.is_nan() || diag <= 0.0 {
            return None;
        }
        let ljj = diag.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..d {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / ljj;
        }
    }
    Some(l)
}

/// `log det` from a Cholesky factor.
pub fn cholesky_log_det(l: &CMat) -> f64 {
    (0..l.nrows()).map(|i| 2.0 * l[(i, i)].re.ln()).sum()
}

/// `(L L†)^{-1}` from a lower Cholesky factor.
pub fn cholesky_inverse(l: &CMat) -> CMat {
    let d = l.nrows();
    // Forward substitution for L^{-1}, column by column.
    let mut linv = CMat::zeros(d, d);
    for c in 0..d {
        for i in c..d {
            let mut v = if i == c { ONE } else { ZERO };
            for k in c..i {
                v -= l[(i, k)] * linv[(k, c)];
            }
            linv[(i, c)] = v / l[(i, i)];
        }
    }
    hermitize(&(linv.adjoint() * linv))
}

/// Schatten-1 norm of a Hermitian matrix.
pub fn trace_norm(m: &CMat) -> f64 {
    eigenvalues(m).iter().map(|v| v.abs()).sum()
}
