//! Dense complex linear algebra helpers shared across the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Error;

pub type CMatrix = DMatrix<Complex64>;

pub fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub fn cone() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMatrix {
    CMatrix::zeros(r, c)
}

/// Conjugate transpose.
pub fn adj(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// Frobenius norm.
pub fn fro_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Operator (spectral) norm via singular values.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values()[0]
}

/// Eigenvalues of a Hermitian matrix in ascending order. The input is
/// symmetrized first to guard against accumulation asymmetry.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut evs: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    evs
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn lambda_min(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)[0]
}

/// Eigen decomposition of a Hermitian matrix: (eigenvalues ascending, eigenvectors as columns).
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()).scale(0.5);
    let n = h.nrows();
    let se = h.symmetric_eigen();
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let evs: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    (evs, vecs)
}

/// Positive-semidefinite square root of a Hermitian PSD matrix.
/// Fails if an eigenvalue is below `-tol`.
pub fn psd_sqrt(m: &CMatrix, tol: f64) -> Result<CMatrix, Error> {
    let (evs, vecs) = hermitian_eigen(m);
    if evs[0] < -tol {
        return Err(Error::NotPositiveDefinite { min_eig: evs[0] });
    }
    let n = m.nrows();
    let mut d = zeros(n, n);
    for i in 0..n {
        d[(i, i)] = Complex64::new(evs[i].max(0.0).sqrt(), 0.0);
    }
    Ok(&vecs * d * vecs.adjoint())
}

/// Inverse via LU. Fails on (numerically) singular input.
pub fn inverse(m: &CMatrix) -> Result<CMatrix, Error> {
    m.clone().try_inverse().ok_or(Error::SingularMatrix)
}

/// Least-squares solve `A x = b` via SVD (minimum-norm solution).
pub fn lstsq(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, Error> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-14).map_err(|_| Error::SingularMatrix)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    m.clone().singular_values().iter().copied().collect()
}

/// Condition number estimate (sigma_max / sigma_min).
pub fn cond(m: &CMatrix) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Column-major vectorization of a matrix.
pub fn vectorize(m: &CMatrix) -> CMatrix {
    CMatrix::from_column_slice(m.nrows() * m.ncols(), 1, m.as_slice())
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Max absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
