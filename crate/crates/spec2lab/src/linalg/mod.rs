//! Dense complex linear algebra on top of `faer`.

mod matrix;

use faer::{Mat, Side};
use num_complex::Complex64;
use thiserror::Error;

pub use matrix::{ComplexMatrix, HermitianMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix has no entries")]
    Empty,
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (‖H − H*‖_F = {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    #[error("columns are not orthonormal (‖G − I‖_F = {residual:e})")]
    NotOrthonormal { residual: f64 },
    #[error("{routine} did not converge (residual {residual:e})")]
    NoConvergence { routine: &'static str, residual: f64 },
}

/// Eigenvalues ascending, eigenvectors as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `‖U diag(λ) U* − H‖_F`.
    pub fn reconstruction_residual(&self, h: &HermitianMatrix) -> f64 {
        let u = self.vectors.as_faer();
        let n = self.eigenvalues.len();
        let ul = Mat::from_fn(n, n, |i, j| u[(i, j)] * self.eigenvalues[j]);
        let rec = &ul * u.adjoint();
        (&rec - h.matrix().as_faer()).norm_l2()
    }

    /// `‖U*U − I‖_F`.
    pub fn orthogonality_residual(&self) -> f64 {
        gram_residual(&self.vectors)
    }
}

pub fn hermitian_eig(h: &HermitianMatrix) -> Result<EigenDecomposition, LinalgError> {
    let e = h
        .matrix()
        .as_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LinalgError::NoConvergence { routine: "hermitian_eig", residual: f64::NAN })?;
    let n = h.dim();
    let s = e.S().column_vector();
    let eigenvalues: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    let vectors = ComplexMatrix::from_faer(e.U().to_owned())?;
    Ok(EigenDecomposition { eigenvalues, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(h: &HermitianMatrix) -> Result<Vec<f64>, LinalgError> {
    let ev = h
        .matrix()
        .as_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| LinalgError::NoConvergence { routine: "hermitian_eigenvalues", residual: f64::NAN })?;
    let mut ev: Vec<f64> = ev.into_iter().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// All eigenvalues of a square complex matrix, with multiplicity.
pub fn general_eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let ev = a
        .as_faer()
        .eigenvalues()
        .map_err(|_| LinalgError::NoConvergence { routine: "general_eigenvalues", residual: f64::NAN })?;
    let n = a.rows();
    let sum: Complex64 = ev.iter().sum();
    let drift = (sum - a.trace()).norm();
    let scale = a.norm_fro().max(crate::tol::ABS_FLOOR);
    if !drift.is_finite() || drift > 1e-8 * n as f64 * scale {
        return Err(LinalgError::NoConvergence { routine: "general_eigenvalues", residual: drift });
    }
    Ok(ev)
}

/// Nonnegative square root; eigenvalues down to `−1e-10·‖M‖` are clamped to zero.
pub fn psd_sqrt(m: &HermitianMatrix) -> Result<HermitianMatrix, LinalgError> {
    let e = hermitian_eig(m)?;
    let norm = e.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    sqrt_from_eig(&e, crate::tol::PSD * norm.max(crate::tol::ABS_FLOOR))
}

/// Square root clamping eigenvalues down to `−floor`; below that it fails.
pub fn psd_sqrt_with_floor(m: &HermitianMatrix, floor: f64) -> Result<HermitianMatrix, LinalgError> {
    sqrt_from_eig(&hermitian_eig(m)?, floor)
}

fn sqrt_from_eig(e: &EigenDecomposition, floor: f64) -> Result<HermitianMatrix, LinalgError> {
    let min = e.eigenvalues[0];
    if min < -floor {
        return Err(LinalgError::NotPositiveSemidefinite { min_eigenvalue: min });
    }
    let n = e.eigenvalues.len();
    let root: Vec<f64> = e.eigenvalues.iter().map(|&x| x.max(0.0).sqrt()).collect();
    let u = e.vectors.as_faer();
    let ul = Mat::from_fn(n, n, |i, j| u[(i, j)] * root[j]);
    let r = ComplexMatrix::from_faer(&ul * u.adjoint())?;
    Ok(HermitianMatrix::symmetrized(&r))
}

pub fn smallest_singular_value(a: &ComplexMatrix) -> Result<f64, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let s = a
        .as_faer()
        .singular_values()
        .map_err(|_| LinalgError::NoConvergence { routine: "singular_values", residual: f64::NAN })?;
    Ok(s.into_iter().fold(f64::INFINITY, f64::min).max(0.0))
}

/// `‖Q*Q − I‖_F` for the columns of `q`.
pub fn gram_residual(q: &ComplexMatrix) -> f64 {
    let g = q.as_faer().adjoint() * q.as_faer();
    let k = q.cols();
    (&g - Mat::<Complex64>::identity(k, k)).norm_l2()
}

/// Extends orthonormal `columns` to a unitary matrix of size `dim`; the
/// supplied vectors become the leading columns in order.
pub fn complete_unitary(columns: &[Vec<Complex64>], dim: usize) -> Result<ComplexMatrix, LinalgError> {
    let k = columns.len();
    if k == 0 {
        return Err(LinalgError::Empty);
    }
    if k > dim {
        return Err(LinalgError::DimensionMismatch { expected: dim, found: k });
    }
    let v = ComplexMatrix::from_columns(columns)?;
    if v.rows() != dim {
        return Err(LinalgError::DimensionMismatch { expected: dim, found: v.rows() });
    }
    let residual = gram_residual(&v);
    if residual > crate::tol::ORTHONORMAL {
        return Err(LinalgError::NotOrthonormal { residual });
    }
    if k == dim {
        return Ok(v);
    }
    // Householder QR of V: the trailing columns of Q span the complement.
    let q = v.as_faer().qr().compute_Q();
    let out = Mat::from_fn(dim, dim, |i, j| if j < k { v.get(i, j) } else { q[(i, j)] });
    let u = ComplexMatrix::from_faer(out)?;
    let residual = gram_residual(&u);
    if residual > crate::tol::ORTHONORMAL {
        return Err(LinalgError::NotOrthonormal { residual });
    }
    Ok(u)
}

/// Hermitian matrix with uniform random entries in the unit square.
pub fn random_hermitian(n: usize, rng: &mut impl rand::Rng) -> HermitianMatrix {
    use rand::RngExt;
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
    .expect("finite entries");
    HermitianMatrix::symmetrized(&g)
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl rand::Rng) -> ComplexMatrix {
    use rand::RngExt;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
    .expect("finite entries")
}

/// Haar-ish random unitary from the QR factor of a random matrix.
pub fn random_unitary(n: usize, rng: &mut impl rand::Rng) -> ComplexMatrix {
    let g = random_matrix(n, n, rng);
    let q = g.as_faer().qr().compute_Q();
    ComplexMatrix::from_faer(q).expect("finite entries")
}

/// Orthonormal basis of `{x : Ax ≈ 0}`: the right singular vectors whose
/// singular value is at most `rel_tol·σ_max`. `None` stands for a matrix with
/// no rows, whose nullspace is everything.
pub fn nullspace(a: Option<&ComplexMatrix>, n: usize, rel_tol: f64) -> Result<Vec<Vec<Complex64>>, LinalgError> {
    let unit = |j: usize| (0..n).map(|i| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect();
    let a = match a {
        Some(a) if a.max_abs() > 0.0 => a,
        _ => return Ok((0..n).map(unit).collect()),
    };
    if a.cols() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, found: a.cols() });
    }
    let svd = a
        .as_faer()
        .svd()
        .map_err(|_| LinalgError::NoConvergence { routine: "nullspace", residual: f64::NAN })?;
    let s = svd.S().column_vector();
    let v = svd.V();
    let sigma: Vec<f64> = (0..a.rows().min(n)).map(|i| s[i].re).collect();
    let cut = rel_tol * sigma.iter().fold(0.0f64, |x, &y| x.max(y));
    Ok((0..n)
        .filter(|&j| j >= sigma.len() || sigma[j] <= cut)
        .map(|j| (0..n).map(|i| v[(i, j)]).collect())
        .collect())
}
