use faer::{Mat, MatRef};
use num_complex::Complex64;

use super::LinalgError;

/// Dense complex matrix. Entries are always finite.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    inner: Mat<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Empty);
        }
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Self::from_faer(Mat::from_fn(rows, cols, |i, j| entries[i * cols + j]))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Empty);
        }
        Self::from_faer(Mat::from_fn(rows, cols, f))
    }

    pub fn from_faer(inner: Mat<Complex64>) -> Result<Self, LinalgError> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(LinalgError::Empty);
        }
        for j in 0..inner.ncols() {
            for i in 0..inner.nrows() {
                let z = inner[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(LinalgError::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { inner })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self { inner: Mat::zeros(rows, cols) }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "empty matrix");
        Self { inner: Mat::identity(n, n) }
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        assert!(n > 0, "empty matrix");
        Self {
            inner: Mat::from_fn(n, n, |i, j| if i == j { Complex64::new(d[i], 0.0) } else { Complex64::new(0.0, 0.0) }),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self, LinalgError> {
        let cols = columns.len();
        if cols == 0 {
            return Err(LinalgError::Empty);
        }
        let rows = columns[0].len();
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(LinalgError::DimensionMismatch { expected: rows, found: bad.len() });
        }
        Self::from_fn(rows, cols, |i, j| columns[j][i])
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn as_faer(&self) -> MatRef<'_, Complex64> {
        self.inner.as_ref()
    }

    pub fn into_faer(self) -> Mat<Complex64> {
        self.inner
    }

    pub fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows()).map(|i| self.inner[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Complex64>> {
        (0..self.cols()).map(|j| self.column(j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint().to_owned() }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.cols() != rhs.rows() {
            return Err(LinalgError::DimensionMismatch { expected: self.cols(), found: rhs.rows() });
        }
        Ok(Self { inner: &self.inner * &rhs.inner })
    }

    /// `self* · rhs`, without materialising the adjoint.
    pub fn adjoint_matmul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.rows() != rhs.rows() {
            return Err(LinalgError::DimensionMismatch { expected: self.rows(), found: rhs.rows() });
        }
        Ok(Self { inner: self.inner.adjoint() * &rhs.inner })
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols());
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.inner[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.check_same_shape(rhs)?;
        Ok(Self { inner: &self.inner + &rhs.inner })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.check_same_shape(rhs)?;
        Ok(Self { inner: &self.inner - &rhs.inner })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { inner: Mat::from_fn(self.rows(), self.cols(), |i, j| self.inner[(i, j)] * c) }
    }

    /// Adds `c` to every diagonal entry.
    pub fn shift_diagonal(&self, c: Complex64) -> Self {
        let mut inner = self.inner.clone();
        for i in 0..self.rows().min(self.cols()) {
            inner[(i, i)] += c;
        }
        Self { inner }
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows() && c0 + nc <= self.cols() && nr > 0 && nc > 0);
        Self { inner: self.inner.as_ref().submatrix(r0, c0, nr, nc).to_owned() }
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self, LinalgError> {
        if a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols() {
            return Err(LinalgError::DimensionMismatch { expected: a.rows(), found: b.rows() });
        }
        let (m, n) = (a.rows(), a.cols());
        Ok(Self {
            inner: Mat::from_fn(m + c.rows(), n + b.cols(), |i, j| match (i < m, j < n) {
                (true, true) => a.inner[(i, j)],
                (true, false) => b.inner[(i, j - n)],
                (false, true) => c.inner[(i - m, j)],
                (false, false) => d.inner[(i - m, j - n)],
            }),
        })
    }

    pub fn norm_fro(&self) -> f64 {
        self.inner.norm_l2()
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                m = m.max(self.inner[(i, j)].norm());
            }
        }
        m
    }

    /// Spectral norm (largest singular value).
    pub fn norm_2(&self) -> Result<f64, LinalgError> {
        let s = self.inner.singular_values().map_err(|_| LinalgError::NoConvergence {
            routine: "singular_values",
            residual: f64::NAN,
        })?;
        Ok(s.iter().copied().fold(0.0, f64::max))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows().min(self.cols())).map(|i| self.inner[(i, i)]).sum()
    }

    fn check_same_shape(&self, rhs: &Self) -> Result<(), LinalgError> {
        if self.rows() != rhs.rows() || self.cols() != rhs.cols() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows() * self.cols(),
                found: rhs.rows() * rhs.cols(),
            });
        }
        Ok(())
    }
}

/// Dense self-adjoint matrix, stored exactly Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    /// Accepts `m` if `‖m − m*‖_F ≤ 1e-12·max(1, ‖m‖_F)` and symmetrizes it.
    pub fn new(m: ComplexMatrix) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        let n = m.rows();
        let mut asym = 0.0;
        for j in 0..n {
            for i in 0..n {
                asym += (m.get(i, j) - m.get(j, i).conj()).norm_sqr();
            }
        }
        let asym = asym.sqrt();
        let bound = crate::tol::HERMITIAN * m.norm_fro().max(1.0);
        if asym > bound {
            return Err(LinalgError::NotHermitian { residual: asym });
        }
        Ok(Self::symmetrized(&m))
    }

    /// `(m + m*)/2` with no tolerance check. Use only where `m` is Hermitian by construction.
    pub fn symmetrized(m: &ComplexMatrix) -> Self {
        assert!(m.is_square());
        let n = m.rows();
        let a = m.as_faer();
        let inner = Mat::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(a[(i, i)].re, 0.0)
            } else {
                (a[(i, j)] + a[(j, i)].conj()) * 0.5
            }
        });
        Self { inner: ComplexMatrix { inner } }
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        Self { inner: ComplexMatrix::from_real_diagonal(d) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { inner: ComplexMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { inner: ComplexMatrix::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner.get(i, j)
    }

    pub fn norm_fro(&self) -> f64 {
        self.inner.norm_fro()
    }

    /// Spectral norm, computed from the eigenvalues.
    pub fn norm(&self) -> Result<f64, LinalgError> {
        let ev = super::hermitian_eigenvalues(self)?;
        Ok(ev.first().unwrap().abs().max(ev.last().unwrap().abs()))
    }

    pub fn square(&self) -> Self {
        Self::symmetrized(&ComplexMatrix { inner: &self.inner.inner * &self.inner.inner })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, LinalgError> {
        Ok(Self::symmetrized(&self.inner.add(&rhs.inner)?))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, LinalgError> {
        Ok(Self::symmetrized(&self.inner.sub(&rhs.inner)?))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { inner: self.inner.scale(Complex64::new(c, 0.0)) }
    }

    pub fn shift(&self, c: f64) -> Self {
        Self { inner: self.inner.shift_diagonal(Complex64::new(c, 0.0)) }
    }

    /// Principal submatrix on `start..start + len`.
    pub fn principal_block(&self, start: usize, len: usize) -> Self {
        Self { inner: self.inner.block(start, start, len, len) }
    }

    /// `V* H V` for a rectangular or square `V`.
    pub fn congruence(&self, v: &ComplexMatrix) -> Result<Self, LinalgError> {
        let hv = self.inner.matmul(v)?;
        Ok(Self::symmetrized(&v.adjoint_matmul(&hv)?))
    }

    /// `[[a, b], [b*, d]]`.
    pub fn from_blocks(a: &Self, b: &ComplexMatrix, d: &Self) -> Result<Self, LinalgError> {
        let full = ComplexMatrix::from_blocks(&a.inner, b, &b.adjoint(), &d.inner)?;
        Ok(Self::symmetrized(&full))
    }
}

impl AsRef<ComplexMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.inner
    }
}
