//! Dense complex linear algebra used throughout the crate.
//!
//! Every operator in the simulator (Hamiltonians, oracles, circuit layers,
//! density matrices) is a [`ComplexMatrix`]. Sizes stay below `2^9 x 2^9`, so
//! everything is dense and eigendecompositions are computed directly.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Tolerance on `||h - h^dagger||` accepted as Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (||h - h^dagger|| = {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },
    #[error("eigenvalue {eigenvalue} lies outside the domain of the applied function")]
    DomainError { eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix must be square, found {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// Dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{}) ", self.nrows(), self.ncols())?;
        fmt::Debug::fmt(&self.inner, f)
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self {
            inner: DMatrix::from_fn(rows, cols, f),
        }
    }

    /// Builds a matrix from row-major entries. Panics if `entries.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Self {
        assert_eq!(
            entries.len(),
            rows * cols,
            "entry count does not match shape"
        );
        Self {
            inner: DMatrix::from_row_slice(rows, cols, entries),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_nalgebra(inner: DMatrix<Complex64>) -> Self {
        Self { inner }
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_nalgebra(self) -> DMatrix<Complex64> {
        self.inner
    }

    pub fn nrows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.inner[(row, col)] = value;
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.nrows() * self.ncols());
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            inner: &self.inner * factor,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.inner.norm()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn all_finite(&self) -> bool {
        self.inner
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `||self - self^dagger||_F`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.inner - self.inner.adjoint()).norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `||U U^dagger - I||_F <= tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let prod = &self.inner * self.inner.adjoint();
        (prod - DMatrix::identity(self.nrows(), self.nrows())).norm() <= tol
    }

    /// `a * rho * a^dagger`.
    pub fn conjugate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let left = &self.inner * &rho.inner;
        Self {
            inner: left * self.inner.adjoint(),
        }
    }

    /// Hermitian part `(a + a^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            inner: (&self.inner + self.inner.adjoint()) * Complex64::new(0.5, 0.0),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

/// Kronecker product `a ⊗ b`; the left factor indexes the most significant block.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix {
        inner: a.inner.kronecker(&b.inner),
    }
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Eigendecomposition `h = Q diag(lambda) Q^dagger` of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending; each eigenvector is rescaled so that its
/// first component with magnitude above `1e-12` is real and positive.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `j` holds the eigenvector of `eigenvalues[j]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Q diag(f(lambda_j)) Q^dagger`.
    pub fn apply<F>(&self, f: F) -> Result<ComplexMatrix, LinalgError>
    where
        F: Fn(f64) -> Option<Complex64>,
    {
        let values = self
            .eigenvalues
            .iter()
            .map(|&l| f(l).ok_or(LinalgError::DomainError { eigenvalue: l }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.reassemble_with(&values))
    }

    /// `Q diag(values) Q^dagger` for caller-supplied spectral values.
    pub fn reassemble_with(&self, values: &[Complex64]) -> ComplexMatrix {
        let q = &self.eigenvectors.inner;
        let n = self.dim();
        let mut scaled = q.clone();
        for (j, v) in values.iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= v;
            }
        }
        ComplexMatrix {
            inner: scaled * q.adjoint(),
        }
    }

    pub fn reassemble(&self) -> ComplexMatrix {
        let values: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|&l| Complex64::new(l, 0.0))
            .collect();
        self.reassemble_with(&values)
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn herm_eig(h: &ComplexMatrix) -> Result<EigenDecomposition, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NotSquare {
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let deviation = h.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(LinalgError::NonHermitianInput { deviation });
    }
    let n = h.nrows();
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = h.hermitian_part().inner;
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let phase = v
            .iter()
            .find(|z| z.norm() > 1e-12)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(Complex64::new(1.0, 0.0));
        for i in 0..n {
            vectors[(i, col)] = v[i] * phase;
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix { inner: vectors },
    })
}

/// Lifts a scalar function through the eigendecomposition of `h`.
///
/// `f` returns `None` for arguments outside its domain, which is reported as
/// [`LinalgError::DomainError`].
pub fn herm_fn<F>(h: &ComplexMatrix, f: F) -> Result<ComplexMatrix, LinalgError>
where
    F: Fn(f64) -> Option<Complex64>,
{
    herm_eig(h)?.apply(f)
}

/// Largest singular value, `sqrt(max eig(a^dagger a))`.
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    let gram = ComplexMatrix {
        inner: a.inner.adjoint() * &a.inner,
    }
    .hermitian_part();
    let eig = gram.inner.symmetric_eigen();
    eig.eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l))
        .max(0.0)
        .sqrt()
}
