//! Dense real matrix/vector kernels and spectral objects.
//!
//! Everything downstream works on `f64` dense matrices ([`Matrix`] is an
//! alias for `nalgebra::DMatrix<f64>`). The spectral routines here wrap
//! nalgebra's SVD and symmetric eigendecomposition with the conventions the
//! rest of the crate relies on: singular values sorted nonincreasing,
//! orthonormal null-space bases, and a scale-invariant rank cutoff.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense real matrix, row/column indexed, double precision.
pub type Matrix = DMatrix<f64>;
/// Dense real column vector.
pub type Vector = DVector<f64>;

/// Relative cutoff used to decide numerical rank: singular values below
/// `RANK_CUTOFF * sigma_max` are treated as zero. The value is a choice,
/// not a derived constant; it is scale-invariant and conservative for
/// desk-scale matrices.
pub const RANK_CUTOFF: f64 = 1e-9;

/// Returns an error if any entry of `m` is NaN or infinite.
pub fn validate_finite(m: &Matrix, context: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(context))
    }
}

/// Spectral data of a game matrix: singular values, null-space bases, and
/// the spectral norm. The bases are orthonormal; `rank` plus the number of
/// columns of each basis recovers the corresponding dimension.
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Singular values, nonincreasing.
    pub singular_values: Vec<f64>,
    /// Orthonormal columns spanning the null space of `a^T` (length-n vectors).
    pub left_null_basis: Matrix,
    /// Orthonormal columns spanning the null space of `a` (length-m vectors).
    pub right_null_basis: Matrix,
    /// Spectral norm of `a` (largest singular value).
    pub gamma: f64,
    /// Numerical rank under the relative cutoff.
    pub rank: usize,
    /// Thin left singular factor (n x min(n, m)).
    pub u: Matrix,
    /// Thin right singular factor transposed (min(n, m) x m).
    pub v_t: Matrix,
}

impl SpectralData {
    /// Smallest nonzero singular value, or an error for the zero matrix.
    pub fn sigma_min_nonzero(&self) -> Result<f64> {
        if self.rank == 0 {
            return Err(Error::ZeroMatrix);
        }
        Ok(self.singular_values[self.rank - 1])
    }
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
/// Eigenvector `i` is column `i` of the returned matrix.
pub(crate) fn symmetric_eigen_sorted(s: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let eig = s
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or(Error::EigenFailure)?;
    let n = s.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Applies a scalar function to a symmetric matrix through its
/// eigendecomposition: `f(S) = Q f(Lambda) Q^T`.
pub fn sym_apply(s: &Matrix, f: impl Fn(f64) -> f64) -> Result<Matrix> {
    let (values, q) = symmetric_eigen_sorted(s)?;
    let d = Matrix::from_diagonal(&Vector::from_iterator(
        values.len(),
        values.iter().map(|&v| f(v)),
    ));
    Ok(&q * d * q.transpose())
}

/// Full SVD of `a` with numerical rank detection.
///
/// Singular values come from nalgebra's SVD of `a` itself (accurate for tiny
/// singular values, unlike the Gram-matrix route). Null-space bases are read
/// off the symmetric eigendecompositions of `a^T a` and `a a^T`: exactly
/// `cols - rank` (resp. `rows - rank`) eigenvectors with the smallest
/// eigenvalues, which keeps the rank/nullity bookkeeping consistent by
/// construction.
pub fn svd(a: &Matrix, tol: f64) -> Result<SpectralData> {
    validate_finite(a, "svd input")?;
    if tol <= 0.0 {
        return Err(Error::InvalidInput(format!("tol must be positive, got {tol}")));
    }
    let decomposition = a
        .clone()
        .try_svd(true, true, f64::EPSILON, 10_000)
        .ok_or(Error::EigenFailure)?;
    let mut singular_values: Vec<f64> = decomposition.singular_values.iter().copied().collect();
    singular_values.sort_by(|x, y| y.total_cmp(x));
    let gamma = singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values.iter().filter(|&&s| s > tol * gamma).count();

    let (n, m) = (a.nrows(), a.ncols());
    let right_null_basis = smallest_eigenvectors(&(a.transpose() * a), m - rank)?;
    let left_null_basis = smallest_eigenvectors(&(a * a.transpose()), n - rank)?;

    Ok(SpectralData {
        singular_values,
        left_null_basis,
        right_null_basis,
        gamma,
        rank,
        u: decomposition.u.ok_or(Error::EigenFailure)?,
        v_t: decomposition.v_t.ok_or(Error::EigenFailure)?,
    })
}

fn smallest_eigenvectors(gram: &Matrix, count: usize) -> Result<Matrix> {
    let (_, q) = symmetric_eigen_sorted(gram)?;
    Ok(q.columns(0, count).into_owned())
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or(Error::EigenFailure)?;
    Ok(svd.singular_values.iter().fold(0.0f64, |acc, &s| acc.max(s)))
}

/// Principal square root of a symmetric positive definite matrix.
///
/// Computed from the symmetric eigendecomposition; any eigenvalue at or
/// below zero is rejected.
pub fn principal_sqrt(s: &Matrix) -> Result<Matrix> {
    let (sqrt, _) = sqrt_and_inv_sqrt(s)?;
    Ok(sqrt)
}

/// Principal square root together with its inverse, sharing one
/// eigendecomposition.
pub(crate) fn sqrt_and_inv_sqrt(s: &Matrix) -> Result<(Matrix, Matrix)> {
    if s.nrows() != s.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "square matrix required, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    let sym_err = (s - s.transpose()).norm();
    if sym_err > 1e-10 * (1.0 + s.norm()) {
        return Err(Error::InvalidInput(format!(
            "matrix is not symmetric (asymmetry {sym_err:.3e})"
        )));
    }
    let (values, q) = symmetric_eigen_sorted(s)?;
    if let Some(&bad) = values.iter().find(|&&v| v <= 0.0) {
        return Err(Error::NotPositiveDefinite(bad));
    }
    let n = values.len();
    let d_sqrt = Matrix::from_diagonal(&Vector::from_iterator(n, values.iter().map(|v| v.sqrt())));
    let d_inv = Matrix::from_diagonal(&Vector::from_iterator(
        n,
        values.iter().map(|v| 1.0 / v.sqrt()),
    ));
    Ok((&q * d_sqrt * q.transpose(), &q * d_inv * q.transpose()))
}

/// Matrix power by repeated squaring. `k = 0` yields the identity.
pub fn matrix_power(m: &Matrix, k: usize) -> Result<Matrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "square matrix required, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let mut result = Matrix::identity(n, n);
    let mut base = m.clone();
    let mut exp = k;
    while exp > 0 {
        if exp & 1 == 1 {
            result *= &base;
        }
        exp >>= 1;
        if exp > 0 {
            base = &base * &base;
        }
    }
    if result.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow { step: k });
    }
    Ok(result)
}
