//! Block operators driving the optimistic dynamics.
//!
//! For a game matrix `A` and learning rate `eta`, the one-step recursion
//! `z_t = B z_{t-1} + C z_{t-2}` is governed by the `(n+m)`-square blocks
//!
//! ```text
//! B = | I      -2 eta A |      C = | 0        eta A |
//!     | 2 eta A^T     I |          | -eta A^T     0 |
//! ```
//!
//! together with `T = B^2 + 4C` (block diagonal, positive definite inside the
//! stability region) and the split propagators `E = (B + T^{1/2}) / 2`,
//! `V = (B - T^{1/2}) / 2` that diagonalize the closed-form solution.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Assembled block operators for a given `(A, eta)` pair.
#[derive(Debug, Clone)]
pub struct OgdaSystem {
    /// The game matrix.
    pub a: Matrix,
    /// Learning rate; may be negative, `|eta| < 1/(2 gamma)`.
    pub eta: f64,
    /// One-step propagator block.
    pub b_block: Matrix,
    /// Two-step (memory) propagator block.
    pub c_block: Matrix,
    /// `B^2 + 4C`, block diagonal with `I - 4 eta^2 A A^T` and `I - 4 eta^2 A^T A`.
    pub t_block: Matrix,
    /// Principal square root of `t_block`.
    pub t_sqrt: Matrix,
    /// Inverse of `t_sqrt`.
    pub t_inv_sqrt: Matrix,
    /// Slow propagator `(B + T^{1/2}) / 2`; its unit-modulus eigenvalues pin the limit.
    pub e_block: Matrix,
    /// Fast propagator `(B - T^{1/2}) / 2`; its powers vanish.
    pub v_block: Matrix,
}

impl OgdaSystem {
    /// Combined state dimension `n + m`.
    pub fn dim(&self) -> usize {
        self.a.nrows() + self.a.ncols()
    }
}

/// Largest stable learning-rate magnitude for `a`: `1 / (2 ||a||)`.
pub fn stability_bound(a: &Matrix) -> Result<f64> {
    let gamma = linalg::spectral_norm(a)?;
    if gamma == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(1.0 / (2.0 * gamma))
}

/// Builds the block system for `(a, eta)`.
///
/// Fails when `a` is the zero matrix or `|eta| >= 1/(2 ||a||)`; the strict
/// inequality keeps `T` positive definite so the principal square root exists.
pub fn build_system(a: &Matrix, eta: f64) -> Result<OgdaSystem> {
    linalg::validate_finite(a, "build_system input")?;
    let bound = stability_bound(a)?;
    if !eta.is_finite() || eta.abs() >= bound {
        return Err(Error::StabilityViolation { eta, bound });
    }

    let (n, m) = (a.nrows(), a.ncols());
    let d = n + m;
    let mut b_block = Matrix::identity(d, d);
    let mut c_block = Matrix::zeros(d, d);
    for i in 0..n {
        for j in 0..m {
            b_block[(i, n + j)] = -2.0 * eta * a[(i, j)];
            b_block[(n + j, i)] = 2.0 * eta * a[(i, j)];
            c_block[(i, n + j)] = eta * a[(i, j)];
            c_block[(n + j, i)] = -eta * a[(i, j)];
        }
    }
    let t_block = &b_block * &b_block + 4.0 * &c_block;
    let (t_sqrt, t_inv_sqrt) = linalg::sqrt_and_inv_sqrt(&t_block)?;
    let e_block = (&b_block + &t_sqrt) * 0.5;
    let v_block = (&b_block - &t_sqrt) * 0.5;

    Ok(OgdaSystem {
        a: a.clone(),
        eta,
        b_block,
        c_block,
        t_block,
        t_sqrt,
        t_inv_sqrt,
        e_block,
        v_block,
    })
}
