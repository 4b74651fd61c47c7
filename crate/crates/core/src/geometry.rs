//! Limit-point geometry of the optimistic dynamics.
//!
//! The dynamics converge to the orthogonal projection of the start point
//! onto the null spaces of the game matrix: `x` onto `N(A^T)`, `y` onto
//! `N(A)`, with the `t = -1` state playing no role in the limit. This module
//! computes that projection explicitly, decomposes the transient into its
//! oscillation modes, and packages the rate-discontinuity experiment.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::games;
use crate::linalg::{self, Matrix, SpectralData, Vector, RANK_CUTOFF};
use crate::ogda::{self, JointState, RatePrediction, Trajectory};
use crate::system::stability_bound;

/// Limit of the dynamics: one null-space point per player.
#[derive(Debug, Clone)]
pub struct LimitPoint {
    /// Limit of the `x` iterates; lies in `N(A^T)`.
    pub x_inf: Vector,
    /// Limit of the `y` iterates; lies in `N(A)`.
    pub y_inf: Vector,
}

impl LimitPoint {
    /// Repackages the limit as a state at time `t` (for distance bookkeeping).
    pub fn as_state(&self, t: i64) -> JointState {
        JointState::new(self.x_inf.clone(), self.y_inf.clone(), t)
    }
}

/// Orthogonal projection of the start point onto the null spaces:
/// `x_inf = P_{N(A^T)} x_0`, `y_inf = P_{N(A)} y_0`. Empty null spaces
/// project to zero.
pub fn limit_point(spec: &SpectralData, z0: &JointState) -> Result<LimitPoint> {
    if z0.x.len() != spec.left_null_basis.nrows() || z0.y.len() != spec.right_null_basis.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "state ({}, {}) vs bases ({}, {})",
            z0.x.len(),
            z0.y.len(),
            spec.left_null_basis.nrows(),
            spec.right_null_basis.nrows()
        )));
    }
    Ok(LimitPoint {
        x_inf: project_onto_basis(&spec.left_null_basis, &z0.x),
        y_inf: project_onto_basis(&spec.right_null_basis, &z0.y),
    })
}

fn project_onto_basis(basis: &Matrix, v: &Vector) -> Vector {
    if basis.ncols() == 0 {
        return Vector::zeros(v.len());
    }
    basis * (basis.transpose() * v)
}

/// Per-mode oscillation data of the transient: for every nonzero singular
/// value `sigma`, amplitude `(1 + 4 eta^2 sigma^2)^{1/2}` and angular
/// frequency `arctan(2 eta sigma)`.
#[derive(Debug, Clone, Serialize)]
pub struct OscillationSpectrum {
    pub amplitudes: Vec<f64>,
    pub frequencies: Vec<f64>,
}

/// Oscillation modes of the dynamics for `(a, eta)`.
pub fn oscillation_spectrum(a: &Matrix, eta: f64) -> Result<OscillationSpectrum> {
    let bound = stability_bound(a)?;
    if !eta.is_finite() || eta.abs() >= bound {
        return Err(Error::StabilityViolation { eta, bound });
    }
    let spec = linalg::svd(a, RANK_CUTOFF)?;
    let sigmas = &spec.singular_values[..spec.rank];
    Ok(OscillationSpectrum {
        amplitudes: sigmas
            .iter()
            .map(|s| (1.0 + 4.0 * eta * eta * s * s).sqrt())
            .collect(),
        frequencies: sigmas.iter().map(|s| (2.0 * eta * s).atan()).collect(),
    })
}

/// Even/odd binomial components of the k-th one-step-propagator power,
/// evaluated as the literal polynomial sums in `-4 eta^2 A A^T`:
///
/// cosine part `sum_i binom(k, 2i) (-4 eta^2 A A^T)^i`,
/// sine part   `sum_i binom(k, 2i+1) (-4 eta^2 A A^T)^i`.
pub fn b_power_components(a: &Matrix, eta: f64, k: usize) -> Result<(Matrix, Matrix)> {
    if k == 0 || k > ogda::CONVOLUTION_CAP {
        return Err(Error::WeightCap { t: k, cap: ogda::CONVOLUTION_CAP });
    }
    let gram = -4.0 * eta * eta * (a * a.transpose());
    let n = a.nrows();
    let mut cos_part = Matrix::zeros(n, n);
    let mut sin_part = Matrix::zeros(n, n);
    let mut gram_power = Matrix::identity(n, n);
    for i in 0..=k / 2 {
        cos_part += binomial_f64(k, 2 * i) * &gram_power;
        if 2 * i + 1 <= k {
            sin_part += binomial_f64(k, 2 * i + 1) * &gram_power;
        }
        gram_power *= &gram;
    }
    Ok((cos_part, sin_part))
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut value = 1.0f64;
    for i in 0..k {
        value = value * (n - i) as f64 / (i + 1) as f64;
    }
    value.round()
}

/// The same two components through the trigonometric closed forms
///
/// `(I + 4 eta^2 A A^T)^{k/2} cos(k \u{03a9})` and the matching sine form
/// divided by `2 eta (A A^T)^{1/2}`, with `\u{03a9} = arctan(2 eta (A A^T)^{1/2})`.
/// All matrix functions are evaluated by diagonalizing the symmetric Gram
/// matrix. For the sine form the division is carried out per eigenvalue,
/// with the `sigma -> 0` limit `k (1 + ...)^{k/2 - ...}` handled by the
/// scalar limit of `sin(k arctan(u))/u` at `u = 0`, which equals `k`.
pub fn b_power_components_trig(a: &Matrix, eta: f64, k: usize) -> Result<(Matrix, Matrix)> {
    let bound = stability_bound(a)?;
    if !eta.is_finite() || eta.abs() >= bound {
        return Err(Error::StabilityViolation { eta, bound });
    }
    let gram = a * a.transpose();
    let kf = k as f64;
    let cos_part = linalg::sym_apply(&gram, |s| {
        let s = s.max(0.0);
        let u = 2.0 * eta * s.sqrt();
        (1.0 + u * u).powf(kf / 2.0) * (kf * u.atan()).cos()
    })?;
    let sin_part = linalg::sym_apply(&gram, |s| {
        let s = s.max(0.0);
        let u = 2.0 * eta * s.sqrt();
        if u.abs() < 1e-300 {
            kf
        } else {
            (1.0 + u * u).powf(kf / 2.0) * (kf * u.atan()).sin() / u
        }
    })?;
    Ok((cos_part, sin_part))
}

/// Assembles the k-th power of the one-step propagator from its components:
///
/// ```text
/// B^k = | cos_k(A)              -2 eta A sin_k(A^T) |
///       | 2 eta A^T sin_k(A)     cos_k(A^T)         |
/// ```
pub fn assemble_b_power(a: &Matrix, eta: f64, k: usize) -> Result<Matrix> {
    let (cos_a, sin_a) = b_power_components(a, eta, k)?;
    let at = a.transpose();
    let (cos_at, sin_at) = b_power_components(&at, eta, k)?;
    let (n, m) = (a.nrows(), a.ncols());
    let mut out = Matrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(&cos_a);
    out.view_mut((0, n), (n, m)).copy_from(&(-2.0 * eta * a * sin_at));
    out.view_mut((n, 0), (m, n)).copy_from(&(2.0 * eta * at * sin_a));
    out.view_mut((n, n), (m, m)).copy_from(&cos_at);
    Ok(out)
}

/// Outcome of the rate-discontinuity experiment: predictions and sample
/// trajectories for a game and its uniformly perturbed copy.
#[derive(Debug, Clone)]
pub struct DiscontinuityReport {
    pub unperturbed: RatePrediction,
    pub perturbed: RatePrediction,
    pub unperturbed_trajectory: Trajectory,
    pub perturbed_trajectory: Trajectory,
}

/// Compares the predicted rate of the matching-pennies game against its
/// entrywise `+eps` perturbation at the same learning rate, and simulates
/// both for `steps` steps from the same start so the two transients can be
/// plotted side by side.
pub fn discontinuity_experiment(eps: f64, eta: f64, steps: usize) -> Result<DiscontinuityReport> {
    if eps <= 0.0 {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    let base = games::matching_pennies();
    let noisy = games::perturbed(&base, eps);
    let unperturbed = ogda::predicted_rate(&base, eta)?;
    let perturbed = ogda::predicted_rate(&noisy, eta)?;

    let z0 = JointState::new(
        Vector::from_row_slice(&[0.8, 0.2]),
        Vector::from_row_slice(&[0.3, 0.7]),
        0,
    );
    let zm1 = JointState::zeros(2, 2, -1);
    Ok(DiscontinuityReport {
        unperturbed,
        perturbed,
        unperturbed_trajectory: ogda::simulate(&base, eta, &z0, &zm1, steps)?,
        perturbed_trajectory: ogda::simulate(&noisy, eta, &z0, &zm1, steps)?,
    })
}
