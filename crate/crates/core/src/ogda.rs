//! The dynamics core: iterative GDA/OGDA, the closed-form evaluator, the
//! convolution-form oracle, and convergence-rate prediction/measurement.
//!
//! Three independent routes compute the same state `z_t = (x_t, y_t)`:
//!
//! 1. [`simulate`] — the literal update loop,
//! 2. [`closed_form_state`] — `Q_t z_0 + Q_{t-1} C z_{-1}` with
//!    `Q_t = T^{-1/2} (E^{t+1} - V^{t+1})`,
//! 3. [`qt_convolution`] — the binomial-weighted sum
//!    `Q_t = sum_i binom(t-i, i) B^{t-2i} C^i` (small-t verification oracle).
//!
//! Agreement of all three is the backbone of the test suite.

use serde::Serialize;

use crate::dd;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector, RANK_CUTOFF};
use crate::system::{stability_bound, OgdaSystem};

/// Any coordinate beyond this magnitude aborts a simulation as divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e150;

/// Largest `t` accepted by the convolution oracle; beyond this the binomial
/// weights `binom(t-i, i)` leave the exactly-representable integer range.
pub const CONVOLUTION_CAP: usize = 60;

/// Stacked iterate of both players at one time index.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub x: Vector,
    pub y: Vector,
    /// Time index, `>= -1`.
    pub t: i64,
}

impl JointState {
    pub fn new(x: Vector, y: Vector, t: i64) -> Self {
        JointState { x, y, t }
    }

    /// Zero state of the given shape at time `t`.
    pub fn zeros(n: usize, m: usize, t: i64) -> Self {
        JointState::new(Vector::zeros(n), Vector::zeros(m), t)
    }

    /// Stacks `(x, y)` into one `(n+m)`-vector.
    pub fn stacked(&self) -> Vector {
        let mut z = Vector::zeros(self.x.len() + self.y.len());
        z.rows_mut(0, self.x.len()).copy_from(&self.x);
        z.rows_mut(self.x.len(), self.y.len()).copy_from(&self.y);
        z
    }

    /// Splits a stacked vector back into a state.
    pub fn from_stacked(z: &Vector, n: usize, t: i64) -> Self {
        JointState::new(z.rows(0, n).into_owned(), z.rows(n, z.len() - n).into_owned(), t)
    }

    /// Euclidean distance between stacked states.
    pub fn distance(&self, other: &JointState) -> f64 {
        ((&self.x - &other.x).norm_squared() + (&self.y - &other.y).norm_squared()).sqrt()
    }

    fn check_dims(&self, a: &Matrix) -> Result<()> {
        if self.x.len() != a.nrows() || self.y.len() != a.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "state ({}, {}) vs game {}x{}",
                self.x.len(),
                self.y.len(),
                a.nrows(),
                a.ncols()
            )));
        }
        Ok(())
    }

    fn is_finite(&self) -> bool {
        self.x.iter().chain(self.y.iter()).all(|v| v.is_finite())
    }
}

/// Time-indexed orbit of the dynamics, from `t = -1` onward.
#[derive(Debug, Clone)]
pub struct Trajectory {
    states: Vec<JointState>,
    pub eta: f64,
    pub matrix: Matrix,
}

impl Trajectory {
    pub fn states(&self) -> &[JointState] {
        &self.states
    }

    /// State at time index `t` (the orbit starts at `t = -1`).
    pub fn state_at(&self, t: i64) -> Option<&JointState> {
        let offset = t - self.states.first()?.t;
        usize::try_from(offset).ok().and_then(|i| self.states.get(i))
    }

    pub fn final_state(&self) -> &JointState {
        self.states.last().expect("trajectory is never empty")
    }

    /// Distances of every state to `reference`.
    pub fn distances_to(&self, reference: &JointState) -> Vec<f64> {
        self.states.iter().map(|s| s.distance(reference)).collect()
    }
}

/// One simultaneous gradient descent/ascent step:
/// `x' = x - eta A y`, `y' = y + eta A^T x`.
pub fn gda_step(a: &Matrix, eta: f64, current: &JointState) -> Result<JointState> {
    current.check_dims(a)?;
    let x = &current.x - eta * (a * &current.y);
    let y = &current.y + eta * (a.transpose() * &current.x);
    Ok(JointState::new(x, y, current.t + 1))
}

/// One optimistic step, which corrects with the previous gradient:
/// `x' = x - 2 eta A y + eta A y_prev`, `y' = y + 2 eta A^T x - eta A^T x_prev`.
pub fn ogda_step(
    a: &Matrix,
    eta: f64,
    current: &JointState,
    previous: &JointState,
) -> Result<JointState> {
    current.check_dims(a)?;
    previous.check_dims(a)?;
    if current.t != previous.t + 1 {
        return Err(Error::InvalidInput(format!(
            "states must be consecutive: t = {} after t = {}",
            current.t, previous.t
        )));
    }
    let x = &current.x - 2.0 * eta * (a * &current.y) + eta * (a * &previous.y);
    let y = &current.y + 2.0 * eta * (a.transpose() * &current.x) - eta * (a.transpose() * &previous.x);
    Ok(JointState::new(x, y, current.t + 1))
}

/// Runs `steps` OGDA steps and records the whole orbit, including both
/// initial states. Divergence is reported with the offending step index.
pub fn simulate(
    a: &Matrix,
    eta: f64,
    z0: &JointState,
    zm1: &JointState,
    steps: usize,
) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be >= 1".into()));
    }
    let mut states = Vec::with_capacity(steps + 2);
    states.push(zm1.clone());
    states.push(z0.clone());
    let mut previous = zm1.clone();
    let mut current = z0.clone();
    for step in 1..=steps {
        let next = ogda_step(a, eta, &current, &previous)?;
        if !next.is_finite() || next.x.amax().max(next.y.amax()) > DIVERGENCE_LIMIT {
            return Err(Error::Divergence { step, limit: DIVERGENCE_LIMIT });
        }
        previous = current;
        current = next;
        states.push(current.clone());
    }
    Ok(Trajectory { states, eta, matrix: a.clone() })
}

/// Runs `steps` plain gradient descent/ascent steps, recording the orbit
/// from `z0` onward. Divergence aborts with the step index; on most games
/// this loop is expected to spiral outward, which is the point of exposing
/// it next to the optimistic variant.
pub fn simulate_gda(a: &Matrix, eta: f64, z0: &JointState, steps: usize) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be >= 1".into()));
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(z0.clone());
    let mut current = z0.clone();
    for step in 1..=steps {
        current = gda_step(a, eta, &current)?;
        if !current.is_finite() || current.x.amax().max(current.y.amax()) > DIVERGENCE_LIMIT {
            return Err(Error::Divergence { step, limit: DIVERGENCE_LIMIT });
        }
        states.push(current.clone());
    }
    Ok(Trajectory { states, eta, matrix: a.clone() })
}

/// Runs the dynamics without recording the orbit and returns the final state.
pub fn simulate_final(
    a: &Matrix,
    eta: f64,
    z0: &JointState,
    zm1: &JointState,
    steps: usize,
) -> Result<JointState> {
    let mut previous = zm1.clone();
    let mut current = z0.clone();
    for step in 1..=steps {
        let next = ogda_step(a, eta, &current, &previous)?;
        if !next.is_finite() || next.x.amax().max(next.y.amax()) > DIVERGENCE_LIMIT {
            return Err(Error::Divergence { step, limit: DIVERGENCE_LIMIT });
        }
        previous = current;
        current = next;
    }
    Ok(current)
}

/// Streams the dynamics until `||z_t - reference|| <= target`, up to
/// `max_steps`. Returns the first step index that reaches the target, or
/// `None` if the budget runs out first.
pub fn steps_to_residual(
    a: &Matrix,
    eta: f64,
    z0: &JointState,
    zm1: &JointState,
    reference: &JointState,
    target: f64,
    max_steps: usize,
) -> Result<Option<usize>> {
    if z0.distance(reference) <= target {
        return Ok(Some(0));
    }
    let mut previous = zm1.clone();
    let mut current = z0.clone();
    for step in 1..=max_steps {
        let next = ogda_step(a, eta, &current, &previous)?;
        if !next.is_finite() || next.x.amax().max(next.y.amax()) > DIVERGENCE_LIMIT {
            return Err(Error::Divergence { step, limit: DIVERGENCE_LIMIT });
        }
        previous = current;
        current = next;
        if current.distance(reference) <= target {
            return Ok(Some(step));
        }
    }
    Ok(None)
}

/// `Q_t = T^{-1/2} (E^{t+1} - V^{t+1})` for `t >= 0`; `Q_{-1}` is the zero
/// map so the closed form is total at `t = 0`.
pub fn q_matrix(sys: &OgdaSystem, t: i64) -> Result<Matrix> {
    let d = sys.dim();
    if t < 0 {
        return Ok(Matrix::zeros(d, d));
    }
    let k = (t + 1) as usize;
    let e_pow = linalg::matrix_power(&sys.e_block, k)?;
    let v_pow = linalg::matrix_power(&sys.v_block, k)?;
    Ok(&sys.t_inv_sqrt * (e_pow - v_pow))
}

/// Evaluates the closed-form solution `z_t = Q_t z_0 + Q_{t-1} C z_{-1}`.
pub fn closed_form_state(
    sys: &OgdaSystem,
    z0: &JointState,
    zm1: &JointState,
    t: usize,
) -> Result<JointState> {
    z0.check_dims(&sys.a)?;
    zm1.check_dims(&sys.a)?;
    let q_t = q_matrix(sys, t as i64)?;
    let q_prev = q_matrix(sys, t as i64 - 1)?;
    let z = q_t * z0.stacked() + q_prev * (&sys.c_block * zm1.stacked());
    Ok(JointState::from_stacked(&z, sys.a.nrows(), z0.t + t as i64))
}

/// The literal binomial-weighted convolution
/// `Q_t = sum_{i=0}^{floor(t/2)} binom(t-i, i) B^{t-2i} C^i`.
///
/// Capped at `t <= 60` where the weights stay exactly representable.
pub fn qt_convolution(sys: &OgdaSystem, t: usize) -> Result<Matrix> {
    Ok(qt_convolution_series(sys, t)?.pop().expect("series has t+1 entries"))
}

/// All of `Q_0 .. Q_t` by the literal convolution sums, sharing the power
/// chains across `t`.
///
/// The terms cancel by many orders of magnitude near the stability edge, so
/// the sums are accumulated in double-double precision; the roundoff of a
/// plain f64 accumulation would otherwise swamp the 1e-8 agreement this
/// oracle is meant to certify.
pub fn qt_convolution_series(sys: &OgdaSystem, t_max: usize) -> Result<Vec<Matrix>> {
    if t_max > CONVOLUTION_CAP {
        return Err(Error::WeightCap { t: t_max, cap: CONVOLUTION_CAP });
    }
    let d = sys.dim();
    let to_dd = |m: &Matrix| -> Vec<dd::Dd> {
        // nalgebra stores column-major; convert to row-major Dd.
        let mut out = vec![dd::Dd::ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = dd::Dd::from_f64(m[(i, j)]);
            }
        }
        out
    };
    let b = to_dd(&sys.b_block);
    let c = to_dd(&sys.c_block);
    let identity: Vec<dd::Dd> = {
        let mut id = vec![dd::Dd::ZERO; d * d];
        for i in 0..d {
            id[i * d + i] = dd::Dd::from_f64(1.0);
        }
        id
    };

    let mut accs = vec![vec![dd::Dd::ZERO; d * d]; t_max + 1];
    // Walk the (power-of-B, power-of-C) grid: for fixed i the product
    // B^p C^i advances by one left-multiplication with B, feeding the
    // weight binom(p + i, i) into Q_{p + 2i}.
    let mut c_power = identity;
    for i in 0..=t_max / 2 {
        if i > 0 {
            c_power = dd::matmul(&c_power, &c, d);
        }
        let mut product = c_power.clone();
        for p in 0..=(t_max - 2 * i) {
            if p > 0 {
                product = dd::matmul(&b, &product, d);
            }
            dd::axpy(&mut accs[p + 2 * i], binomial_exact(p + i, i), &product);
        }
    }

    Ok(accs
        .into_iter()
        .map(|acc| Matrix::from_fn(d, d, |r, cidx| acc[r * d + cidx].to_f64()))
        .collect())
}

/// Exact binomial coefficient as f64; valid while the value stays below 2^53.
fn binomial_exact(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut value = 1.0f64;
    for i in 0..k {
        value = value * (n - i) as f64 / (i + 1) as f64;
    }
    value.round()
}

/// Convolution-route state: `Q_t z_0 + Q_{t-1} C z_{-1}` with both `Q`s from
/// [`qt_convolution`].
pub fn convolution_state(
    sys: &OgdaSystem,
    z0: &JointState,
    zm1: &JointState,
    t: usize,
) -> Result<JointState> {
    let q_t = qt_convolution(sys, t)?;
    let q_prev = if t == 0 {
        Matrix::zeros(sys.dim(), sys.dim())
    } else {
        qt_convolution(sys, t - 1)?
    };
    let z = q_t * z0.stacked() + q_prev * (&sys.c_block * zm1.stacked());
    Ok(JointState::from_stacked(&z, sys.a.nrows(), z0.t + t as i64))
}

/// Modulus of the slow-propagator eigenvalue induced by `lambda`, the
/// corresponding eigenvalue of `4 eta^2 A A^T`:
/// `e(lambda) = sqrt((1 + sqrt(1 - lambda)) / 2)`.
pub fn e_block_modulus(lambda: f64) -> f64 {
    ((1.0 + (1.0 - lambda).sqrt()) / 2.0).sqrt()
}

/// Modulus of the fast-propagator eigenvalue induced by `lambda`:
/// `v(lambda) = sqrt((1 - sqrt(1 - lambda)) / 2)`.
pub fn v_block_modulus(lambda: f64) -> f64 {
    ((1.0 - (1.0 - lambda).sqrt()) / 2.0).sqrt()
}

/// Predicted linear convergence rate of the dynamics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatePrediction {
    /// Minimum nonzero eigenvalue of `4 eta^2 A A^T`.
    pub lambda_min: f64,
    /// `e(lambda_min)`, in `(sqrt(2)/2, 1)`.
    pub rate: f64,
}

/// Convergence rate from the spectrum: `lambda_min = 4 eta^2 sigma_min^2`
/// over nonzero singular values, rate `e(lambda_min)`.
///
/// The rate depends on `eta` only through `eta^2`, so a negative learning
/// rate inside the stability region gets the same prediction as its mirror.
pub fn predicted_rate(a: &Matrix, eta: f64) -> Result<RatePrediction> {
    let bound = stability_bound(a)?;
    if !eta.is_finite() || eta.abs() >= bound {
        return Err(Error::StabilityViolation { eta, bound });
    }
    let spec = linalg::svd(a, RANK_CUTOFF)?;
    let sigma_min = spec.sigma_min_nonzero()?;
    let lambda_min = (4.0 * eta * eta * sigma_min * sigma_min).min(1.0);
    Ok(RatePrediction { lambda_min, rate: e_block_modulus(lambda_min) })
}

/// Threshold multiple of machine epsilon below which residuals are treated
/// as roundoff noise by [`measured_rate`].
const RESIDUAL_FLOOR_FACTOR: f64 = 1e3;

/// Empirical convergence rate: the geometric-mean ratio of consecutive
/// distances to `limit` over the last quarter of the steps whose residual
/// still stands above the roundoff floor.
pub fn measured_rate(traj: &Trajectory, limit: &JointState) -> Result<f64> {
    let scale = traj
        .states()
        .first()
        .map(|s| s.stacked().norm())
        .unwrap_or(1.0)
        .max(1.0);
    let floor = RESIDUAL_FLOOR_FACTOR * f64::EPSILON * scale;
    let distances = traj.distances_to(limit);
    // Scan from the farthest state: an initial state may sit exactly on the
    // limit (the solver convention starts half the state at zero), and the
    // tail below the floor is roundoff noise.
    let start_idx = distances
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let valid: Vec<(usize, f64)> = distances
        .iter()
        .copied()
        .enumerate()
        .skip(start_idx)
        .take_while(|&(_, d)| d > floor)
        .collect();
    if valid.len() < 8 {
        return Err(Error::MeasurementUnreliable(
            "fewer than 8 residuals above the roundoff floor",
        ));
    }
    let window = valid.len() / 4;
    let (first_idx, first) = valid[valid.len() - 1 - window];
    let (last_idx, last) = *valid.last().expect("window nonempty");
    if first <= 0.0 || last <= 0.0 {
        return Err(Error::MeasurementUnreliable("zero residual inside the window"));
    }
    Ok((last / first).powf(1.0 / (last_idx - first_idx) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games;
    use crate::geometry;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn state(x: &[f64], y: &[f64], t: i64) -> JointState {
        JointState::new(Vector::from_row_slice(x), Vector::from_row_slice(y), t)
    }

    #[test]
    fn gda_step_hand_example() {
        let a = games::scalar_xy();
        let next = gda_step(&a, 0.1, &state(&[1.0], &[0.0], 0)).unwrap();
        assert!((next.x[0] - 1.0).abs() < 1e-15);
        assert!((next.y[0] - 0.1).abs() < 1e-15);
        assert_eq!(next.t, 1);
    }

    #[test]
    fn gda_origin_is_fixed() {
        let a = games::matching_pennies();
        let z = JointState::zeros(2, 2, 0);
        let next = gda_step(&a, 0.3, &z).unwrap();
        assert_eq!(next.x, z.x);
        assert_eq!(next.y, z.y);
    }

    #[test]
    fn gda_diverges_on_the_scalar_game() {
        let a = games::scalar_xy();
        let mut current = state(&[1.0], &[0.5], 0);
        let mut norm = current.stacked().norm();
        for _ in 0..100 {
            current = gda_step(&a, 0.1, &current).unwrap();
            let next_norm = current.stacked().norm();
            assert!(next_norm > norm, "GDA norm must strictly increase");
            norm = next_norm;
        }
    }

    #[test]
    fn ogda_step_hand_example() {
        let a = games::scalar_xy();
        let z0 = state(&[1.0], &[1.0], 0);
        let zm1 = state(&[1.0], &[1.0], -1);
        let z1 = ogda_step(&a, 0.25, &z0, &zm1).unwrap();
        assert!((z1.x[0] - 0.75).abs() < 1e-15);
        assert!((z1.y[0] - 1.25).abs() < 1e-15);
    }

    #[test]
    fn ogda_origin_is_stationary() {
        let a = games::matching_pennies();
        let z0 = JointState::zeros(2, 2, 0);
        let zm1 = JointState::zeros(2, 2, -1);
        let z1 = ogda_step(&a, 0.2, &z0, &zm1).unwrap();
        assert_eq!(z1.x, z0.x);
        assert_eq!(z1.y, z0.y);
    }

    #[test]
    fn null_space_pairs_are_fixed_points() {
        // Stationary iff A y = 0 and A^T x = 0.
        let a = games::matching_pennies();
        let x_star = Vector::from_row_slice(&[0.5, 0.5]);
        let y_star = Vector::from_row_slice(&[0.5, 0.5]);
        let z0 = JointState::new(x_star.clone(), y_star.clone(), 0);
        let zm1 = JointState::new(x_star, y_star, -1);
        let traj = simulate(&a, 0.2, &z0, &zm1, 50).unwrap();
        assert!(traj.final_state().distance(&z0) < 1e-14);

        // A non-null pair must move.
        let z0 = state(&[0.9, 0.1], &[0.5, 0.5], 0);
        let zm1 = state(&[0.9, 0.1], &[0.5, 0.5], -1);
        let z1 = ogda_step(&a, 0.2, &z0, &zm1).unwrap();
        assert!(z1.distance(&z0) > 1e-3);
    }

    #[test]
    fn simulate_records_both_initial_states() {
        let a = games::matching_pennies();
        let z0 = state(&[0.8, 0.2], &[0.3, 0.7], 0);
        let zm1 = JointState::zeros(2, 2, -1);
        let traj = simulate(&a, 0.2, &z0, &zm1, 10).unwrap();
        assert_eq!(traj.states().len(), 12);
        assert_eq!(traj.states()[0].t, -1);
        assert_eq!(traj.final_state().t, 10);
    }

    #[test]
    fn simulate_converges_to_the_projection_limit() {
        let a = games::matching_pennies();
        let z0 = state(&[0.8, 0.2], &[0.3, 0.7], 0);
        let zm1 = state(&[0.1, -0.4], &[0.2, 0.0], -1);
        let traj = simulate(&a, 0.2, &z0, &zm1, 400).unwrap();
        let spec = linalg::svd(&a, RANK_CUTOFF).unwrap();
        let limit = geometry::limit_point(&spec, &z0).unwrap();
        let limit_state = limit.as_state(traj.final_state().t);
        assert!(traj.final_state().distance(&limit_state) < 1e-6);
    }

    #[test]
    fn negative_learning_rate_converges() {
        let a = games::matching_pennies();
        let eta = -0.9 * stability_bound(&a).unwrap();
        let z0 = state(&[0.8, 0.2], &[0.3, 0.7], 0);
        let zm1 = JointState::zeros(2, 2, -1);
        let traj = simulate(&a, eta, &z0, &zm1, 600).unwrap();
        let spec = linalg::svd(&a, RANK_CUTOFF).unwrap();
        let limit = geometry::limit_point(&spec, &z0).unwrap();
        assert!(traj.final_state().distance(&limit.as_state(600)) < 1e-8);
    }

    #[test]
    fn scalar_game_mirror_symmetry() {
        // Flipping the sign of eta equals swapping the two coordinates, for
        // the scalar game and swapped initial conditions.
        let a = games::scalar_xy();
        let z0 = state(&[0.7], &[-0.3], 0);
        let zm1 = state(&[0.2], &[0.5], 0 - 1);
        let swapped0 = state(&[-0.3], &[0.7], 0);
        let swappedm1 = state(&[0.5], &[0.2], -1);
        let fwd = simulate(&a, -0.25, &z0, &zm1, 60).unwrap();
        let mirror = simulate(&a, 0.25, &swapped0, &swappedm1, 60).unwrap();
        for (s, m) in fwd.states().iter().zip(mirror.states()) {
            assert!((s.x[0] - m.y[0]).abs() <= 1e-12);
            assert!((s.y[0] - m.x[0]).abs() <= 1e-12);
        }
    }

    #[test]
    fn closed_form_reproduces_t0() {
        let a = games::rotated_matching_pennies();
        let sys = crate::system::build_system(&a, 0.04).unwrap();
        let z0 = state(&[0.3, 0.7], &[0.9, 0.1], 0);
        let zm1 = state(&[0.5, -0.5], &[0.0, 0.4], -1);
        let out = closed_form_state(&sys, &z0, &zm1, 0).unwrap();
        assert!(out.distance(&z0) < 1e-12);
    }

    #[test]
    fn closed_form_matches_simulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let a = games::random_game(&mut rng, 3, 4);
        let eta = 0.9 * stability_bound(&a).unwrap();
        let sys = crate::system::build_system(&a, eta).unwrap();
        let z0 = JointState::new(games::random_vector(&mut rng, 3), games::random_vector(&mut rng, 4), 0);
        let zm1 = JointState::new(games::random_vector(&mut rng, 3), games::random_vector(&mut rng, 4), -1);
        let traj = simulate(&a, eta, &z0, &zm1, 50).unwrap();
        let sim_50 = traj.state_at(50).unwrap();
        let closed_50 = closed_form_state(&sys, &z0, &zm1, 50).unwrap();
        let denom = sim_50.stacked().norm().max(1.0);
        assert!(sim_50.distance(&closed_50) / denom <= 1e-8);
    }

    #[test]
    fn closed_form_reaches_the_projector_limit() {
        let a = games::matching_pennies();
        let sys = crate::system::build_system(&a, 0.2).unwrap();
        let z0 = state(&[0.8, 0.2], &[0.3, 0.7], 0);
        let zm1 = state(&[-0.2, 0.6], &[0.1, 0.1], -1);
        let out = closed_form_state(&sys, &z0, &zm1, 10_000).unwrap();
        let spec = linalg::svd(&a, RANK_CUTOFF).unwrap();
        let limit = geometry::limit_point(&spec, &z0).unwrap();
        assert!(out.distance(&limit.as_state(out.t)) < 1e-6);
    }

    #[test]
    fn convolution_base_cases() {
        let a = games::matching_pennies();
        let sys = crate::system::build_system(&a, 0.2).unwrap();
        let q0 = qt_convolution(&sys, 0).unwrap();
        assert!((q0 - Matrix::identity(4, 4)).norm() < 1e-15);
        let q1 = qt_convolution(&sys, 1).unwrap();
        assert!((q1 - &sys.b_block).norm() < 1e-15);
        assert!(matches!(
            qt_convolution(&sys, CONVOLUTION_CAP + 1),
            Err(Error::WeightCap { .. })
        ));
    }

    #[test]
    fn convolution_matches_closed_form_at_t12() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = games::random_game(&mut rng, 2, 3);
        let eta = 0.7 * stability_bound(&a).unwrap();
        let sys = crate::system::build_system(&a, eta).unwrap();
        let conv = qt_convolution(&sys, 12).unwrap();
        let closed = q_matrix(&sys, 12).unwrap();
        assert!((conv - closed).norm() <= 1e-9);
    }

    #[test]
    fn predicted_rate_matching_pennies() {
        let a = games::matching_pennies();
        let pred = predicted_rate(&a, 0.2).unwrap();
        assert!((pred.lambda_min - 0.64).abs() < 1e-12);
        assert!((pred.rate - 0.8944271909999159).abs() < 1e-12);
    }

    #[test]
    fn predicted_rate_perturbed_matching_pennies() {
        // Tiny uniform noise swaps in a tiny smallest eigenvalue: lambda_min
        // = 16 eta^2 eps^2.
        let a = games::perturbed(&games::matching_pennies(), 0.01);
        let pred = predicted_rate(&a, 0.005).unwrap();
        assert!((pred.lambda_min - 4e-8).abs() < 1e-12);
        assert!(pred.rate > 1.0 - 1e-8);
    }

    #[test]
    fn rate_function_shape() {
        // e is strictly decreasing on (0, 1) with range (sqrt(2)/2, 1).
        let mut last = e_block_modulus(1e-9);
        assert!(last < 1.0);
        for i in 1..=1000 {
            let lambda = i as f64 / 1000.0;
            let val = e_block_modulus(lambda);
            assert!(val < last);
            last = val;
        }
        assert!((e_block_modulus(1.0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        // e dominates v everywhere on [0, 1).
        for i in 0..100 {
            let lambda = i as f64 / 100.0;
            assert!(e_block_modulus(lambda) > v_block_modulus(lambda));
        }
    }

    #[test]
    fn predicted_rate_rejects_zero_matrix() {
        let a = Matrix::zeros(2, 2);
        assert!(matches!(predicted_rate(&a, 0.1), Err(Error::ZeroMatrix)));
    }

    #[test]
    fn measured_rate_on_synthetic_geometric_decay() {
        let a = games::matching_pennies();
        let limit = JointState::zeros(2, 2, 0);
        let mut states = Vec::new();
        let dir = Vector::from_row_slice(&[1.0, 0.0]);
        for t in -1..200i64 {
            let scale = 0.5f64.powi((t + 1) as i32);
            states.push(JointState::new(scale * &dir, Vector::zeros(2), t));
        }
        let traj = Trajectory { states, eta: 0.2, matrix: a };
        let rate = measured_rate(&traj, &limit).unwrap();
        assert!((rate - 0.5).abs() < 1e-6);
    }

    #[test]
    fn measured_rate_fails_on_a_constant_trajectory() {
        let a = games::matching_pennies();
        let z = state(&[0.5, 0.5], &[0.5, 0.5], 0);
        let zm1 = state(&[0.5, 0.5], &[0.5, 0.5], -1);
        let traj = simulate(&a, 0.2, &z, &zm1, 100).unwrap();
        let limit = state(&[0.5, 0.5], &[0.5, 0.5], 0);
        assert!(matches!(
            measured_rate(&traj, &limit),
            Err(Error::MeasurementUnreliable(_))
        ));
    }

    #[test]
    fn measured_rate_tracks_prediction() {
        let a = games::matching_pennies();
        let pred = predicted_rate(&a, 0.2).unwrap();
        let z0 = state(&[0.8, 0.2], &[0.3, 0.7], 0);
        let zm1 = JointState::zeros(2, 2, -1);
        let traj = simulate(&a, 0.2, &z0, &zm1, 260).unwrap();
        let spec = linalg::svd(&a, RANK_CUTOFF).unwrap();
        let limit = geometry::limit_point(&spec, &z0).unwrap().as_state(0);
        let measured = measured_rate(&traj, &limit).unwrap();
        assert!((measured - pred.rate).abs() / pred.rate < 0.02);
    }

    #[test]
    fn monotone_rate_in_the_learning_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let a = games::random_game(&mut rng, 4, 3);
        let bound = stability_bound(&a).unwrap();
        let mut last = 1.0;
        for i in 1..10 {
            let eta = bound * i as f64 / 10.0;
            let rate = predicted_rate(&a, eta).unwrap().rate;
            assert!(rate < last, "rate must strictly decrease as |eta| grows");
            last = rate;
        }
    }
}
