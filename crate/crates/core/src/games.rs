//! Built-in example games and seeded random game generators.

use nalgebra::DMatrix;
use rand::Rng;

use crate::linalg::{Matrix, Vector};

/// `[[1, -1], [-1, 1]]` — unique uniform equilibrium, value 0.
pub fn matching_pennies() -> Matrix {
    Matrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])
}

/// `[[3, -9], [-1, 3]]` — rank-1 game with equilibrium
/// `x* = (1/4, 3/4)`, `y* = (3/4, 1/4)` and value 0.
pub fn rotated_matching_pennies() -> Matrix {
    Matrix::from_row_slice(2, 2, &[3.0, -9.0, -1.0, 3.0])
}

/// The scalar game `f(x, y) = x y`.
pub fn scalar_xy() -> Matrix {
    Matrix::from_row_slice(1, 1, &[1.0])
}

/// The 2x2 identity game: unique interior equilibrium, value 1/2.
pub fn identity2() -> Matrix {
    Matrix::identity(2, 2)
}

/// `[[0, 0], [1, 1]]` — value 0 but no interior equilibrium.
pub fn a2() -> Matrix {
    Matrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 1.0])
}

/// Looks up a built-in game by its CLI name.
pub fn by_name(name: &str) -> Option<Matrix> {
    match name {
        "matching-pennies" => Some(matching_pennies()),
        "rotated-mp" => Some(rotated_matching_pennies()),
        "xy" => Some(scalar_xy()),
        "identity2" => Some(identity2()),
        "a2" => Some(a2()),
        _ => None,
    }
}

/// Names accepted by [`by_name`].
pub const GAME_NAMES: [&str; 5] = ["matching-pennies", "rotated-mp", "xy", "identity2", "a2"];

/// Adds `eps` to every entry.
pub fn perturbed(a: &Matrix, eps: f64) -> Matrix {
    a.map(|v| v + eps)
}

/// Random game with entries uniform in [-1, 1].
pub fn random_game(rng: &mut impl Rng, n: usize, m: usize) -> Matrix {
    DMatrix::from_fn(n, m, |_, _| rng.random_range(-1.0..1.0))
}

/// Random vector with entries uniform in [-1, 1].
pub fn random_vector(rng: &mut impl Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

/// Random matrix with orthonormal columns (QR of a Gaussian-ish draw).
pub fn random_orthonormal(rng: &mut impl Rng, n: usize) -> Matrix {
    // Sum of uniforms is good enough as a rotation-invariant-ish source here.
    let g = DMatrix::from_fn(n, n, |_, _| {
        (0..6).map(|_| rng.random_range(-1.0f64..1.0)).sum::<f64>()
    });
    g.qr().q()
}

/// Random `n x m` matrix of the given rank with nonzero singular values
/// spread over `[sigma_lo, sigma_hi]`. Keeping the smallest singular value
/// bounded away from zero makes convergence-rate tests well conditioned.
pub fn random_rank_deficient(
    rng: &mut impl Rng,
    n: usize,
    m: usize,
    rank: usize,
    sigma_lo: f64,
    sigma_hi: f64,
) -> Matrix {
    assert!(rank <= n.min(m), "rank {rank} exceeds min({n}, {m})");
    let u = random_orthonormal(rng, n);
    let v = random_orthonormal(rng, m);
    let mut core = Matrix::zeros(n, m);
    for i in 0..rank {
        core[(i, i)] = rng.random_range(sigma_lo..sigma_hi);
    }
    u * core * v.transpose()
}
