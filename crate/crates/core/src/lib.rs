//! saddlekit: optimistic gradient dynamics on bilinear games.
//!
//! The crate has two halves. The analysis half solves the optimistic
//! gradient descent/ascent (OGDA) recursion on unconstrained bilinear games
//! in closed form and exposes its convergence rate and limit geometry. The
//! solver half builds on the key geometric fact — OGDA converges to the
//! orthogonal projection of the start point onto the null spaces of the game
//! matrix — to run an alternating-projections scheme that computes
//! epsilon-approximate Nash equilibria of constrained (simplex) zero-sum
//! games, verified against an exact LP oracle.

mod dd;
pub mod error;
pub mod games;
pub mod geometry;
pub mod identities;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod ogda;
pub mod parallel;
pub mod solver;
pub mod system;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
