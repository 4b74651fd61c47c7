//! Minimal tour: simulate the optimistic dynamics on matching pennies,
//! compare the predicted and measured convergence rates, then solve the
//! rotated variant to an approximate equilibrium.
//!
//! ```text
//! cargo run --example quickstart
//! ```

use saddlekit::games;
use saddlekit::geometry::limit_point;
use saddlekit::linalg::{svd, Vector, RANK_CUTOFF};
use saddlekit::ogda::{measured_rate, predicted_rate, simulate, JointState};
use saddlekit::solver::{alternating_projections_solve, SolverConfig, StrategyPair};
use saddlekit::system::stability_bound;

fn main() -> saddlekit::Result<()> {
    let game = games::matching_pennies();
    let eta = 0.2;

    let z0 = JointState::new(
        Vector::from_row_slice(&[0.8, 0.2]),
        Vector::from_row_slice(&[0.3, 0.7]),
        0,
    );
    let zm1 = JointState::zeros(2, 2, -1);
    let trajectory = simulate(&game, eta, &z0, &zm1, 300)?;

    let spec = svd(&game, RANK_CUTOFF)?;
    let limit = limit_point(&spec, &z0)?;
    println!("limit of the dynamics: x -> {:?}", limit.x_inf.as_slice());

    let predicted = predicted_rate(&game, eta)?;
    let measured = measured_rate(&trajectory, &limit.as_state(0))?;
    println!("rate: predicted {:.6}, measured {:.6}", predicted.rate, measured);

    let rotated = games::rotated_matching_pennies();
    let eta = 0.9 * stability_bound(&rotated)?;
    let report = alternating_projections_solve(
        &rotated,
        &StrategyPair::uniform(2, 2),
        &SolverConfig::auto(eta, 1e-4),
    )?;
    println!(
        "rotated game: x = {:?}, exploitability {:.2e}",
        report.final_pair.x.as_slice(),
        report.exploitability
    );
    Ok(())
}
