//! `saddlekit discontinuity`: a uniform entrywise perturbation of matching
//! pennies collapses the smallest nonzero spectral mode and with it the
//! convergence rate; this command emits both transients side by side.

use serde_json::json;

use saddlekit::geometry::{discontinuity_experiment, limit_point};
use saddlekit::io::{self, MatrixJson};
use saddlekit::linalg::{svd, RANK_CUTOFF};

use crate::common::{self, SCHEMA};
use crate::OutputArgs;

pub fn run(epsilon: f64, eta: f64, steps: usize, output: &OutputArgs) -> anyhow::Result<bool> {
    let report = discontinuity_experiment(epsilon, eta, steps)?;

    // Predicted spectral facts for this family: lambda_min = 16 eta^2 for
    // the clean game and 16 eta^2 epsilon^2 after the perturbation.
    let expected_clean = 16.0 * eta * eta;
    let expected_noisy = 16.0 * eta * eta * epsilon * epsilon;
    let lambda_ok = (report.unperturbed.lambda_min - expected_clean).abs() <= 1e-9 * expected_clean
        && (report.perturbed.lambda_min - expected_noisy).abs() <= 1e-6 * expected_noisy;
    let ordering_ok = report.perturbed.rate > report.unperturbed.rate;

    // The clean transient must out-converge the noisy one at the horizon.
    let z0 = report.unperturbed_trajectory.states()[1].clone();
    let clean_spec = svd(&report.unperturbed_trajectory.matrix, RANK_CUTOFF)?;
    let clean_limit = limit_point(&clean_spec, &z0)?.as_state(0);
    let noisy_spec = svd(&report.perturbed_trajectory.matrix, RANK_CUTOFF)?;
    let noisy_limit = limit_point(&noisy_spec, &z0)?.as_state(0);
    let clean_final = report.unperturbed_trajectory.final_state().distance(&clean_limit);
    let noisy_final = report.perturbed_trajectory.final_state().distance(&noisy_limit);
    let transient_ok = clean_final < noisy_final;

    let dir = common::out_dir(output)?;
    let clean_csv = common::write_atomic(
        &dir,
        "discontinuity_unperturbed.csv",
        &io::trajectory_to_csv(&report.unperturbed_trajectory, &clean_limit),
    )?;
    let noisy_csv = common::write_atomic(
        &dir,
        "discontinuity_perturbed.csv",
        &io::trajectory_to_csv(&report.perturbed_trajectory, &noisy_limit),
    )?;

    let pass = lambda_ok && ordering_ok && transient_ok;
    let summary = json!({
        "schema": SCHEMA,
        "command": "discontinuity",
        "epsilon": epsilon,
        "eta": eta,
        "steps": steps,
        "unperturbed": {
            "matrix": MatrixJson::from_matrix(&report.unperturbed_trajectory.matrix),
            "lambda_min": report.unperturbed.lambda_min,
            "predicted_rate": report.unperturbed.rate,
            "final_residual": clean_final,
            "trajectory_csv_path": clean_csv,
        },
        "perturbed": {
            "matrix": MatrixJson::from_matrix(&report.perturbed_trajectory.matrix),
            "lambda_min": report.perturbed.lambda_min,
            "predicted_rate": report.perturbed.rate,
            "final_residual": noisy_final,
            "trajectory_csv_path": noisy_csv,
        },
        "lambda_ratio": report.unperturbed.lambda_min / report.perturbed.lambda_min,
        "checks": {
            "lambda_values": lambda_ok,
            "rate_ordering": ordering_ok,
            "transient_separation": transient_ok,
        },
        "pass": pass,
    });
    common::write_summary(&dir, "discontinuity_summary.json", &summary)?;
    println!(
        "discontinuity: lambda_min {:.3e} vs {:.3e} (ratio {:.1e}), checks pass = {pass}",
        report.unperturbed.lambda_min,
        report.perturbed.lambda_min,
        report.unperturbed.lambda_min / report.perturbed.lambda_min,
    );
    Ok(pass)
}
