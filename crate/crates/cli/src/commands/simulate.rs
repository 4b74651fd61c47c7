//! `saddlekit simulate`: run one trajectory and export plot data.

use serde_json::json;

use saddlekit::geometry::limit_point;
use saddlekit::io::{self, MatrixJson};
use saddlekit::linalg::{svd, RANK_CUTOFF};
use saddlekit::ogda::{self, JointState};

use crate::common::{self, SCHEMA};
use crate::{GameSource, OutputArgs};

#[allow(clippy::too_many_arguments)]
pub fn run(
    source: &GameSource,
    eta: Option<f64>,
    steps: usize,
    method: &str,
    seed: u64,
    output: &OutputArgs,
) -> anyhow::Result<bool> {
    let a = common::resolve_game(source, seed)?;
    let eta = match eta {
        Some(e) => e,
        None => common::default_eta(&a)?,
    };
    let (n, m) = (a.nrows(), a.ncols());
    let z0 = common::staircase_start(n, m);

    let spec = svd(&a, RANK_CUTOFF)?;
    let limit = limit_point(&spec, &z0)?.as_state(0);

    let trajectory = match method {
        "gda" => ogda::simulate_gda(&a, eta, &z0, steps)?,
        _ => {
            let zm1 = JointState::zeros(n, m, -1);
            ogda::simulate(&a, eta, &z0, &zm1, steps)?
        }
    };

    let predicted = if method == "ogda" {
        ogda::predicted_rate(&a, eta).ok()
    } else {
        None
    };
    let measured = ogda::measured_rate(&trajectory, &limit).ok();

    let dir = common::out_dir(output)?;
    let csv_path = common::write_atomic(&dir, "simulate_trajectory.csv", &io::trajectory_to_csv(&trajectory, &limit))?;
    let summary = json!({
        "schema": SCHEMA,
        "command": "simulate",
        "method": method,
        "eta": eta,
        "steps": steps,
        "seed": seed,
        "matrix": MatrixJson::from_matrix(&a),
        "predicted_rate": predicted,
        "measured_rate": measured,
        "trajectory_csv_path": csv_path,
    });
    common::write_summary(&dir, "simulate_summary.json", &summary)?;
    println!(
        "simulate: {} steps of {} at eta = {eta}; predicted rate {}, measured {}",
        steps,
        method,
        predicted.map_or("n/a".into(), |p| format!("{:.6}", p.rate)),
        measured.map_or("n/a".into(), |r| format!("{r:.6}")),
    );
    Ok(true)
}
