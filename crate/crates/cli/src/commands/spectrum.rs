//! `saddlekit spectrum`: the eigenvalue-modulus transform curves, with
//! built-in shape checks (dominance, monotonicity, endpoint).

use serde_json::json;

use saddlekit::io::MatrixJson;
use saddlekit::ogda::{e_block_modulus, predicted_rate, v_block_modulus};

use crate::common::{self, SCHEMA};
use crate::{GameSource, OutputArgs};

pub fn run(
    source: &GameSource,
    eta: Option<f64>,
    seed: u64,
    output: &OutputArgs,
) -> anyhow::Result<bool> {
    let samples = 999usize;
    let mut csv = String::from("lambda,e,v\n");
    let mut dominance = true;
    let mut monotone = true;
    let mut last_e = f64::INFINITY;
    for i in 1..=samples {
        let lambda = i as f64 / (samples + 1) as f64;
        let e = e_block_modulus(lambda);
        let v = v_block_modulus(lambda);
        dominance &= e > v;
        monotone &= e < last_e;
        last_e = e;
        csv.push_str(&format!("{lambda},{e},{v}\n"));
    }
    let endpoint_ok =
        (e_block_modulus(1.0) - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-12;

    // Optional per-game marker.
    let marker = match (&source.game, &source.matrix, &source.random) {
        (None, None, None) => None,
        _ => {
            let a = common::resolve_game(source, seed)?;
            let eta = match eta {
                Some(e) => e,
                None => common::default_eta(&a)?,
            };
            Some((MatrixJson::from_matrix(&a), eta, predicted_rate(&a, eta)?))
        }
    };

    let dir = common::out_dir(output)?;
    let csv_path = common::write_atomic(&dir, "spectrum.csv", &csv)?;
    let pass = dominance && monotone && endpoint_ok;
    let summary = json!({
        "schema": SCHEMA,
        "command": "spectrum",
        "samples": samples,
        "checks": {
            "e_dominates_v": dominance,
            "e_monotone_decreasing": monotone,
            "endpoint_sqrt_half": endpoint_ok,
        },
        "pass": pass,
        "marker": marker.map(|(m, eta, pred)| json!({
            "matrix": m,
            "eta": eta,
            "lambda_min": pred.lambda_min,
            "rate": pred.rate,
        })),
        "spectrum_csv_path": csv_path,
    });
    common::write_summary(&dir, "spectrum_summary.json", &summary)?;
    println!("spectrum: {} samples, checks pass = {pass}", samples);
    Ok(pass)
}
