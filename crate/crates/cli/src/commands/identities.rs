//! `saddlekit identities`: scalar identity self-tests, as quick spot checks
//! or full randomized sweeps.

use serde_json::json;

use saddlekit::identities::{
    binomial_variant, coefficient_peak, companion_power_closed, pascal_combination, run_sweeps,
    trig_sum_identities,
};

use crate::common::{self, SCHEMA};
use crate::OutputArgs;

pub fn run(sweep: bool, samples: usize, seed: u64, output: &OutputArgs) -> anyhow::Result<bool> {
    let dir = common::out_dir(output)?;

    // Spot checks with hand-verifiable values run in both modes.
    let fib = companion_power_closed(1.0, 1.0, 10)?;
    let spot_fib = (fib[(0, 0)] - 89.0).abs() < 1e-12;
    let (lhs, rhs) = binomial_variant(1.0, 1.0, 5)?;
    let spot_variant = (lhs - 8.0).abs() < 1e-12 && (lhs - rhs).abs() < 1e-12;
    let (pl, pr) = pascal_combination(1.0, 1.0, 7)?;
    let spot_pascal = (pl - pr).abs() < 1e-12;
    let ((cl, cr), _) = trig_sum_identities(1.0, 4);
    let spot_trig = (cl + 4.0).abs() < 1e-12 && (cr + 4.0).abs() < 1e-12;
    let spot_peak = coefficient_peak(100)?.i_star == 27;
    let spots = [spot_fib, spot_variant, spot_pascal, spot_trig, spot_peak];

    let sweep_report = sweep.then(|| run_sweeps(samples, seed));
    let pass = spots.iter().all(|&s| s) && sweep_report.as_ref().is_none_or(|r| r.pass);

    if let Some(report) = &sweep_report {
        let mut csv = String::from("family,samples,max_rel_err,pass\n");
        for family in &report.families {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                family.name, family.samples, family.max_rel_err, family.pass
            ));
        }
        common::write_atomic(&dir, "identities_sweeps.csv", &csv)?;
    }

    let summary = json!({
        "schema": SCHEMA,
        "command": "identities",
        "seed": seed,
        "spot_checks": {
            "companion_power_fibonacci": spot_fib,
            "binomial_variant_f6": spot_variant,
            "pascal_combination": spot_pascal,
            "trig_sum_x1_n4": spot_trig,
            "peak_location_n100": spot_peak,
        },
        "sweeps": sweep_report,
        "pass": pass,
    });
    common::write_summary(&dir, "identities_report.json", &summary)?;
    println!(
        "identities: spot checks {}; sweeps {}",
        if spots.iter().all(|&s| s) { "pass" } else { "FAIL" },
        match &sweep_report {
            Some(r) if r.pass => "pass".to_string(),
            Some(_) => "FAIL".to_string(),
            None => "skipped (run with --sweep)".to_string(),
        }
    );
    Ok(pass)
}
