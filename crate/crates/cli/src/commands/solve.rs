//! `saddlekit solve`: equilibrium computation with optional reduction.

use serde_json::json;

use saddlekit::io::MatrixJson;
use saddlekit::solver::{
    alternating_projections_solve, check_assumptions, reduce_game, SolverConfig, StrategyPair,
};

use crate::common::{self, SCHEMA};
use crate::{GameSource, OutputArgs};

#[allow(clippy::too_many_arguments)]
pub fn run(
    source: &GameSource,
    eta: Option<f64>,
    epsilon: f64,
    cycles: Option<usize>,
    steps: Option<usize>,
    reduce: bool,
    seed: u64,
    output: &OutputArgs,
) -> anyhow::Result<bool> {
    let original = common::resolve_game(source, seed)?;
    let mut warnings: Vec<String> = Vec::new();

    let trace = if reduce { Some(reduce_game(&original)?) } else { None };
    let active = trace.as_ref().map_or(original.clone(), |t| t.reduced.clone());

    if !reduce {
        let assumptions = check_assumptions(&original)?;
        if !assumptions.value_zero || !assumptions.interior_equilibrium {
            let warning = format!(
                "game violates the solver hypotheses (value_zero = {}, interior_equilibrium = {}); \
                 expect a non-convergence flag, or rerun with --reduce",
                assumptions.value_zero, assumptions.interior_equilibrium
            );
            eprintln!("warning: {warning}");
            warnings.push(warning);
        }
    }

    let eta = match eta {
        Some(e) => e,
        None if active.amax() == 0.0 => 0.1,
        None => common::default_eta(&active)?,
    };
    let cfg = match (cycles, steps) {
        (Some(c), Some(s)) => SolverConfig::manual(eta, c, s, epsilon),
        (None, None) => SolverConfig::auto(eta, epsilon),
        _ => anyhow::bail!("--cycles and --steps must be given together (or neither)"),
    };

    let start = StrategyPair::uniform(active.nrows(), active.ncols());
    let report = alternating_projections_solve(&active, &start, &cfg)?;
    let lifted = trace.as_ref().map(|t| t.lift(&report.final_pair)).transpose()?;

    let dir = common::out_dir(output)?;
    let summary = json!({
        "schema": SCHEMA,
        "command": "solve",
        "eta": eta,
        "epsilon": epsilon,
        "seed": seed,
        "matrix": MatrixJson::from_matrix(&original),
        "reduction": trace,
        "report": report,
        "lifted_pair": lifted,
        "warnings": warnings,
    });
    common::write_summary(&dir, "solve_report.json", &summary)?;
    println!(
        "solve: exploitability {:.3e} after {} cycles x {} steps; converged = {}",
        report.exploitability, report.cycles_used, report.schedule.1, report.converged
    );
    if !report.converged {
        eprintln!(
            "warning: non-convergence flag set (alternating-projections residual {:.3e})",
            report.ap_residual
        );
    }
    Ok(true)
}
