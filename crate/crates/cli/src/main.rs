//! saddlekit command-line runner: batch experiments over the optimistic
//! dynamics and the alternating-projections equilibrium solver, emitting
//! CSV plot data plus a versioned JSON summary per command.
//!
//! Every command is deterministic given its flags and `--seed`; output files
//! are written atomically; the exit status is nonzero exactly when a
//! command's built-in property checks or input validation fail.

mod commands;
mod common;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "saddlekit", version, about = "Optimistic dynamics and zero-sum game solving")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Source of the game matrix: a built-in name, a CSV/JSON file, or a seeded
/// random draw.
#[derive(Args, Clone)]
struct GameSource {
    /// Built-in game: matching-pennies, rotated-mp, xy, identity2, a2.
    #[arg(long, conflicts_with_all = ["matrix", "random"])]
    game: Option<String>,
    /// Path to a matrix file (.csv or .json).
    #[arg(long, conflicts_with = "random")]
    matrix: Option<std::path::PathBuf>,
    /// Random game of shape NxM (entries uniform in [-1, 1], seeded).
    #[arg(long, value_name = "NxM")]
    random: Option<String>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output directory; defaults to $SADDLEKIT_OUT, then the current dir.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run GDA or OGDA on a game and export the trajectory plus a
    /// predicted-vs-measured rate summary.
    Simulate {
        #[command(flatten)]
        source: GameSource,
        /// Learning rate; defaults to 0.45/||A||, i.e. 90% of the stable range.
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<f64>,
        /// Number of dynamics steps.
        #[arg(long, default_value_t = 500)]
        steps: usize,
        /// Update rule.
        #[arg(long, value_parser = ["gda", "ogda"], default_value = "ogda")]
        method: String,
        /// Seed for random game generation.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compute an approximate equilibrium by alternating projections.
    Solve {
        #[command(flatten)]
        source: GameSource,
        /// Learning rate; defaults to 0.45/||A||.
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<f64>,
        /// Target exploitability.
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
        /// Cycle count; with --steps switches to a manual schedule.
        #[arg(long)]
        cycles: Option<usize>,
        /// Dynamics steps per cycle (manual schedule).
        #[arg(long)]
        steps: Option<usize>,
        /// First apply the shift-and-prune reduction, then solve and lift
        /// the strategies back to the original coordinates.
        #[arg(long)]
        reduce: bool,
        /// Seed for random game generation.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Export the propagator modulus curves e/v over (0, 1) with optional
    /// per-game markers.
    Spectrum {
        #[command(flatten)]
        source: GameSource,
        /// Learning rate for the marker computation.
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<f64>,
        /// Seed for random game generation.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rate-discontinuity experiment: matching pennies against its
    /// uniformly perturbed copy.
    Discontinuity {
        /// Perturbation added to every entry.
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Learning rate.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.005)]
        eta: f64,
        /// Trajectory length to export.
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Randomized self-tests of the scalar identity families.
    Identities {
        /// Run the full randomized sweeps.
        #[arg(long)]
        sweep: bool,
        /// Samples per family (with --sweep).
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Oscillation modes of a game plus the convolution-weight curve.
    Oscillations {
        #[command(flatten)]
        source: GameSource,
        /// Learning rate; defaults to 0.45/||A||.
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<f64>,
        /// Weight-curve length n.
        #[arg(long, default_value_t = 60)]
        steps: usize,
        /// Seed for random game generation.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let checks_passed = match cli.command {
        Command::Simulate { source, eta, steps, method, seed, output } => {
            commands::simulate::run(&source, eta, steps, &method, seed, &output)?
        }
        Command::Solve { source, eta, epsilon, cycles, steps, reduce, seed, output } => {
            commands::solve::run(&source, eta, epsilon, cycles, steps, reduce, seed, &output)?
        }
        Command::Spectrum { source, eta, seed, output } => {
            commands::spectrum::run(&source, eta, seed, &output)?
        }
        Command::Discontinuity { epsilon, eta, steps, output } => {
            commands::discontinuity::run(epsilon, eta, steps, &output)?
        }
        Command::Identities { sweep, samples, seed, output } => {
            commands::identities::run(sweep, samples, seed, &output)?
        }
        Command::Oscillations { source, eta, steps, seed, output } => {
            commands::oscillations::run(&source, eta, steps, seed, &output)?
        }
    };
    if !checks_passed {
        std::process::exit(1);
    }
    Ok(())
}
