//! Shared plumbing: game resolution, output-directory handling, atomic
//! writes, and deterministic start states.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use saddlekit::linalg::Vector;
use saddlekit::ogda::JointState;
use saddlekit::system::stability_bound;
use saddlekit::{games, io, Matrix};

use crate::{GameSource, OutputArgs};

/// JSON summary schema version stamped into every summary file.
pub const SCHEMA: u32 = 1;

pub fn resolve_game(source: &GameSource, seed: u64) -> anyhow::Result<Matrix> {
    if let Some(name) = &source.game {
        return games::by_name(name)
            .with_context(|| format!("unknown game '{name}'; known: {:?}", games::GAME_NAMES));
    }
    if let Some(path) = &source.matrix {
        return io::read_matrix(path).with_context(|| format!("reading {}", path.display()));
    }
    if let Some(shape) = &source.random {
        let (n, m) = parse_shape(shape)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return Ok(games::random_game(&mut rng, n, m));
    }
    bail!("one of --game, --matrix, --random is required")
}

fn parse_shape(shape: &str) -> anyhow::Result<(usize, usize)> {
    let (n, m) = shape
        .split_once(['x', 'X'])
        .with_context(|| format!("--random expects NxM, got '{shape}'"))?;
    let n: usize = n.trim().parse().context("--random rows")?;
    let m: usize = m.trim().parse().context("--random cols")?;
    if n == 0 || m == 0 {
        bail!("--random dimensions must be positive");
    }
    Ok((n, m))
}

/// Default learning rate: 90% of the stability bound.
pub fn default_eta(a: &Matrix) -> anyhow::Result<f64> {
    Ok(0.9 * stability_bound(a).context("zero matrix has no stability bound")?)
}

/// Deterministic generic start: a descending staircase on each side,
/// normalized to the simplex, so named-game runs are reproducible without a
/// seed and never start at an equilibrium.
pub fn staircase_start(n: usize, m: usize) -> JointState {
    let x = Vector::from_fn(n, |i, _| (n - i) as f64 * 2.0 / (n * (n + 1)) as f64);
    let y = Vector::from_fn(m, |j, _| (j + 1) as f64 * 2.0 / (m * (m + 1)) as f64);
    JointState::new(x, y, 0)
}

pub fn out_dir(output: &OutputArgs) -> anyhow::Result<PathBuf> {
    let dir = output
        .out
        .clone()
        .or_else(|| std::env::var_os("SADDLEKIT_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating output dir {}", dir.display()))?;
    Ok(dir)
}

/// Writes atomically: temp file in the target directory, then rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    std::fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, &target)
        .with_context(|| format!("moving into place {}", target.display()))?;
    Ok(target)
}

pub fn write_summary(dir: &Path, name: &str, value: &serde_json::Value) -> anyhow::Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(dir, name, &text)
}
