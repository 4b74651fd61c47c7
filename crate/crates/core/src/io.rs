//! Matrix and trajectory serialization.
//!
//! Matrices travel as CSV (one row per line, comma-separated decimals) or as
//! a JSON object `{rows, cols, entries}` with row-major entries. Values are
//! formatted with the shortest round-tripping decimal representation, so a
//! write/read cycle reproduces them bit-for-bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{validate_finite, Matrix};
use crate::ogda::{JointState, Trajectory};

/// JSON wire form of a matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries, length `rows * cols`.
    pub entries: Vec<f64>,
}

impl MatrixJson {
    pub fn from_matrix(a: &Matrix) -> Self {
        let mut entries = Vec::with_capacity(a.nrows() * a.ncols());
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                entries.push(a[(i, j)]);
            }
        }
        MatrixJson { rows: a.nrows(), cols: a.ncols(), entries }
    }

    pub fn into_matrix(self) -> Result<Matrix> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::InvalidInput(format!(
                "entries length {} does not match {}x{}",
                self.entries.len(),
                self.rows,
                self.cols
            )));
        }
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidInput("matrix must be nonempty".into()));
        }
        let m = Matrix::from_row_slice(self.rows, self.cols, &self.entries);
        validate_finite(&m, "matrix json")?;
        Ok(m)
    }
}

/// serde adapter so structs can embed a [`Matrix`] field directly.
pub mod matrix_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_matrix(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Matrix, D::Error> {
        MatrixJson::deserialize(d)?
            .into_matrix()
            .map_err(serde::de::Error::custom)
    }
}

pub fn matrix_to_json(a: &Matrix) -> String {
    serde_json::to_string(&MatrixJson::from_matrix(a)).expect("matrix json never fails")
}

pub fn matrix_from_json(text: &str) -> Result<Matrix> {
    let parsed: MatrixJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix json: {e}")))?;
    parsed.into_matrix()
}

pub fn matrix_to_csv(a: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{}", a[(i, j)]));
        }
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} columns, found {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty matrix".into()));
    }
    let (n, m) = (rows.len(), rows[0].len());
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let matrix = Matrix::from_row_slice(n, m, &flat);
    validate_finite(&matrix, "matrix csv")?;
    Ok(matrix)
}

/// Reads a matrix from disk, dispatching on the `.json` extension and
/// defaulting to CSV otherwise.
pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        matrix_from_json(&text)
    } else {
        matrix_from_csv(&text)
    }
}

/// Renders a trajectory as CSV with header
/// `t,x_1..x_n,y_1..y_m,dist_to_limit`, distances taken to `reference`.
pub fn trajectory_to_csv(traj: &Trajectory, reference: &JointState) -> String {
    let n = traj.matrix.nrows();
    let m = traj.matrix.ncols();
    let mut out = String::from("t");
    for i in 1..=n {
        out.push_str(&format!(",x_{i}"));
    }
    for j in 1..=m {
        out.push_str(&format!(",y_{j}"));
    }
    out.push_str(",dist_to_limit\n");
    for state in traj.states() {
        out.push_str(&format!("{}", state.t));
        for v in state.x.iter().chain(state.y.iter()) {
            out.push_str(&format!(",{v}"));
        }
        out.push_str(&format!(",{}\n", state.distance(reference)));
    }
    out
}
