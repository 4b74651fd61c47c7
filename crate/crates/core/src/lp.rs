//! Dense two-phase simplex method with Bland's rule.
//!
//! Exactness over speed: this is the verification oracle behind the game
//! solver, sized for desk-scale problems (tens of variables). Bland's rule
//! guarantees termination; no effort is spent on sparsity or revised-form
//! updates.

use crate::error::{Error, Result};

/// Pivot tolerance: entries below this are treated as zero.
const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// One linear constraint `coeffs . x (<=|>=|=) rhs`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Constraint { coeffs, relation, rhs }
    }
}

/// `maximize objective . x` subject to [`Constraint`]s and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_structural: usize,
    n_total: usize,
    artificial_start: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.n_total]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let scale = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= scale;
        }
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col];
            if factor.abs() <= f64::EPSILON {
                continue;
            }
            for j in 0..=self.n_total {
                let delta = factor * self.rows[row][j];
                self.rows[i][j] -= delta;
            }
            self.rows[i][col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Runs primal simplex (maximization) for the given cost vector using
    /// Bland's rule: enter the lowest-index improving column, leave with the
    /// lowest-index basic variable among the ratio-test ties.
    fn optimize(&mut self, costs: &[f64], allow: impl Fn(usize) -> bool) -> Result<f64> {
        let iteration_cap = 50_000
            .max(100 * (self.n_total + self.rows.len()) * (self.n_total + self.rows.len()));
        for _ in 0..iteration_cap {
            let multipliers: Vec<f64> = self
                .basis
                .iter()
                .map(|&b| costs.get(b).copied().unwrap_or(0.0))
                .collect();
            let mut entering = None;
            for j in 0..self.n_total {
                if !allow(j) || self.basis.contains(&j) {
                    continue;
                }
                let z: f64 = multipliers
                    .iter()
                    .zip(self.rows.iter())
                    .map(|(cb, row)| cb * row[j])
                    .sum();
                let reduced = costs.get(j).copied().unwrap_or(0.0) - z;
                if reduced > PIVOT_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                let objective: f64 = multipliers
                    .iter()
                    .zip(self.rows.iter())
                    .map(|(cb, row)| cb * row[self.n_total])
                    .sum();
                return Ok(objective);
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let coeff = self.rows[i][col];
                if coeff > PIVOT_TOL {
                    let ratio = self.rhs(i) / coeff;
                    let better = match leaving {
                        None => true,
                        Some((best_row, best_ratio)) => {
                            ratio < best_ratio - PIVOT_TOL
                                || (ratio <= best_ratio + PIVOT_TOL
                                    && self.basis[i] < self.basis[best_row])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return Err(Error::LpUnbounded);
            };
            self.pivot(row, col);
        }
        Err(Error::InvalidInput("simplex iteration cap exceeded".into()))
    }
}

/// Solves `lp`, returning the optimal structural variables and objective.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.objective.len();
    for c in &lp.constraints {
        if c.coeffs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "constraint with {} coefficients, expected {}",
                c.coeffs.len(),
                n
            )));
        }
        if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("lp constraint"));
        }
    }
    let m = lp.constraints.len();

    // Normalize to nonnegative right-hand sides.
    let mut rows_spec: Vec<(Vec<f64>, Relation, f64)> = lp
        .constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|v| -v).collect(), flipped, -c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs)
            }
        })
        .collect();

    let n_slack = rows_spec
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Eq)
        .count();
    let artificial_start = n + n_slack;
    // Every row gets an artificial except `Le` rows, whose slack can start basic.
    let n_artificial = rows_spec
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Le)
        .count();
    let n_total = artificial_start + n_artificial;

    let mut rows = vec![vec![0.0; n_total + 1]; m];
    let mut basis = vec![0usize; m];
    let mut slack_idx = n;
    let mut art_idx = artificial_start;
    for (i, (coeffs, rel, rhs)) in rows_spec.drain(..).enumerate() {
        rows[i][..n].copy_from_slice(&coeffs);
        rows[i][n_total] = rhs;
        match rel {
            Relation::Le => {
                rows[i][slack_idx] = 1.0;
                basis[i] = slack_idx;
                slack_idx += 1;
            }
            Relation::Ge => {
                rows[i][slack_idx] = -1.0;
                slack_idx += 1;
                rows[i][art_idx] = 1.0;
                basis[i] = art_idx;
                art_idx += 1;
            }
            Relation::Eq => {
                rows[i][art_idx] = 1.0;
                basis[i] = art_idx;
                art_idx += 1;
            }
        }
    }

    let mut tableau = Tableau { rows, basis, n_structural: n, n_total, artificial_start };

    // Phase I: drive the artificial variables to zero.
    if n_artificial > 0 {
        let mut phase1 = vec![0.0; n_total];
        for c in phase1.iter_mut().skip(artificial_start) {
            *c = -1.0;
        }
        let value = tableau.optimize(&phase1, |_| true)?;
        if value < -1e-7 {
            return Err(Error::LpInfeasible);
        }
        // Pivot leftover (degenerate) artificials out of the basis when possible.
        for i in 0..m {
            if tableau.basis[i] >= artificial_start {
                if let Some(col) =
                    (0..artificial_start).find(|&j| tableau.rows[i][j].abs() > PIVOT_TOL)
                {
                    tableau.pivot(i, col);
                }
            }
        }
    }

    // Phase II on the original objective, artificials barred from re-entry.
    let mut costs = vec![0.0; n_total];
    costs[..n].copy_from_slice(&lp.objective);
    let start = tableau.artificial_start;
    let objective = tableau.optimize(&costs, |j| j < start)?;

    let mut x = vec![0.0; n];
    for (i, &b) in tableau.basis.iter().enumerate() {
        if b < tableau.n_structural {
            x[b] = tableau.rhs(i);
        }
    }
    Ok(LpSolution { x, objective })
}
