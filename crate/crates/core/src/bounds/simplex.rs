//! Dense two-phase revised simplex with Bland's rule.
//!
//! Problems are `max cᵀx  s.t.  A x = b, x ≥ 0`. The basis matrix is
//! refactorized every iteration; problems here have at most a few hundred
//! rows, so this stays cheap and keeps the iterates free of drift.
//!
//! Tie-breaking is fully determined: the entering column is the lowest
//! index with positive reduced cost, and ratio-test ties leave the basic
//! variable with the lowest index. Degenerate problems therefore end on the
//! first optimal basis Bland's rule reaches.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const DEFAULT_LP_TOL: f64 = 1e-9;
const MAX_ITERATIONS: usize = 50_000;

#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Basic column per retained row.
    pub basis: Vec<usize>,
    pub iterations: usize,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>, a_eq: Vec<Vec<f64>>, b_eq: Vec<f64>) -> Result<Self> {
        let p = Self {
            objective,
            a_eq,
            b_eq,
        };
        p.validate()?;
        Ok(p)
    }

    /// `max cᵀx  s.t.  A x ≤ b, x ≥ 0`, with one slack column per row
    /// appended after the original variables.
    pub fn from_inequalities(objective: Vec<f64>, a_le: Vec<Vec<f64>>, b_le: Vec<f64>) -> Result<Self> {
        let n = objective.len();
        let m = a_le.len();
        let mut c = objective;
        c.resize(n + m, 0.0);
        let rows = a_le
            .into_iter()
            .enumerate()
            .map(|(i, mut row)| {
                row.resize(n + m, 0.0);
                row[n + i] = 1.0;
                row
            })
            .collect();
        Self::new(c, rows, b_le)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.a_eq.len() != self.b_eq.len() {
            return Err(Error::MalformedProblem(format!(
                "{} constraint rows but {} right-hand sides",
                self.a_eq.len(),
                self.b_eq.len()
            )));
        }
        if let Some(i) = self.a_eq.iter().position(|r| r.len() != n) {
            return Err(Error::MalformedProblem(format!(
                "row {i} has {} entries, expected {n}",
                self.a_eq[i].len()
            )));
        }
        let finite = self.objective.iter().chain(&self.b_eq).chain(self.a_eq.iter().flatten()).all(|x| x.is_finite());
        if !finite {
            return Err(Error::MalformedProblem("non-finite entry".into()));
        }
        Ok(())
    }
}

/// Drops linearly dependent rows of `[A | b]`; fails if a dependent row
/// contradicts the others.
fn independent_rows(a: &[Vec<f64>], b: &[f64], tol: f64) -> Result<Vec<usize>> {
    let m = a.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let n = a[0].len();
    let scale = a.iter().flatten().fold(1.0_f64, |acc, x| acc.max(x.abs()));
    let mut work: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut kept = Vec::new();
    for col in 0..n {
        let Some((pos, _)) = remaining
            .iter()
            .enumerate()
            .map(|(pos, &r)| (pos, work[r][col].abs()))
            .filter(|&(_, v)| v > tol * scale)
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        else {
            continue;
        };
        let pivot_row = remaining.remove(pos);
        let pivot = work[pivot_row].clone();
        for &r in &remaining {
            let factor = work[r][col] / pivot[col];
            if factor != 0.0 {
                for (w, p) in work[r].iter_mut().zip(&pivot) {
                    *w -= factor * p;
                }
            }
        }
        kept.push(pivot_row);
    }
    let rhs_scale = b.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
    for &r in &remaining {
        if work[r][n].abs() > tol * rhs_scale.max(scale) * 10.0 {
            return Err(Error::LpInfeasible);
        }
    }
    kept.sort_unstable();
    Ok(kept)
}

struct Tableau {
    a: DMatrix<f64>,
    b: DVector<f64>,
    basis: Vec<usize>,
    iterations: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn basis_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.a.nrows(), self.basis.len(), |i, k| self.a[(i, self.basis[k])])
    }

    fn solve_basis(&self) -> Result<(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>, DVector<f64>)> {
        let lu = self.basis_matrix().lu();
        let x = lu
            .solve(&self.b)
            .ok_or_else(|| Error::NumericalFailure("singular simplex basis".into()))?;
        Ok((lu, x))
    }

    fn run(&mut self, cost: &[f64], allowed: usize, tol: f64) -> Result<Step> {
        loop {
            if self.iterations >= MAX_ITERATIONS {
                return Err(Error::IterationLimit(MAX_ITERATIONS));
            }
            let (lu, x_b) = self.solve_basis()?;
            let c_b = DVector::from_iterator(self.basis.len(), self.basis.iter().map(|&j| cost[j]));
            let pi = self
                .basis_matrix()
                .transpose()
                .lu()
                .solve(&c_b)
                .ok_or_else(|| Error::NumericalFailure("singular simplex basis".into()))?;
            let entering = (0..allowed).find(|&j| {
                !self.basis.contains(&j) && cost[j] - self.a.column(j).dot(&pi) > tol
            });
            let Some(j) = entering else {
                return Ok(Step::Optimal);
            };
            let w = lu
                .solve(&self.a.column(j).into_owned())
                .ok_or_else(|| Error::NumericalFailure("singular simplex basis".into()))?;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..w.len() {
                if w[i] > tol {
                    let ratio = x_b[i].max(0.0) / w[i];
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            if ratio < best - tol
                                || (ratio <= best + tol && self.basis[i] < self.basis[r])
                            {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(Step::Unbounded);
            };
            self.basis[r] = j;
            self.iterations += 1;
        }
    }
}

pub fn solve_lp(problem: &LpProblem, tol: f64) -> Result<LpSolution> {
    problem.validate()?;
    let n = problem.num_vars();
    let rows = independent_rows(&problem.a_eq, &problem.b_eq, tol)?;
    let m = rows.len();

    // Phase 1 columns: originals then one artificial per row.
    let mut a = DMatrix::zeros(m, n + m);
    let mut b = DVector::zeros(m);
    for (i, &r) in rows.iter().enumerate() {
        let sign = if problem.b_eq[r] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            a[(i, j)] = sign * problem.a_eq[r][j];
        }
        a[(i, n + i)] = 1.0;
        b[i] = sign * problem.b_eq[r];
    }
    let mut tableau = Tableau {
        a,
        b,
        basis: (n..n + m).collect(),
        iterations: 0,
    };
    let mut phase1 = vec![0.0; n + m];
    phase1[n..].iter_mut().for_each(|c| *c = -1.0);
    tableau.run(&phase1, n + m, tol)?;
    let (_, x_b) = tableau.solve_basis()?;
    let infeasibility: f64 = tableau
        .basis
        .iter()
        .zip(x_b.iter())
        .filter(|(&j, _)| j >= n)
        .map(|(_, &v)| v)
        .sum();
    let b_scale = tableau.b.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
    if infeasibility > tol * b_scale * 10.0 {
        return Err(Error::LpInfeasible);
    }

    // Pivot remaining artificials out, dropping rows where that is impossible.
    let mut row = 0;
    while row < tableau.basis.len() {
        if tableau.basis[row] < n {
            row += 1;
            continue;
        }
        let (lu, _) = tableau.solve_basis()?;
        let replacement = (0..n).filter(|j| !tableau.basis.contains(j)).find(|&j| {
            let w = lu.solve(&tableau.a.column(j).into_owned()).expect("basis was just factorized");
            w[row].abs() > 1e-7
        });
        match replacement {
            Some(j) => {
                tableau.basis[row] = j;
                row += 1;
            }
            None => {
                tableau.a = tableau.a.clone().remove_row(row);
                tableau.b = tableau.b.clone().remove_row(row);
                tableau.basis.remove(row);
            }
        }
    }

    let mut cost = problem.objective.clone();
    cost.resize(n + m, 0.0);
    match tableau.run(&cost, n, tol)? {
        Step::Unbounded => Err(Error::LpUnbounded),
        Step::Optimal => {
            let (_, x_b) = tableau.solve_basis()?;
            let mut x = vec![0.0; n];
            for (&j, &v) in tableau.basis.iter().zip(x_b.iter()) {
                if j < n {
                    x[j] = v.max(0.0);
                }
            }
            let objective = x.iter().zip(&problem.objective).map(|(a, b)| a * b).sum();
            Ok(LpSolution {
                x,
                objective,
                basis: tableau.basis,
                iterations: tableau.iterations,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable_cap() {
        let p = LpProblem::from_inequalities(vec![1.0], vec![vec![1.0]], vec![1.0]).unwrap();
        let s = solve_lp(&p, DEFAULT_LP_TOL).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_tie_takes_first_vertex() {
        // max x1 + x2 s.t. x1 + x2 ≤ 1: both (1,0) and (0,1) are optimal.
        let p = LpProblem::from_inequalities(vec![1.0, 1.0], vec![vec![1.0, 1.0]], vec![1.0]).unwrap();
        let s = solve_lp(&p, DEFAULT_LP_TOL).unwrap();
        assert_eq!(&s.x[..2], &[1.0, 0.0]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = LpProblem::new(vec![1.0], vec![vec![1.0], vec![1.0]], vec![1.0, 2.0]).unwrap();
        assert!(matches!(solve_lp(&p, DEFAULT_LP_TOL), Err(Error::LpInfeasible)));
        let p = LpProblem::new(vec![1.0, 0.0], vec![vec![1.0, -1.0]], vec![0.0]).unwrap();
        assert!(matches!(solve_lp(&p, DEFAULT_LP_TOL), Err(Error::LpUnbounded)));
        let p = LpProblem::new(vec![1.0], vec![vec![-1.0]], vec![1.0]).unwrap();
        assert!(matches!(solve_lp(&p, DEFAULT_LP_TOL), Err(Error::LpInfeasible)));
    }

    #[test]
    fn redundant_rows_are_filtered() {
        let p = LpProblem::new(
            vec![1.0, 2.0],
            vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![1.0, 0.0]],
            vec![1.0, 2.0, 0.25],
        )
        .unwrap();
        let s = solve_lp(&p, DEFAULT_LP_TOL).unwrap();
        assert!((s.objective - 1.75).abs() < 1e-12);
    }

    #[test]
    fn malformed_rejected() {
        assert!(LpProblem::new(vec![1.0], vec![vec![1.0, 2.0]], vec![1.0]).is_err());
        assert!(LpProblem::new(vec![f64::NAN], vec![], vec![]).is_err());
    }

    #[test]
    fn deterministic() {
        let p = LpProblem::from_inequalities(
            vec![3.0, 2.0, 4.0],
            vec![vec![1.0, 1.0, 2.0], vec![2.0, 0.0, 3.0], vec![2.0, 1.0, 3.0]],
            vec![4.0, 5.0, 7.0],
        )
        .unwrap();
        let a = solve_lp(&p, DEFAULT_LP_TOL).unwrap();
        let b = solve_lp(&p, DEFAULT_LP_TOL).unwrap();
        assert_eq!(a, b);
    }
}
