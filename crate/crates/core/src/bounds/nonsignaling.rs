use super::simplex::{solve_lp, LpProblem, DEFAULT_LP_TOL};
use super::{BoundResult, BoundStatus, Sense, Witness};
use crate::bell::{BellFunctional, Coeff, Correlation, Scenario};
use crate::error::{Error, Result};

pub fn nonsignaling_bound(f: &BellFunctional) -> Result<BoundResult> {
    nonsignaling_optimum(f, Sense::Max, &[], DEFAULT_LP_TOL)
}

/// Optimizes `f` over nonsignaling correlations on which every pinned
/// functional takes its given value.
pub fn nonsignaling_optimum(
    f: &BellFunctional,
    sense: Sense,
    pins: &[(&BellFunctional, f64)],
    tol: f64,
) -> Result<BoundResult> {
    let s = f.scenario();
    if let Some((g, _)) = pins.iter().find(|(g, _)| g.scenario() != s) {
        return Err(Error::ScenarioMismatch(format!(
            "pinned functional over {:?}, objective over {:?}",
            g.scenario().outcome_table(),
            s.outcome_table()
        )));
    }
    let (mut rows, mut rhs) = polytope_rows(s);
    for (g, value) in pins {
        rows.push(g.dense());
        rhs.push(value - g.offset().to_f64());
    }
    let sign = match sense {
        Sense::Max => 1.0,
        Sense::Min => -1.0,
    };
    let objective = f.dense().into_iter().map(|c| sign * c).collect();
    let sol = solve_lp(&LpProblem::new(objective, rows, rhs)?, tol)?;
    let p = Correlation::new(s.clone(), sol.x)?;
    let value = f.value(&p)?;
    Ok(BoundResult {
        value: Coeff::Real(value),
        witness: Witness::Correlation(p),
        status: BoundStatus::Numeric,
    })
}

/// Normalization of every block plus, for each party and each joint input
/// where that party's input is nonzero, equality of the other parties'
/// marginal with the one at that party's input 0.
pub fn polytope_rows(s: &Scenario) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for j in 0..s.num_joint_inputs() {
        let mut row = vec![0.0; s.len()];
        let off = s.block_offset(j);
        row[off..off + s.block_size(j)].iter_mut().for_each(|x| *x = 1.0);
        rows.push(row);
        rhs.push(1.0);
    }
    for party in 0..s.parties() {
        for j in 0..s.num_joint_inputs() {
            let inputs = s.joint_input(j);
            if inputs[party] == 0 {
                continue;
            }
            let mut reference = inputs.clone();
            reference[party] = 0;
            let here = marginal_rows(s, party, &inputs);
            let there = marginal_rows(s, party, &reference);
            for (a, b) in here.into_iter().zip(there) {
                let mut row = vec![0.0; s.len()];
                a.into_iter().for_each(|i| row[i] += 1.0);
                b.into_iter().for_each(|i| row[i] -= 1.0);
                rows.push(row);
                rhs.push(0.0);
            }
        }
    }
    (rows, rhs)
}

/// Flat indices summed by each entry of the marginal without `party`.
fn marginal_rows(s: &Scenario, party: usize, inputs: &[usize]) -> Vec<Vec<usize>> {
    let j = s.joint_input_index(inputs).expect("valid joint input");
    let off = s.block_offset(j);
    let d = s.outcomes(party, inputs[party]);
    let mut out = vec![Vec::new(); s.block_size(j) / d];
    for local in 0..s.block_size(j) {
        let outputs = s.local_outputs(inputs, local);
        let mut idx = 0;
        for (p, &k) in outputs.iter().enumerate() {
            if p != party {
                idx = idx * s.outcomes(p, inputs[p]) + k;
            }
        }
        out[idx].push(off + local);
    }
    out
}
