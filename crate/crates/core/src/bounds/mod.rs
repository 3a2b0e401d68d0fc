//! Local bounds by deterministic-strategy enumeration and nonsignaling
//! bounds by linear programming.

mod local;
mod nonsignaling;
pub mod simplex;

use crate::bell::{BellFunctional, Coeff, Correlation, DeterministicStrategy};
use crate::error::Result;

pub use local::{local_bound, local_bound_with_cap, strategies, DEFAULT_STRATEGY_CAP};
pub use nonsignaling::{nonsignaling_bound, nonsignaling_optimum, polytope_rows};
pub use simplex::{solve_lp, LpProblem, LpSolution, DEFAULT_LP_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundStatus {
    /// Rational arithmetic throughout.
    Exact,
    Numeric,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Strategy(DeterministicStrategy),
    Correlation(Correlation),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundResult {
    pub value: Coeff,
    pub witness: Witness,
    pub status: BoundStatus,
}

impl BoundResult {
    pub fn witness_correlation(&self, f: &BellFunctional) -> Result<Correlation> {
        match &self.witness {
            Witness::Strategy(s) => s.correlation(f.scenario()),
            Witness::Correlation(p) => Ok(p.clone()),
        }
    }
}
