//! Two-dimensional slices of the local, nonsignaling and quantum sets: the
//! range of one functional while another is pinned.

use std::fmt;

use rayon::prelude::*;

use crate::bell::BellFunctional;
use crate::bounds::{nonsignaling_optimum, solve_lp, strategies, LpProblem, Sense, DEFAULT_LP_TOL, DEFAULT_STRATEGY_CAP};
use crate::error::{Error, Result};
use crate::npa::{functional_to_moments, maximize_over_slice, Level, MomentStructure};
use crate::sdp::SdpSettings;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetKind {
    Local,
    Nonsignaling,
    /// Moment relaxation: an outer approximation of the quantum set.
    Quantum,
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetKind::Local => "L",
            SetKind::Nonsignaling => "N",
            SetKind::Quantum => "Q",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug)]
pub struct SliceRow {
    pub set: SetKind,
    pub pinned_value: f64,
    pub range: Result<Range>,
}

#[derive(Clone, Debug)]
pub struct Slice {
    pub axis: BellFunctional,
    pub pinned: BellFunctional,
    pub level: Level,
    pub settings: SdpSettings,
}

impl Slice {
    pub fn new(axis: BellFunctional, pinned: BellFunctional, level: Level) -> Result<Self> {
        if axis.scenario() != pinned.scenario() {
            return Err(Error::ScenarioMismatch("slice axes live in different scenarios".into()));
        }
        Ok(Slice {
            axis,
            pinned,
            level,
            settings: SdpSettings::default(),
        })
    }

    /// Values of both axes at every deterministic strategy, deduplicated.
    fn local_points(&self) -> Result<Vec<(f64, f64)>> {
        let s = self.axis.scenario();
        match s.num_deterministic_strategies() {
            Some(n) if n <= DEFAULT_STRATEGY_CAP => {}
            other => {
                return Err(Error::StrategyCapExceeded {
                    count: other.map_or_else(|| "more than 2^64".to_string(), |n| n.to_string()),
                    cap: DEFAULT_STRATEGY_CAP,
                })
            }
        }
        let mut points = Vec::new();
        for st in strategies(s) {
            let p = st.correlation(s)?;
            points.push((self.axis.value(&p)?, self.pinned.value(&p)?));
        }
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        points.dedup();
        Ok(points)
    }

    fn local_range(points: &[(f64, f64)], v: f64) -> Result<Range> {
        let solve = |sign: f64| -> Result<f64> {
            let lp = LpProblem::new(
                points.iter().map(|p| sign * p.0).collect(),
                vec![vec![1.0; points.len()], points.iter().map(|p| p.1).collect()],
                vec![1.0, v],
            )?;
            Ok(sign * solve_lp(&lp, DEFAULT_LP_TOL)?.objective)
        };
        Ok(Range {
            min: solve(-1.0)?,
            max: solve(1.0)?,
        })
    }

    fn nonsignaling_range(&self, v: f64) -> Result<Range> {
        let pins = [(&self.pinned, v)];
        Ok(Range {
            min: nonsignaling_optimum(&self.axis, Sense::Min, &pins, DEFAULT_LP_TOL)?.value.to_f64(),
            max: nonsignaling_optimum(&self.axis, Sense::Max, &pins, DEFAULT_LP_TOL)?.value.to_f64(),
        })
    }

    /// Certified bounds from the relaxation: the reported range contains the
    /// quantum range.
    fn quantum_range(&self, structure: &MomentStructure, v: f64) -> Result<Range> {
        let axis = functional_to_moments(&self.axis);
        let pins = [(functional_to_moments(&self.pinned), v)];
        let max = maximize_over_slice(structure, &axis, &pins, &self.settings)?.bound;
        let min = -maximize_over_slice(structure, &axis.scaled(-1.0), &pins, &self.settings)?.bound;
        Ok(Range { min, max })
    }

    /// One row per set and grid value, ordered by set then by the grid.
    pub fn rows(&self, grid: &[f64]) -> Vec<SliceRow> {
        let points = self.local_points();
        let structure = MomentStructure::for_level(self.axis.scenario(), &self.level);
        let mut rows = Vec::with_capacity(3 * grid.len());
        for set in [SetKind::Local, SetKind::Nonsignaling, SetKind::Quantum] {
            let ranges: Vec<Result<Range>> = grid
                .par_iter()
                .map(|&v| match set {
                    SetKind::Local => match &points {
                        Ok(points) => Self::local_range(points, v),
                        Err(e) => Err(Error::Format(e.to_string())),
                    },
                    SetKind::Nonsignaling => self.nonsignaling_range(v),
                    SetKind::Quantum => self.quantum_range(&structure, v),
                })
                .collect();
            rows.extend(grid.iter().zip(ranges).map(|(&v, range)| SliceRow {
                set,
                pinned_value: v,
                range,
            }));
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{bob_marginal_correlator, li_chsh};

    #[test]
    fn li_chsh_slice_is_flat() {
        let slice = Slice::new(li_chsh(), bob_marginal_correlator(), "1+AB".parse().unwrap()).unwrap();
        let grid = [-1.0, -0.5, 0.0, 0.5, 1.0];
        for row in slice.rows(&grid) {
            let r = row.range.unwrap_or_else(|e| panic!("{} at {}: {e}", row.set, row.pinned_value));
            let expected = match row.set {
                SetKind::Local => 2.0,
                SetKind::Nonsignaling => 4.0,
                SetKind::Quantum => 2.0 * 2f64.sqrt(),
            };
            assert!((r.max - expected).abs() < 1e-5, "{} at {}: {}", row.set, row.pinned_value, r.max);
            assert!((r.min + expected).abs() < 1e-5, "{} at {}: {}", row.set, row.pinned_value, r.min);
        }
    }

    #[test]
    fn out_of_range_pin_is_infeasible() {
        let slice = Slice::new(li_chsh(), bob_marginal_correlator(), "1".parse().unwrap()).unwrap();
        for row in slice.rows(&[1.5]) {
            assert!(row.range.is_err(), "{}", row.set);
        }
    }
}
