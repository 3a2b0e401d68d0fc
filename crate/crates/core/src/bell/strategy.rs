use serde::{Deserialize, Serialize};

use super::correlation::Correlation;
use super::scenario::Scenario;
use crate::error::{Error, Result};

/// Deterministic local response: `outputs[party][input]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub outputs: Vec<Vec<usize>>,
}

impl DeterministicStrategy {
    pub fn new(outputs: Vec<Vec<usize>>) -> Self {
        Self { outputs }
    }

    /// Everyone outputs 0 on every input.
    pub fn zeros(scenario: &Scenario) -> Self {
        Self {
            outputs: scenario
                .outcome_table()
                .iter()
                .map(|inputs| vec![0; inputs.len()])
                .collect(),
        }
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        if self.outputs.len() != scenario.parties() {
            return Err(Error::InvalidStrategy(format!(
                "{} parties, scenario has {}",
                self.outputs.len(),
                scenario.parties()
            )));
        }
        for (p, row) in self.outputs.iter().enumerate() {
            if row.len() != scenario.inputs(p) {
                return Err(Error::InvalidStrategy(format!(
                    "party {p} has {} assignments for {} inputs",
                    row.len(),
                    scenario.inputs(p)
                )));
            }
            for (x, &k) in row.iter().enumerate() {
                if k >= scenario.outcomes(p, x) {
                    return Err(Error::InvalidStrategy(format!(
                        "party {p} input {x} outputs {k} of {}",
                        scenario.outcomes(p, x)
                    )));
                }
            }
        }
        Ok(())
    }

    /// `P(k|j) = Π_i δ(k_i, λ_i(j_i))`.
    pub fn correlation(&self, scenario: &Scenario) -> Result<Correlation> {
        self.validate(scenario)?;
        Ok(Correlation::from_fn(scenario.clone(), |j, k| {
            let hit = j
                .iter()
                .zip(k)
                .enumerate()
                .all(|(p, (&x, &a))| self.outputs[p][x] == a);
            if hit {
                1.0
            } else {
                0.0
            }
        }))
    }
}

/// Free-function form of [`DeterministicStrategy::correlation`].
pub fn deterministic_correlation(scenario: &Scenario, strategy: &DeterministicStrategy) -> Result<Correlation> {
    strategy.correlation(scenario)
}
