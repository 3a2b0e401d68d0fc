use std::fmt;

use super::scenario::Scenario;
use crate::error::{Error, Result};

/// Default tolerance for validity and nonsignaling checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Conditional probabilities `P(outputs | inputs)` in the scenario's flat layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Correlation {
    scenario: Scenario,
    probs: Vec<f64>,
}

/// One failed check, with the offending magnitude.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Normalization {
        inputs: Vec<usize>,
        sum: f64,
    },
    Negative {
        inputs: Vec<usize>,
        outputs: Vec<usize>,
        value: f64,
    },
    /// The marginal of all parties but `party` changes when `party` switches
    /// from input 0 to `inputs[party]`.
    Signaling {
        party: usize,
        inputs: Vec<usize>,
        deviation: f64,
    },
}

impl Violation {
    pub fn magnitude(&self) -> f64 {
        match self {
            Violation::Normalization { sum, .. } => (sum - 1.0).abs(),
            Violation::Negative { value, .. } => -value,
            Violation::Signaling { deviation, .. } => *deviation,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Normalization { inputs, sum } => {
                write!(f, "block {inputs:?} sums to {sum}")
            }
            Violation::Negative {
                inputs,
                outputs,
                value,
            } => write!(f, "P({outputs:?}|{inputs:?}) = {value}"),
            Violation::Signaling {
                party,
                inputs,
                deviation,
            } => write!(
                f,
                "marginal without party {party} at {inputs:?} deviates by {deviation:e}"
            ),
        }
    }
}

/// Outcome of a report-style check. Violations are sorted worst first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn worst(&self) -> Option<&Violation> {
        self.violations.first()
    }

    fn finish(mut self) -> Self {
        self.violations
            .sort_by(|a, b| b.magnitude().total_cmp(&a.magnitude()));
        self
    }
}

impl Correlation {
    pub fn new(scenario: Scenario, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != scenario.len() {
            return Err(Error::ScenarioMismatch(format!(
                "scenario has {} entries, got {} probabilities",
                scenario.len(),
                probs.len()
            )));
        }
        Ok(Self { scenario, probs })
    }

    /// Builds a table entry by entry from a closure over `(inputs, outputs)`.
    pub fn from_fn(scenario: Scenario, mut f: impl FnMut(&[usize], &[usize]) -> f64) -> Self {
        let probs = scenario.entries().map(|(j, k, _)| f(&j, &k)).collect();
        Self { scenario, probs }
    }

    pub fn uniform(scenario: Scenario) -> Self {
        let probs = (0..scenario.num_joint_inputs())
            .flat_map(|j| {
                let size = scenario.block_size(j);
                std::iter::repeat_n(1.0 / size as f64, size)
            })
            .collect();
        Self { scenario, probs }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn get(&self, inputs: &[usize], outputs: &[usize]) -> Result<f64> {
        Ok(self.probs[self.scenario.index(inputs, outputs)?])
    }

    /// Convex combination `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Correlation, w: f64) -> Result<Correlation> {
        if self.scenario != other.scenario {
            return Err(Error::ScenarioMismatch("cannot mix correlations".into()));
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| w * a + (1.0 - w) * b)
            .collect();
        Ok(Correlation {
            scenario: self.scenario.clone(),
            probs,
        })
    }

    /// Normalization and positivity within `tol`.
    pub fn validity(&self, tol: f64) -> Report {
        let mut report = Report::default();
        let s = &self.scenario;
        for j in 0..s.num_joint_inputs() {
            let off = s.block_offset(j);
            let block = &self.probs[off..off + s.block_size(j)];
            let sum: f64 = block.iter().sum();
            if (sum - 1.0).abs() > tol || !sum.is_finite() {
                report.violations.push(Violation::Normalization {
                    inputs: s.joint_input(j),
                    sum,
                });
            }
            let inputs = s.joint_input(j);
            for (local, &p) in block.iter().enumerate() {
                if p < -tol || !p.is_finite() {
                    report.violations.push(Violation::Negative {
                        inputs: inputs.clone(),
                        outputs: s.local_outputs(&inputs, local),
                        value: p,
                    });
                }
            }
        }
        report.finish()
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.validity(tol).ok()
    }

    /// For every party, the marginal over the remaining parties must not
    /// depend on that party's input.
    pub fn nonsignaling(&self, tol: f64) -> Report {
        let mut report = Report::default();
        let s = &self.scenario;
        for party in 0..s.parties() {
            for j in 0..s.num_joint_inputs() {
                let inputs = s.joint_input(j);
                if inputs[party] == 0 {
                    continue;
                }
                let mut reference_inputs = inputs.clone();
                reference_inputs[party] = 0;
                let here = self.marginal_without(party, &inputs);
                let there = self.marginal_without(party, &reference_inputs);
                let deviation = here
                    .iter()
                    .zip(&there)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if deviation > tol || !deviation.is_finite() {
                    report.violations.push(Violation::Signaling {
                        party,
                        inputs,
                        deviation,
                    });
                }
            }
        }
        report.finish()
    }

    pub fn is_nonsignaling(&self, tol: f64) -> bool {
        self.nonsignaling(tol).ok()
    }

    /// Marginal over all parties except `party`, at the given joint input,
    /// indexed by the remaining parties' outputs in mixed-radix order.
    pub fn marginal_without(&self, party: usize, inputs: &[usize]) -> Vec<f64> {
        let s = &self.scenario;
        let j = s
            .joint_input_index(inputs)
            .expect("inputs validated by caller");
        let off = s.block_offset(j);
        let d = s.outcomes(party, inputs[party]);
        let rest = s.block_size(j) / d;
        let mut out = vec![0.0; rest];
        for local in 0..s.block_size(j) {
            let outputs = s.local_outputs(inputs, local);
            let mut idx = 0;
            for (p, &k) in outputs.iter().enumerate() {
                if p != party {
                    idx = idx * s.outcomes(p, inputs[p]) + k;
                }
            }
            out[idx] += self.probs[off + local];
        }
        out
    }

    /// Single-party marginal `P(k | x)` for `party`, read at the other
    /// parties' input 0.
    pub fn party_marginal(&self, party: usize, input: usize) -> Vec<f64> {
        let s = &self.scenario;
        let mut inputs = vec![0; s.parties()];
        inputs[party] = input;
        let j = s.joint_input_index(&inputs).expect("valid input");
        let off = s.block_offset(j);
        let mut out = vec![0.0; s.outcomes(party, input)];
        for local in 0..s.block_size(j) {
            let outputs = s.local_outputs(&inputs, local);
            out[outputs[party]] += self.probs[off + local];
        }
        out
    }
}
