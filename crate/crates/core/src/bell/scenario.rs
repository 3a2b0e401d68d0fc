use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Bell scenario: for each party, the outcome count of every input.
///
/// Probabilities are laid out flat. Joint inputs are ordered
/// lexicographically with party 0 most significant; each joint input owns a
/// contiguous block over joint outputs, also lexicographic with party 0 most
/// significant. Blocks can have different sizes because outcome counts may
/// depend on the input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct Scenario {
    outcomes: Vec<Vec<usize>>,
    block_offsets: Vec<usize>,
    block_sizes: Vec<usize>,
}

impl Scenario {
    pub fn new(outcomes: Vec<Vec<usize>>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidScenario("no parties".into()));
        }
        for (party, inputs) in outcomes.iter().enumerate() {
            if inputs.is_empty() {
                return Err(Error::InvalidScenario(format!("party {party} has no inputs")));
            }
            if let Some(input) = inputs.iter().position(|&d| d == 0) {
                return Err(Error::InvalidScenario(format!(
                    "party {party} input {input} has zero outcomes"
                )));
            }
        }
        let joint: usize = outcomes.iter().map(Vec::len).product();
        let mut block_offsets = Vec::with_capacity(joint + 1);
        let mut block_sizes = Vec::with_capacity(joint);
        let mut offset = 0;
        let mut digits = vec![0; outcomes.len()];
        for _ in 0..joint {
            let size: usize = digits
                .iter()
                .zip(&outcomes)
                .map(|(&j, party)| party[j])
                .product();
            block_offsets.push(offset);
            block_sizes.push(size);
            offset += size;
            increment(&mut digits, |p| outcomes[p].len());
        }
        block_offsets.push(offset);
        Ok(Self {
            outcomes,
            block_offsets,
            block_sizes,
        })
    }

    pub fn parties(&self) -> usize {
        self.outcomes.len()
    }

    pub fn inputs(&self, party: usize) -> usize {
        self.outcomes[party].len()
    }

    pub fn outcomes(&self, party: usize, input: usize) -> usize {
        self.outcomes[party][input]
    }

    /// Per-party outcome-count lists, as given at construction.
    pub fn outcome_table(&self) -> &[Vec<usize>] {
        &self.outcomes
    }

    pub fn num_joint_inputs(&self) -> usize {
        self.block_sizes.len()
    }

    /// Total number of probability entries.
    pub fn len(&self) -> usize {
        *self.block_offsets.last().expect("offset table is never empty")
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn block_offset(&self, joint_input: usize) -> usize {
        self.block_offsets[joint_input]
    }

    pub fn block_size(&self, joint_input: usize) -> usize {
        self.block_sizes[joint_input]
    }

    pub fn joint_input_index(&self, inputs: &[usize]) -> Result<usize> {
        self.check_inputs(inputs)?;
        Ok(inputs
            .iter()
            .enumerate()
            .fold(0, |acc, (p, &j)| acc * self.outcomes[p].len() + j))
    }

    pub fn joint_input(&self, mut index: usize) -> Vec<usize> {
        let mut inputs = vec![0; self.parties()];
        for p in (0..self.parties()).rev() {
            let n = self.outcomes[p].len();
            inputs[p] = index % n;
            index /= n;
        }
        inputs
    }

    /// Flat index of `P(outputs | inputs)`.
    pub fn index(&self, inputs: &[usize], outputs: &[usize]) -> Result<usize> {
        let j = self.joint_input_index(inputs)?;
        if outputs.len() != self.parties() {
            return Err(Error::InvalidIndex(format!(
                "expected {} outputs, got {}",
                self.parties(),
                outputs.len()
            )));
        }
        let mut local = 0;
        for (p, (&x, &k)) in inputs.iter().zip(outputs).enumerate() {
            let d = self.outcomes[p][x];
            if k >= d {
                return Err(Error::InvalidIndex(format!(
                    "output {k} of party {p} at input {x} (only {d} outcomes)"
                )));
            }
            local = local * d + k;
        }
        Ok(self.block_offsets[j] + local)
    }

    /// Inverse of [`Scenario::index`].
    pub fn unindex(&self, flat: usize) -> (Vec<usize>, Vec<usize>) {
        assert!(flat < self.len(), "flat index {flat} out of range");
        let j = self.block_offsets.partition_point(|&o| o <= flat) - 1;
        let inputs = self.joint_input(j);
        let outputs = self.local_outputs(&inputs, flat - self.block_offsets[j]);
        (inputs, outputs)
    }

    /// Joint output tuple for position `local` within the block of `inputs`.
    pub fn local_outputs(&self, inputs: &[usize], mut local: usize) -> Vec<usize> {
        let mut outputs = vec![0; self.parties()];
        for p in (0..self.parties()).rev() {
            let d = self.outcomes[p][inputs[p]];
            outputs[p] = local % d;
            local /= d;
        }
        outputs
    }

    /// Iterates over every `(inputs, outputs, flat index)` in layout order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, Vec<usize>, usize)> + '_ {
        (0..self.num_joint_inputs()).flat_map(move |j| {
            let inputs = self.joint_input(j);
            let offset = self.block_offsets[j];
            (0..self.block_sizes[j]).map(move |local| {
                let outputs = self.local_outputs(&inputs, local);
                (inputs.clone(), outputs, offset + local)
            })
        })
    }

    /// Number of deterministic local strategies.
    pub fn num_deterministic_strategies(&self) -> Option<usize> {
        self.outcomes
            .iter()
            .flatten()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
    }

    fn check_inputs(&self, inputs: &[usize]) -> Result<()> {
        if inputs.len() != self.parties() {
            return Err(Error::InvalidIndex(format!(
                "expected {} inputs, got {}",
                self.parties(),
                inputs.len()
            )));
        }
        for (p, &x) in inputs.iter().enumerate() {
            if x >= self.outcomes[p].len() {
                return Err(Error::InvalidIndex(format!(
                    "input {x} of party {p} (only {} inputs)",
                    self.outcomes[p].len()
                )));
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<Vec<usize>>> for Scenario {
    type Error = Error;

    fn try_from(value: Vec<Vec<usize>>) -> Result<Self> {
        Scenario::new(value)
    }
}

impl From<Scenario> for Vec<Vec<usize>> {
    fn from(value: Scenario) -> Self {
        value.outcomes
    }
}

/// Mixed-radix increment, last digit fastest. Returns false on wrap-around.
pub(crate) fn increment(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for p in (0..digits.len()).rev() {
        digits[p] += 1;
        if digits[p] < radix(p) {
            return true;
        }
        digits[p] = 0;
    }
    false
}
