use std::collections::BTreeMap;

use super::coeff::Coeff;
use super::correlation::Correlation;
use super::scenario::Scenario;
use crate::error::{Error, Result};

/// A linear Bell functional `Σ B(k|j) P(k|j) + offset`.
///
/// Terms are keyed by flat index, so iteration follows the scenario layout.
/// Explicit zero coefficients are kept: they record which probabilities a
/// functional mentions.
#[derive(Clone, Debug, PartialEq)]
pub struct BellFunctional {
    scenario: Scenario,
    terms: BTreeMap<usize, Coeff>,
    offset: Coeff,
}

/// One coefficient with its indices spelled out.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub coeff: Coeff,
}

impl BellFunctional {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            terms: BTreeMap::new(),
            offset: Coeff::ZERO,
        }
    }

    /// Fails on an out-of-range index or a repeated `(inputs, outputs)` pair.
    pub fn from_terms(scenario: Scenario, terms: Vec<Term>, offset: Coeff) -> Result<Self> {
        let mut f = Self::new(scenario);
        f.offset = offset;
        for t in terms {
            let idx = f.scenario.index(&t.inputs, &t.outputs)?;
            if f.terms.insert(idx, t.coeff).is_some() {
                return Err(Error::DuplicateTerm {
                    inputs: t.inputs,
                    outputs: t.outputs,
                });
            }
        }
        Ok(f)
    }

    /// Builds a functional with a term at every entry from a closure.
    /// Entries mapped to `None` are left out.
    pub fn from_fn(scenario: Scenario, mut f: impl FnMut(&[usize], &[usize]) -> Option<Coeff>) -> Self {
        let terms = scenario
            .entries()
            .filter_map(|(j, k, idx)| f(&j, &k).map(|c| (idx, c)))
            .collect();
        Self {
            scenario,
            terms,
            offset: Coeff::ZERO,
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn offset(&self) -> Coeff {
        self.offset
    }

    pub fn with_offset(mut self, offset: Coeff) -> Self {
        self.offset = offset;
        self
    }

    /// Sets (or overwrites) one coefficient.
    pub fn set(&mut self, inputs: &[usize], outputs: &[usize], coeff: Coeff) -> Result<()> {
        let idx = self.scenario.index(inputs, outputs)?;
        self.terms.insert(idx, coeff);
        Ok(())
    }

    pub fn set_flat(&mut self, idx: usize, coeff: Coeff) {
        assert!(idx < self.scenario.len());
        self.terms.insert(idx, coeff);
    }

    /// Coefficient at `(inputs, outputs)`; zero when absent.
    pub fn coeff(&self, inputs: &[usize], outputs: &[usize]) -> Result<Coeff> {
        let idx = self.scenario.index(inputs, outputs)?;
        Ok(self.terms.get(&idx).copied().unwrap_or(Coeff::ZERO))
    }

    pub fn coeff_flat(&self, idx: usize) -> Coeff {
        self.terms.get(&idx).copied().unwrap_or(Coeff::ZERO)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Stored `(flat index, coefficient)` pairs in layout order.
    pub fn flat_terms(&self) -> impl Iterator<Item = (usize, Coeff)> + '_ {
        self.terms.iter().map(|(&i, &c)| (i, c))
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.iter().map(|(&idx, &coeff)| {
            let (inputs, outputs) = self.scenario.unindex(idx);
            Term {
                inputs,
                outputs,
                coeff,
            }
        })
    }

    pub fn is_exact(&self) -> bool {
        self.offset.is_exact() && self.terms.values().all(|c| c.is_exact())
    }

    /// Dense coefficient vector in the flat layout.
    pub fn dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.scenario.len()];
        for (&i, c) in &self.terms {
            v[i] = c.to_f64();
        }
        v
    }

    /// `B·P + offset`.
    pub fn value(&self, p: &Correlation) -> Result<f64> {
        if p.scenario() != &self.scenario {
            return Err(Error::ScenarioMismatch(
                "functional and correlation live in different scenarios".into(),
            ));
        }
        let probs = p.probs();
        Ok(self
            .terms
            .iter()
            .map(|(&i, c)| c.to_f64() * probs[i])
            .sum::<f64>()
            + self.offset.to_f64())
    }

    /// Subtracts `bound / #joint inputs` from every coefficient, creating
    /// explicit entries where needed. On normalized correlations the value
    /// drops by exactly `bound`.
    pub fn shift_to_zero_local_bound(&self, bound: Coeff) -> BellFunctional {
        if bound.is_zero() {
            return self.clone();
        }
        let n = self.scenario.num_joint_inputs() as i64;
        let per_block = match bound {
            Coeff::Exact(r) => Coeff::Exact(r / n),
            Coeff::Real(x) => Coeff::Real(x / n as f64),
        };
        let terms = (0..self.scenario.len())
            .map(|i| (i, self.coeff_flat(i) - per_block))
            .collect();
        BellFunctional {
            scenario: self.scenario.clone(),
            terms,
            offset: self.offset,
        }
    }

    /// Moves a constant offset into the coefficients (uniformly per joint
    /// input), leaving offset zero. Values on normalized correlations are
    /// unchanged.
    pub fn fold_offset(&self) -> BellFunctional {
        if self.offset.is_zero() {
            return self.clone();
        }
        let mut out = self.shift_to_zero_local_bound(-self.offset);
        out.offset = Coeff::ZERO;
        out
    }

    pub(crate) fn from_parts(scenario: Scenario, terms: BTreeMap<usize, Coeff>, offset: Coeff) -> Self {
        Self {
            scenario,
            terms,
            offset,
        }
    }
}

/// CHSH with coefficients `(−1)^{xy+a+b}` on the two-input two-outcome scenario.
pub fn chsh() -> BellFunctional {
    let scenario = Scenario::new(vec![vec![2, 2], vec![2, 2]]).expect("valid scenario");
    BellFunctional::from_fn(scenario, |j, k| {
        let parity = j[0] * j[1] + k[0] + k[1];
        Some(Coeff::int(if parity % 2 == 0 { 1 } else { -1 }))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chsh_coefficients() {
        let b = chsh();
        assert_eq!(b.coeff(&[0, 0], &[0, 0]).unwrap(), Coeff::int(1));
        assert_eq!(b.coeff(&[1, 1], &[0, 0]).unwrap(), Coeff::int(-1));
        assert_eq!(b.coeff(&[1, 0], &[1, 0]).unwrap(), Coeff::int(-1));
        assert_eq!(b.num_terms(), 16);
    }

    #[test]
    fn chsh_on_uniform_vanishes() {
        let b = chsh();
        let p = Correlation::uniform(b.scenario().clone());
        assert!(b.value(&p).unwrap().abs() < 1e-15);
    }

    #[test]
    fn duplicate_terms_rejected() {
        let s = Scenario::new(vec![vec![2]]).unwrap();
        let t = Term {
            inputs: vec![0],
            outputs: vec![1],
            coeff: Coeff::int(1),
        };
        let err = BellFunctional::from_terms(s, vec![t.clone(), t], Coeff::ZERO).unwrap_err();
        assert!(matches!(err, Error::DuplicateTerm { .. }));
    }

    #[test]
    fn shift_matches_bracketed_form() {
        let shifted = chsh().shift_to_zero_local_bound(Coeff::int(2));
        for t in shifted.terms() {
            let parity = t.inputs[0] * t.inputs[1] + t.outputs[0] + t.outputs[1];
            let sign = if parity % 2 == 0 { 1 } else { -1 };
            assert_eq!(t.coeff, Coeff::int(sign) - Coeff::ratio(1, 2));
        }
        assert_eq!(chsh().shift_to_zero_local_bound(Coeff::ZERO), chsh());
    }

    #[test]
    fn fold_offset_preserves_values() {
        let b = chsh().with_offset(Coeff::ratio(3, 4));
        let folded = b.fold_offset();
        assert!(folded.offset().is_zero());
        let p = Correlation::uniform(b.scenario().clone());
        assert!((b.value(&p).unwrap() - folded.value(&p).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn value_rejects_other_scenario() {
        let p = Correlation::uniform(Scenario::new(vec![vec![2]]).unwrap());
        assert!(chsh().value(&p).is_err());
    }
}
