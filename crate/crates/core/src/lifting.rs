//! Input, outcome and party liftings of Bell functionals, plus the
//! correlation maps that carry values between a functional and its lifting:
//! coarse-graining and splitting of outcomes, conditioning on an extra
//! party's outcome, and embedding next to a deterministic extra party.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bell::{BellFunctional, Coeff, Correlation, Scenario};
use crate::bounds::local_bound;
use crate::error::{Error, Result};

/// Default threshold below which a conditioning marginal counts as zero.
pub const CONDITION_TOL: f64 = 1e-12;

fn rebuild(scenario: Scenario, f: &BellFunctional, mut map: impl FnMut(&[usize], &[usize], Coeff, &mut dyn FnMut(usize, Coeff))) -> Result<BellFunctional> {
    let mut terms = BTreeMap::new();
    for t in f.terms() {
        map(&t.inputs, &t.outputs, t.coeff, &mut |idx, c| {
            terms.insert(idx, c);
        });
    }
    Ok(BellFunctional::from_parts(scenario, terms, f.offset()))
}

fn check_party(scenario: &Scenario, party: usize) -> Result<()> {
    if party >= scenario.parties() {
        return Err(Error::InvalidLifting(format!(
            "party {party} does not exist ({} parties)",
            scenario.parties()
        )));
    }
    Ok(())
}

fn check_outcome(scenario: &Scenario, party: usize, input: usize, outcome: usize) -> Result<()> {
    check_party(scenario, party)?;
    if input >= scenario.inputs(party) {
        return Err(Error::InvalidLifting(format!(
            "party {party} has no input {input}"
        )));
    }
    if outcome >= scenario.outcomes(party, input) {
        return Err(Error::InvalidLifting(format!(
            "party {party} input {input} has no outcome {outcome}"
        )));
    }
    Ok(())
}

/// Same coefficients in a scenario where `party` has the input list
/// `new_inputs` (outcome counts per input). Existing inputs must keep their
/// outcome counts; added inputs carry no coefficients.
pub fn lift_input(f: &BellFunctional, party: usize, new_inputs: &[usize]) -> Result<BellFunctional> {
    let old = f.scenario();
    check_party(old, party)?;
    let current = &old.outcome_table()[party];
    if new_inputs.len() < current.len() {
        return Err(Error::InvalidLifting(format!(
            "input lifting cannot remove inputs ({} -> {})",
            current.len(),
            new_inputs.len()
        )));
    }
    if new_inputs[..current.len()] != current[..] {
        return Err(Error::InvalidLifting(format!(
            "existing outcome counts {current:?} changed to {:?}",
            &new_inputs[..current.len()]
        )));
    }
    let mut table = old.outcome_table().to_vec();
    table[party] = new_inputs.to_vec();
    let scenario = Scenario::new(table)?;
    let target = scenario.clone();
    rebuild(scenario, f, |j, k, c, put| {
        put(target.index(j, k).expect("old indices stay valid"), c)
    })
}

/// Adds a new last outcome `u` to `(party, input)` whose coefficients copy
/// those of outcome `outcome`.
pub fn lift_outcome(f: &BellFunctional, party: usize, input: usize, outcome: usize) -> Result<BellFunctional> {
    let old = f.scenario();
    check_outcome(old, party, input, outcome)?;
    let new_label = old.outcomes(party, input);
    let mut table = old.outcome_table().to_vec();
    table[party][input] += 1;
    let scenario = Scenario::new(table)?;
    let target = scenario.clone();
    rebuild(scenario, f, |j, k, c, put| {
        put(target.index(j, k).expect("old indices stay valid"), c);
        if j[party] == input && k[party] == outcome {
            let mut k2 = k.to_vec();
            k2[party] = new_label;
            put(target.index(j, &k2).expect("lifted label is valid"), c);
        }
    })
}

/// How [`lift_party`] treats a functional whose local bound is not zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalBoundCheck {
    /// Compute the local bound and refuse unless it is zero.
    #[default]
    Require,
    /// Shift the functional to a zero local bound first.
    AutoShift,
    /// Trust the caller.
    Skip,
}

/// Appends a party with outcome counts `outcomes` and attaches every
/// coefficient to the terms where the new party inputs `anchor.0` and
/// outputs `anchor.1`. A constant offset is folded into the coefficients
/// before lifting.
pub fn lift_party(f: &BellFunctional, outcomes: &[usize], anchor: (usize, usize), check: LocalBoundCheck) -> Result<BellFunctional> {
    let (z, c) = anchor;
    if z >= outcomes.len() || outcomes.iter().any(|&d| d == 0) || c >= outcomes[z] {
        return Err(Error::InvalidLifting(format!(
            "anchor ({z}, {c}) is not valid for outcome counts {outcomes:?}"
        )));
    }
    let seed = match check {
        LocalBoundCheck::Skip => f.fold_offset(),
        LocalBoundCheck::Require | LocalBoundCheck::AutoShift => {
            let bound = local_bound(f)?.value;
            if bound.is_zero() || (!bound.is_exact() && bound.to_f64().abs() <= 1e-12) {
                f.fold_offset()
            } else if check == LocalBoundCheck::AutoShift {
                f.fold_offset().shift_to_zero_local_bound(bound)
            } else {
                return Err(Error::NonzeroLocalBound(bound.to_string()));
            }
        }
    };
    let mut table = seed.scenario().outcome_table().to_vec();
    table.push(outcomes.to_vec());
    let scenario = Scenario::new(table)?;
    let target = scenario.clone();
    rebuild(scenario, &seed, |j, k, coeff, put| {
        let mut j2 = j.to_vec();
        j2.push(z);
        let mut k2 = k.to_vec();
        k2.push(c);
        put(target.index(&j2, &k2).expect("anchor validated"), coeff)
    })
}

/// Merges outcome `merged` into `keep` at `(party, input)`:
/// `P̃(…keep…) = P(…keep…) + P(…merged…)`. The merged label is removed and
/// later labels shift down by one.
pub fn coarse_grain(p: &Correlation, party: usize, input: usize, keep: usize, merged: usize) -> Result<Correlation> {
    let old = p.scenario();
    check_outcome(old, party, input, keep)?;
    check_outcome(old, party, input, merged)?;
    if keep == merged {
        return Err(Error::InvalidLifting("cannot merge an outcome with itself".into()));
    }
    let mut table = old.outcome_table().to_vec();
    table[party][input] -= 1;
    let scenario = Scenario::new(table)?;
    let mut probs = vec![0.0; scenario.len()];
    for (j, mut k, i) in old.entries() {
        if j[party] == input {
            if k[party] == merged {
                k[party] = keep;
            }
            if k[party] > merged {
                k[party] -= 1;
            }
        }
        probs[scenario.index(&j, &k).expect("relabelled outcome is valid")] += p.probs()[i];
    }
    Correlation::new(scenario, probs)
}

/// Splits outcome `outcome` at `(party, input)` into itself (weight `ratio`)
/// and a new last outcome (weight `1 − ratio`).
pub fn split_outcome(p: &Correlation, party: usize, input: usize, outcome: usize, ratio: f64) -> Result<Correlation> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::OutOfRange(format!("split ratio {ratio} outside [0, 1]")));
    }
    split_outcome_with(p, party, input, outcome, |_, _| ratio)
}

/// Per-entry splitting: `ratio(inputs, outputs)` is evaluated on each entry
/// whose `party` output is `outcome` at `input` and must lie in `[0, 1]`.
/// Entry-dependent ratios may break nonsignaling.
pub fn split_outcome_with(p: &Correlation, party: usize, input: usize, outcome: usize, mut ratio: impl FnMut(&[usize], &[usize]) -> f64) -> Result<Correlation> {
    let old = p.scenario();
    check_outcome(old, party, input, outcome)?;
    let new_label = old.outcomes(party, input);
    let mut table = old.outcome_table().to_vec();
    table[party][input] += 1;
    let scenario = Scenario::new(table)?;
    let mut probs = vec![0.0; scenario.len()];
    for (j, k, i) in old.entries() {
        let value = p.probs()[i];
        let target = scenario.index(&j, &k).expect("old indices stay valid");
        if j[party] == input && k[party] == outcome {
            let r = ratio(&j, &k);
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::OutOfRange(format!("split ratio {r} outside [0, 1]")));
            }
            let mut k2 = k.clone();
            k2[party] = new_label;
            probs[target] = r * value;
            probs[scenario.index(&j, &k2).expect("new label is valid")] = (1.0 - r) * value;
        } else {
            probs[target] = value;
        }
    }
    Correlation::new(scenario, probs)
}

/// Conditions on `party` having input `anchor.0` and output `anchor.1`:
/// returns `P(k c'|j z') / P(c'|z')` over the remaining parties together
/// with the marginal `P(c'|z')`, read at the remaining parties' input 0.
pub fn condition_on_party(p: &Correlation, party: usize, anchor: (usize, usize), tol: f64) -> Result<(Correlation, f64)> {
    let old = p.scenario();
    let (z, c) = anchor;
    check_outcome(old, party, z, c)?;
    if old.parties() < 2 {
        return Err(Error::InvalidLifting("cannot condition away the only party".into()));
    }
    let marginal = p.party_marginal(party, z)[c];
    if !(marginal > tol) {
        return Err(Error::VanishingMarginal { marginal, tol });
    }
    let mut table = old.outcome_table().to_vec();
    table.remove(party);
    let scenario = Scenario::new(table)?;
    let cond = Correlation::from_fn(scenario, |j, k| {
        let mut j2 = j.to_vec();
        j2.insert(party, z);
        let mut k2 = k.to_vec();
        k2.insert(party, c);
        p.get(&j2, &k2).expect("indices built from a valid scenario") / marginal
    });
    Ok((cond, marginal))
}

/// Appends a party with outcome counts `outcomes` that answers `output` on
/// every input: `P'(k c|j z) = P(k|j) δ(c, output)`.
pub fn embed_with_deterministic_party(p: &Correlation, outcomes: &[usize], output: usize) -> Result<Correlation> {
    if outcomes.is_empty() || outcomes.iter().any(|&d| output >= d) {
        return Err(Error::InvalidLifting(format!(
            "output {output} is not available on every input of {outcomes:?}"
        )));
    }
    let mut table = p.scenario().outcome_table().to_vec();
    table.push(outcomes.to_vec());
    let scenario = Scenario::new(table)?;
    let n = p.scenario().parties();
    Ok(Correlation::from_fn(scenario, |j, k| {
        if k[n] == output {
            p.get(&j[..n], &k[..n]).expect("prefix indices are valid")
        } else {
            0.0
        }
    }))
}

/// A step of a lifting pipeline, as read from JSON descriptors such as
/// `{"op":"outcome","party":1,"input":0,"outcome":0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum LiftStep {
    Input {
        party: usize,
        inputs: Vec<usize>,
    },
    Outcome {
        party: usize,
        input: usize,
        outcome: usize,
    },
    Party {
        anchor: (usize, usize),
        outcomes: Vec<usize>,
        #[serde(default)]
        check: LocalBoundCheck,
    },
    /// Shift to a zero local bound; `by` defaults to the computed local bound.
    Shift {
        #[serde(default)]
        by: Option<Coeff>,
    },
}

impl LiftStep {
    pub fn apply(&self, f: &BellFunctional) -> Result<BellFunctional> {
        match self {
            LiftStep::Input { party, inputs } => lift_input(f, *party, inputs),
            LiftStep::Outcome {
                party,
                input,
                outcome,
            } => lift_outcome(f, *party, *input, *outcome),
            LiftStep::Party {
                anchor,
                outcomes,
                check,
            } => lift_party(f, outcomes, *anchor, *check),
            LiftStep::Shift { by } => {
                let by = match by {
                    Some(c) => *c,
                    None => local_bound(f)?.value,
                };
                Ok(f.shift_to_zero_local_bound(by))
            }
        }
    }
}

pub fn apply_steps(f: &BellFunctional, steps: &[LiftStep]) -> Result<BellFunctional> {
    steps.iter().try_fold(f.clone(), |acc, step| step.apply(&acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::chsh;

    #[test]
    fn input_lift_identity_and_errors() {
        let b = chsh();
        assert_eq!(lift_input(&b, 1, &[2, 2]).unwrap(), b);
        assert!(lift_input(&b, 1, &[2]).is_err());
        assert!(lift_input(&b, 1, &[3, 2, 2]).is_err());
        assert!(lift_input(&b, 2, &[2, 2, 2]).is_err());
        let li = lift_input(&b, 1, &[2, 2, 2]).unwrap();
        assert_eq!(li.scenario().len(), 24);
        assert_eq!(li.num_terms(), 16);
        assert!(li.coeff(&[0, 2], &[0, 0]).unwrap().is_zero());
    }

    #[test]
    fn outcome_lift_copies_coefficients() {
        let lo = lift_outcome(&chsh(), 1, 0, 0).unwrap();
        let lo = lift_outcome(&lo, 1, 1, 0).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    let sign = if (x * y + a) % 2 == 0 { 1 } else { -1 };
                    assert_eq!(lo.coeff(&[x, y], &[a, 2]).unwrap(), Coeff::int(sign));
                    for b in 0..2 {
                        assert_eq!(
                            lo.coeff(&[x, y], &[a, b]).unwrap(),
                            chsh().coeff(&[x, y], &[a, b]).unwrap()
                        );
                    }
                }
            }
        }
        assert!(lift_outcome(&chsh(), 1, 0, 2).is_err());
    }

    #[test]
    fn party_lift_needs_zero_local_bound() {
        let err = lift_party(&chsh(), &[2, 2], (0, 0), LocalBoundCheck::Require).unwrap_err();
        assert!(matches!(err, Error::NonzeroLocalBound(_)));
        let auto = lift_party(&chsh(), &[2, 2], (0, 0), LocalBoundCheck::AutoShift).unwrap();
        let shifted = chsh().shift_to_zero_local_bound(Coeff::int(2));
        let manual = lift_party(&shifted, &[2, 2], (0, 0), LocalBoundCheck::Require).unwrap();
        assert_eq!(auto, manual);
        assert!(lift_party(&shifted, &[2, 2], (2, 0), LocalBoundCheck::Skip).is_err());
        assert!(lift_party(&shifted, &[2, 2], (0, 2), LocalBoundCheck::Skip).is_err());
    }

    #[test]
    fn party_lift_anchor_relabels() {
        let shifted = chsh().shift_to_zero_local_bound(Coeff::int(2));
        let at11 = lift_party(&shifted, &[2, 2], (1, 1), LocalBoundCheck::Skip).unwrap();
        for t in at11.terms() {
            assert_eq!((t.inputs[2], t.outputs[2]), (1, 1));
            assert_eq!(
                t.coeff,
                shifted.coeff(&t.inputs[..2], &t.outputs[..2]).unwrap()
            );
        }
        assert_eq!(at11.num_terms(), 16);
    }

    #[test]
    fn zero_mass_merge_keeps_entries() {
        let b = chsh();
        let p = crate::qmodel::tsirelson_model().correlation();
        let split = split_outcome(&p, 1, 0, 0, 1.0).unwrap();
        let merged = coarse_grain(&split, 1, 0, 0, 2).unwrap();
        assert_eq!(merged, p);
        assert!((b.value(&merged).unwrap() - b.value(&p).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn conditioning_rejects_vanishing_marginal() {
        let p = crate::qmodel::tsirelson_model().correlation();
        let e = embed_with_deterministic_party(&p, &[2, 2], 0).unwrap();
        let err = condition_on_party(&e, 2, (0, 1), CONDITION_TOL).unwrap_err();
        assert!(matches!(err, Error::VanishingMarginal { .. }));
        let (back, m) = condition_on_party(&e, 2, (1, 0), CONDITION_TOL).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
        assert!(back.probs().iter().zip(p.probs()).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn uniform_tripartite_marginal() {
        let s = Scenario::new(vec![vec![2, 2]; 3]).unwrap();
        let (cond, m) = condition_on_party(&Correlation::uniform(s), 2, (0, 0), CONDITION_TOL).unwrap();
        assert!((m - 0.5).abs() < 1e-15);
        assert!(cond.is_valid(1e-12));
    }

    #[test]
    fn descriptors_parse() {
        let steps: Vec<LiftStep> = serde_json::from_str(
            r#"[{"op":"outcome","party":1,"input":0,"outcome":0},
                {"op":"input","party":1,"inputs":[3,2,2]},
                {"op":"shift"},
                {"op":"party","anchor":[0,0],"outcomes":[2,2]}]"#,
        )
        .unwrap();
        assert_eq!(steps.len(), 4);
        let lifted = apply_steps(&chsh(), &steps).unwrap();
        assert_eq!(lifted.scenario().parties(), 3);
        assert!(apply_steps(&chsh(), &[]).unwrap() == chsh());
    }
}
