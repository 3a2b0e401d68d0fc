//! JSON file formats for functionals and correlations.
//!
//! Functional:
//! ```json
//! { "scenario": [[2, 2], [3, 3]], "offset": 0,
//!   "terms": [ { "inputs": [0, 1], "outputs": [1, 2], "coeff": "-1/2" } ] }
//! ```
//! Coefficients are JSON numbers or `"p/q"` strings. Correlations carry the
//! same `scenario` header plus a flat `probabilities` array in layout order.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::coeff::Coeff;
use super::correlation::Correlation;
use super::functional::{BellFunctional, Term};
use super::scenario::Scenario;
use crate::error::Result;

#[derive(Serialize, Deserialize)]
struct TermRecord {
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    coeff: Coeff,
}

#[derive(Serialize, Deserialize)]
struct FunctionalRecord {
    scenario: Scenario,
    #[serde(default)]
    offset: Coeff,
    terms: Vec<TermRecord>,
}

#[derive(Serialize, Deserialize)]
struct CorrelationRecord {
    scenario: Scenario,
    probabilities: Vec<f64>,
}

pub fn functional_from_json(text: &str) -> Result<BellFunctional> {
    let rec: FunctionalRecord = serde_json::from_str(text)?;
    let terms = rec
        .terms
        .into_iter()
        .map(|t| Term {
            inputs: t.inputs,
            outputs: t.outputs,
            coeff: t.coeff,
        })
        .collect();
    BellFunctional::from_terms(rec.scenario, terms, rec.offset)
}

/// Pretty JSON with terms in layout order.
pub fn functional_to_json(f: &BellFunctional) -> String {
    let rec = FunctionalRecord {
        scenario: f.scenario().clone(),
        offset: f.offset(),
        terms: f
            .terms()
            .map(|t| TermRecord {
                inputs: t.inputs,
                outputs: t.outputs,
                coeff: t.coeff,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&rec).expect("functional serializes");
    s.push('\n');
    s
}

pub fn correlation_from_json(text: &str) -> Result<Correlation> {
    let rec: CorrelationRecord = serde_json::from_str(text)?;
    Correlation::new(rec.scenario, rec.probabilities)
}

pub fn correlation_to_json(p: &Correlation) -> String {
    let rec = CorrelationRecord {
        scenario: p.scenario().clone(),
        probabilities: p.probs().to_vec(),
    };
    let mut s = serde_json::to_string_pretty(&rec).expect("correlation serializes");
    s.push('\n');
    s
}

pub fn read_functional(path: impl AsRef<Path>) -> Result<BellFunctional> {
    functional_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_functional(path: impl AsRef<Path>, f: &BellFunctional) -> Result<()> {
    Ok(std::fs::write(path, functional_to_json(f))?)
}

pub fn read_correlation(path: impl AsRef<Path>) -> Result<Correlation> {
    correlation_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_correlation(path: impl AsRef<Path>, p: &Correlation) -> Result<()> {
    Ok(std::fs::write(path, correlation_to_json(p))?)
}
