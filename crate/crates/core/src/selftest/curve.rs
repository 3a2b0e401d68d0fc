use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::swap::{fidelity_functional, reference_state, tau1_functional, tau3_functional, tau_functional};
use crate::bell::{BellFunctional, Scenario};
use crate::bounds::Sense;
use crate::error::{Error, Result};
use crate::npa::{
    functional_to_moments, generate_words, optimize, Level, MomentConstraint, MomentLinearFunctional,
    MomentStructure, Relaxation, Symbol, Word,
};
use crate::sdp::SdpSettings;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Fidelity,
    Tau,
    Tau3,
    Tau1,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fidelity" => Ok(Metric::Fidelity),
            "tau" => Ok(Metric::Tau),
            "tau3" => Ok(Metric::Tau3),
            "tau1" => Ok(Metric::Tau1),
            _ => Err(Error::Format(format!("unknown metric `{s}` (fidelity, tau, tau3, tau1)"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Fidelity => "fidelity",
            Metric::Tau => "tau",
            Metric::Tau3 => "tau3",
            Metric::Tau1 => "tau1",
        })
    }
}

pub fn metric_functional(metric: Metric, s: &Scenario) -> Result<MomentLinearFunctional> {
    match metric {
        Metric::Fidelity => fidelity_functional(s, &reference_state()),
        Metric::Tau => tau_functional(s),
        Metric::Tau3 => tau3_functional(s),
        Metric::Tau1 => tau1_functional(s),
    }
}

/// How the observed Bell value constrains the relaxation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    /// Bell value equal to the observed one.
    #[default]
    Equality,
    /// Bell value at least the observed one; bounds are monotone in it.
    AtLeast,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equality" => Ok(Mode::Equality),
            "atleast" | "at-least" => Ok(Mode::AtLeast),
            _ => Err(Error::Format(format!("unknown mode `{s}` (equality, atleast)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Equality => "equality",
            Mode::AtLeast => "atleast",
        })
    }
}

fn concat(parts: impl IntoIterator<Item = Symbol>) -> Word {
    crate::npa::canonicalize(&parts.into_iter().collect::<Vec<_>>()).expect("split of a nonzero word")
}

/// Words of `level` plus, for every monomial of `needed` that no entry
/// `u†v` reaches, a pair `(u, v)` with `u†v` equal to it. Per party the
/// monomial is cut at one point; the cut minimizing the longer factor is
/// taken, preferring factors already present, then the first in order.
/// Factors enter together with all their subwords.
pub fn augment_words(s: &Scenario, level: &Level, needed: &[&MomentLinearFunctional]) -> Vec<Word> {
    let mut words: BTreeSet<Word> = generate_words(s, level).into_iter().collect();
    let mut reachable: HashSet<Word> = HashSet::new();
    let product_key = |u: &Word, v: &Word| u.adjoint().mul(v).map(|w| w.moment_key());
    for u in &words {
        for v in &words {
            reachable.extend(product_key(u, v));
        }
    }
    let targets: BTreeSet<Word> = needed.iter().flat_map(|f| f.terms().map(|(w, _)| w.clone())).collect();
    for w in targets {
        if reachable.contains(&w.moment_key()) {
            continue;
        }
        let parts: Vec<&[Symbol]> = (0..s.parties()).map(|p| w.party(p)).collect();
        let mut cut = vec![0usize; parts.len()];
        let mut best: Option<((usize, usize), Word, Word)> = None;
        loop {
            let u = concat(parts.iter().zip(&cut).flat_map(|(p, &i)| p[..i].iter().rev().copied()));
            let v = concat(parts.iter().zip(&cut).flat_map(|(p, &i)| p[i..].iter().copied()));
            let fresh = usize::from(!words.contains(&u)) + usize::from(!words.contains(&v));
            let cost = (u.len().max(v.len()), fresh);
            if best.as_ref().is_none_or(|(c, _, _)| cost < *c) {
                best = Some((cost, u, v));
            }
            if !crate::bell::increment(&mut cut, |p| parts[p].len() + 1) {
                break;
            }
        }
        let (_, u, v) = best.expect("at least one cut");
        for x in subwords(&u).into_iter().chain(subwords(&v)) {
            if words.insert(x.clone()) {
                for y in &words {
                    reachable.extend(product_key(&x, y));
                }
            }
        }
    }
    words.into_iter().collect()
}

/// Every word obtained by deleting symbols, party by party. Keeping these
/// makes the span of the word set independent of which outcome of each
/// input is eliminated.
fn subwords(w: &Word) -> Vec<Word> {
    let syms = w.symbols();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1 << syms.len()) {
        let picked: Vec<Symbol> = (0..syms.len()).filter(|i| mask >> i & 1 == 1).map(|i| syms[i]).collect();
        out.extend(crate::npa::canonicalize(&picked));
    }
    out.into_iter().collect()
}

/// A Bell functional and a metric on a shared moment structure, reusable
/// across observed values.
#[derive(Clone, Debug)]
pub struct SelftestProblem {
    pub structure: MomentStructure,
    pub bell: MomentLinearFunctional,
    pub metric: MomentLinearFunctional,
    pub level: Level,
}

impl SelftestProblem {
    pub fn new(f: &BellFunctional, metric: MomentLinearFunctional, level: &Level) -> Self {
        let bell = functional_to_moments(f);
        let words = augment_words(f.scenario(), level, &[&metric, &bell]);
        Self {
            structure: MomentStructure::new(words),
            bell,
            metric,
            level: level.clone(),
        }
    }

    pub fn base_words(&self, s: &Scenario) -> usize {
        generate_words(s, &self.level).len()
    }

    /// Minimum of the metric given the observed Bell value.
    pub fn solve(&self, observed: f64, mode: Mode, settings: &SdpSettings) -> Result<Relaxation> {
        let constraint = match mode {
            Mode::Equality => MomentConstraint::Equal(self.bell.clone(), observed),
            Mode::AtLeast => MomentConstraint::AtLeast(self.bell.clone(), observed),
        };
        optimize(&self.structure, &self.metric, Sense::Min, &[constraint], settings)
    }
}

pub fn min_metric_at_violation(
    f: &BellFunctional,
    metric: &MomentLinearFunctional,
    observed: f64,
    level: &Level,
    mode: Mode,
    settings: &SdpSettings,
) -> Result<Relaxation> {
    SelftestProblem::new(f, metric.clone(), level).solve(observed, mode, settings)
}

#[derive(Debug)]
pub struct CurvePoint {
    pub bell_value: f64,
    pub result: Result<Relaxation>,
}

/// One relaxation per grid value, solved in parallel, returned in grid order.
pub fn selftest_curve(problem: &SelftestProblem, grid: &[f64], mode: Mode, settings: &SdpSettings) -> Vec<CurvePoint> {
    grid.par_iter()
        .map(|&v| CurvePoint {
            bell_value: v,
            result: problem.solve(v, mode, settings),
        })
        .collect()
}
