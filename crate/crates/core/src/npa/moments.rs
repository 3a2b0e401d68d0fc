use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::word::{canonicalize, Symbol, Word};
use crate::bell::{BellFunctional, Scenario};
use crate::error::{Error, Result};
use crate::qmodel::{identity, CMatrix, QuantumModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseLevel {
    One,
    /// Level one plus products of projectors of two different parties.
    OnePlusAb,
    Two,
}

/// A level of the hierarchy plus optional extra words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub base: BaseLevel,
    pub extra: Vec<Word>,
}

impl Level {
    pub fn new(base: BaseLevel) -> Self {
        Self { base, extra: Vec::new() }
    }

    pub fn with_extra(mut self, extra: impl IntoIterator<Item = Word>) -> Self {
        self.extra.extend(extra);
        self
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let base = match s.trim().to_ascii_lowercase().as_str() {
            "1" => BaseLevel::One,
            "1+ab" => BaseLevel::OnePlusAb,
            "2" => BaseLevel::Two,
            _ => return Err(Error::UnknownLevel(s.to_string())),
        };
        Ok(Level::new(base))
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.base {
            BaseLevel::One => "1",
            BaseLevel::OnePlusAb => "1+AB",
            BaseLevel::Two => "2",
        };
        if self.extra.is_empty() {
            write!(f, "{base}")
        } else {
            write!(f, "{base} (+{} words)", self.extra.len())
        }
    }
}

/// Independent projectors: every outcome but the last of each input.
pub fn projectors(s: &Scenario) -> Vec<Symbol> {
    let mut out = Vec::new();
    for p in 0..s.parties() {
        for x in 0..s.inputs(p) {
            for k in 0..s.outcomes(p, x) - 1 {
                out.push(Symbol::new(p, x, k));
            }
        }
    }
    out
}

/// Sorted, deduplicated canonical words; always contains the identity.
pub fn generate_words(s: &Scenario, level: &Level) -> Vec<Word> {
    let syms = projectors(s);
    let mut words = BTreeSet::new();
    words.insert(Word::identity());
    words.extend(syms.iter().map(|&x| Word::symbol(x)));
    match level.base {
        BaseLevel::One => {}
        BaseLevel::OnePlusAb => {
            for a in &syms {
                for b in syms.iter().filter(|b| b.party > a.party) {
                    words.extend(canonicalize(&[*a, *b]));
                }
            }
        }
        BaseLevel::Two => {
            for a in &syms {
                for b in &syms {
                    words.extend(canonicalize(&[*a, *b]));
                }
            }
        }
    }
    words.extend(level.extra.iter().filter_map(|w| canonicalize(w.symbols())));
    words.into_iter().collect()
}

/// Moment-matrix skeleton: `Γ(u, v) = ⟨u† v⟩` grouped into classes of equal
/// moments. Entries whose product vanishes carry no class.
#[derive(Clone, Debug)]
pub struct MomentStructure {
    words: Vec<Word>,
    classes: Vec<Word>,
    lookup: HashMap<Word, usize>,
    index: Vec<Option<usize>>,
    identity: usize,
}

impl MomentStructure {
    pub fn new(words: Vec<Word>) -> Self {
        let mut words = words;
        words.sort();
        words.dedup();
        if words.first().is_none_or(|w| !w.is_identity()) {
            words.insert(0, Word::identity());
        }
        let n = words.len();
        let mut keys = vec![None; n * n];
        let mut set = BTreeSet::new();
        for i in 0..n {
            for j in i..n {
                if let Some(w) = words[i].adjoint().mul(&words[j]) {
                    let key = w.moment_key();
                    set.insert(key.clone());
                    keys[i * n + j] = Some(key);
                }
            }
        }
        let classes: Vec<Word> = set.into_iter().collect();
        let lookup: HashMap<Word, usize> = classes.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut index = vec![None; n * n];
        for i in 0..n {
            for j in i..n {
                if let Some(key) = &keys[i * n + j] {
                    let c = lookup[key];
                    index[i * n + j] = Some(c);
                    index[j * n + i] = Some(c);
                }
            }
        }
        let identity = lookup[&Word::identity()];
        Self {
            words,
            classes,
            lookup,
            index,
            identity,
        }
    }

    pub fn for_level(s: &Scenario, level: &Level) -> Self {
        Self::new(generate_words(s, level))
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn classes(&self) -> &[Word] {
        &self.classes
    }

    pub fn identity_class(&self) -> usize {
        self.identity
    }

    pub fn class(&self, i: usize, j: usize) -> Option<usize> {
        self.index[i * self.words.len() + j]
    }

    /// Class holding the moment of `w` (any word; canonicalized here).
    pub fn class_of(&self, w: &Word) -> Option<usize> {
        let c = canonicalize(w.symbols())?;
        self.lookup.get(&c.moment_key()).copied()
    }

    /// `Γ` for a moment assignment indexed by class.
    pub fn matrix(&self, moments: &[f64]) -> DMatrix<f64> {
        let n = self.size();
        DMatrix::from_fn(n, n, |i, j| self.class(i, j).map_or(0.0, |c| moments[c]))
    }
}

/// `Σ_w c_w ⟨w⟩ + constant`, keyed by moment representatives.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MomentLinearFunctional {
    terms: BTreeMap<Word, f64>,
    constant: f64,
}

impl MomentLinearFunctional {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    /// Adds `c ⟨symbols⟩`; vanishing products are dropped.
    pub fn add_term(&mut self, symbols: &[Symbol], c: f64) {
        let Some(w) = canonicalize(symbols) else { return };
        if w.is_identity() {
            self.constant += c;
        } else {
            *self.terms.entry(w.moment_key()).or_insert(0.0) += c;
        }
    }

    pub fn add_constant(&mut self, c: f64) {
        self.constant += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, f64)> {
        self.terms.iter().filter(|(_, c)| **c != 0.0).map(|(w, &c)| (w, c))
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), s * c)).collect(),
            constant: s * self.constant,
        }
    }

    pub fn add(&self, other: &Self, s: f64) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            *out.terms.entry(w.clone()).or_insert(0.0) += s * c;
        }
        out.constant += s * other.constant;
        out
    }

    pub fn evaluate(&self, moment: impl Fn(&Word) -> f64) -> f64 {
        self.terms().map(|(w, c)| c * moment(w)).sum::<f64>() + self.constant
    }

    pub fn evaluate_model(&self, model: &QuantumModel) -> f64 {
        self.evaluate(|w| model_moment(model, w).re)
    }

    /// Class-indexed coefficients; fails if a word has no class.
    pub fn dense(&self, structure: &MomentStructure) -> Result<Vec<f64>> {
        let mut out = vec![0.0; structure.classes().len()];
        out[structure.identity_class()] += self.constant;
        for (w, c) in self.terms() {
            let k = structure.class_of(w).ok_or_else(|| Error::MissingMoment(w.to_string()))?;
            out[k] += c;
        }
        Ok(out)
    }

    pub fn max_word_len(&self) -> usize {
        self.terms().map(|(w, _)| w.len()).max().unwrap_or(0)
    }
}

/// Rewrites each probability as a product of projectors, eliminating the
/// last outcome of every input through `M_last = 1 − Σ_k M_k`.
pub fn functional_to_moments(f: &BellFunctional) -> MomentLinearFunctional {
    let s = f.scenario();
    let mut out = MomentLinearFunctional::constant(f.offset().to_f64());
    for t in f.terms() {
        let c = t.coeff.to_f64();
        if c == 0.0 {
            continue;
        }
        let mut poly: Vec<(Vec<Symbol>, f64)> = vec![(Vec::new(), c)];
        for (p, (&x, &k)) in t.inputs.iter().zip(&t.outputs).enumerate() {
            let d = s.outcomes(p, x);
            let factor: Vec<(Option<Symbol>, f64)> = if k + 1 < d {
                vec![(Some(Symbol::new(p, x, k)), 1.0)]
            } else {
                std::iter::once((None, 1.0))
                    .chain((0..d - 1).map(|k2| (Some(Symbol::new(p, x, k2)), -1.0)))
                    .collect()
            };
            poly = poly
                .into_iter()
                .flat_map(|(w, cw)| {
                    factor.iter().map(move |&(sym, cf)| {
                        let mut w2 = w.clone();
                        w2.extend(sym);
                        (w2, cw * cf)
                    })
                })
                .collect();
        }
        for (w, cw) in poly {
            out.add_term(&w, cw);
        }
    }
    out
}

/// `⟨w⟩ = tr(ρ ⊗_p Π_{s ∈ w_p} M_s)` on an explicit model.
pub fn model_moment(model: &QuantumModel, w: &Word) -> crate::qmodel::C64 {
    let ops: Vec<CMatrix> = (0..model.dims().len())
        .map(|p| {
            w.party(p)
                .iter()
                .fold(identity(model.dims()[p]), |acc, s| acc * model.element(p, s.input, s.outcome))
        })
        .collect();
    model.expectation(&ops)
}

/// Real parts of the class moments of an explicit model.
pub fn moments_from_model(structure: &MomentStructure, model: &QuantumModel) -> Vec<f64> {
    structure.classes().iter().map(|w| model_moment(model, w).re).collect()
}
