use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::bell::Scenario;
use crate::error::{Error, Result};
use crate::npa::{MomentLinearFunctional, Symbol, Word};
use crate::qmodel::C64;

const PRUNE: f64 = 1e-15;
const IMAG_TOL: f64 = 1e-12;

/// Noncommutative polynomial in projector symbols with complex coefficients.
/// Words are canonical, so products respect idempotence, orthogonality and
/// commutation between parties.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OperatorPolynomial {
    terms: BTreeMap<Word, C64>,
}

impl OperatorPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(C64::new(1.0, 0.0))
    }

    pub fn scalar(c: C64) -> Self {
        let mut p = Self::zero();
        p.add_term(Word::identity(), c);
        p
    }

    pub fn word(w: Word) -> Self {
        let mut p = Self::zero();
        p.add_term(w, C64::new(1.0, 0.0));
        p
    }

    /// `M_{outcome|input}` of `party`, with the last outcome written as
    /// `1 − Σ_k M_k`.
    pub fn projector(s: &Scenario, party: usize, input: usize, outcome: usize) -> Result<Self> {
        if party >= s.parties() || input >= s.inputs(party) || outcome >= s.outcomes(party, input) {
            return Err(Error::InvalidIndex(format!(
                "projector ({party}, {input}, {outcome}) is not in the scenario"
            )));
        }
        let d = s.outcomes(party, input);
        if outcome + 1 < d {
            return Ok(Self::word(Word::symbol(Symbol::new(party, input, outcome))));
        }
        let mut p = Self::one();
        for k in 0..d - 1 {
            p = p - Self::word(Word::symbol(Symbol::new(party, input, k)));
        }
        Ok(p)
    }

    fn add_term(&mut self, w: Word, c: C64) {
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                if c.norm() > PRUNE {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().norm() <= PRUNE {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, C64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn adjoint(&self) -> Self {
        let mut p = Self::zero();
        for (w, c) in &self.terms {
            p.add_term(w.adjoint(), c.conj());
        }
        p
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut p = Self::zero();
        for (w, c) in &self.terms {
            p.add_term(w.clone(), c * s);
        }
        p
    }

    /// Expectation functional on real moments. Fails if a coefficient keeps
    /// an imaginary part, which a real moment matrix cannot represent.
    pub fn to_moments(&self) -> Result<MomentLinearFunctional> {
        let mut out = MomentLinearFunctional::new();
        for (w, c) in &self.terms {
            if c.im.abs() > IMAG_TOL {
                return Err(Error::ComplexFunctional(c.im.abs()));
            }
            out.add_term(w.symbols(), c.re);
        }
        Ok(out)
    }

    /// `(p + p†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (self.clone() + self.adjoint()).scale(C64::new(0.5, 0.0))
    }
}

impl Add for OperatorPolynomial {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (w, c) in rhs.terms {
            self.add_term(w, c);
        }
        self
    }
}

impl Sub for OperatorPolynomial {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for OperatorPolynomial {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn mul(self, rhs: Self) -> OperatorPolynomial {
        let mut p = OperatorPolynomial::zero();
        for (u, a) in &self.terms {
            for (v, b) in &rhs.terms {
                if let Some(w) = u.mul(v) {
                    p.add_term(w, a * b);
                }
            }
        }
        p
    }
}
