use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};

use super::poly::OperatorPolynomial;
use crate::bell::Scenario;
use crate::error::{Error, Result};
use crate::npa::MomentLinearFunctional;
use crate::qmodel::C64;

/// Square matrix over a trusted auxiliary register whose entries are
/// operators on the untrusted system.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxOperator {
    dim: usize,
    entries: Vec<OperatorPolynomial>,
}

impl AuxOperator {
    pub fn from_entries(dim: usize, entries: Vec<OperatorPolynomial>) -> Self {
        assert_eq!(entries.len(), dim * dim, "aux operator needs dim² entries");
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &OperatorPolynomial {
        &self.entries[row * self.dim + col]
    }

    pub fn mul(&self, rhs: &AuxOperator) -> AuxOperator {
        let n = self.dim;
        let entries = (0..n * n)
            .map(|idx| {
                let (r, c) = (idx / n, idx % n);
                (0..n).fold(OperatorPolynomial::zero(), |acc, k| acc + self.get(r, k) * rhs.get(k, c))
            })
            .collect();
        AuxOperator { dim: n, entries }
    }

    /// `Σ_r self[s, r] φ_r` for each `s`: the operators attached to `|s⟩`
    /// when the register starts in `|φ⟩`.
    pub fn apply(&self, phi: &[C64]) -> Vec<OperatorPolynomial> {
        (0..self.dim)
            .map(|s| {
                (0..self.dim).fold(OperatorPolynomial::zero(), |acc, r| acc + self.get(s, r).scale(phi[r]))
            })
            .collect()
    }
}

/// `Φ = U V U` with `U = 1⊗|0⟩⟨0| + (1 − 2M_{1|1})⊗|1⟩⟨1|` and
/// `V = (1 − M_{1|0})⊗1 + M_{1|0}⊗σ_x`, built from the party's outcome-1
/// projectors on inputs 0 and 1.
pub fn build_swap(s: &Scenario, party: usize) -> Result<AuxOperator> {
    if party >= s.parties() || s.inputs(party) < 2 || s.outcomes(party, 0) < 2 || s.outcomes(party, 1) < 2 {
        return Err(Error::ScenarioMismatch(format!(
            "party {party} needs two inputs with at least two outcomes each"
        )));
    }
    let one = OperatorPolynomial::one;
    let m0 = OperatorPolynomial::projector(s, party, 0, 1)?;
    let m1 = OperatorPolynomial::projector(s, party, 1, 1)?;
    let u = AuxOperator::from_entries(
        2,
        vec![
            one(),
            OperatorPolynomial::zero(),
            OperatorPolynomial::zero(),
            one() - m1.scale(C64::new(2.0, 0.0)),
        ],
    );
    let v = AuxOperator::from_entries(2, vec![one() - m0.clone(), m0.clone(), m0.clone(), one() - m0]);
    Ok(u.mul(&v).mul(&u))
}

/// Reference state `cos(π/8)(|00⟩ − |11⟩)/√2 + sin(π/8)(|01⟩ + |10⟩)/√2`
/// in the basis order `00, 01, 10, 11`.
pub fn reference_state() -> [C64; 4] {
    let c = FRAC_PI_8.cos() * FRAC_1_SQRT_2;
    let s = FRAC_PI_8.sin() * FRAC_1_SQRT_2;
    [C64::new(c, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-c, 0.0)]
}

/// `⟨ψ|ρ^SWAP|ψ⟩` where both registers start in `|0⟩` and parties 0 and 1
/// apply their swaps.
pub fn fidelity_functional(s: &Scenario, psi: &[C64; 4]) -> Result<MomentLinearFunctional> {
    let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::OutOfRange(format!("reference state has norm² {norm}")));
    }
    let zero = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let ka = build_swap(s, 0)?.apply(&zero);
    let kb = build_swap(s, 1)?.apply(&zero);
    let mut total = OperatorPolynomial::zero();
    for s_ in 0..2 {
        for t in 0..2 {
            for s2 in 0..2 {
                for t2 in 0..2 {
                    let c = psi[2 * s_ + t].conj() * psi[2 * s2 + t2];
                    if c.norm() == 0.0 {
                        continue;
                    }
                    let a = &ka[s2].adjoint() * &ka[s_];
                    let b = &kb[t2].adjoint() * &kb[t];
                    total = total + (&a * &b).scale(c);
                }
            }
        }
    }
    total.to_moments()
}

/// Probability of `outcome` for `input` of `party` after its swap moves the
/// register state `|φ⟩` into the untrusted system.
pub fn outcome_probability_functional(
    s: &Scenario,
    party: usize,
    outcome: usize,
    input: usize,
    phi: &[C64; 2],
) -> Result<MomentLinearFunctional> {
    let m = OperatorPolynomial::projector(s, party, input, outcome)?;
    let c = build_swap(s, party)?.apply(phi);
    let total = c
        .iter()
        .fold(OperatorPolynomial::zero(), |acc, cs| acc + &(&cs.adjoint() * &m) * cs);
    total.to_moments()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuxState {
    Zero,
    One,
    Plus,
    Minus,
}

impl AuxState {
    pub fn amplitudes(self) -> [C64; 2] {
        let h = FRAC_1_SQRT_2;
        let [a, b] = match self {
            AuxState::Zero => [1.0, 0.0],
            AuxState::One => [0.0, 1.0],
            AuxState::Plus => [h, h],
            AuxState::Minus => [h, -h],
        };
        [C64::new(a, 0.0), C64::new(b, 0.0)]
    }
}

fn figure_of_merit(
    s: &Scenario,
    party: usize,
    probes: &[(usize, usize, AuxState)],
    weight: f64,
) -> Result<MomentLinearFunctional> {
    let mut total = MomentLinearFunctional::constant(-1.0);
    for &(outcome, input, state) in probes {
        let p = outcome_probability_functional(s, party, outcome, input, &state.amplitudes())?;
        total = total.add(&p, weight);
    }
    Ok(total)
}

/// Alice's measurement figure of merit, in `[−1, 1]`.
pub fn tau_functional(s: &Scenario) -> Result<MomentLinearFunctional> {
    use AuxState::*;
    figure_of_merit(s, 0, &[(0, 0, Zero), (1, 0, One), (0, 1, Plus), (1, 1, Minus)], 0.5)
}

/// Bob's figure of merit over all three outcomes, with outcome 2 expected
/// on the same eigenstate as outcome 0.
pub fn tau3_functional(s: &Scenario) -> Result<MomentLinearFunctional> {
    use AuxState::*;
    check_three_outcomes(s)?;
    figure_of_merit(
        s,
        1,
        &[(0, 0, Zero), (1, 0, One), (2, 0, Zero), (0, 1, Plus), (1, 1, Minus), (2, 1, Plus)],
        0.5,
    )
}

/// Bob's figure of merit for the outcome-1 elements alone.
pub fn tau1_functional(s: &Scenario) -> Result<MomentLinearFunctional> {
    use AuxState::*;
    check_three_outcomes(s)?;
    figure_of_merit(s, 1, &[(1, 0, One), (1, 1, Minus)], 1.0)
}

fn check_three_outcomes(s: &Scenario) -> Result<()> {
    if s.parties() < 2 || s.inputs(1) < 2 || s.outcomes(1, 0) != 3 || s.outcomes(1, 1) != 3 {
        return Err(Error::ScenarioMismatch(
            "Bob needs two three-outcome inputs".into(),
        ));
    }
    Ok(())
}
