//! Finite-dimensional quantum models evaluated through the Born rule.
//!
//! These serve as an oracle independent of every relaxation in the crate:
//! correlations are computed as `tr(⊗_i M_i ρ)` with dense complex matrices.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bell::{Correlation, Scenario};
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for PSD, Hermiticity and completeness checks.
pub const MODEL_TOL: f64 = 1e-9;

/// A state on `⊗_i C^{dims[i]}` and, per party and input, a POVM.
#[derive(Clone, Debug)]
pub struct QuantumModel {
    dims: Vec<usize>,
    state: CMatrix,
    povms: Vec<Vec<Vec<CMatrix>>>,
}

impl QuantumModel {
    pub fn new(dims: Vec<usize>, state: CMatrix, povms: Vec<Vec<Vec<CMatrix>>>) -> Result<Self> {
        let m = Self { dims, state, povms };
        m.validate(MODEL_TOL)?;
        Ok(m)
    }

    /// Model on the pure state `|psi⟩`.
    pub fn from_pure(dims: Vec<usize>, psi: &CVector, povms: Vec<Vec<Vec<CMatrix>>>) -> Result<Self> {
        let state = psi * psi.adjoint();
        Self::new(dims, state, povms)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn state(&self) -> &CMatrix {
        &self.state
    }

    pub fn povms(&self) -> &[Vec<Vec<CMatrix>>] {
        &self.povms
    }

    pub fn element(&self, party: usize, input: usize, outcome: usize) -> &CMatrix {
        &self.povms[party][input][outcome]
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::new(
            self.povms
                .iter()
                .map(|inputs| inputs.iter().map(Vec::len).collect())
                .collect(),
        )
        .expect("validated model has a valid scenario")
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.dims.is_empty() || self.dims.len() != self.povms.len() {
            return Err(Error::InvalidModel(format!(
                "{} local dimensions for {} parties",
                self.dims.len(),
                self.povms.len()
            )));
        }
        let total: usize = self.dims.iter().product();
        if self.state.nrows() != total || self.state.ncols() != total {
            return Err(Error::InvalidModel(format!(
                "state is {}x{}, expected {total}x{total}",
                self.state.nrows(),
                self.state.ncols()
            )));
        }
        check_hermitian_psd(&self.state, tol, "state")?;
        let trace = self.state.trace();
        if (trace.re - 1.0).abs() > tol || trace.im.abs() > tol {
            return Err(Error::InvalidModel(format!("state trace is {trace}")));
        }
        for (p, inputs) in self.povms.iter().enumerate() {
            let d = self.dims[p];
            if inputs.is_empty() {
                return Err(Error::InvalidModel(format!("party {p} has no measurements")));
            }
            for (x, elements) in inputs.iter().enumerate() {
                if elements.is_empty() {
                    return Err(Error::InvalidModel(format!("party {p} input {x} has no outcomes")));
                }
                let mut sum = CMatrix::zeros(d, d);
                for (k, e) in elements.iter().enumerate() {
                    if e.nrows() != d || e.ncols() != d {
                        return Err(Error::InvalidModel(format!(
                            "element ({p},{x},{k}) is {}x{}, local dimension is {d}",
                            e.nrows(),
                            e.ncols()
                        )));
                    }
                    check_hermitian_psd(e, tol, &format!("element ({p},{x},{k})"))?;
                    sum += e;
                }
                let dev = max_abs(&(sum - CMatrix::identity(d, d)));
                if dev > tol {
                    return Err(Error::InvalidModel(format!(
                        "POVM ({p},{x}) misses completeness by {dev:e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `tr(ρ ⊗_i ops[i])`.
    pub fn expectation(&self, ops: &[CMatrix]) -> C64 {
        let joint = kron_all(ops);
        (joint * &self.state).trace()
    }

    /// Born-rule correlation.
    pub fn correlation(&self) -> Correlation {
        let scenario = self.scenario();
        Correlation::from_fn(scenario, |j, k| {
            let ops: Vec<CMatrix> = (0..self.dims.len())
                .map(|p| self.povms[p][j[p]][k[p]].clone())
                .collect();
            self.expectation(&ops).re
        })
    }

    /// Replaces `{b', u}` at `(party, input)` by the single element
    /// `M_b' + M_u`. Outcome `u` disappears and later labels shift down.
    pub fn group_outcomes(&self, party: usize, input: usize, keep: usize, merged: usize) -> Result<Self> {
        let elements = self.measurement(party, input)?;
        if keep == merged || keep >= elements.len() || merged >= elements.len() {
            return Err(Error::InvalidLifting(format!(
                "cannot merge outcome {merged} into {keep} ({} outcomes)",
                elements.len()
            )));
        }
        let mut out = self.clone();
        let slot = &mut out.povms[party][input];
        let extra = slot[merged].clone();
        slot[keep] += extra;
        slot.remove(merged);
        Ok(out)
    }

    /// Splits `M_b'` into `p·M_b'` (kept at `b'`) and `(1−p)·M_b'`, appended
    /// as a new last outcome.
    pub fn split_outcome(&self, party: usize, input: usize, outcome: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("split ratio {p} outside [0, 1]")));
        }
        let elements = self.measurement(party, input)?;
        if outcome >= elements.len() {
            return Err(Error::InvalidLifting(format!(
                "outcome {outcome} at party {party} input {input} does not exist"
            )));
        }
        let mut out = self.clone();
        let slot = &mut out.povms[party][input];
        let original = slot[outcome].clone();
        slot[outcome] = &original * C64::from(p);
        slot.push(original * C64::from(1.0 - p));
        Ok(out)
    }

    fn measurement(&self, party: usize, input: usize) -> Result<&[CMatrix]> {
        self.povms
            .get(party)
            .and_then(|inputs| inputs.get(input))
            .map(Vec::as_slice)
            .ok_or_else(|| Error::InvalidLifting(format!("no measurement ({party}, {input})")))
    }
}

/// Free-function form of [`QuantumModel::correlation`].
pub fn correlation_from_model(model: &QuantumModel) -> Correlation {
    model.correlation()
}

pub fn group_outcomes_model(model: &QuantumModel, party: usize, input: usize, keep: usize, merged: usize) -> Result<QuantumModel> {
    model.group_outcomes(party, input, keep, merged)
}

pub fn split_outcome_model(model: &QuantumModel, party: usize, input: usize, outcome: usize, p: f64) -> Result<QuantumModel> {
    model.split_outcome(party, input, outcome, p)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_hermitian_psd(m: &CMatrix, tol: f64, what: &str) -> Result<()> {
    let asym = max_abs(&(m - m.adjoint()));
    if asym > tol {
        return Err(Error::InvalidModel(format!("{what} is not Hermitian ({asym:e})")));
    }
    let h = (m + m.adjoint()) * C64::from(0.5);
    let min = h.symmetric_eigenvalues().min();
    if min < -tol {
        return Err(Error::InvalidModel(format!(
            "{what} has negative eigenvalue {min:e}"
        )));
    }
    Ok(())
}

pub fn kron_all(ops: &[CMatrix]) -> CMatrix {
    ops.iter()
        .skip(1)
        .fold(ops[0].clone(), |acc, m| acc.kronecker(m))
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn sigma_x() -> CMatrix {
    real_matrix(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
    )
}

pub fn sigma_z() -> CMatrix {
    real_matrix(2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn real_matrix(d: usize, row_major: &[f64]) -> CMatrix {
    CMatrix::from_row_slice(d, d, &row_major.iter().map(|&x| C64::from(x)).collect::<Vec<_>>())
}

/// `[(1 + A)/2, (1 − A)/2]` for a ±1-valued observable; the +1 eigenspace
/// is outcome 0.
pub fn observable_povm(observable: &CMatrix) -> Vec<CMatrix> {
    let d = observable.nrows();
    let half = C64::from(0.5);
    vec![
        (identity(d) + observable) * half,
        (identity(d) - observable) * half,
    ]
}

/// `|φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
pub fn phi_plus() -> CVector {
    let s = C64::from(FRAC_1_SQRT_2);
    CVector::from_vec(vec![s, C64::from(0.0), C64::from(0.0), s])
}

/// Coefficients `(c00, c01, c10, c11)` of the two-qubit reference state
/// `cos(π/8)(|00⟩ − |11⟩)/√2 + sin(π/8)(|01⟩ + |10⟩)/√2`.
pub fn reference_state() -> [C64; 4] {
    let c = FRAC_PI_8.cos() * FRAC_1_SQRT_2;
    let s = FRAC_PI_8.sin() * FRAC_1_SQRT_2;
    [C64::from(c), C64::from(s), C64::from(s), C64::from(-c)]
}

/// Optimal CHSH strategy on `|φ⁺⟩`: Alice measures `σz, σx`, Bob measures
/// `(σz + σx)/√2` and `(σz − σx)/√2`.
pub fn tsirelson_model() -> QuantumModel {
    let r = C64::from(FRAC_1_SQRT_2);
    let bob0 = (sigma_z() + sigma_x()) * r;
    let bob1 = (sigma_z() - sigma_x()) * r;
    QuantumModel::from_pure(
        vec![2, 2],
        &phi_plus(),
        vec![
            vec![observable_povm(&sigma_z()), observable_povm(&sigma_x())],
            vec![observable_povm(&bob0), observable_povm(&bob1)],
        ],
    )
    .expect("Tsirelson model is valid")
}

/// Reference strategy for the outcome-lifted CHSH inequality with the
/// default split `E_0 = 1 − M_1`, `E_2 = 0` of Bob's merged outcome.
pub fn reference_lo_chsh_model() -> QuantumModel {
    reference_lo_chsh_model_with([CMatrix::zeros(2, 2), CMatrix::zeros(2, 2)])
        .expect("default split is valid")
}

/// Reference strategy with Bob's outcome-2 elements `e2[y]`; outcome 0 gets
/// `1 − M_{1|y} − e2[y]`, which must stay PSD.
pub fn reference_lo_chsh_model_with(e2: [CMatrix; 2]) -> Result<QuantumModel> {
    let psi = CVector::from_vec(reference_state().to_vec());
    let alice = vec![observable_povm(&sigma_z()), observable_povm(&sigma_x())];
    let bob = [sigma_z(), sigma_x()]
        .iter()
        .zip(e2)
        .map(|(obs, e2)| {
            let [keep, one]: [CMatrix; 2] = observable_povm(obs).try_into().expect("two elements");
            vec![keep - &e2, one, e2]
        })
        .collect();
    QuantumModel::from_pure(vec![2, 2], &psi, vec![alice, bob])
}

#[derive(Serialize, Deserialize)]
struct ModelRecord {
    dims: Vec<usize>,
    #[serde(default)]
    state: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pure_state: Option<Vec<[f64; 2]>>,
    povms: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
}

fn matrix_from_pairs(pairs: &[[f64; 2]], what: &str) -> Result<CMatrix> {
    let d = (pairs.len() as f64).sqrt().round() as usize;
    if d * d != pairs.len() || d == 0 {
        return Err(Error::InvalidModel(format!(
            "{what} has {} entries, not a square matrix",
            pairs.len()
        )));
    }
    Ok(CMatrix::from_row_slice(
        d,
        d,
        &pairs.iter().map(|[re, im]| C64::new(*re, *im)).collect::<Vec<_>>(),
    ))
}

fn matrix_to_pairs(m: &CMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push([m[(r, c)].re, m[(r, c)].im]);
        }
    }
    out
}

/// Reads the JSON model format: `dims`, a row-major density matrix `state`
/// (or a `pure_state` vector) and `povms[party][input][outcome]`, all
/// complex entries written as `[re, im]`.
pub fn model_from_json(text: &str) -> Result<QuantumModel> {
    let rec: ModelRecord = serde_json::from_str(text)?;
    let state = match (rec.state, rec.pure_state) {
        (Some(s), None) => matrix_from_pairs(&s, "state")?,
        (None, Some(v)) => {
            let psi = CVector::from_vec(v.iter().map(|[re, im]| C64::new(*re, *im)).collect());
            &psi * psi.adjoint()
        }
        _ => {
            return Err(Error::InvalidModel(
                "give exactly one of `state` and `pure_state`".into(),
            ))
        }
    };
    let povms = rec
        .povms
        .iter()
        .enumerate()
        .map(|(p, inputs)| {
            inputs
                .iter()
                .map(|elements| {
                    elements
                        .iter()
                        .map(|e| matrix_from_pairs(e, &format!("POVM element of party {p}")))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    QuantumModel::new(rec.dims, state, povms)
}

pub fn model_to_json(model: &QuantumModel) -> String {
    let rec = ModelRecord {
        dims: model.dims.clone(),
        state: Some(matrix_to_pairs(&model.state)),
        pure_state: None,
        povms: model
            .povms
            .iter()
            .map(|inputs| {
                inputs
                    .iter()
                    .map(|elements| elements.iter().map(matrix_to_pairs).collect())
                    .collect()
            })
            .collect(),
    };
    serde_json::to_string_pretty(&rec).expect("model serializes") + "\n"
}
