#![allow(dead_code)]

pub mod local_bounds;
pub mod npa;
pub mod solvers;
pub mod transports;

use liftbell::bell::{BellFunctional, Coeff, Correlation, DeterministicStrategy, Scenario};
use liftbell::npa::{Symbol, Word};
use liftbell::qmodel::{CMatrix, CVector, QuantumModel, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(r: &mut impl Rng) -> f64 {
    let u: f64 = r.random_range(f64::EPSILON..1.0);
    let v: f64 = r.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

pub fn random_scenario(r: &mut impl Rng, parties: usize, max_inputs: usize, max_outcomes: usize) -> Scenario {
    let table = (0..parties)
        .map(|_| {
            let m = r.random_range(1..=max_inputs);
            (0..m).map(|_| r.random_range(2..=max_outcomes)).collect()
        })
        .collect();
    Scenario::new(table).unwrap()
}

/// Each block drawn independently: valid, usually signaling.
pub fn random_correlation(r: &mut impl Rng, s: &Scenario) -> Correlation {
    let mut probs = vec![0.0; s.len()];
    for j in 0..s.num_joint_inputs() {
        let off = s.block_offset(j);
        let size = s.block_size(j);
        let w: Vec<f64> = (0..size).map(|_| -r.random::<f64>().ln()).collect();
        let total: f64 = w.iter().sum();
        for (i, x) in w.iter().enumerate() {
            probs[off + i] = x / total;
        }
    }
    Correlation::new(s.clone(), probs).unwrap()
}

pub fn random_strategy(r: &mut impl Rng, s: &Scenario) -> DeterministicStrategy {
    DeterministicStrategy::new(
        s.outcome_table()
            .iter()
            .map(|row| row.iter().map(|&d| r.random_range(0..d)).collect())
            .collect(),
    )
}

/// A random mixture of a few deterministic strategies.
pub fn random_local_correlation(r: &mut impl Rng, s: &Scenario) -> Correlation {
    let k = r.random_range(1..=4);
    let mut p = random_strategy(r, s).correlation(s).unwrap();
    for i in 1..k {
        let q = random_strategy(r, s).correlation(s).unwrap();
        p = p.mix(&q, i as f64 / (i + 1) as f64).unwrap();
    }
    p
}

pub fn random_unitary(r: &mut impl Rng, d: usize) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| C64::new(gaussian(r), gaussian(r)));
    g.qr().q()
}

/// Projective measurement: the columns of a random unitary, each assigned
/// to a random outcome.
pub fn random_projective(r: &mut impl Rng, d: usize, outcomes: usize) -> Vec<CMatrix> {
    let u = random_unitary(r, d);
    let mut povm = vec![CMatrix::zeros(d, d); outcomes];
    for col in 0..d {
        let v = u.column(col).into_owned();
        povm[r.random_range(0..outcomes)] += &v * v.adjoint();
    }
    povm
}

pub fn random_state(r: &mut impl Rng, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| C64::new(gaussian(r), gaussian(r)));
    let n = v.norm();
    v / C64::from(n)
}

/// Projective model with local dimensions `dims` on a random pure state.
pub fn random_model(r: &mut impl Rng, s: &Scenario, dims: &[usize]) -> QuantumModel {
    let povms = s
        .outcome_table()
        .iter()
        .zip(dims)
        .map(|(row, &d)| row.iter().map(|&k| random_projective(r, d, k)).collect())
        .collect();
    let total = dims.iter().product();
    QuantumModel::from_pure(dims.to_vec(), &random_state(r, total), povms).unwrap()
}

/// Integer coefficients in `[-range, range]` on a random subset of entries,
/// some of them halves.
pub fn random_functional(r: &mut impl Rng, s: &Scenario, range: i64) -> BellFunctional {
    BellFunctional::from_fn(s.clone(), |_, _| {
        if r.random_bool(0.3) {
            return None;
        }
        let n = r.random_range(-range..=range);
        Some(if r.random_bool(0.2) { Coeff::ratio(n, 2) } else { Coeff::int(n) })
    })
}

pub fn random_real_functional(r: &mut impl Rng, s: &Scenario) -> BellFunctional {
    BellFunctional::from_fn(s.clone(), |_, _| Some(Coeff::Real(gaussian(r))))
}

pub fn random_symbols(r: &mut impl Rng, s: &Scenario, len: usize) -> Vec<Symbol> {
    (0..len)
        .map(|_| {
            let party = r.random_range(0..s.parties());
            let input = r.random_range(0..s.inputs(party));
            let outcome = r.random_range(0..s.outcomes(party, input) - 1);
            Symbol::new(party, input, outcome)
        })
        .collect()
}

/// `⊗` of per-party products of the model's projectors along `symbols`.
pub fn operator(model: &QuantumModel, symbols: &[Symbol]) -> CMatrix {
    let dims = model.dims();
    let mut factors: Vec<CMatrix> = dims.iter().map(|&d| CMatrix::identity(d, d)).collect();
    for sym in symbols {
        factors[sym.party] = &factors[sym.party] * model.element(sym.party, sym.input, sym.outcome);
    }
    factors
        .into_iter()
        .reduce(|a, b| a.kronecker(&b))
        .unwrap()
}

pub fn expectation(model: &QuantumModel, op: &CMatrix) -> C64 {
    (model.state() * op).trace()
}

pub fn word_operator(model: &QuantumModel, w: &Word) -> CMatrix {
    operator(model, w.symbols())
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().min()
}

pub fn timed<T>(f: impl FnOnce() -> T) -> (T, std::time::Duration) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed())
}
