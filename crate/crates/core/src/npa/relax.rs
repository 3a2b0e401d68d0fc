use std::collections::BTreeMap;

use super::moments::{functional_to_moments, Level, MomentLinearFunctional, MomentStructure};
use crate::bell::BellFunctional;
use crate::bounds::Sense;
use crate::error::{Error, Result};
use crate::sdp::{Lmi, SdpSettings, SdpStatus, SymMatrix};

#[derive(Clone, Debug, PartialEq)]
pub enum MomentConstraint {
    Equal(MomentLinearFunctional, f64),
    AtLeast(MomentLinearFunctional, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Relaxation {
    /// Objective at the optimal moments.
    pub value: f64,
    /// Objective of the dual certificate (upper bound when maximizing,
    /// lower bound when minimizing), valid up to the residuals.
    pub bound: f64,
    pub gap: f64,
    pub status: SdpStatus,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    /// Class-indexed moments, identity class included.
    pub moments: Vec<f64>,
    pub words: usize,
}

/// Maximum of `f` over the moment relaxation at `level`.
pub fn quantum_bound(f: &BellFunctional, level: &Level, settings: &SdpSettings) -> Result<Relaxation> {
    let structure = MomentStructure::for_level(f.scenario(), level);
    optimize(&structure, &functional_to_moments(f), Sense::Max, &[], settings)
}

/// Maximizes `axis` with each pinned functional held at its value.
pub fn maximize_over_slice(
    structure: &MomentStructure,
    axis: &MomentLinearFunctional,
    pinned: &[(MomentLinearFunctional, f64)],
    settings: &SdpSettings,
) -> Result<Relaxation> {
    let constraints: Vec<_> = pinned
        .iter()
        .map(|(g, v)| MomentConstraint::Equal(g.clone(), *v))
        .collect();
    optimize(structure, axis, Sense::Max, &constraints, settings)
}

/// Optimizes over `Γ ⪰ 0` with the identity moment at 1. Equality
/// constraints are eliminated by substitution; inequalities become 1×1
/// blocks.
pub fn optimize(
    structure: &MomentStructure,
    objective: &MomentLinearFunctional,
    sense: Sense,
    constraints: &[MomentConstraint],
    settings: &SdpSettings,
) -> Result<Relaxation> {
    let id = structure.identity_class();
    let n_classes = structure.classes().len();
    // Variables are the classes other than the identity.
    let class_of_var = |v: usize| if v < id { v } else { v + 1 };
    let nv = n_classes - 1;
    let split = |dense: Vec<f64>| -> (Vec<f64>, f64) {
        let c = dense[id];
        let a = (0..nv).map(|v| dense[class_of_var(v)]).collect();
        (a, c)
    };

    let mut affine = Affine::new(nv);
    let mut inequalities = Vec::new();
    for con in constraints {
        match con {
            MomentConstraint::Equal(g, value) => {
                let (a, c) = split(g.dense(structure)?);
                if !affine.impose(&a, value - c) {
                    return Err(Error::SdpInfeasible(format!(
                        "pinned value {value} contradicts the other constraints"
                    )));
                }
            }
            MomentConstraint::AtLeast(g, value) => {
                let (a, c) = split(g.dense(structure)?);
                inequalities.push((a, c - value));
            }
        }
    }

    let n = structure.size();
    let kept = if constraints.iter().any(|c| matches!(c, MomentConstraint::Equal(..))) {
        reduce_face(structure, &mut affine, &split)?
    } else {
        (0..n).collect()
    };
    let mut entries_of: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_classes];
    for (i, &wi) in kept.iter().enumerate() {
        for (j, &wj) in kept.iter().enumerate().skip(i) {
            if let Some(c) = structure.class(wi, wj) {
                entries_of[c].push((i, j));
            }
        }
    }
    let Affine { y0, basis } = affine;
    let mut blocks = vec![kept.len()];
    blocks.extend(std::iter::repeat_n(1, inequalities.len()));

    let mut f0 = SymMatrix::new();
    for &(i, j) in &entries_of[id] {
        f0.push(0, i, j, 1.0);
    }
    for (v, &y) in y0.iter().enumerate() {
        if y != 0.0 {
            for &(i, j) in &entries_of[class_of_var(v)] {
                f0.push(0, i, j, y);
            }
        }
    }
    for (b, (a, c)) in inequalities.iter().enumerate() {
        f0.push(b + 1, 0, 0, c + dot(a, &y0));
    }
    let f: Vec<SymMatrix> = basis
        .iter()
        .map(|nj| {
            let mut m = SymMatrix::new();
            for (&v, &x) in nj {
                for &(i, j) in &entries_of[class_of_var(v)] {
                    m.push(0, i, j, x);
                }
            }
            for (b, (a, _)) in inequalities.iter().enumerate() {
                m.push(b + 1, 0, 0, sparse_dot(a, nj));
            }
            m
        })
        .collect();

    let (obj_a, obj_c) = split(objective.dense(structure)?);
    let lmi = Lmi {
        blocks,
        f0,
        objective: basis.iter().map(|nj| sparse_dot(&obj_a, nj)).collect(),
        constant: obj_c + dot(&obj_a, &y0),
        f,
        sense,
    };
    let sol = lmi.solve(settings)?;

    let mut moments = vec![0.0; n_classes];
    moments[id] = 1.0;
    for (v, &y) in y0.iter().enumerate() {
        moments[class_of_var(v)] += y;
    }
    for (t, nj) in sol.y.iter().zip(&basis) {
        for (&v, &x) in nj {
            moments[class_of_var(v)] += t * x;
        }
    }
    Ok(Relaxation {
        value: sol.value,
        bound: sol.bound,
        gap: sol.gap,
        status: sol.status,
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
        iterations: sol.iterations,
        moments,
        words: n,
    })
}

/// Moments `y = y0 + Σ_j t_j n_j` over the non-identity classes.
struct Affine {
    y0: Vec<f64>,
    basis: Vec<BTreeMap<usize, f64>>,
}

impl Affine {
    fn new(nv: usize) -> Self {
        Affine {
            y0: vec![0.0; nv],
            basis: (0..nv).map(|v| BTreeMap::from([(v, 1.0)])).collect(),
        }
    }

    /// Restricts to `a·y = rhs` by eliminating the largest pivot; false if
    /// the constraint is inconsistent with the current space.
    fn impose(&mut self, a: &[f64], rhs: f64) -> bool {
        let rhs_t = rhs - dot(a, &self.y0);
        let g_t: Vec<f64> = self.basis.iter().map(|n| sparse_dot(a, n)).collect();
        let scale = g_t.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let pivot = g_t
            .iter()
            .enumerate()
            .fold(None::<(usize, f64)>, |best, (j, &x)| match best {
                Some((_, b)) if b >= x.abs() => best,
                _ => Some((j, x.abs())),
            });
        match pivot {
            Some((q, mag)) if mag > 1e-12 => {
                let gq = g_t[q];
                let nq = self.basis[q].clone();
                for (&v, &x) in &nq {
                    self.y0[v] += x * rhs_t / gq;
                }
                for (j, n) in self.basis.iter_mut().enumerate() {
                    if j != q && g_t[j] != 0.0 {
                        for (&v, &x) in &nq {
                            *n.entry(v).or_insert(0.0) -= x * g_t[j] / gq;
                        }
                        n.retain(|_, x| x.abs() > 1e-15);
                    }
                }
                self.basis.remove(q);
                true
            }
            _ => rhs_t.abs() <= 1e-9 * (1.0 + rhs.abs() + scale),
        }
    }

    /// Constant part and parameter coefficients of `a·y`.
    fn restrict(&self, a: &[f64]) -> (f64, Vec<f64>) {
        (dot(a, &self.y0), self.basis.iter().map(|n| sparse_dot(a, n)).collect())
    }
}

/// Facial reduction on structural null vectors. Whenever `e_u` or
/// `e_u − e_w` has `vᵀΓv` identically zero on the affine space, `Γv = 0`
/// holds on every feasible point: it is imposed and the word `u` dropped.
/// Returns the indices of the words that remain.
fn reduce_face(
    structure: &MomentStructure,
    affine: &mut Affine,
    split: &dyn Fn(Vec<f64>) -> (Vec<f64>, f64),
) -> Result<Vec<usize>> {
    let n_classes = structure.classes().len();
    let mut kept: Vec<usize> = (0..structure.size()).collect();
    // Dense class vector of Σ_k coeff_k Γ(i_k, j_k).
    let form = |terms: &[(usize, usize, f64)]| {
        let mut dense = vec![0.0; n_classes];
        for &(i, j, c) in terms {
            if let Some(k) = structure.class(i, j) {
                dense[k] += c;
            }
        }
        split(dense)
    };
    let vanishes = |affine: &Affine, terms: &[(usize, usize, f64)]| {
        let (a, c) = form(terms);
        let (c0, coeffs) = affine.restrict(&a);
        (c + c0).abs() <= 1e-10 && coeffs.iter().all(|x| x.abs() <= 1e-10)
    };
    loop {
        let mut found = None;
        'search: for (k, &u) in kept.iter().enumerate() {
            if vanishes(affine, &[(u, u, 1.0)]) {
                found = Some((u, None));
                break;
            }
            for &w in &kept[..k] {
                if vanishes(affine, &[(u, u, 1.0), (w, u, -2.0), (w, w, 1.0)]) {
                    found = Some((u, Some(w)));
                    break 'search;
                }
            }
        }
        let Some((u, other)) = found else {
            return Ok(kept);
        };
        for &x in &kept {
            let mut terms = vec![(x, u, 1.0)];
            if let Some(w) = other {
                terms.push((x, w, -1.0));
            }
            let (a, c) = form(&terms);
            if !affine.impose(&a, -c) {
                return Err(Error::SdpInfeasible("the pinned values leave no positive moment matrix".into()));
            }
        }
        kept.retain(|&w| w != u);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sparse_dot(a: &[f64], n: &BTreeMap<usize, f64>) -> f64 {
    n.iter().map(|(&v, &x)| a[v] * x).sum()
}
