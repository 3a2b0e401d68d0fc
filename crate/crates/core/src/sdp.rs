//! Primal-dual interior point solver for small block-diagonal SDPs.
//!
//! Standard form, with `X` and `Z` block-diagonal and positive semidefinite:
//!
//! ```text
//! (P)  min ⟨C, X⟩   s.t. ⟨A_i, X⟩ = b_i
//! (D)  max bᵀy      s.t. Z = C − Σ y_i A_i
//! ```
//!
//! Search directions are HKM (`ΔX = (R − X ΔZ) Z⁻¹`, symmetrized) with a
//! Mehrotra predictor-corrector. Infeasible starting point `X = ξI, Z = ηI`.
//! [`Lmi`] is the front end used by the moment relaxations: maximize or
//! minimize `cᵀy` subject to `F₀ + Σ y_k F_k ⪰ 0`, which is (D) verbatim.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::bounds::Sense;
use crate::error::{Error, Result};

pub const DEFAULT_SDP_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITERATIONS: usize = 200;
pub const DEFAULT_DIMENSION_CAP: usize = 500;
const REFINEMENT_STEPS: usize = 3;
const PATIENCE: usize = 20;
const GRAM_LIMIT: f64 = 5e7;
const MAX_RECOVERIES: usize = 3;
const REDUCED_ACCURACY: f64 = 1e3;
const BLOW_UP: f64 = 1e12;

/// Sparse symmetric block-diagonal matrix. An entry `(block, i, j, v)` with
/// `i ≠ j` sets both `(i, j)` and `(j, i)`; repeated entries add up.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymMatrix {
    entries: Vec<(usize, usize, usize, f64)>,
}

impl SymMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, block: usize, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.entries.push((block, i, j, v));
    }

    pub fn with(mut self, block: usize, i: usize, j: usize, v: f64) -> Self {
        self.push(block, i, j, v);
        self
    }

    /// Merged, sorted, zero-free entries.
    pub fn entries(&self) -> Vec<(usize, usize, usize, f64)> {
        let mut e = self.entries.clone();
        e.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        let mut out: Vec<(usize, usize, usize, f64)> = Vec::with_capacity(e.len());
        for (b, i, j, v) in e {
            match out.last_mut() {
                Some(last) if (last.0, last.1, last.2) == (b, i, j) => last.3 += v,
                _ => out.push((b, i, j, v)),
            }
        }
        out.retain(|e| e.3 != 0.0);
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|&(b, i, j, v)| (b, i, j, s * v)).collect(),
        }
    }

    pub fn to_dense(&self, blocks: &[usize]) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for &(b, i, j, v) in &self.entries {
            out[b][(i, j)] += v;
            if i != j {
                out[b][(j, i)] += v;
            }
        }
        out
    }

    /// `⟨self, X⟩ = tr(self · X)`.
    pub fn dot(&self, x: &[DMatrix<f64>]) -> f64 {
        self.entries
            .iter()
            .map(|&(b, i, j, v)| if i == j { v * x[b][(i, j)] } else { v * (x[b][(i, j)] + x[b][(j, i)]) })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    pub objective: SymMatrix,
    pub constraints: Vec<(SymMatrix, f64)>,
    pub sense: Sense,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpSettings {
    pub tol: f64,
    pub max_iterations: usize,
    pub dimension_cap: usize,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self {
            tol: DEFAULT_SDP_TOL,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            dimension_cap: DEFAULT_DIMENSION_CAP,
        }
    }
}

impl SdpSettings {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    /// Progress stalled before `tol`; residuals and gap are within
    /// `1000 · tol` and reported as reached.
    ReducedAccuracy,
}

impl std::fmt::Display for SdpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::ReducedAccuracy => "reduced-accuracy",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpSolution {
    pub x: Vec<DMatrix<f64>>,
    pub y: Vec<f64>,
    pub z: Vec<DMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub status: SdpStatus,
    pub iterations: usize,
    /// `‖b − A(X)‖ / (1 + ‖b‖)`.
    pub primal_residual: f64,
    /// `‖C − Z − Aᵀy‖ / (1 + ‖C‖)`.
    pub dual_residual: f64,
    /// `|primal − dual| / (1 + |primal| + |dual|)`.
    pub gap: f64,
}

impl SdpProblem {
    pub fn dimension(&self) -> usize {
        self.blocks.iter().sum()
    }

    fn validate(&self, cap: usize) -> Result<()> {
        if self.blocks.is_empty() || self.blocks.contains(&0) {
            return Err(Error::MalformedProblem("blocks must be nonempty".into()));
        }
        if self.dimension() > cap {
            return Err(Error::MalformedProblem(format!(
                "total dimension {} exceeds cap {cap}",
                self.dimension()
            )));
        }
        let mats = std::iter::once(&self.objective).chain(self.constraints.iter().map(|c| &c.0));
        for m in mats {
            for &(b, i, j, v) in &m.entries {
                if b >= self.blocks.len() || j >= self.blocks[b] {
                    return Err(Error::MalformedProblem(format!("entry ({b}, {i}, {j}) outside the blocks")));
                }
                if !v.is_finite() {
                    return Err(Error::MalformedProblem("non-finite coefficient".into()));
                }
            }
        }
        if self.constraints.iter().any(|c| !c.1.is_finite()) {
            return Err(Error::MalformedProblem("non-finite right-hand side".into()));
        }
        Ok(())
    }
}

pub fn solve_sdp(problem: &SdpProblem, settings: &SdpSettings) -> Result<SdpSolution> {
    problem.validate(settings.dimension_cap)?;
    let sign = match problem.sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let data = Data::new(problem, sign);
    let raw = interior_point(&data, settings)?;
    let pobj = sign * dot_blocks(&data.c, &raw.x);
    let dobj = sign * data.b.dot(&raw.y);
    Ok(SdpSolution {
        primal_objective: pobj,
        dual_objective: dobj,
        status: raw.status,
        iterations: raw.iterations,
        primal_residual: raw.pinf,
        dual_residual: raw.dinf,
        gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        x: raw.x,
        y: raw.y.iter().copied().collect(),
        z: raw.z,
    })
}

struct Data {
    blocks: Vec<usize>,
    c: Vec<DMatrix<f64>>,
    /// Upper-triangle entries per constraint.
    a: Vec<Vec<(usize, usize, usize, f64)>>,
    /// Both triangles, grouped by block: `(row, col, value)`.
    a_full: Vec<Vec<Vec<(usize, usize, f64)>>>,
    b: DVector<f64>,
}

impl Data {
    fn new(p: &SdpProblem, sign: f64) -> Self {
        let a: Vec<_> = p.constraints.iter().map(|(m, _)| m.entries()).collect();
        let a_full = a
            .iter()
            .map(|entries| {
                let mut per_block = vec![Vec::new(); p.blocks.len()];
                for &(b, i, j, v) in entries {
                    per_block[b].push((i, j, v));
                    if i != j {
                        per_block[b].push((j, i, v));
                    }
                }
                per_block
            })
            .collect();
        Self {
            blocks: p.blocks.clone(),
            c: p.objective.scaled(sign).to_dense(&p.blocks),
            a,
            a_full,
            b: DVector::from_iterator(p.constraints.len(), p.constraints.iter().map(|c| c.1)),
        }
    }

    fn m(&self) -> usize {
        self.a.len()
    }

    fn apply(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(
            self.m(),
            self.a.iter().map(|entries| {
                entries
                    .iter()
                    .map(|&(b, i, j, v)| if i == j { v * x[b][(i, j)] } else { 2.0 * v * x[b][(i, j)] })
                    .sum::<f64>()
            }),
        )
    }

    fn adjoint(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (k, entries) in self.a.iter().enumerate() {
            for &(b, i, j, v) in entries {
                out[b][(i, j)] += y[k] * v;
                if i != j {
                    out[b][(j, i)] += y[k] * v;
                }
            }
        }
        out
    }

    /// `M_ij = tr(A_i X A_j Z⁻¹)`, assembled from `W_i = Z⁻¹ A_i X`.
    fn schur(&self, x: &[DMatrix<f64>], zinv: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.m();
        let mut schur = DMatrix::zeros(m, m);
        for i in 0..m {
            for (blk, entries) in self.a_full[i].iter().enumerate() {
                if entries.is_empty() {
                    continue;
                }
                let n = self.blocks[blk];
                let mut rows: Vec<usize> = entries.iter().map(|e| e.0).collect();
                rows.sort_unstable();
                rows.dedup();
                let mut ax = DMatrix::zeros(rows.len(), n);
                for &(p, q, v) in entries {
                    let r = rows.binary_search(&p).expect("row collected above");
                    for c in 0..n {
                        ax[(r, c)] += v * x[blk][(q, c)];
                    }
                }
                let zsel = zinv[blk].select_columns(&rows);
                let w = zsel * ax;
                for j in i..m {
                    let s: f64 = self.a_full[j][blk].iter().map(|&(r, c, v)| v * w[(c, r)]).sum();
                    schur[(i, j)] += s;
                }
            }
        }
        for i in 0..m {
            for j in 0..i {
                schur[(i, j)] = schur[(j, i)];
            }
        }
        schur
    }
}

/// `B` with `M = BᵀB`: column `i` stacks `L_Xᵀ A_i L_Z⁻ᵀ` over the blocks.
impl Data {
    fn gram(&self, lx: &[DMatrix<f64>], g: &[DMatrix<f64>]) -> DMatrix<f64> {
        let rows: usize = self.blocks.iter().map(|n| n * n).sum();
        let mut out = DMatrix::zeros(rows, self.m());
        for i in 0..self.m() {
            let mut offset = 0;
            for (blk, entries) in self.a_full[i].iter().enumerate() {
                let n = self.blocks[blk];
                if !entries.is_empty() {
                    let mut p = DMatrix::<f64>::zeros(n, n);
                    for &(r, c, v) in entries {
                        // row r of A_i G gains v G[c, :], and L_Xᵀ spreads it along L_X[r, :].
                        for a in 0..=r {
                            let l = lx[blk][(r, a)] * v;
                            if l != 0.0 {
                                for b in 0..n {
                                    p[(a, b)] += l * g[blk][(c, b)];
                                }
                            }
                        }
                    }
                    for (k, val) in p.iter().enumerate() {
                        out[(offset + k, i)] = *val;
                    }
                }
                offset += n * n;
            }
        }
        out
    }
}

fn dot_blocks(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn frob(a: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// `X^{-1/2}`-style whitening factor: inverse Cholesky factor, or an
/// eigen-decomposition with clamped eigenvalues when Cholesky breaks down
/// on a nearly singular iterate.
fn whitening(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    if let Some(c) = x.clone().cholesky() {
        if let Some(linv) = c.l().solve_lower_triangular(&DMatrix::identity(n, n)) {
            return linv;
        }
    }
    let eig = x.clone().symmetric_eigen();
    let floor = eig.eigenvalues.amax().max(1e-300) * 1e-16;
    let scale = eig.eigenvalues.map(|l| 1.0 / l.max(floor).sqrt());
    DMatrix::from_diagonal(&scale) * eig.eigenvectors.transpose()
}

/// Largest `α` keeping `X + α ΔX` positive semidefinite.
fn max_step(x: &[DMatrix<f64>], dx: &[DMatrix<f64>]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (xb, dxb) in x.iter().zip(dx) {
        let w = whitening(xb);
        let s = sym(&w * dxb * w.transpose());
        let lmin = s.symmetric_eigenvalues().min();
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

/// `X + α ΔX`, halving `α` until every block admits a Cholesky factor.
fn advance(x: &[DMatrix<f64>], dx: &[DMatrix<f64>], alpha: f64) -> Vec<DMatrix<f64>> {
    let mut alpha = alpha;
    for _ in 0..60 {
        let next: Vec<DMatrix<f64>> = x.iter().zip(dx).map(|(a, b)| sym(a + b * alpha)).collect();
        if next.iter().all(|m| m.clone().cholesky().is_some()) {
            return next;
        }
        alpha *= 0.5;
    }
    x.to_vec()
}

fn cholesky_with_shift(m: &DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    if let Some(c) = m.clone().cholesky() {
        return Ok(c);
    }
    let scale = m.diagonal().amax().max(1e-300);
    let mut shift = 1e-14 * scale;
    for _ in 0..8 {
        let shifted = m + DMatrix::identity(m.nrows(), m.nrows()) * shift;
        if let Some(c) = shifted.cholesky() {
            return Ok(c);
        }
        shift *= 100.0;
    }
    Err(Error::NumericalFailure("Schur complement is not positive definite".into()))
}

/// Factorization of the Schur complement `M_ij = tr(A_i X A_j Z⁻¹)`.
/// Small systems go through a QR factorization of `B` with `M = BᵀB`,
/// which avoids squaring the conditioning near the optimum; larger ones
/// use equilibrated normal equations.
enum SchurFactor {
    Gram {
        b: DMatrix<f64>,
        r: DMatrix<f64>,
    },
    Normal {
        schur: DMatrix<f64>,
        chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
        scale: DVector<f64>,
    },
}

impl SchurFactor {
    fn new(
        d: &Data,
        x: &[DMatrix<f64>],
        zchol: &[nalgebra::Cholesky<f64, nalgebra::Dyn>],
        zinv: &[DMatrix<f64>],
    ) -> Result<Self> {
        let m = d.m();
        let rows: usize = d.blocks.iter().map(|n| n * n).sum();
        if rows >= m && (rows * m * m) as f64 <= GRAM_LIMIT {
            let lx: Option<Vec<DMatrix<f64>>> = x.iter().map(|xb| xb.clone().cholesky().map(|c| c.unpack())).collect();
            if let Some(lx) = lx {
                let g: Vec<DMatrix<f64>> = zchol
                    .iter()
                    .map(|c| {
                        let n = c.l_dirty().nrows();
                        c.l().solve_lower_triangular(&DMatrix::identity(n, n)).map(|li| li.transpose())
                    })
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::NumericalFailure("dual iterate lost definiteness".into()))?;
                let b = d.gram(&lx, &g);
                let r = b.clone().qr().r();
                let diag = r.diagonal().map(f64::abs);
                if diag.min() > 1e-14 * diag.max() {
                    return Ok(SchurFactor::Gram { b, r });
                }
            }
        }
        let schur = d.schur(x, zinv);
        // Diagonal equilibration: solve (D M D) (D⁻¹ Δy) = D r.
        let scale = schur.diagonal().map(|v| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 });
        let balanced = DMatrix::from_fn(m, m, |i, j| schur[(i, j)] * scale[i] * scale[j]);
        let chol = cholesky_with_shift(&balanced)?;
        Ok(SchurFactor::Normal { schur, chol, scale })
    }

    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        match self {
            SchurFactor::Gram { r, .. } => {
                let t = r.tr_solve_upper_triangular(rhs).expect("nonsingular triangle");
                r.solve_upper_triangular(&t).expect("nonsingular triangle")
            }
            SchurFactor::Normal { chol, scale, .. } => chol.solve(&rhs.component_mul(scale)).component_mul(scale),
        }
    }

    fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        match self {
            SchurFactor::Gram { b, .. } => b.tr_mul(&(b * v)),
            SchurFactor::Normal { schur, .. } => schur * v,
        }
    }
}

struct Raw {
    status: SdpStatus,
    x: Vec<DMatrix<f64>>,
    y: DVector<f64>,
    z: Vec<DMatrix<f64>>,
    iterations: usize,
    pinf: f64,
    dinf: f64,
    gap: f64,
}

fn interior_point(d: &Data, settings: &SdpSettings) -> Result<Raw> {
    let n: usize = d.blocks.iter().sum();
    let m = d.m();
    let a_norms: Vec<f64> = d
        .a
        .iter()
        .map(|e| e.iter().map(|&(_, i, j, v)| if i == j { v * v } else { 2.0 * v * v }).sum::<f64>().sqrt())
        .collect();
    let c_norm = frob(&d.c);
    let b_norm = d.b.norm();
    let sqrt_n = (n as f64).sqrt();
    let xi = (0..m)
        .map(|i| n as f64 * (1.0 + d.b[i].abs()) / (1.0 + a_norms[i]))
        .fold(10.0_f64.max(sqrt_n), f64::max);
    let eta = a_norms.iter().copied().fold(c_norm, f64::max).max(sqrt_n).max(10.0);

    let mut x: Vec<DMatrix<f64>> = d.blocks.iter().map(|&k| DMatrix::identity(k, k) * xi).collect();
    let mut z: Vec<DMatrix<f64>> = d.blocks.iter().map(|&k| DMatrix::identity(k, k) * eta).collect();
    let mut y = DVector::zeros(m);

    let mut stalled = 0;
    let mut last_step: f64 = 1.0;
    let mut recoveries = 0;
    let mut centre = false;
    let mut best: Option<Raw> = None;
    let mut since_best = 0;
    for iter in 0..=settings.max_iterations {
        let rp = &d.b - d.apply(&x);
        let aty = d.adjoint(&y);
        let rd: Vec<DMatrix<f64>> = (0..d.blocks.len()).map(|k| &d.c[k] - &z[k] - &aty[k]).collect();
        let pobj = dot_blocks(&d.c, &x);
        let dobj = d.b.dot(&y);
        let xz = dot_blocks(&x, &z);
        let pinf = rp.norm() / (1.0 + b_norm);
        let dinf = frob(&rd) / (1.0 + c_norm);
        let gap = (pobj - dobj).abs().max(xz.abs()) / (1.0 + pobj.abs() + dobj.abs());
        if pinf <= settings.tol && dinf <= settings.tol && gap <= settings.tol {
            return Ok(Raw {
                status: SdpStatus::Optimal,
                x,
                y,
                z,
                iterations: iter,
                pinf,
                dinf,
                gap,
            });
        }
        let merit = pinf.max(dinf).max(gap);
        if best.as_ref().is_none_or(|b: &Raw| merit < b.pinf.max(b.dinf).max(b.gap)) {
            best = Some(Raw {
                status: SdpStatus::ReducedAccuracy,
                x: x.clone(),
                y: y.clone(),
                z: z.clone(),
                iterations: iter,
                pinf,
                dinf,
                gap,
            });
            since_best = 0;
        } else {
            since_best += 1;
        }
        if let Some(b) = best.as_ref().filter(|b| merit > 10.0 * b.pinf.max(b.dinf).max(b.gap)) {
            if recoveries < MAX_RECOVERIES && iter < settings.max_iterations {
                // A step lost accuracy: go back and recentre before pushing μ down.
                recoveries += 1;
                x = b.x.clone();
                y = b.y.clone();
                z = b.z.clone();
                centre = true;
                continue;
            }
        }
        if iter == settings.max_iterations || since_best > PATIENCE {
            break;
        }
        if frob(&x) > BLOW_UP * (1.0 + b_norm) && pobj < -BLOW_UP.sqrt() {
            return Err(Error::SdpInfeasible("the dual constraints admit no feasible point".into()));
        }
        if y.amax() > BLOW_UP * (1.0 + c_norm) && dobj > BLOW_UP.sqrt() {
            return Err(Error::SdpInfeasible("the primal constraints admit no feasible point".into()));
        }

        let mu = xz / n as f64;
        let zchol: Vec<_> = z
            .iter()
            .map(|zb| {
                zb.clone()
                    .cholesky()
                    .ok_or_else(|| Error::NumericalFailure("dual iterate lost definiteness".into()))
            })
            .collect::<Result<_>>()?;
        let zinv: Vec<DMatrix<f64>> = zchol.iter().map(|c| c.inverse()).collect();
        // `M Z⁻¹` through the factor rather than the explicit inverse.
        let right_solve = |k: usize, m: DMatrix<f64>| zchol[k].solve(&m.transpose()).transpose();
        let factor = SchurFactor::new(d, &x, &zchol, &zinv)?;
        let solve = |rhs: &DVector<f64>| {
            let mut dy = factor.solve(rhs);
            for _ in 0..REFINEMENT_STEPS {
                let r = rhs - factor.apply(&dy);
                if r.amax() <= 1e-15 * (1.0 + rhs.amax()) {
                    break;
                }
                dy += factor.solve(&r);
            }
            dy
        };

        // HKM direction for the target `XZ = σμ I − C`, written so that
        // `X Z Z⁻¹` never has to cancel numerically.
        let direction = |sigma_mu: f64, cross: Option<&[DMatrix<f64>]>| {
            let part = |k: usize, dz: &DMatrix<f64>| {
                let mut m = &x[k] * dz;
                if let Some(c) = cross {
                    m += &c[k];
                }
                sym(&zinv[k] * sigma_mu - &x[k] - right_solve(k, m))
            };
            let h: Vec<DMatrix<f64>> = (0..d.blocks.len()).map(|k| part(k, &rd[k])).collect();
            let rhs = &rp - d.apply(&h);
            let mut dy = solve(&rhs);
            let mut pass = 0;
            loop {
                let atdy = d.adjoint(&dy);
                let dz: Vec<DMatrix<f64>> = (0..d.blocks.len()).map(|k| &rd[k] - &atdy[k]).collect();
                let dx: Vec<DMatrix<f64>> = (0..d.blocks.len()).map(|k| part(k, &dz[k])).collect();
                // Correct dy against the residual of the primal equation itself.
                let r = &rp - d.apply(&dx);
                if pass == REFINEMENT_STEPS || r.amax() <= 1e-14 * (1.0 + rp.amax() + b_norm) {
                    return (dy, dx, dz);
                }
                dy += solve(&r);
                pass += 1;
            }
        };

        let (_, dx_aff, dz_aff) = direction(0.0, None);
        let ap = max_step(&x, &dx_aff).min(1.0);
        let ad = max_step(&z, &dz_aff).min(1.0);
        let mu_aff = (0..d.blocks.len())
            .map(|k| (&x[k] + &dx_aff[k] * ap).dot(&(&z[k] + &dz_aff[k] * ad)))
            .sum::<f64>()
            / n as f64;
        let sigma = if mu > 0.0 { (mu_aff / mu).clamp(0.0, 1.0).powi(3) } else { 0.0 };

        let cross: Vec<DMatrix<f64>> = dx_aff.iter().zip(&dz_aff).map(|(a, b)| a * b).collect();
        let (dy, dx, dz) = if std::mem::take(&mut centre) {
            direction(mu, None)
        } else {
            direction(sigma * mu, Some(&cross))
        };
        // Shorter fractions after short steps keep the iterates centred.
        let fraction = 0.9 + 0.09 * last_step;
        let ap = (fraction * max_step(&x, &dx)).min(1.0);
        let ad = (fraction * max_step(&z, &dz)).min(1.0);
        last_step = ap.min(ad);
        if ap < 1e-12 && ad < 1e-12 {
            stalled += 1;
            if stalled > 3 {
                break;
            }
        } else {
            stalled = 0;
        }
        x = advance(&x, &dx, ap);
        z = advance(&z, &dz, ad);
        y += dy * ad;
    }
    match best {
        Some(b) if b.pinf.max(b.dinf).max(b.gap) <= REDUCED_ACCURACY * settings.tol => Ok(b),
        Some(_) if since_best <= PATIENCE && stalled <= 3 => Err(Error::IterationLimit(settings.max_iterations)),
        Some(b) => Err(Error::NumericalFailure(format!(
            "no progress after {} iterations (gap {:.1e}, infeasibility {:.1e})",
            b.iterations,
            b.gap,
            b.pinf.max(b.dinf)
        ))),
        None => Err(Error::IterationLimit(settings.max_iterations)),
    }
}

/// `optimize cᵀy + constant  s.t.  F₀ + Σ y_k F_k ⪰ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lmi {
    pub blocks: Vec<usize>,
    pub f0: SymMatrix,
    pub f: Vec<SymMatrix>,
    pub objective: Vec<f64>,
    pub constant: f64,
    pub sense: Sense,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LmiSolution {
    pub y: Vec<f64>,
    /// Objective at `y`.
    pub value: f64,
    /// Objective of the dual certificate: an upper bound for maximization,
    /// a lower bound for minimization, up to the reported residuals.
    pub bound: f64,
    pub gap: f64,
    pub status: SdpStatus,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// `F₀ + Σ y_k F_k` per block.
    pub slack: Vec<DMatrix<f64>>,
}

impl Lmi {
    pub fn to_problem(&self) -> SdpProblem {
        let sign = match self.sense {
            Sense::Max => 1.0,
            Sense::Min => -1.0,
        };
        SdpProblem {
            blocks: self.blocks.clone(),
            objective: self.f0.clone(),
            constraints: self
                .f
                .iter()
                .zip(&self.objective)
                .map(|(fk, &ck)| (fk.scaled(-1.0), sign * ck))
                .collect(),
            sense: Sense::Min,
        }
    }

    pub fn solve(&self, settings: &SdpSettings) -> Result<LmiSolution> {
        if self.f.len() != self.objective.len() {
            return Err(Error::MalformedProblem(format!(
                "{} coefficient matrices for {} objective entries",
                self.f.len(),
                self.objective.len()
            )));
        }
        let sign = match self.sense {
            Sense::Max => 1.0,
            Sense::Min => -1.0,
        };
        let sol = solve_sdp(&self.to_problem(), settings)?;
        let value = self.objective.iter().zip(&sol.y).map(|(c, y)| c * y).sum::<f64>() + self.constant;
        Ok(LmiSolution {
            value,
            bound: sign * sol.primal_objective + self.constant,
            gap: sol.gap,
            status: sol.status,
            iterations: sol.iterations,
            primal_residual: sol.primal_residual,
            dual_residual: sol.dual_residual,
            slack: sol.z,
            y: sol.y,
        })
    }

    /// SDPA sparse format (`min cᵀx  s.t.  Σ F_i x_i − F₀ ⪰ 0`), for
    /// capturing problems in regression reports.
    pub fn to_sdpa(&self) -> String {
        let sign = match self.sense {
            Sense::Max => -1.0,
            Sense::Min => 1.0,
        };
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.f.len());
        let _ = writeln!(s, "{}", self.blocks.len());
        let dims: Vec<String> = self.blocks.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "{}", dims.join(" "));
        let c: Vec<String> = self.objective.iter().map(|c| format!("{:e}", sign * c)).collect();
        let _ = writeln!(s, "{}", c.join(" "));
        for (k, m) in std::iter::once(self.f0.scaled(-1.0)).chain(self.f.iter().cloned()).enumerate() {
            for (b, i, j, v) in m.entries() {
                let _ = writeln!(s, "{k} {} {} {} {v:e}", b + 1, i + 1, j + 1);
            }
        }
        s
    }
}
