use liftbell::bounds::{solve_lp, LpProblem, Sense};
use liftbell::sdp::{Lmi, SdpSettings, SymMatrix};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::{gaussian, min_eigenvalue, rng};

pub struct RandomLp {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

pub fn random_lp(r: &mut impl Rng) -> RandomLp {
    let n = r.random_range(1..=3);
    let m = r.random_range(1..=4);
    let mut a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| r.random_range(-3..=5) as f64).collect()).collect();
    let mut b: Vec<f64> = (0..m).map(|_| r.random_range(0..=10) as f64).collect();
    a.push(vec![1.0; n]);
    b.push(r.random_range(1..=12) as f64);
    let c = (0..n).map(|_| r.random_range(-4..=6) as f64).collect();
    RandomLp { c, a, b }
}

/// Best feasible vertex of `{A x ≤ b, x ≥ 0}`: every choice of `n` tight
/// constraints with a nonsingular system.
pub fn vertex_oracle(p: &RandomLp) -> f64 {
    let n = p.c.len();
    let mut rows: Vec<(Vec<f64>, f64)> = p.a.iter().cloned().zip(p.b.iter().copied()).collect();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = -1.0;
        rows.push((e, 0.0));
    }
    let mut best = f64::NEG_INFINITY;
    let k = rows.len();
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let chosen: Vec<&(Vec<f64>, f64)> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| &rows[i]).collect();
        let m = DMatrix::from_fn(n, n, |i, j| chosen[i].0[j]);
        let rhs = DVector::from_fn(n, |i, _| chosen[i].1);
        let Some(x) = m.lu().solve(&rhs) else { continue };
        if rows.iter().all(|(a, b)| a.iter().zip(x.iter()).map(|(u, v)| u * v).sum::<f64>() <= b + 1e-9) {
            best = best.max(p.c.iter().zip(x.iter()).map(|(u, v)| u * v).sum());
        }
    }
    best
}

pub struct RandomLmi {
    pub lmi: Lmi,
    pub f: Vec<DMatrix<f64>>,
    pub radius: f64,
}

pub fn random_sym(r: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(r));
    (&g + g.transpose()) * 0.5
}

/// `max cᵀy  s.t.  I + y₁F₁ + y₂F₂ ⪰ 0` on a 3×3 block, with `|y_k| ≤ R`
/// as four 1×1 blocks.
pub fn random_lmi(r: &mut impl Rng) -> RandomLmi {
    let radius = 2.0;
    let f: Vec<DMatrix<f64>> = (0..2).map(|_| random_sym(r, 3)).collect();
    let mut f0 = SymMatrix::new();
    for i in 0..3 {
        f0.push(0, i, i, 1.0);
    }
    for b in 1..5 {
        f0.push(b, 0, 0, radius);
    }
    let fk = (0..2)
        .map(|k| {
            let mut m = SymMatrix::new();
            for i in 0..3 {
                for j in i..3 {
                    m.push(0, i, j, f[k][(i, j)]);
                }
            }
            m.push(1 + 2 * k, 0, 0, 1.0);
            m.push(2 + 2 * k, 0, 0, -1.0);
            m
        })
        .collect();
    let lmi = Lmi {
        blocks: vec![3, 1, 1, 1, 1],
        f0,
        f: fk,
        objective: vec![gaussian(r), gaussian(r)],
        constant: 0.0,
        sense: Sense::Max,
    };
    RandomLmi { lmi, f, radius }
}

pub fn feasible(p: &RandomLmi, y: [f64; 2]) -> bool {
    if y.iter().any(|v| v.abs() > p.radius) {
        return false;
    }
    let m = DMatrix::identity(3, 3) + &p.f[0] * y[0] + &p.f[1] * y[1];
    min_eigenvalue(&m) >= 0.0
}

/// Boundary distance along each ray from the interior point `y = 0`, on a
/// grid of angles, then golden-section refinement around the best angle.
pub fn ray_oracle(p: &RandomLmi) -> f64 {
    let c = &p.lmi.objective;
    let along = |theta: f64| -> f64 {
        let u = [theta.cos(), theta.sin()];
        let (mut lo, mut hi) = (0.0, p.radius * 2.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if feasible(p, [mid * u[0], mid * u[1]]) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo * (c[0] * u[0] + c[1] * u[1])
    };
    let steps = 2000;
    let h = std::f64::consts::TAU / steps as f64;
    let (best_i, _) = (0..steps)
        .map(|i| (i, along(i as f64 * h)))
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let (mut a, mut b) = ((best_i as f64 - 1.0) * h, (best_i as f64 + 1.0) * h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if along(x1) < along(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    along(0.5 * (a + b))
}


pub fn simplex_matches_vertex_enumeration() {
    let mut r = rng(21);
    for t in 0..50 {
        let p = random_lp(&mut r);
        let lp = LpProblem::from_inequalities(p.c.clone(), p.a.clone(), p.b.clone()).unwrap();
        let sol = solve_lp(&lp, 1e-9).unwrap();
        let want = vertex_oracle(&p);
        assert!((sol.objective - want).abs() <= 1e-8, "problem {t}: {} vs {want}", sol.objective);
    }
}

pub fn sdp_matches_ray_search() {
    let mut r = rng(22);
    for t in 0..20 {
        let p = random_lmi(&mut r);
        let sol = p.lmi.solve(&SdpSettings::default()).unwrap();
        let want = ray_oracle(&p);
        assert!((sol.value - want).abs() <= 1e-4, "problem {t}: {} vs {want}", sol.value);
        assert!((sol.bound - want).abs() <= 1e-4, "problem {t}: certificate {} vs {want}", sol.bound);
        assert!(sol.gap <= 1e-8);
    }
}

pub fn sdp_scales_with_the_objective() {
    let mut r = rng(23);
    let p = random_lmi(&mut r);
    let base = p.lmi.solve(&SdpSettings::default()).unwrap().value;
    let mut scaled = p.lmi.clone();
    scaled.objective.iter_mut().for_each(|c| *c *= 3.5);
    let v = scaled.solve(&SdpSettings::default()).unwrap().value;
    assert!((v - 3.5 * base).abs() < 1e-6);
    let again = p.lmi.solve(&SdpSettings::default()).unwrap();
    assert_eq!(again.value.to_bits(), base.to_bits());
}
