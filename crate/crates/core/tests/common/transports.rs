use super::*;
use liftbell::bell::{chsh, BellFunctional, Coeff};
use liftbell::bounds::local_bound;
use liftbell::lifting::{
    coarse_grain, condition_on_party, embed_with_deterministic_party, lift_outcome, lift_party, split_outcome,
    LocalBoundCheck, CONDITION_TOL,
};
use rand::Rng;

const TRIALS: usize = 1000;
const TOL: f64 = 1e-12;

fn seeds(r: &mut impl Rng) -> Vec<BellFunctional> {
    let mut out = vec![chsh()];
    for _ in 0..9 {
        let s = random_scenario(r, 2, 3, 3);
        out.push(random_functional(r, &s, 5));
    }
    out
}

pub fn coarse_graining_carries_the_outcome_lifted_value() {
    let mut r = rng(1);
    let fs = seeds(&mut r);
    for t in 0..TRIALS {
        let f = &fs[t % fs.len()];
        let s = f.scenario();
        let party = r.random_range(0..s.parties());
        let input = r.random_range(0..s.inputs(party));
        let outcome = r.random_range(0..s.outcomes(party, input));
        let lifted = lift_outcome(f, party, input, outcome).unwrap();
        let p = random_correlation(&mut r, lifted.scenario());
        let merged = s.outcomes(party, input);
        let q = coarse_grain(&p, party, input, outcome, merged).unwrap();
        let (a, b) = (lifted.value(&p).unwrap(), f.value(&q).unwrap());
        assert!((a - b).abs() <= TOL * (1.0 + a.abs()), "trial {t}: {a} vs {b}");
    }
}

pub fn splitting_preserves_the_value() {
    let mut r = rng(2);
    let fs = seeds(&mut r);
    for t in 0..TRIALS {
        let f = &fs[t % fs.len()];
        let s = f.scenario();
        let party = r.random_range(0..s.parties());
        let input = r.random_range(0..s.inputs(party));
        let outcome = r.random_range(0..s.outcomes(party, input));
        let lifted = lift_outcome(f, party, input, outcome).unwrap();
        let p = random_correlation(&mut r, s);
        let q = split_outcome(&p, party, input, outcome, r.random()).unwrap();
        assert!(q.is_valid(1e-12));
        let (a, b) = (f.value(&p).unwrap(), lifted.value(&q).unwrap());
        assert!((a - b).abs() <= TOL * (1.0 + a.abs()), "trial {t}: {a} vs {b}");
    }
}

pub fn conditioning_on_the_added_party_scales_the_value() {
    let mut r = rng(3);
    let fs = seeds(&mut r);
    let mut checked = 0;
    for t in 0..TRIALS {
        let f = fs[t % fs.len()].shift_to_zero_local_bound(local_bound(&fs[t % fs.len()]).unwrap().value);
        let outcomes: Vec<usize> = (0..r.random_range(1..=3)).map(|_| r.random_range(2..=3)).collect();
        let z = r.random_range(0..outcomes.len());
        let c = r.random_range(0..outcomes[z]);
        let lifted = lift_party(&f, &outcomes, (z, c), LocalBoundCheck::Require).unwrap();
        let s = lifted.scenario().clone();
        let p = if t % 2 == 0 {
            random_local_correlation(&mut r, &s)
        } else {
            let dims: Vec<usize> = (0..s.parties()).map(|_| 2).collect();
            random_model(&mut r, &s, &dims).correlation()
        };
        let party = s.parties() - 1;
        match condition_on_party(&p, party, (z, c), CONDITION_TOL) {
            Ok((cond, marginal)) => {
                let (a, b) = (lifted.value(&p).unwrap(), marginal * f.value(&cond).unwrap());
                assert!((a - b).abs() <= TOL * (1.0 + a.abs()), "trial {t}: {a} vs {b}");
                checked += 1;
            }
            Err(e) => assert!(p.party_marginal(party, z)[c] <= CONDITION_TOL, "trial {t}: {e}"),
        }
    }
    assert!(checked > TRIALS / 2, "only {checked} trials had a usable marginal");
}

pub fn deterministic_party_embedding_keeps_the_value() {
    let mut r = rng(4);
    let fs = seeds(&mut r);
    for t in 0..TRIALS / 10 {
        let f = fs[t % fs.len()].shift_to_zero_local_bound(local_bound(&fs[t % fs.len()]).unwrap().value);
        let lifted = lift_party(&f, &[2, 3], (1, 2), LocalBoundCheck::Require).unwrap();
        let p = random_correlation(&mut r, f.scenario());
        let q = embed_with_deterministic_party(&p, &[2, 3], 0).unwrap();
        assert_eq!(lifted.value(&q).unwrap(), 0.0);
        let q = embed_with_deterministic_party(&p, &[3, 3], 2).unwrap();
        let lifted = lift_party(&f, &[3, 3], (1, 2), LocalBoundCheck::Require).unwrap();
        let (a, b) = (lifted.value(&q).unwrap(), f.value(&p).unwrap());
        assert!((a - b).abs() <= TOL * (1.0 + a.abs()), "trial {t}: {a} vs {b}");
    }
}

pub fn shifting_subtracts_the_bound() {
    let mut r = rng(5);
    let fs = seeds(&mut r);
    for t in 0..TRIALS {
        let f = &fs[t % fs.len()];
        let by = Coeff::ratio(r.random_range(-20..=20), r.random_range(1..=6));
        let shifted = f.shift_to_zero_local_bound(by);
        let p = random_correlation(&mut r, f.scenario());
        let (a, b) = (shifted.value(&p).unwrap(), f.value(&p).unwrap() - by.to_f64());
        assert!((a - b).abs() <= TOL * (1.0 + a.abs()), "trial {t}: {a} vs {b}");
    }
}
