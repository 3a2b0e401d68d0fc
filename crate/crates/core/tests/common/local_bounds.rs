use super::*;
use liftbell::bell::{BellFunctional, Coeff, Scenario};
use liftbell::bounds::{local_bound, nonsignaling_bound, BoundStatus, Witness};
use liftbell::lifting::{apply_steps, LiftStep, LocalBoundCheck};
use num_rational::Rational64;
use rand::Rng;

/// Exact maximum over every deterministic assignment, evaluated entry by
/// entry without the library's enumeration.
fn oracle(f: &BellFunctional) -> Rational64 {
    let s = f.scenario();
    let radix: Vec<usize> = s.outcome_table().iter().flatten().copied().collect();
    let starts: Vec<usize> = s
        .outcome_table()
        .iter()
        .scan(0, |acc, row| {
            let start = *acc;
            *acc += row.len();
            Some(start)
        })
        .collect();
    let mut digits = vec![0usize; radix.len()];
    let mut best: Option<Rational64> = None;
    loop {
        let mut total = f.offset().as_exact().unwrap();
        for (j, k, i) in s.entries() {
            if (0..s.parties()).all(|p| digits[starts[p] + j[p]] == k[p]) {
                total += f.coeff_flat(i).as_exact().unwrap();
            }
        }
        if best.is_none_or(|b| total > b) {
            best = Some(total);
        }
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                return best.unwrap();
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < radix[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

fn random_step(r: &mut impl Rng, s: &Scenario) -> LiftStep {
    match r.random_range(0..3) {
        0 => {
            let party = r.random_range(0..s.parties());
            let mut inputs = s.outcome_table()[party].clone();
            inputs.push(r.random_range(2..=3));
            LiftStep::Input { party, inputs }
        }
        1 => {
            let party = r.random_range(0..s.parties());
            let input = r.random_range(0..s.inputs(party));
            LiftStep::Outcome {
                party,
                input,
                outcome: r.random_range(0..s.outcomes(party, input)),
            }
        }
        _ => {
            let outcomes: Vec<usize> = (0..r.random_range(1..=2)).map(|_| r.random_range(2..=3)).collect();
            let z = r.random_range(0..outcomes.len());
            LiftStep::Party {
                anchor: (z, r.random_range(0..outcomes[z])),
                outcomes,
                check: LocalBoundCheck::AutoShift,
            }
        }
    }
}

fn corpus() -> Vec<(BellFunctional, Vec<LiftStep>)> {
    let mut r = rng(11);
    (0..50)
        .map(|_| {
            let parties = r.random_range(2..=3);
            let s = random_scenario(&mut r, parties, 2, 3);
            let f = random_functional(&mut r, &s, 4).with_offset(Coeff::ratio(r.random_range(-3..=3), 2));
            let mut steps = vec![];
            let mut scenario = s.clone();
            for _ in 0..r.random_range(1..=2) {
                let step = random_step(&mut r, &scenario);
                scenario = step.apply(&BellFunctional::new(scenario.clone())).unwrap().scenario().clone();
                steps.push(step);
            }
            (f, steps)
        })
        .collect()
}

pub fn library_enumeration_matches_the_oracle() {
    for (i, (f, _)) in corpus().iter().enumerate() {
        let r = local_bound(f).unwrap();
        assert_eq!(r.status, BoundStatus::Exact);
        assert_eq!(r.value.as_exact().unwrap(), oracle(f), "functional {i}");
        let Witness::Strategy(st) = &r.witness else { panic!() };
        let at = f.value(&st.correlation(f.scenario()).unwrap()).unwrap();
        assert!((at - r.value.to_f64()).abs() < 1e-12);
    }
}

pub fn liftings_preserve_local_bounds_exactly() {
    for (i, (f, steps)) in corpus().iter().enumerate() {
        let lifted = apply_steps(f, steps).unwrap();
        let shifted = steps.iter().any(|s| matches!(s, LiftStep::Party { .. }));
        let expected = if shifted { Rational64::from_integer(0) } else { oracle(f) };
        assert_eq!(oracle(&lifted), expected, "functional {i}, steps {steps:?}");
        assert_eq!(local_bound(&lifted).unwrap().value.as_exact().unwrap(), expected);
    }
}

pub fn input_and_outcome_liftings_preserve_nonsignaling_bounds() {
    let mut checked = 0;
    for (f, steps) in corpus().iter().take(20) {
        if steps.iter().any(|s| matches!(s, LiftStep::Party { .. })) {
            continue;
        }
        let lifted = apply_steps(f, steps).unwrap();
        let (a, b) = (nonsignaling_bound(f).unwrap().value.to_f64(), nonsignaling_bound(&lifted).unwrap().value.to_f64());
        assert!((a - b).abs() < 1e-8, "{a} vs {b} after {steps:?}");
        checked += 1;
    }
    assert!(checked >= 5);
}
