use num_integer::Integer;
use num_rational::{Ratio, Rational64};
use num_traits::{ToPrimitive, Zero};

use super::{BoundResult, BoundStatus, Witness};
use crate::bell::{increment, BellFunctional, Coeff, DeterministicStrategy, Scenario};
use crate::error::{Error, Result};

pub const DEFAULT_STRATEGY_CAP: usize = 10_000_000;

pub fn local_bound(f: &BellFunctional) -> Result<BoundResult> {
    local_bound_with_cap(f, DEFAULT_STRATEGY_CAP)
}

/// Maximizes over deterministic strategies. All parties but the last are
/// enumerated in mixed-radix order (party 0, input 0 most significant); the
/// last party best-responds per input, taking the lowest optimal outcome.
/// The first strategy reaching the maximum is returned.
pub fn local_bound_with_cap(f: &BellFunctional, cap: usize) -> Result<BoundResult> {
    let s = f.scenario();
    match s.num_deterministic_strategies() {
        Some(n) if n <= cap => {}
        other => {
            return Err(Error::StrategyCapExceeded {
                count: other.map_or_else(|| "more than 2^64".to_string(), |n| n.to_string()),
                cap,
            })
        }
    }
    if let Some((ints, denom)) = integer_coefficients(f) {
        let (best, strategy) = enumerate(s, &ints);
        let value = Ratio::new(best, denom);
        let value = match (value.numer().to_i64(), value.denom().to_i64()) {
            (Some(p), Some(q)) => Coeff::Exact(Rational64::new(p, q)) + f.offset(),
            _ => Coeff::Real(best as f64 / denom as f64) + f.offset(),
        };
        if value.is_exact() {
            return Ok(BoundResult {
                value,
                witness: Witness::Strategy(strategy),
                status: BoundStatus::Exact,
            });
        }
    }
    let (best, strategy) = enumerate(s, &f.dense());
    Ok(BoundResult {
        value: Coeff::Real(best + f.offset().to_f64()),
        witness: Witness::Strategy(strategy),
        status: BoundStatus::Numeric,
    })
}

/// Coefficients over a common denominator, if all are exact and fit in i128.
fn integer_coefficients(f: &BellFunctional) -> Option<(Vec<i128>, i128)> {
    let mut denom: i128 = 1;
    for (_, c) in f.flat_terms() {
        let r = c.as_exact()?;
        denom = denom.lcm(&(*r.denom() as i128));
        if denom > i128::MAX >> 64 {
            return None;
        }
    }
    let mut ints = vec![0i128; f.scenario().len()];
    for (i, c) in f.flat_terms() {
        let r = c.as_exact()?;
        ints[i] = (*r.numer() as i128).checked_mul(denom / *r.denom() as i128)?;
    }
    Some((ints, denom))
}

trait Score: Copy + PartialOrd + Zero {}
impl Score for i128 {}
impl Score for f64 {}

fn enumerate<T: Score>(s: &Scenario, coeffs: &[T]) -> (T, DeterministicStrategy) {
    let n = s.parties();
    let table = s.outcome_table();
    let last = &table[n - 1];
    let head = &table[..n - 1];
    let head_inputs: Vec<usize> = head.iter().map(Vec::len).collect();
    let num_head: usize = head_inputs.iter().product();
    let radix: Vec<usize> = head.iter().flatten().copied().collect();
    let party_start: Vec<usize> = head
        .iter()
        .scan(0, |acc, row| {
            let start = *acc;
            *acc += row.len();
            Some(start)
        })
        .collect();

    let mut digits = vec![0usize; radix.len()];
    let mut prefix = vec![0usize; num_head];
    let mut best: Option<(T, Vec<usize>, Vec<usize>)> = None;
    let mut response = vec![0usize; last.len()];
    let mut joint = vec![0usize; n - 1];
    loop {
        joint.iter_mut().for_each(|j| *j = 0);
        for p in prefix.iter_mut() {
            let mut local = 0;
            for (party, &x) in joint.iter().enumerate() {
                local = local * head[party][x] + digits[party_start[party] + x];
            }
            *p = local;
            increment(&mut joint, |p| head_inputs[p]);
        }

        let mut total = T::zero();
        for (y, &d) in last.iter().enumerate() {
            let mut best_b = (T::zero(), 0);
            for b in 0..d {
                let mut acc = T::zero();
                for (h, &local) in prefix.iter().enumerate() {
                    let block = s.block_offset(h * last.len() + y);
                    acc = acc + coeffs[block + local * d + b];
                }
                if b == 0 || acc > best_b.0 {
                    best_b = (acc, b);
                }
            }
            total = total + best_b.0;
            response[y] = best_b.1;
        }
        if best.as_ref().is_none_or(|(v, _, _)| total > *v) {
            best = Some((total, digits.clone(), response.clone()));
        }
        if !increment(&mut digits, |p| radix[p]) {
            break;
        }
    }

    let (value, digits, response) = best.expect("at least one strategy");
    let mut outputs: Vec<Vec<usize>> = head
        .iter()
        .enumerate()
        .map(|(p, row)| digits[party_start[p]..party_start[p] + row.len()].to_vec())
        .collect();
    outputs.push(response);
    (value, DeterministicStrategy::new(outputs))
}

/// Every deterministic strategy, in mixed-radix order over all parties.
pub fn strategies(s: &Scenario) -> impl Iterator<Item = DeterministicStrategy> + '_ {
    let radix: Vec<usize> = s.outcome_table().iter().flatten().copied().collect();
    let mut digits = Some(vec![0usize; radix.len()]);
    std::iter::from_fn(move || {
        let current = digits.take()?;
        let mut next = current.clone();
        if increment(&mut next, |p| radix[p]) {
            digits = Some(next);
        }
        let mut rest = current.as_slice();
        let outputs = s
            .outcome_table()
            .iter()
            .map(|row| {
                let (mine, tail) = rest.split_at(row.len());
                rest = tail;
                mine.to_vec()
            })
            .collect();
        Some(DeterministicStrategy::new(outputs))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::chsh;

    fn brute_force(f: &BellFunctional) -> f64 {
        strategies(f.scenario())
            .map(|st| f.value(&st.correlation(f.scenario()).unwrap()).unwrap())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn chsh_local_bound_is_two() {
        let r = local_bound(&chsh()).unwrap();
        assert_eq!(r.value, Coeff::int(2));
        assert_eq!(r.status, BoundStatus::Exact);
        let Witness::Strategy(st) = &r.witness else { panic!() };
        let v = chsh().value(&st.correlation(chsh().scenario()).unwrap()).unwrap();
        assert_eq!(v, 2.0);
        assert_eq!(st.outputs, vec![vec![0, 0], vec![0, 0]]);
    }

    #[test]
    fn offset_and_fractions_stay_exact() {
        let f = chsh().shift_to_zero_local_bound(Coeff::int(2));
        assert_eq!(local_bound(&f).unwrap().value, Coeff::ZERO);
        let g = chsh().with_offset(Coeff::ratio(1, 3));
        assert_eq!(local_bound(&g).unwrap().value, Coeff::ratio(7, 3));
    }

    #[test]
    fn matches_brute_force_on_irregular_scenarios() {
        let s = Scenario::new(vec![vec![2, 3], vec![3], vec![2, 2]]).unwrap();
        let mut seed = 7u64;
        for _ in 0..20 {
            let f = BellFunctional::from_fn(s.clone(), |_, _| {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                Some(Coeff::int((seed >> 60) as i64 - 8))
            });
            let exact = local_bound(&f).unwrap().value.to_f64();
            assert_eq!(exact, brute_force(&f));
            let float = f.clone();
            let float = BellFunctional::from_fn(s.clone(), |j, k| {
                Some(Coeff::Real(float.coeff(j, k).unwrap().to_f64() + 1e-3))
            });
            let r = local_bound(&float).unwrap();
            assert_eq!(r.status, BoundStatus::Numeric);
            assert!((r.value.to_f64() - brute_force(&float)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_party() {
        let s = Scenario::new(vec![vec![3, 2]]).unwrap();
        let f = BellFunctional::from_fn(s, |j, k| Some(Coeff::int((j[0] + 2 * k[0]) as i64)));
        assert_eq!(local_bound(&f).unwrap().value, Coeff::int(7));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            local_bound_with_cap(&chsh(), 15),
            Err(Error::StrategyCapExceeded { cap: 15, .. })
        ));
        assert_eq!(strategies(chsh().scenario()).count(), 16);
    }
}
