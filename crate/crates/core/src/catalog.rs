//! Named functionals and correlations built from CHSH through the lifting
//! operations, plus the quantum points that saturate them.

use std::f64::consts::SQRT_2;

use crate::bell::{chsh, BellFunctional, Coeff, Correlation, Scenario};
use crate::lifting::{lift_input, lift_outcome, lift_party, LocalBoundCheck};

pub const NAMES: [&str; 4] = ["chsh", "li-chsh", "lo-chsh", "lp-chsh"];

/// CHSH with Bob given a third, unused binary input.
pub fn li_chsh() -> BellFunctional {
    lift_input(&chsh(), 1, &[2, 2, 2]).expect("valid input lifting")
}

/// CHSH with a third outcome on both of Bob's inputs, copying outcome 0.
pub fn lo_chsh() -> BellFunctional {
    let f = lift_outcome(&chsh(), 1, 0, 0).expect("valid outcome lifting");
    lift_outcome(&f, 1, 1, 0).expect("valid outcome lifting")
}

/// CHSH shifted to local bound 0 and extended to a binary third party,
/// anchored at its outcome 0 for input 0.
pub fn lp_chsh() -> BellFunctional {
    let shifted = chsh().shift_to_zero_local_bound(Coeff::int(2));
    lift_party(&shifted, &[2, 2], (0, 0), LocalBoundCheck::Require).expect("valid party lifting")
}

pub fn by_name(name: &str) -> Option<BellFunctional> {
    match name {
        "chsh" => Some(chsh()),
        "li-chsh" => Some(li_chsh()),
        "lo-chsh" => Some(lo_chsh()),
        "lp-chsh" => Some(lp_chsh()),
        _ => None,
    }
}

/// Bob's marginal correlator for `y = 2` in the input-lifted scenario,
/// `P(b=0|y=2) − P(b=1|y=2)`, read at Alice's input 0.
pub fn bob_marginal_correlator() -> BellFunctional {
    BellFunctional::from_fn(li_chsh().scenario().clone(), |j, k| {
        (j == [0, 2]).then(|| Coeff::int(if k[1] == 0 { 1 } else { -1 }))
    })
}

/// `1/4 + (−1)^{a+b+xy} √2/8`.
pub fn tsirelson_point() -> Correlation {
    Correlation::from_fn(chsh().scenario().clone(), |j, k| tsirelson_entry(k[0], k[1], j[0], j[1]))
}

fn tsirelson_entry(a: usize, b: usize, x: usize, y: usize) -> f64 {
    let sign = if (a + b + x * y) % 2 == 0 { 1.0 } else { -1.0 };
    0.25 + sign * SQRT_2 / 8.0
}

/// Tsirelson point on `y ∈ {0, 1}`; at `y = 2` Bob always answers `output`.
pub fn li_tsirelson(output: usize) -> Correlation {
    Correlation::from_fn(li_chsh().scenario().clone(), |j, k| {
        if j[1] == 2 {
            if k[1] == output {
                0.5
            } else {
                0.0
            }
        } else {
            tsirelson_entry(k[0], k[1], j[0], j[1])
        }
    })
}

/// `p · li_tsirelson(0) + (1 − p) · li_tsirelson(1)`.
pub fn li_mixture(p: f64) -> Correlation {
    li_tsirelson(0).mix(&li_tsirelson(1), p).expect("same scenario")
}

/// The four outcome-lifted maximizers: Bob's outcome 0 is moved to the new
/// label 2 on no input, both inputs, only `y = 1`, or only `y = 0`.
pub fn lo_maximizers() -> [Correlation; 4] {
    let relabel = |swap: [bool; 2]| {
        Correlation::from_fn(lo_chsh().scenario().clone(), move |j, k| {
            let (x, y, a, b) = (j[0], j[1], k[0], k[1]);
            let b = match (swap[y], b) {
                (false, 2) | (true, 0) => return 0.0,
                (true, 2) => 0,
                (_, b) => b,
            };
            tsirelson_entry(a, b, x, y)
        })
    };
    [
        relabel([false, false]),
        relabel([true, true]),
        relabel([false, true]),
        relabel([true, false]),
    ]
}

pub fn uniform(s: &Scenario) -> Correlation {
    Correlation::uniform(s.clone())
}
