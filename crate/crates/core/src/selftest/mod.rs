//! Swap-method self-testing: operator-valued swap gates, the fidelity and
//! measurement figures of merit as moment functionals, and SDP lower
//! bounds on them at a given Bell value.

mod curve;
mod poly;
mod swap;

pub use curve::{
    augment_words, metric_functional, min_metric_at_violation, selftest_curve, CurvePoint, Metric, Mode,
    SelftestProblem,
};
pub use poly::OperatorPolynomial;
pub use swap::{
    build_swap, fidelity_functional, outcome_probability_functional, reference_state, tau1_functional,
    tau3_functional, tau_functional, AuxOperator, AuxState,
};
