//! Scenarios, correlations, Bell functionals and deterministic strategies.

mod coeff;
mod correlation;
pub mod format;
mod functional;
mod scenario;
mod strategy;

pub use coeff::Coeff;
pub use correlation::{Correlation, Report, Violation, DEFAULT_TOL};
pub use functional::{chsh, BellFunctional, Term};
pub use scenario::Scenario;
pub(crate) use scenario::increment;
pub use strategy::{deterministic_correlation, DeterministicStrategy};
