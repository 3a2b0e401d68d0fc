//! NPA moment relaxations of the quantum set over projector words.

mod moments;
mod relax;
mod word;

pub use moments::{
    functional_to_moments, generate_words, model_moment, moments_from_model, projectors, BaseLevel, Level,
    MomentLinearFunctional, MomentStructure,
};
pub use relax::{maximize_over_slice, optimize, quantum_bound, MomentConstraint, Relaxation};
pub use word::{canonicalize, Symbol, Word};
