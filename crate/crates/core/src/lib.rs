//! Lifted Bell inequalities.
//!
//! Input, outcome and party liftings of Bell functionals, their local,
//! nonsignaling and NPA quantum bounds, the correlation-level maps that
//! transport values between a functional and its lifting, and swap-method
//! self-testing bounds for the outcome-lifted CHSH inequality.

pub mod bell;
pub mod bounds;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod lifting;
pub mod npa;
pub mod qmodel;
pub mod sdp;
pub mod selftest;
pub mod slice;

pub use error::{Error, Result};
