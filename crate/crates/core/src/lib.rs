//! Simulation and analysis of multi-hop amplify-and-forward relaying in a
//! spectrum-sharing network with an average interference-power cap.

// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod model;
pub mod montecarlo;
pub mod quad;
pub mod registry;
pub mod specfun;
pub mod waterfill;

pub use error::{Error, Result};
