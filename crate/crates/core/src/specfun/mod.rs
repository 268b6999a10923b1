//! Scalar special functions and transform-inversion kernels.

mod bessel;
mod expint;
mod hyper;
pub mod laplace;

pub use bessel::{bessel_j0, bessel_j1, bessel_j1_zero};
pub use expint::{
    exp_integral_e1, exp_integral_e1_complex, exp_scaled_e1, tricomi_psi_1_0,
    tricomi_psi_1_0_complex,
};
pub(crate) use hyper::hyp2f1_113_split;
pub use hyper::hyp2f1_113;
pub use laplace::{laplace_invert_cdf, laplace_invert_cdf_with, LaplaceInverter};

/// Euler–Mascheroni constant Υ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
