//! Kac-Rice machinery for the real zeros of random orthogonal polynomials
//! `G_n(x) = sum_{j<=n} a_j p_j(x)` with i.i.d. standard Gaussian `a_j`.

// negated comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::excessive_precision)]

pub mod cli;
pub mod ensemble;
pub mod equilibrium;
pub mod error;
pub mod intensity;
pub mod kacrice;
pub mod kernels;
pub mod linalg;
pub mod montecarlo;
pub mod quad;
pub mod universal;

pub use error::{Error, Result};
