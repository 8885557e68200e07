//! Semi-analytical solver for population balance equations.
//!
//! Densities live in an exact polynomial-exponential class ([`polyexp`]),
//! on which convolution, moments and time integration have closed forms.
//! The [`series`] engines iterate on that class; [`exact`], [`analysis`] and
//! [`refsolver`] supply the comparisons.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod exact;
pub mod par;
pub mod polyexp;
pub mod problems;
pub mod quad;
pub mod refsolver;
pub mod series;

pub use error::{Error, Result};
pub use exact::{eval_exact, ExactSolution};
pub use polyexp::{PolyExp, PolyExp1D, PolyExp2D, Rational};
pub use problems::{CoagKernel, FragSpec, ProblemSpec};
pub use series::{iterate, iterate_ahpetm, iterate_classical, Limits, Method, SeriesSolution};
