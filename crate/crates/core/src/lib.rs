//! High-precision analysis of the sequence transformation
//! `T(x)ₙ = 1/(1 + x₁ + … + xₙ)` on the space of sequences with terms in
//! `[0, 1]`.
//!
//! The crate computes the transformation's unique attractive fixed point,
//! measures contraction behaviour under the weighted metric
//! `d(a, b) = Σ 2⁻ⁿ |aₙ − bₙ|`, certifies complete monotonicity of moment
//! sequences, and evaluates the spectral expansion of reciprocal harmonic
//! numbers through digamma roots.
//!
//! Real arithmetic is arbitrary-precision binary floating point governed by a
//! [`PrecisionContext`]; rational arithmetic is exact. See the module docs
//! for the individual pieces:
//!
//! * [`numerics`]: precision policy and scalar types.
//! * [`sequences`]: sequence prefixes, the transformation, the metric.
//! * [`fixed_point`]: the fixed point, iteration, contraction measurements.
//! * [`moments`]: complete-monotonicity checks and moment sequences.
//! * [`harmonic_spectral`]: harmonic numbers, digamma roots, spectral sums.

pub mod error;
pub mod numerics;
pub mod sequences;

mod asymptotic;

pub use error::{Error, Result};
pub use numerics::{euler_gamma, make_context, ExactRational, HPReal, PrecisionContext, Scalar};
