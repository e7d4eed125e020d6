//! Precision management and the two scalar types used everywhere else.
//!
//! Values are either `ExactRational` (where the data is rational and exact
//! answers are wanted) or `HPReal` (everything involving radicals, logs, or
//! the digamma function). A `PrecisionContext` fixes the precision policy:
//! results are quoted at `precision_bits`, internal arithmetic carries a
//! 64-bit guard band, and the special-function kernels get a wider band still
//! because they evaluate near poles.

pub mod rational;
pub mod real;

pub use rational::ExactRational;
pub use real::HPReal;

use crate::asymptotic;
use crate::error::{Error, Result};

/// Precision policy for a run. Construct with [`make_context`].
#[derive(Debug, Clone)]
pub struct PrecisionContext {
    precision_bits: u32,
    tol: HPReal,
}

/// Builds a context. `tol` defaults to `2^-(precision_bits/2)`, splitting the
/// precision budget between computation error and assertion slack.
pub fn make_context(precision_bits: u32, tol: Option<HPReal>) -> Result<PrecisionContext> {
    if precision_bits < 53 {
        return Err(Error::PrecisionTooLow(precision_bits));
    }
    let working = precision_bits as usize + 64;
    let tol = match tol {
        Some(t) => {
            if !(t.is_positive() && t < HPReal::one(64)) {
                return Err(Error::InvalidTolerance);
            }
            t.round_to(working)
        }
        None => HPReal::pow2(-i64::from(precision_bits / 2), working),
    };
    Ok(PrecisionContext { precision_bits, tol })
}

impl PrecisionContext {
    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Precision used for intermediate arithmetic: the quoted precision plus
    /// a guard band.
    pub fn working_bits(&self) -> usize {
        self.precision_bits as usize + 64
    }

    /// Precision for the digamma and trigamma kernels. Arguments may sit
    /// within `2^-(precision_bits/2)` of a pole, where function values reach
    /// `2^precision_bits`, so the kernels carry a full extra word of bits.
    pub(crate) fn kernel_bits(&self) -> usize {
        2 * self.precision_bits as usize + 64
    }

    pub fn tol(&self) -> &HPReal {
        &self.tol
    }

    /// Significant decimal digits that pin down a `precision_bits`-bit value
    /// exactly: `ceil(bits * log10(2)) + 2`.
    pub fn decimal_digits(&self) -> usize {
        (self.precision_bits as usize * 30103).div_ceil(100_000) + 2
    }

    /// Rounds a working-precision value to the quoted precision. Applied once
    /// at output boundaries, so that emitted decimals parse back bit-for-bit.
    pub fn round_out(&self, x: &HPReal) -> HPReal {
        x.round_to(self.precision_bits as usize)
    }
}

/// Common face of `HPReal` and `ExactRational`, letting sequence and moment
/// code run either exactly or at tracked precision from one implementation.
pub trait Scalar: Clone + PartialOrd + std::fmt::Debug {
    /// True when arithmetic is exact and comparisons against zero are
    /// decisions, not estimates.
    const EXACT: bool;

    fn zero(ctx: &PrecisionContext) -> Self;
    fn one(ctx: &PrecisionContext) -> Self;
    fn from_u64(n: u64, ctx: &PrecisionContext) -> Self;

    fn add(&self, rhs: &Self, ctx: &PrecisionContext) -> Self;
    fn sub(&self, rhs: &Self, ctx: &PrecisionContext) -> Self;
    fn mul(&self, rhs: &Self, ctx: &PrecisionContext) -> Self;
    fn div(&self, rhs: &Self, ctx: &PrecisionContext) -> Self;
    /// Reciprocal. Callers keep the argument away from zero.
    fn recip(&self, ctx: &PrecisionContext) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;

    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;

    fn in_unit_interval(&self, ctx: &PrecisionContext) -> bool {
        !self.is_negative() && *self <= Self::one(ctx)
    }

    fn to_real(&self, ctx: &PrecisionContext) -> HPReal;

    /// The context tolerance in this scalar type, or `None` when comparisons
    /// are exact and no tolerance applies.
    fn tol_in(ctx: &PrecisionContext) -> Option<Self>;

    fn parse_term(s: &str, ctx: &PrecisionContext) -> Result<Self>;
    fn format_term(&self, ctx: &PrecisionContext) -> String;
}

impl Scalar for HPReal {
    const EXACT: bool = false;

    fn zero(ctx: &PrecisionContext) -> Self {
        HPReal::zero(ctx.working_bits())
    }
    fn one(ctx: &PrecisionContext) -> Self {
        HPReal::one(ctx.working_bits())
    }
    fn from_u64(n: u64, ctx: &PrecisionContext) -> Self {
        HPReal::from_u64(n, ctx.working_bits())
    }

    fn add(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        HPReal::add(self, rhs, ctx.working_bits())
    }
    fn sub(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        HPReal::sub(self, rhs, ctx.working_bits())
    }
    fn mul(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        HPReal::mul(self, rhs, ctx.working_bits())
    }
    fn div(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        HPReal::div(self, rhs, ctx.working_bits())
    }
    fn recip(&self, ctx: &PrecisionContext) -> Self {
        HPReal::recip(self, ctx.working_bits())
    }
    fn neg(&self) -> Self {
        HPReal::neg(self)
    }
    fn abs(&self) -> Self {
        HPReal::abs(self)
    }

    fn is_zero(&self) -> bool {
        HPReal::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        HPReal::is_negative(self)
    }

    fn to_real(&self, _ctx: &PrecisionContext) -> HPReal {
        self.clone()
    }

    fn tol_in(ctx: &PrecisionContext) -> Option<Self> {
        Some(ctx.tol().clone())
    }

    /// Terms are read and written at the quoted precision, so that a value
    /// emitted by [`Scalar::format_term`] parses back bit-for-bit. The guard
    /// band is for intermediate arithmetic only.
    fn parse_term(s: &str, ctx: &PrecisionContext) -> Result<Self> {
        HPReal::parse(s, ctx.precision_bits() as usize)
    }
    fn format_term(&self, ctx: &PrecisionContext) -> String {
        ctx.round_out(self).to_decimal_string(ctx.decimal_digits())
    }
}

impl Scalar for ExactRational {
    const EXACT: bool = true;

    fn zero(_ctx: &PrecisionContext) -> Self {
        ExactRational::zero()
    }
    fn one(_ctx: &PrecisionContext) -> Self {
        ExactRational::one()
    }
    fn from_u64(n: u64, _ctx: &PrecisionContext) -> Self {
        ExactRational::from(n)
    }

    fn add(&self, rhs: &Self, _ctx: &PrecisionContext) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self, _ctx: &PrecisionContext) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self, _ctx: &PrecisionContext) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self, _ctx: &PrecisionContext) -> Self {
        self / rhs
    }
    fn recip(&self, _ctx: &PrecisionContext) -> Self {
        ExactRational::recip(self)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        ExactRational::abs(self)
    }

    fn is_zero(&self) -> bool {
        ExactRational::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        ExactRational::is_negative(self)
    }

    fn to_real(&self, ctx: &PrecisionContext) -> HPReal {
        HPReal::from_rational(self, ctx.working_bits())
    }

    fn tol_in(_ctx: &PrecisionContext) -> Option<Self> {
        None
    }

    fn parse_term(s: &str, _ctx: &PrecisionContext) -> Result<Self> {
        ExactRational::parse(s)
    }
    fn format_term(&self, _ctx: &PrecisionContext) -> String {
        self.to_string()
    }
}

/// Euler's constant at the context precision, from `γ = H_N − Ψ(N+1)` with
/// `N` large enough that the asymptotic digamma expansion applies directly.
/// `H_N` is summed exactly; the result is correct to well within
/// `2^(−precision_bits+4)`.
pub fn euler_gamma(ctx: &PrecisionContext) -> HPReal {
    let q = ctx.working_bits();
    let n = asymptotic::asymptotic_threshold(q);
    let mut h = ExactRational::zero();
    for k in 1..=n {
        h = &h + &ExactRational::new(1, k);
    }
    let h = HPReal::from_rational(&h, q);
    let psi = asymptotic::digamma_asymptotic(&HPReal::from_u64(n + 1, q), q)
        .expect("argument above the asymptotic threshold");
    h.sub(&psi, q)
}
