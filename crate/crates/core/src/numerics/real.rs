//! Arbitrary-precision binary floating point.
//!
//! `HPReal` wraps `astro_float::BigFloat` and pins down the conventions the
//! rest of the crate relies on:
//!
//! * every rounding operation uses round-to-even,
//! * powers of two are applied by exponent shifts and are therefore exact,
//! * conversion to and from decimal strings goes through exact big-rational
//!   arithmetic, so the only rounding is the final one to the target
//!   precision.
//!
//! The raw mantissa layout (little-endian words, value `m * 2^(e - 64*len)`)
//! is only touched in `to_rational`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::numerics::rational::ExactRational;

const RM: RoundingMode = RoundingMode::ToEven;
const WORD_BITS: usize = Word::BITS as usize;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(
        Consts::new().expect("constants cache allocation"),
    );
}

/// A high-precision real number. Precision travels with the value; binary
/// operations round to the precision passed at the call site.
#[derive(Debug, Clone)]
pub struct HPReal(BigFloat);

impl HPReal {
    pub(crate) fn from_raw(x: BigFloat) -> Self {
        HPReal(x)
    }

    pub(crate) fn raw(&self) -> &BigFloat {
        &self.0
    }

    pub fn zero(bits: usize) -> Self {
        HPReal(BigFloat::from_u64(0, bits))
    }

    pub fn one(bits: usize) -> Self {
        HPReal(BigFloat::from_u64(1, bits))
    }

    pub fn from_u64(n: u64, bits: usize) -> Self {
        HPReal(BigFloat::from_u64(n, bits.max(64)))
    }

    pub fn from_i64(n: i64, bits: usize) -> Self {
        let mag = Self::from_u64(n.unsigned_abs(), bits);
        if n < 0 {
            mag.neg()
        } else {
            mag
        }
    }

    /// Exactly `2^k`.
    pub fn pow2(k: i64, bits: usize) -> Self {
        Self::one(bits).scale_pow2(k)
    }

    /// Exact multiplication by `2^k` via an exponent shift.
    pub fn scale_pow2(&self, k: i64) -> Self {
        if self.0.is_zero() || self.0.is_nan() || self.0.is_inf() {
            return self.clone();
        }
        let e = self.0.exponent().expect("finite nonzero value has an exponent");
        let shifted = i64::from(e).checked_add(k).expect("exponent shift stays in range");
        let e2 = i32::try_from(shifted).expect("exponent shift stays in range");
        let mut out = self.0.clone();
        out.set_exponent(e2);
        HPReal(out)
    }

    pub fn precision_bits(&self) -> usize {
        self.0.mantissa_max_bit_len().unwrap_or(WORD_BITS)
    }

    /// Re-rounds the value to `bits` of precision.
    pub fn round_to(&self, bits: usize) -> Self {
        let zero = BigFloat::from_u64(0, WORD_BITS);
        HPReal(self.0.add(&zero, bits, RM))
    }

    pub fn add(&self, rhs: &Self, bits: usize) -> Self {
        HPReal(self.0.add(&rhs.0, bits, RM))
    }

    pub fn sub(&self, rhs: &Self, bits: usize) -> Self {
        HPReal(self.0.sub(&rhs.0, bits, RM))
    }

    pub fn mul(&self, rhs: &Self, bits: usize) -> Self {
        HPReal(self.0.mul(&rhs.0, bits, RM))
    }

    pub fn div(&self, rhs: &Self, bits: usize) -> Self {
        HPReal(self.0.div(&rhs.0, bits, RM))
    }

    /// Addition at whatever precision makes the sum exact. Zero operands are
    /// handled here; the backing full-precision addition corrupts them.
    pub fn add_exact(&self, rhs: &Self) -> Self {
        if self.0.is_zero() {
            return rhs.clone();
        }
        if rhs.0.is_zero() {
            return self.clone();
        }
        HPReal(self.0.add_full_prec(&rhs.0))
    }

    /// Subtraction at whatever precision makes the difference exact.
    pub fn sub_exact(&self, rhs: &Self) -> Self {
        if rhs.0.is_zero() {
            return self.clone();
        }
        if self.0.is_zero() {
            return rhs.neg();
        }
        HPReal(self.0.sub_full_prec(&rhs.0))
    }

    pub fn neg(&self) -> Self {
        HPReal(self.0.neg())
    }

    pub fn abs(&self) -> Self {
        HPReal(self.0.abs())
    }

    pub fn recip(&self, bits: usize) -> Self {
        HPReal(self.0.reciprocal(bits, RM))
    }

    pub fn sqrt(&self, bits: usize) -> Self {
        HPReal(self.0.sqrt(bits, RM))
    }

    pub fn ln(&self, bits: usize) -> Self {
        CONSTS.with(|c| HPReal(self.0.ln(bits, RM, &mut c.borrow_mut())))
    }

    pub fn pow_u(&self, n: usize, bits: usize) -> Self {
        HPReal(self.0.powi(n, bits, RM))
    }

    pub fn pi(bits: usize) -> Self {
        CONSTS.with(|c| HPReal(c.borrow_mut().pi(bits, RM)))
    }

    pub fn floor(&self) -> Self {
        HPReal(self.0.floor())
    }

    pub fn ceil(&self) -> Self {
        HPReal(self.0.ceil())
    }

    /// The value as an `i64`, provided it is integral and in range.
    pub fn to_i64_exact(&self) -> Option<i64> {
        let r = self.to_rational()?;
        if !r.denom().is_one() {
            return None;
        }
        r.numer().to_i64()
    }

    pub fn ceil_i64(&self) -> Option<i64> {
        self.ceil().to_i64_exact()
    }

    pub fn floor_i64(&self) -> Option<i64> {
        self.floor().to_i64_exact()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive() && !self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.0.is_nan() || self.0.is_inf())
    }

    pub fn ensure_finite(&self, context: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(context))
        }
    }

    /// The binary magnitude: `Some(e)` with `2^(e-1) <= |x| < 2^e` for finite
    /// nonzero `x`, `None` for zero and non-finite values.
    pub fn magnitude_exponent(&self) -> Option<i64> {
        if self.0.is_zero() || !self.is_finite() {
            return None;
        }
        self.0.exponent().map(i64::from)
    }

    /// Exact conversion to a rational. `None` for NaN and infinities.
    pub fn to_rational(&self) -> Option<ExactRational> {
        if !self.is_finite() {
            return None;
        }
        if self.0.is_zero() {
            return Some(ExactRational::zero());
        }
        let (words, _, sign, e, _) = self.0.as_raw_parts()?;
        let bytes: Vec<u8> = words.iter().flat_map(|w| w.to_le_bytes()).collect();
        let mut m = BigInt::from(BigUint::from_bytes_le(&bytes));
        if sign == Sign::Neg {
            m = -m;
        }
        let shift = i64::from(e) - (WORD_BITS * words.len()) as i64;
        let two = BigInt::from(2u32);
        let value = if shift >= 0 {
            ExactRational::from_integer(m * two.pow(shift as u32))
        } else {
            ExactRational::new(m, two.pow((-shift) as u32))
        };
        Some(value)
    }

    /// Exact conversion of an integer, then one rounding of the quotient to
    /// `bits` of precision.
    pub fn from_rational(r: &ExactRational, bits: usize) -> Self {
        let numer = bigint_to_real(r.numer());
        if r.denom().is_one() {
            return numer.round_to(bits);
        }
        let denom = bigint_to_real(r.denom());
        numer.div(&denom, bits)
    }

    /// Parses a decimal (`0.25`, `-1e-3`) or a fraction `p/q`, exactly, then
    /// rounds once to `bits`.
    pub fn parse(s: &str, bits: usize) -> Result<Self> {
        let r = ExactRational::parse(s)?;
        Ok(Self::from_rational(&r, bits))
    }

    /// Rounds the value to `sig_digits` significant decimal digits
    /// (half-to-even) and formats it. Values with decimal exponent in
    /// `[-4, sig_digits)` print positionally, everything else in scientific
    /// notation. Trailing zeros are stripped; the representable value is
    /// unchanged either way.
    pub fn to_decimal_string(&self, sig_digits: usize) -> String {
        if self.0.is_nan() {
            return "nan".to_string();
        }
        if self.0.is_inf() {
            return if self.0.is_negative() { "-inf" } else { "inf" }.to_string();
        }
        if self.0.is_zero() {
            return "0".to_string();
        }
        let r = self.to_rational().expect("finite value converts exactly");
        format_rational_decimal(&r, sig_digits.max(1))
    }
}

impl PartialEq for HPReal {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for HPReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Display for HPReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.precision_bits() * 30103).div_ceil(100_000) + 2;
        f.write_str(&self.to_decimal_string(digits))
    }
}

/// Exact `BigInt -> HPReal`, folding 64-bit limbs with exact shifts and adds.
fn bigint_to_real(n: &BigInt) -> HPReal {
    let (sign, digits) = n.to_u64_digits();
    let mut acc = HPReal::zero(WORD_BITS);
    for d in digits.iter().rev() {
        acc = acc.scale_pow2(64).add_exact(&HPReal::from_u64(*d, WORD_BITS));
    }
    if sign == num_bigint::Sign::Minus {
        acc = acc.neg();
    }
    acc
}

fn format_rational_decimal(r: &ExactRational, sig: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let abs = r.abs();
    let e10 = decimal_exponent(&abs);

    // Scale into [10^(sig-1), 10^sig) and round half-to-even.
    let shift = sig as i64 - 1 - e10;
    let ten = BigInt::from(10u32);
    let (mut p, mut q) = (abs.numer().clone(), abs.denom().clone());
    if shift >= 0 {
        p *= ten.pow(shift as u32);
    } else {
        q *= ten.pow((-shift) as u32);
    }
    let mut t = round_div_half_even(&p, &q);
    let mut e10 = e10;
    if t == ten.pow(sig as u32) {
        t /= &ten;
        e10 += 1;
    }

    let digits = t.to_string();
    debug_assert_eq!(digits.len(), sig);
    let mantissa = |int_len: usize| -> String {
        let (int_part, frac_part) = digits.split_at(int_len.min(digits.len()));
        let frac = frac_part.trim_end_matches('0');
        if frac.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac}")
        }
    };

    let body = if e10 >= -4 && e10 < sig as i64 {
        if e10 >= 0 {
            mantissa(e10 as usize + 1)
        } else {
            let zeros = "0".repeat((-e10) as usize - 1);
            let frac = digits.trim_end_matches('0');
            format!("0.{zeros}{frac}")
        }
    } else {
        format!("{}e{}", mantissa(1), e10)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// `e` with `10^e <= r < 10^(e+1)`, for `r > 0`.
fn decimal_exponent(r: &ExactRational) -> i64 {
    let digits = |n: &BigInt| n.magnitude().to_string().len() as i64;
    let mut e = digits(r.numer()) - digits(r.denom());
    while cmp_pow10(r, e) == Ordering::Less {
        e -= 1;
    }
    while cmp_pow10(r, e + 1) != Ordering::Less {
        e += 1;
    }
    e
}

/// Compares `r` (positive) against `10^k`.
fn cmp_pow10(r: &ExactRational, k: i64) -> Ordering {
    let ten = BigInt::from(10u32);
    if k >= 0 {
        r.numer().cmp(&(r.denom() * ten.pow(k as u32)))
    } else {
        (r.numer() * ten.pow((-k) as u32)).cmp(r.denom())
    }
}

/// Nearest integer to `p/q` for `p >= 0`, `q > 0`, ties to even.
fn round_div_half_even(p: &BigInt, q: &BigInt) -> BigInt {
    let (t, rem) = p.div_rem(q);
    let twice: BigInt = &rem * 2;
    match twice.cmp(q) {
        Ordering::Less => t,
        Ordering::Greater => t + 1,
        Ordering::Equal => {
            if (&t % 2u32).to_u32() == Some(0) {
                t
            } else {
                t + 1
            }
        }
    }
}
