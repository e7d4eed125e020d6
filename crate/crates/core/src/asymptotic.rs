//! Digamma and trigamma kernels.
//!
//! Both functions are evaluated the classical way: shift the argument up by
//! the recurrences Ψ(x) = Ψ(x+1) − 1/x and Ψ′(x) = Ψ′(x+1) + 1/x² until it
//! clears [`asymptotic_threshold`], then apply the asymptotic expansions
//!
//! ```text
//! Ψ(x)  ≈ ln x − 1/(2x) − Σ_{k≥1} B_{2k} / (2k x^{2k})
//! Ψ′(x) ≈ 1/x + 1/(2x²) + Σ_{k≥1} B_{2k} / x^{2k+1}
//! ```
//!
//! The Bernoulli numbers alternate in sign, which makes both series
//! enveloping: the truncation error is bounded by the first omitted term. We
//! stop once that term drops below 2^-(q+16) for a computation at q bits, so
//! the series contributes nothing to the error budget at quoted precision.
//!
//! The threshold is deliberately generous (about 0.33·q rather than the
//! minimal 0.11·q). Shift steps are single divisions and cost next to
//! nothing, while a higher threshold sharply reduces how many Bernoulli
//! numbers the series needs.
//!
//! Arguments may be negative; the shift recurrence walks straight across the
//! poles at the nonpositive integers. Callers are responsible for keeping
//! arguments away from the poles themselves (the divisions here do not
//! invent precision that the argument does not carry).

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::numerics::{ExactRational, HPReal};

/// Hard cap on series length; hit only if the threshold logic is broken.
const MAX_SERIES_TERMS: usize = 10_000;

thread_local! {
    /// Bernoulli numbers B_0, B_1, B_2, ... as exact rationals.
    static BERNOULLI: RefCell<Vec<ExactRational>> = const { RefCell::new(Vec::new()) };
    /// B_2, B_4, ... rounded to a given precision, keyed by that precision.
    static B2K_FLOAT: RefCell<HashMap<usize, Rc<RefCell<Vec<HPReal>>>>> =
        RefCell::new(HashMap::new());
}

/// Smallest integer argument at which the asymptotic expansions are used for
/// a computation at `q` bits.
pub(crate) fn asymptotic_threshold(q: usize) -> u64 {
    ((33 * (q as u64 + 32)).div_ceil(100)) + 4
}

/// B_m via the recurrence B_m = −(1/(m+1)) Σ_{j<m} C(m+1, j) B_j, extending
/// the cached table as needed.
pub(crate) fn bernoulli(m: usize) -> ExactRational {
    BERNOULLI.with(|cell| {
        let mut table = cell.borrow_mut();
        if table.is_empty() {
            table.push(ExactRational::one());
        }
        while table.len() <= m {
            let mm = table.len();
            let mut acc = ExactRational::zero();
            let mut binom = BigInt::from(1u32);
            for (j, b) in table.iter().enumerate() {
                if !b.is_zero() {
                    acc = &acc + &(&ExactRational::from_integer(binom.clone()) * b);
                }
                binom = binom * (mm as u64 + 1 - j as u64) / (j as u64 + 1);
            }
            let next = -&(&acc / &ExactRational::from_integer(mm as u64 + 1));
            table.push(next);
        }
        table[m].clone()
    })
}

/// B_{2k} at `q` bits, from a per-precision cache that grows on demand.
fn bernoulli_even_float(k: usize, q: usize) -> HPReal {
    debug_assert!(k >= 1);
    let vec = B2K_FLOAT.with(|cell| {
        cell.borrow_mut()
            .entry(q)
            .or_insert_with(|| Rc::new(RefCell::new(Vec::new())))
            .clone()
    });
    let mut vec = vec.borrow_mut();
    while vec.len() < k {
        let next = bernoulli(2 * (vec.len() + 1));
        vec.push(HPReal::from_rational(&next, q));
    }
    vec[k - 1].clone()
}

/// Ψ(x) for x at or above the threshold, at `q` bits.
pub(crate) fn digamma_asymptotic(x: &HPReal, q: usize) -> Result<HPReal> {
    let inv = x.recip(q);
    let inv2 = inv.mul(&inv, q);
    let mut sum = x.ln(q).sub(&inv.scale_pow2(-1), q);
    let cutoff = HPReal::pow2(-(q as i64) - 16, 64);
    let mut power = inv2.clone();
    for k in 1..=MAX_SERIES_TERMS {
        let coeff = bernoulli_even_float(k, q).div(&HPReal::from_u64(2 * k as u64, q), q);
        let term = coeff.mul(&power, q);
        sum = sum.sub(&term, q);
        if term.abs() < cutoff {
            sum.ensure_finite("digamma asymptotic series")?;
            return Ok(sum);
        }
        power = power.mul(&inv2, q);
    }
    Err(Error::NumericalFault(
        "digamma asymptotic series failed to reach the stopping threshold".into(),
    ))
}

/// Ψ′(x) for x at or above the threshold, at `q` bits.
pub(crate) fn trigamma_asymptotic(x: &HPReal, q: usize) -> Result<HPReal> {
    let inv = x.recip(q);
    let inv2 = inv.mul(&inv, q);
    let mut sum = inv.add(&inv2.scale_pow2(-1), q);
    let cutoff = HPReal::pow2(-(q as i64) - 16, 64);
    let mut power = inv2.mul(&inv, q);
    for k in 1..=MAX_SERIES_TERMS {
        let term = bernoulli_even_float(k, q).mul(&power, q);
        sum = sum.add(&term, q);
        if term.abs() < cutoff {
            sum.ensure_finite("trigamma asymptotic series")?;
            return Ok(sum);
        }
        power = power.mul(&inv2, q);
    }
    Err(Error::NumericalFault(
        "trigamma asymptotic series failed to reach the stopping threshold".into(),
    ))
}

/// Shift count lifting `x` to the threshold: the smallest `m ≥ 0` with
/// `x + m ≥ threshold`.
fn shift_count(x: &HPReal, q: usize) -> Result<u64> {
    let t = HPReal::from_u64(asymptotic_threshold(q), q);
    let gap = t.sub(x, q);
    if gap.is_negative() || gap.is_zero() {
        return Ok(0);
    }
    let m = gap
        .ceil_i64()
        .ok_or_else(|| Error::NumericalFault("digamma shift count overflow".into()))?;
    Ok(m as u64)
}

/// Ψ(x) at `q` bits for any non-pole `x`.
pub(crate) fn digamma(x: &HPReal, q: usize) -> Result<HPReal> {
    x.ensure_finite("digamma argument")?;
    let m = shift_count(x, q)?;
    let mut tail = HPReal::zero(q);
    let mut arg = x.clone();
    for _ in 0..m {
        if arg.is_zero() {
            return Err(Error::NumericalFault("digamma evaluated at a pole".into()));
        }
        tail = tail.add(&arg.recip(q), q);
        arg = arg.add(&HPReal::one(q), q);
    }
    let shifted = digamma_asymptotic(&arg, q)?;
    let out = shifted.sub(&tail, q);
    out.ensure_finite("digamma")?;
    Ok(out)
}

/// Ψ′(x) at `q` bits for any non-pole `x`.
pub(crate) fn trigamma(x: &HPReal, q: usize) -> Result<HPReal> {
    x.ensure_finite("trigamma argument")?;
    let m = shift_count(x, q)?;
    let mut tail = HPReal::zero(q);
    let mut arg = x.clone();
    for _ in 0..m {
        if arg.is_zero() {
            return Err(Error::NumericalFault("trigamma evaluated at a pole".into()));
        }
        let inv = arg.recip(q);
        tail = tail.add(&inv.mul(&inv, q), q);
        arg = arg.add(&HPReal::one(q), q);
    }
    let shifted = trigamma_asymptotic(&arg, q)?;
    let out = shifted.add(&tail, q);
    out.ensure_finite("trigamma")?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: usize = 256;

    fn close(a: &HPReal, b: &HPReal, bits: i64) -> bool {
        a.sub(b, Q).abs() < HPReal::pow2(-bits, 64)
    }

    // 50 digits of Euler's constant, used here purely as a cross-check.
    const GAMMA: &str = "0.57721566490153286060651209008240243104215933593992";

    #[test]
    fn bernoulli_table_matches_known_values() {
        let expect = [
            (0, 1i64, 1i64),
            (1, -1, 2),
            (2, 1, 6),
            (3, 0, 1),
            (4, -1, 30),
            (6, 1, 42),
            (8, -1, 30),
            (10, 5, 66),
            (12, -691, 2730),
            (14, 7, 6),
        ];
        for (m, n, d) in expect {
            assert_eq!(bernoulli(m), ExactRational::new(n, d), "B_{m}");
        }
    }

    #[test]
    fn digamma_at_one_is_minus_gamma() {
        let psi = digamma(&HPReal::one(Q), Q).unwrap();
        let gamma = HPReal::parse(GAMMA, Q).unwrap();
        assert!(close(&psi, &gamma.neg(), 160));
    }

    #[test]
    fn digamma_at_half() {
        // Ψ(1/2) = −γ − 2 ln 2
        let half = HPReal::pow2(-1, Q);
        let psi = digamma(&half, Q).unwrap();
        let gamma = HPReal::parse(GAMMA, Q).unwrap();
        let ln2 = HPReal::from_u64(2, Q).ln(Q);
        let expect = gamma.add(&ln2.scale_pow2(1), Q).neg();
        assert!(close(&psi, &expect, 160));
    }

    #[test]
    fn digamma_negative_argument() {
        // Ψ(−1/2) = Ψ(1/2) + 1/(1/2) = 2 − γ − 2 ln 2
        let minus_half = HPReal::pow2(-1, Q).neg();
        let psi = digamma(&minus_half, Q).unwrap();
        let gamma = HPReal::parse(GAMMA, Q).unwrap();
        let ln2 = HPReal::from_u64(2, Q).ln(Q);
        let expect = HPReal::from_u64(2, Q).sub(&gamma, Q).sub(&ln2.scale_pow2(1), Q);
        assert!(close(&psi, &expect, 160));
    }

    #[test]
    fn digamma_recurrence_holds() {
        // Ψ(x+1) − Ψ(x) = 1/x at an awkward x
        let x = HPReal::parse("3.7", Q).unwrap();
        let lhs = digamma(&x.add(&HPReal::one(Q), Q), Q)
            .unwrap()
            .sub(&digamma(&x, Q).unwrap(), Q);
        assert!(close(&lhs, &x.recip(Q), 200));
    }

    #[test]
    fn trigamma_at_one_is_pi_squared_over_six() {
        let psi1 = trigamma(&HPReal::one(Q), Q).unwrap();
        let pi = HPReal::pi(Q);
        let expect = pi.mul(&pi, Q).div(&HPReal::from_u64(6, Q), Q);
        assert!(close(&psi1, &expect, 200));
    }

    #[test]
    fn trigamma_at_half_is_pi_squared_over_two() {
        let psi1 = trigamma(&HPReal::pow2(-1, Q), Q).unwrap();
        let pi = HPReal::pi(Q);
        let expect = pi.mul(&pi, Q).scale_pow2(-1);
        assert!(close(&psi1, &expect, 200));
    }

    #[test]
    fn asymptotic_branch_agrees_with_shifted_branch() {
        let x = HPReal::from_u64(asymptotic_threshold(Q) + 7, Q);
        let direct = digamma_asymptotic(&x, Q).unwrap();
        let shifted = digamma(&x.sub(&HPReal::from_u64(30, Q), Q), Q).unwrap();
        // Ψ(x) = Ψ(x−30) + Σ_{j=1..30} 1/(x−j)
        let mut tail = HPReal::zero(Q);
        for j in 1..=30u64 {
            tail = tail.add(&x.sub(&HPReal::from_u64(j, Q), Q).recip(Q), Q);
        }
        assert!(close(&direct, &shifted.add(&tail, Q), 230));
    }
}
