//! Sequence prefixes, the transformation `T`, and the metric.
//!
//! Points of the sequence space are represented by finite prefixes
//! `(x₁, …, x_N)` with every term in `[0, 1]`. The metric
//! `d(a, b) = Σₙ 2⁻ⁿ |aₙ − bₙ|` is reported as an interval: the prefix
//! determines it up to the tail `Σ_{n>N} 2⁻ⁿ |aₙ − bₙ| ∈ [0, 2⁻ᴺ]`, so
//! `lo` sums the observed terms and `hi = lo + 2⁻ᴺ`.
//!
//! Everything here is generic over the scalar: exact rationals when the data
//! is rational, tracked-precision reals otherwise.

use crate::error::{Error, Result};
use crate::numerics::{HPReal, PrecisionContext, Scalar};

/// A prefix `(x₁, …, x_N)` of a sequence with terms in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqPrefix<T: Scalar> {
    terms: Vec<T>,
}

impl<T: Scalar> SeqPrefix<T> {
    /// Validates membership: at least one term, every term in `[0, 1]`.
    pub fn new(terms: Vec<T>, ctx: &PrecisionContext) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyPrefix);
        }
        for t in &terms {
            if !t.in_unit_interval(ctx) {
                return Err(Error::OutOfUnitInterval(t.format_term(ctx)));
            }
        }
        Ok(SeqPrefix { terms })
    }

    /// For outputs whose membership holds by construction.
    pub(crate) fn new_unchecked(terms: Vec<T>) -> Self {
        debug_assert!(!terms.is_empty());
        SeqPrefix { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn terms(&self) -> &[T] {
        &self.terms
    }

    /// 1-indexed access matching the usual subscripts: `term(1)` is `x₁`.
    pub fn term(&self, n: usize) -> Option<&T> {
        n.checked_sub(1).and_then(|i| self.terms.get(i))
    }

    /// The constant-zero prefix.
    pub fn zeros(n_terms: usize, ctx: &PrecisionContext) -> Result<Self> {
        Self::constant(T::zero(ctx), n_terms)
    }

    /// The constant-one prefix.
    pub fn ones(n_terms: usize, ctx: &PrecisionContext) -> Result<Self> {
        Self::constant(T::one(ctx), n_terms)
    }

    fn constant(value: T, n_terms: usize) -> Result<Self> {
        if n_terms == 0 {
            return Err(Error::EmptyPrefix);
        }
        Ok(SeqPrefix { terms: vec![value; n_terms] })
    }
}

/// The metric `d(a, b)` bracketed by prefix truncation: the true value lies
/// in `[lo, hi]`, and `hi − lo = 2⁻ᴺ` exactly.
#[derive(Debug, Clone)]
pub struct MetricValue {
    pub lo: HPReal,
    pub hi: HPReal,
}

impl MetricValue {
    fn from_prefix_sum(lo: HPReal, n_terms: usize) -> Self {
        let hi = lo.add_exact(&HPReal::pow2(-(n_terms as i64), 64));
        debug_assert!(!lo.is_negative() && hi <= HPReal::one(64));
        MetricValue { lo, hi }
    }

    /// `hi − lo`, computed exactly.
    pub fn width(&self) -> HPReal {
        self.hi.sub_exact(&self.lo)
    }
}

/// The geometric prefix `ā = (a, a², …, a^N)`.
pub fn geometric<T: Scalar>(a: &T, n_terms: usize, ctx: &PrecisionContext) -> Result<SeqPrefix<T>> {
    if !a.in_unit_interval(ctx) {
        return Err(Error::OutOfUnitInterval(a.format_term(ctx)));
    }
    if n_terms == 0 {
        return Err(Error::EmptyPrefix);
    }
    let mut terms = Vec::with_capacity(n_terms);
    let mut power = a.clone();
    for _ in 0..n_terms {
        terms.push(power.clone());
        power = power.mul(a, ctx);
    }
    Ok(SeqPrefix::new_unchecked(terms))
}

/// The transformation `T(x)ₙ = 1/(1 + x₁ + … + xₙ)`.
///
/// Partial sums accumulate left to right, so the result is deterministic and
/// exact for rational input. The image always lies in `[0, 1]` with first
/// term at least `1/2`; both facts survive rounding because `1/2`, `1`, and
/// `2` are representable and division rounds to nearest.
pub fn transform<T: Scalar>(x: &SeqPrefix<T>, ctx: &PrecisionContext) -> SeqPrefix<T> {
    let mut partial = T::one(ctx);
    let mut out = Vec::with_capacity(x.len());
    for t in x.terms() {
        partial = partial.add(t, ctx);
        out.push(partial.recip(ctx));
    }
    SeqPrefix::new_unchecked(out)
}

/// The metric interval between two prefixes of equal length.
pub fn metric<T: Scalar>(
    a: &SeqPrefix<T>,
    b: &SeqPrefix<T>,
    ctx: &PrecisionContext,
) -> Result<MetricValue> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let w = ctx.working_bits();
    let mut lo = HPReal::zero(w);
    for (n, (ta, tb)) in a.terms().iter().zip(b.terms()).enumerate() {
        let diff = ta.sub(tb, ctx).abs().to_real(ctx);
        lo = lo.add(&diff.scale_pow2(-(n as i64 + 1)), w);
    }
    Ok(MetricValue::from_prefix_sum(lo, a.len()))
}

/// The closed form `T(ā)ₙ = (1−a)/(1−a^(n+1))` for `a ∈ [0, 1)`.
///
/// At `a = 1` the expression degenerates; `T(1̄)ₙ = 1/(n+1)` is available
/// through [`transform`].
pub fn geometric_image_term(a: &HPReal, n: usize, ctx: &PrecisionContext) -> Result<HPReal> {
    let w = ctx.working_bits();
    let one = HPReal::one(w);
    if a.is_negative() || *a > one {
        return Err(Error::OutOfUnitInterval(a.to_decimal_string(ctx.decimal_digits())));
    }
    if *a == one {
        return Err(Error::DegenerateGeometricRatio("1".to_string()));
    }
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    let numer = one.sub(a, w);
    let denom = one.sub(&a.pow_u(n + 1, w), w);
    Ok(numer.div(&denom, w))
}

/// Parses the plain-text prefix format: one term per line, decimal or
/// `p/q`; `#` starts a comment; blank lines are skipped.
pub fn parse_prefix_text<T: Scalar>(text: &str, ctx: &PrecisionContext) -> Result<SeqPrefix<T>> {
    let mut terms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let term = T::parse_term(line, ctx).map_err(|_| Error::ParseTerm {
            line: i + 1,
            text: line.to_string(),
        })?;
        terms.push(term);
    }
    SeqPrefix::new(terms, ctx)
}

/// Formats a prefix in the same one-term-per-line format.
pub fn format_prefix_text<T: Scalar>(x: &SeqPrefix<T>, ctx: &PrecisionContext) -> String {
    let mut out = String::new();
    for t in x.terms() {
        out.push_str(&t.format_term(ctx));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{make_context, ExactRational};
    use proptest::prelude::*;

    fn ctx() -> PrecisionContext {
        make_context(128, None).unwrap()
    }

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d)
    }

    fn rational_prefix(fracs: &[(i64, i64)]) -> SeqPrefix<ExactRational> {
        let c = ctx();
        SeqPrefix::new(fracs.iter().map(|&(n, d)| q(n, d)).collect(), &c).unwrap()
    }

    #[test]
    fn membership_is_validated() {
        let c = ctx();
        assert!(matches!(
            SeqPrefix::new(vec![q(3, 2)], &c),
            Err(Error::OutOfUnitInterval(_))
        ));
        assert!(matches!(
            SeqPrefix::new(Vec::<ExactRational>::new(), &c),
            Err(Error::EmptyPrefix)
        ));
        assert!(matches!(
            SeqPrefix::new(vec![q(-1, 2)], &c),
            Err(Error::OutOfUnitInterval(_))
        ));
    }

    #[test]
    fn geometric_powers() {
        let c = ctx();
        let g = geometric(&q(1, 2), 3, &c).unwrap();
        assert_eq!(g.terms(), &[q(1, 2), q(1, 4), q(1, 8)]);
        let zeros = geometric(&q(0, 1), 4, &c).unwrap();
        assert_eq!(zeros.terms(), &[q(0, 1), q(0, 1), q(0, 1), q(0, 1)]);
        let ones = geometric(&q(1, 1), 4, &c).unwrap();
        assert!(ones.terms().iter().all(|t| t == &q(1, 1)));
        assert!(geometric(&q(2, 1), 2, &c).is_err());
    }

    #[test]
    fn transform_of_constant_sequences() {
        let c = ctx();
        let zeros = SeqPrefix::<ExactRational>::zeros(5, &c).unwrap();
        let t0 = transform(&zeros, &c);
        assert!(t0.terms().iter().all(|t| t == &q(1, 1)));

        let ones = SeqPrefix::<ExactRational>::ones(3, &c).unwrap();
        let t1 = transform(&ones, &c);
        assert_eq!(t1.terms(), &[q(1, 2), q(1, 3), q(1, 4)]);
    }

    #[test]
    fn transform_of_geometric_half() {
        let c = ctx();
        let g = geometric(&q(1, 2), 2, &c).unwrap();
        let tg = transform(&g, &c);
        assert_eq!(tg.terms(), &[q(2, 3), q(4, 7)]);
    }

    #[test]
    fn transform_of_reciprocal_integers() {
        // x = (1/2, 1/3, 1/4) = (1/(n+1)) maps to (2/3, 6/11, 12/25).
        let c = ctx();
        let x = rational_prefix(&[(1, 2), (1, 3), (1, 4)]);
        let tx = transform(&x, &c);
        assert_eq!(tx.terms(), &[q(2, 3), q(6, 11), q(12, 25)]);
    }

    #[test]
    fn metric_of_extremal_pair() {
        let c = ctx();
        let zeros = SeqPrefix::<HPReal>::zeros(20, &c).unwrap();
        let ones = SeqPrefix::<HPReal>::ones(20, &c).unwrap();
        let d = metric(&zeros, &ones, &c).unwrap();
        assert_eq!(d.hi, HPReal::one(64));
        assert_eq!(d.lo, HPReal::one(64).sub_exact(&HPReal::pow2(-20, 64)));
    }

    #[test]
    fn metric_of_identical_prefixes() {
        let c = ctx();
        let x = rational_prefix(&[(1, 3), (2, 5), (1, 7)]);
        let d = metric(&x, &x, &c).unwrap();
        assert!(d.lo.is_zero());
        assert_eq!(d.hi, HPReal::pow2(-3, 64));
    }

    #[test]
    fn metric_of_zero_and_geometric_half() {
        // d(0̄, ā) = a/(2−a) = 1/3 at a = 1/2, up to the 4^-N truncation.
        let c = ctx();
        let a = HPReal::pow2(-1, c.working_bits());
        let zeros = SeqPrefix::<HPReal>::zeros(64, &c).unwrap();
        let g = geometric(&a, 64, &c).unwrap();
        let d = metric(&zeros, &g, &c).unwrap();
        let third = HPReal::from_rational(&q(1, 3), c.working_bits());
        assert!(d.lo < third);
        assert!(third.sub(&d.lo, 64).abs() < HPReal::pow2(-120, 64));
    }

    #[test]
    fn metric_rejects_unequal_lengths() {
        let c = ctx();
        let a = SeqPrefix::<HPReal>::zeros(4, &c).unwrap();
        let b = SeqPrefix::<HPReal>::zeros(5, &c).unwrap();
        assert!(matches!(metric(&a, &b, &c), Err(Error::LengthMismatch(4, 5))));
    }

    #[test]
    fn geometric_image_term_closed_form() {
        let c = ctx();
        let w = c.working_bits();
        let half = HPReal::pow2(-1, w);
        let eps = HPReal::pow2(-(w as i64) + 8, 64);
        let t1 = geometric_image_term(&half, 1, &c).unwrap();
        assert!(t1.sub(&q(2, 3).to_real(&c), w).abs() < eps);
        let t2 = geometric_image_term(&half, 2, &c).unwrap();
        assert!(t2.sub(&q(4, 7).to_real(&c), w).abs() < eps);
        let at_zero = geometric_image_term(&HPReal::zero(w), 5, &c).unwrap();
        assert_eq!(at_zero, HPReal::one(64));
        assert!(matches!(
            geometric_image_term(&HPReal::one(w), 1, &c),
            Err(Error::DegenerateGeometricRatio(_))
        ));
        assert!(matches!(
            geometric_image_term(&half, 0, &c),
            Err(Error::ZeroIndex)
        ));
    }

    #[test]
    fn text_format_roundtrip_and_comments() {
        let c = ctx();
        let text = "# header\n1/2\n\n0.25 # trailing\n1e-3\n";
        let x: SeqPrefix<ExactRational> = parse_prefix_text(text, &c).unwrap();
        assert_eq!(x.terms(), &[q(1, 2), q(1, 4), q(1, 1000)]);
        let again: SeqPrefix<ExactRational> =
            parse_prefix_text(&format_prefix_text(&x, &c), &c).unwrap();
        assert_eq!(again, x);

        let bad = parse_prefix_text::<ExactRational>("1/2\noops\n", &c);
        match bad {
            Err(Error::ParseTerm { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    /// Dyadic terms `k/2^64` drawn uniformly; exact at any working precision.
    fn dyadic_prefix(words: Vec<u64>, c: &PrecisionContext) -> SeqPrefix<HPReal> {
        let terms = words
            .into_iter()
            .map(|u| HPReal::from_u64(u, c.working_bits()).scale_pow2(-64))
            .collect();
        SeqPrefix::new(terms, c).unwrap()
    }

    proptest! {
        #[test]
        fn transform_lands_in_the_contraction_set(words in prop::collection::vec(any::<u64>(), 1..24)) {
            let c = ctx();
            let x = dyadic_prefix(words, &c);
            let y = transform(&x, &c);
            let half = HPReal::pow2(-1, 64);
            prop_assert!(y.terms()[0] >= half);
            for t in y.terms() {
                prop_assert!(t.in_unit_interval(&c));
            }
        }

        #[test]
        fn transform_is_non_increasing(words in prop::collection::vec(any::<u64>(), 2..24)) {
            let c = ctx();
            let x = dyadic_prefix(words, &c);
            let y = transform(&x, &c);
            for pair in y.terms().windows(2) {
                prop_assert!(pair[0] >= pair[1]);
            }
            // Strict decrease once some earlier term is positive.
            let positive_seen = x.terms()[0].is_positive();
            if positive_seen {
                prop_assert!(y.terms()[0] > y.terms()[1]);
            }
        }

        #[test]
        fn metric_is_symmetric_and_triangular(
            wa in prop::collection::vec(any::<u64>(), 8),
            wb in prop::collection::vec(any::<u64>(), 8),
            wc in prop::collection::vec(any::<u64>(), 8),
        ) {
            let c = ctx();
            let a = dyadic_prefix(wa, &c);
            let b = dyadic_prefix(wb, &c);
            let cc = dyadic_prefix(wc, &c);
            let dab = metric(&a, &b, &c).unwrap();
            let dba = metric(&b, &a, &c).unwrap();
            prop_assert_eq!(dab.lo.clone(), dba.lo);
            // Dyadic data keeps every sum exact, so the triangle inequality
            // holds with no slack at all.
            let dac = metric(&a, &cc, &c).unwrap();
            let dcb = metric(&cc, &b, &c).unwrap();
            prop_assert!(dab.lo <= dac.lo.add(&dcb.lo, c.working_bits()));
        }

        #[test]
        fn metric_tail_bound_is_exact(
            words in prop::collection::vec(any::<u64>(), 1..40),
            shift in 0u64..3,
        ) {
            let c = ctx();
            let n = words.len();
            let a = dyadic_prefix(words.clone(), &c);
            let b = dyadic_prefix(words.into_iter().map(|w| w >> shift).collect(), &c);
            let d = metric(&a, &b, &c).unwrap();
            prop_assert_eq!(d.width(), HPReal::pow2(-(n as i64), 64));
            prop_assert!(!d.lo.is_negative());
            prop_assert!(d.hi <= HPReal::one(64));
        }

        #[test]
        fn geometric_image_term_matches_transform(num in 1u32..255, n in 1usize..12) {
            // a = num/256, safely inside [0, 1).
            let c = ctx();
            let w = c.working_bits();
            let a = HPReal::from_u64(num as u64, w).scale_pow2(-8);
            let closed = geometric_image_term(&a, n, &c).unwrap();
            let direct = transform(&geometric(&a, n, &c).unwrap(), &c);
            let diff = closed.sub(&direct.terms()[n - 1], w).abs();
            prop_assert!(diff < c.tol().clone());
        }

        #[test]
        fn prefix_text_roundtrip_hp(words in prop::collection::vec(any::<u64>(), 1..12)) {
            let c = ctx();
            // Terms at the quoted precision roundtrip bit-for-bit.
            let terms: Vec<HPReal> = words
                .into_iter()
                .map(|u| HPReal::from_u64(u, c.working_bits()).scale_pow2(-64).round_to(c.precision_bits() as usize))
                .collect();
            let x = SeqPrefix::new(terms, &c).unwrap();
            let back: SeqPrefix<HPReal> = parse_prefix_text(&format_prefix_text(&x, &c), &c).unwrap();
            prop_assert_eq!(back, x);
        }
    }
}
