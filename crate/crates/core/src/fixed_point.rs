//! The fixed point of the transformation, iteration trajectories, and
//! contraction measurements.
//!
//! The fixed point `(mₙ)` satisfies `(1 + m₁ + … + mₙ) mₙ = 1`. Its terms
//! obey `m₁ = (√5 − 1)/2` and the quadratic `m_{n+1}² + m_{n+1}/mₙ − 1 = 0`,
//! solved here in the rationalized form `m_{n+1} = 2/(1/mₙ + √(1/mₙ² + 4))`
//! to avoid subtractive cancellation when `mₙ` is small.
//!
//! Contraction facts measured by this module: the transformation is
//! 2-Lipschitz on the whole space (and no better), and an `8/9`-contraction
//! on the subset where the first term is at least `1/2`, which the image of
//! every point lies in. The pairwise bound `2/((1+a₁)(1+b₁))` refines both.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::numerics::{HPReal, PrecisionContext, Scalar};
use crate::sequences::{metric, transform, MetricValue, SeqPrefix};

/// The fixed-point prefix `(m₁, …, m_N)` with the defect of the defining
/// identity at each index.
#[derive(Debug, Clone)]
pub struct FixedPointPrefix {
    terms: SeqPrefix<HPReal>,
    residuals: Vec<HPReal>,
}

impl FixedPointPrefix {
    pub fn terms(&self) -> &SeqPrefix<HPReal> {
        &self.terms
    }

    /// `residuals()[n-1] = (1 + m₁ + … + mₙ)·mₙ − 1`.
    pub fn residuals(&self) -> &[HPReal] {
        &self.residuals
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// One iteration run: the start, the iterates `T(ξ), T²(ξ), …`, and each
/// iterate's distance interval to the fixed-point prefix of equal length.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub start: SeqPrefix<HPReal>,
    pub iterates: Vec<SeqPrefix<HPReal>>,
    pub distances_to_fixed_point: Vec<MetricValue>,
}

/// Measured contraction behaviour of one pair.
#[derive(Debug, Clone)]
pub struct RatioReport {
    pub pair: (SeqPrefix<HPReal>, SeqPrefix<HPReal>),
    /// `metric(Ta, Tb).lo / metric(a, b).lo`.
    pub ratio: HPReal,
    /// The pairwise bound `2/((1+a₁)(1+b₁))`.
    pub bound_used: HPReal,
    /// Whether both first terms are at least `1/2` (then `bound_used ≤ 8/9`).
    pub in_contraction_set: bool,
}

/// Summary of a randomized Lipschitz scan.
#[derive(Debug, Clone)]
pub struct RatioScanReport {
    pub samples: usize,
    pub in_contraction_set: bool,
    pub max_ratio: HPReal,
}

/// Computes `(m₁, …, m_N)` by the closed recurrence, with residuals.
pub fn fixed_point_terms(n_terms: usize, ctx: &PrecisionContext) -> Result<FixedPointPrefix> {
    if n_terms == 0 {
        return Err(Error::EmptyPrefix);
    }
    let w = ctx.working_bits();
    let one = HPReal::one(w);
    let four = HPReal::from_u64(4, w);

    let mut terms = Vec::with_capacity(n_terms);
    let mut m = HPReal::from_u64(5, w).sqrt(w).sub(&one, w).scale_pow2(-1);
    terms.push(m.clone());
    for _ in 1..n_terms {
        let inv = m.recip(w);
        let radical = inv.mul(&inv, w).add(&four, w).sqrt(w);
        m = inv.add(&radical, w).recip(w).scale_pow2(1);
        terms.push(m.clone());
    }

    let mut residuals = Vec::with_capacity(n_terms);
    let mut sum = one.clone();
    for t in &terms {
        sum = sum.add(t, w);
        residuals.push(sum.mul(t, w).sub(&one, w));
    }

    let prefix = SeqPrefix::new(terms, ctx)?;
    debug_assert!(prefix.terms().windows(2).all(|p| p[0] > p[1]));
    Ok(FixedPointPrefix { terms: prefix, residuals })
}

/// Applies the transformation `k_steps` times, recording each iterate and
/// its distance to the fixed-point prefix of the same length.
pub fn iterate(
    x0: &SeqPrefix<HPReal>,
    k_steps: usize,
    ctx: &PrecisionContext,
) -> Result<Trajectory> {
    if k_steps == 0 {
        return Err(Error::ZeroIndex);
    }
    let fp = fixed_point_terms(x0.len(), ctx)?;
    let mut iterates = Vec::with_capacity(k_steps);
    let mut distances = Vec::with_capacity(k_steps);
    let mut current = x0.clone();
    for _ in 0..k_steps {
        current = transform(&current, ctx);
        distances.push(metric(&current, fp.terms(), ctx)?);
        iterates.push(current.clone());
    }
    Ok(Trajectory { start: x0.clone(), iterates, distances_to_fixed_point: distances })
}

/// Measures `metric(Ta, Tb).lo / metric(a, b).lo` and the pairwise bound.
pub fn contraction_ratio(
    a: &SeqPrefix<HPReal>,
    b: &SeqPrefix<HPReal>,
    ctx: &PrecisionContext,
) -> Result<RatioReport> {
    let w = ctx.working_bits();
    let base = metric(a, b, ctx)?;
    if &base.lo <= ctx.tol() {
        return Err(Error::MetricTooSmall(base.lo.to_decimal_string(ctx.decimal_digits())));
    }
    let image = metric(&transform(a, ctx), &transform(b, ctx), ctx)?;
    let ratio = image.lo.div(&base.lo, w);

    let one = HPReal::one(w);
    let a1 = &a.terms()[0];
    let b1 = &b.terms()[0];
    let denom = one.add(a1, w).mul(&one.add(b1, w), w);
    let bound_used = denom.recip(w).scale_pow2(1);
    let half = HPReal::pow2(-1, 64);
    let in_contraction_set = *a1 >= half && *b1 >= half;

    Ok(RatioReport {
        pair: (a.clone(), b.clone()),
        ratio,
        bound_used,
        in_contraction_set,
    })
}

/// Evaluates the sharpness construction pairing `0̄` against geometric
/// sequences `ā`: for each `a`, the ratio
/// `d(T(0̄), T(ā)).lo / d(0̄, ā) = (2−a) Σ_{n≤N} 2⁻ⁿ (1−aⁿ)/(1−a^{n+1})`,
/// where the denominator uses the full-series value `a/(2−a)`. The ratios
/// climb toward the Lipschitz constant 2 as `a` decreases.
///
/// At `a = 1` the summand degenerates to `n/(n+1)` and is evaluated that way.
pub fn lipschitz_lower_scan(
    a_values: &[HPReal],
    n_terms: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<(HPReal, HPReal)>> {
    if n_terms < 32 {
        return Err(Error::PrefixTooShort { needed: 32, got: n_terms });
    }
    let w = ctx.working_bits();
    let one = HPReal::one(w);
    let mut out = Vec::with_capacity(a_values.len());
    for a in a_values {
        if a.is_zero() {
            return Err(Error::DegenerateGeometricRatio("0".to_string()));
        }
        if a.is_negative() || *a > one {
            return Err(Error::OutOfUnitInterval(a.to_decimal_string(ctx.decimal_digits())));
        }
        let ratio = if *a == one {
            let mut sum = HPReal::zero(w);
            for n in 1..=n_terms {
                let frac = HPReal::from_u64(n as u64, w).div(&HPReal::from_u64(n as u64 + 1, w), w);
                sum = sum.add(&frac.scale_pow2(-(n as i64)), w);
            }
            sum
        } else {
            let mut sum = HPReal::zero(w);
            let mut power = a.clone();
            for n in 1..=n_terms {
                let next_power = power.mul(a, w);
                let frac = one.sub(&power, w).div(&one.sub(&next_power, w), w);
                sum = sum.add(&frac.scale_pow2(-(n as i64)), w);
                power = next_power;
            }
            HPReal::from_u64(2, w).sub(a, w).mul(&sum, w)
        };
        out.push((a.clone(), ratio));
    }
    Ok(out)
}

/// A deterministic, portable generator for the randomized scans.
pub fn seeded_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Draws a prefix with i.i.d. terms `k/2^64`, uniform on `[0, 1)`. With
/// `in_contraction_set`, the first term is instead uniform on `[1/2, 1)`.
/// Dyadic terms are exact at any working precision.
pub fn random_prefix(
    rng: &mut ChaCha12Rng,
    n_terms: usize,
    in_contraction_set: bool,
    ctx: &PrecisionContext,
) -> Result<SeqPrefix<HPReal>> {
    if n_terms == 0 {
        return Err(Error::EmptyPrefix);
    }
    let w = ctx.working_bits();
    let half = HPReal::pow2(-1, w);
    let mut terms = Vec::with_capacity(n_terms);
    for i in 0..n_terms {
        let u = HPReal::from_u64(rng.next_u64(), w).scale_pow2(-64);
        let t = if i == 0 && in_contraction_set {
            half.add_exact(&u.scale_pow2(-1))
        } else {
            u
        };
        terms.push(t);
    }
    Ok(SeqPrefix::new_unchecked(terms))
}

/// Runs `samples` random pairs through [`contraction_ratio`] and reports the
/// largest ratio seen. With `in_contraction_set`, both prefixes are drawn
/// from the contraction set and the maximum stays at or below `8/9`;
/// otherwise it stays at or below the Lipschitz constant 2.
pub fn max_random_ratio(
    samples: usize,
    n_terms: usize,
    seed: u64,
    in_contraction_set: bool,
    ctx: &PrecisionContext,
) -> Result<RatioScanReport> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let mut rng = seeded_rng(seed);
    let mut max_ratio = HPReal::zero(ctx.working_bits());
    for _ in 0..samples {
        let a = random_prefix(&mut rng, n_terms, in_contraction_set, ctx)?;
        let b = random_prefix(&mut rng, n_terms, in_contraction_set, ctx)?;
        let report = contraction_ratio(&a, &b, ctx)?;
        if report.ratio > max_ratio {
            max_ratio = report.ratio;
        }
    }
    Ok(RatioScanReport { samples, in_contraction_set, max_ratio })
}
