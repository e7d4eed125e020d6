//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Working precision below the 53-bit floor.
    #[error("precision of {0} bits is below the 53-bit minimum")]
    PrecisionTooLow(u32),

    /// Tolerance outside (0, 1).
    #[error("tolerance must lie strictly between 0 and 1")]
    InvalidTolerance,

    /// A sequence term (or measure atom) outside the unit interval.
    #[error("value outside [0,1]: {0}")]
    OutOfUnitInterval(String),

    /// Prefixes must contain at least one term.
    #[error("sequence prefix must be non-empty")]
    EmptyPrefix,

    /// Metric and ratio computations require equal prefix lengths.
    #[error("prefix lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    /// The geometric family degenerates at an endpoint of the ratio range.
    #[error("geometric ratio {0} is degenerate here")]
    DegenerateGeometricRatio(String),

    /// A prefix is shorter than an operation requires.
    #[error("prefix of length {got} is shorter than the required {needed}")]
    PrefixTooShort { needed: usize, got: usize },

    /// Contraction ratios are undefined when the base distance is within tolerance of zero.
    #[error("metric distance {0} is within tolerance; contraction ratio undefined")]
    MetricTooSmall(String),

    /// Difference-table depth exceeds the available terms.
    #[error("depth {depth} exceeds the {available} available terms")]
    DepthExceedsTerms { depth: usize, available: usize },

    /// Measure weights must be positive and sum to one.
    #[error("measure is not a probability measure: {0}")]
    InvalidMeasure(String),

    /// Argument at or too close to a pole of the digamma/trigamma functions.
    #[error("argument {0} too close to a non-positive-integer pole")]
    PoleProximity(String),

    /// No sign change found while bracketing a digamma root.
    #[error("failed to bracket root index {0}; digamma evaluation is suspect")]
    BracketFailure(usize),

    /// Index must be at least one.
    #[error("index must be >= 1")]
    ZeroIndex,

    /// Exponent arguments of the measure identity must be non-negative.
    #[error("argument must be non-negative, got {0}")]
    NegativeArgument(String),

    /// A computation produced a non-finite value.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// A numeric quantity failed its defining identity beyond tolerance.
    #[error("numerical fault: {0}")]
    NumericalFault(String),

    /// Malformed term in a sequence text file.
    #[error("cannot parse term on line {line}: {text:?}")]
    ParseTerm { line: usize, text: String },

    /// Sample counts must be positive.
    #[error("sample count must be >= 1")]
    NoSamples,
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
