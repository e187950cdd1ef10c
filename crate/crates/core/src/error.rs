//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Rational construction with a zero denominator.
    #[error("denominator is zero")]
    ZeroDenominator,

    /// Substituting h = 0 (or N = 0 in a hypothetical negative power) where a
    /// negative exponent is present.
    #[error("substitution evaluates a negative power ({exp}) at zero")]
    ZeroToNegativePower { exp: i64 },

    /// An operation tried to produce a variable beyond the configured cutoff.
    /// Results are never silently truncated; the caller must raise the cutoff.
    #[error("variable q{needed} exceeds the cutoff K = {cutoff}")]
    CutoffExceeded { needed: u32, cutoff: u32 },

    /// A one-body operator contained a monomial that does not strictly raise
    /// the energy grade (z-power >= 0).
    #[error("operator term z^{z_pow}*D^{d_pow} does not raise the grade")]
    NotGradeRaising { z_pow: i64, d_pow: u32 },

    /// A graded operator whose grade-k component is not proportional to h^k.
    #[error("grade-{grade} component carries coefficient {coeff}, not a pure h^{grade} multiple")]
    HbarGradeMismatch { grade: u32, coeff: String },

    /// The free-fermion mode calibration could not be pinned down.
    #[error("mode calibration failed: {0}")]
    Calibration(String),

    /// A (model, engine) combination outside the supported table.
    #[error("engine `{engine}` does not support model `{model}`")]
    UnsupportedEngine { model: String, engine: String },

    /// A flow generator with a grade-0 component cannot be exponentiated by
    /// the grade recursion.
    #[error("graded operator has a grade-0 component")]
    GradeZeroComponent,

    /// An internal consistency assertion failed; indicates a bug, not bad input.
    #[error("internal inconsistency: {0}")]
    Internal(String),

    /// Malformed caller input (unparsable rational, bad model string, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
