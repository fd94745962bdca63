//! Crate-wide error type.

/// Errors produced by the ellipstone library.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("polynomials must be homogeneous of the same degree (got {left:?} and {right:?})")]
    DegreeMismatch {
        left: Option<u32>,
        right: Option<u32>,
    },

    #[error("expected {expected} variables, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("polynomial parse error: {0}")]
    Parse(String),

    #[error("invalid semiaxes: {0}")]
    InvalidSemiaxes(String),

    #[error("confocal parameter {lambda} out of range (must exceed {min})")]
    LambdaOutOfRange { lambda: f64, min: f64 },

    #[error("point lies strictly inside the ellipsoid")]
    PointInside,

    #[error("focal ellipsoid is degenerate (a_{{N-1}} = a_N)")]
    DegenerateFocal,

    #[error("data polynomial is not harmonic")]
    HarmonicityViolated,

    #[error("target accuracy not met: achieved {achieved:e}, requested {requested:e}")]
    TargetAccuracyNotMet { achieved: f64, requested: f64 },

    #[error("interior quadratic fit residual {residual:e} exceeds {limit:e}")]
    FitResidualTooLarge { residual: f64, limit: f64 },

    #[error("point is not exterior to the ellipsoid")]
    PointNotExterior,

    #[error("point is not inside the cavity")]
    PointNotInCavity,

    #[error("evaluation path touches the focal set")]
    PathTouchesFocalSet,

    #[error("moment matrix numerically singular (condition estimate {cond:e})")]
    NumericallySingular { cond: f64 },

    #[error("homothety factor must exceed 1 (got {0})")]
    InvalidHomothety(f64),

    #[error("time {t} outside the schedule window [0, {total})")]
    TimeOutOfRange { t: f64, total: f64 },

    #[error("root finder failed to converge: {0}")]
    RootFindFailed(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
