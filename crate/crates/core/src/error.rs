//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong while manipulating filtrations, orbits and
/// boundary data.  Variants are coarse on purpose: callers mostly need the
/// name, the CLI maps all of them to a single "math domain" exit code.
#[derive(Debug, Error)]
pub enum Error {
    /// Two operands live in different ambient symplectic spaces.
    #[error("ambient symplectic spaces differ")]
    AmbientMismatch,

    /// Dimensions of an operand do not match the ambient space.
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    /// A matrix expected to be nilpotent is not.
    #[error("matrix is not nilpotent")]
    NotNilpotent,

    /// A matrix does not lie in the symplectic Lie algebra of the form.
    #[error("matrix is not infinitesimally symplectic")]
    NotInfinitesimallySymplectic,

    /// An integer matrix does not preserve the symplectic form.
    #[error("matrix is not integral symplectic")]
    NotSymplectic,

    /// A filtration fails the compact-dual membership conditions.
    #[error("filtration is not in the compact dual: {0}")]
    NotInCompactDual(String),

    /// A filtration is in the compact dual but not in the period domain.
    #[error("filtration is not in the period domain")]
    NotInPeriodDomain,

    /// The Deligne formula did not produce a direct sum decomposition.
    #[error("bigrading pieces do not form a direct sum")]
    NotDirectSum,

    /// An operation restricted to nilpotency index <= 2 met a higher index.
    #[error("nilpotency index exceeds 2")]
    IndexTooHigh,

    /// A linear solve was inconsistent or under-determined.
    #[error("linear solve failed: {0}")]
    SolveFailed(String),

    /// A mixed Hodge structure expected to be R-split is not.
    #[error("mixed Hodge structure is not R-split")]
    NotRSplit,

    /// No (or no unique) sl2-triple completion exists.
    #[error("no sl2-triple completion")]
    NoTriple,

    /// A pair (N, F) is not a nilpotent orbit.
    #[error("pair is not a nilpotent orbit")]
    NotAnOrbit,

    /// A parity-specific boundary map was applied to the wrong parity.
    #[error("wrong parity for this boundary map")]
    WrongParity,

    /// A square matrix that must be invertible is singular.
    #[error("singular matrix")]
    Singular,

    /// Free-form parameter validation failure.
    #[error("invalid parameter: {0}")]
    BadParam(String),

    /// Hodge numbers fail weight -1 symmetry or do not sum to the rank.
    #[error("invalid hodge numbers: {0}")]
    BadHodgeNumbers(String),

    /// An experiment point left the allowed region during a schedule.
    #[error("schedule violation at step {0}")]
    ScheduleViolation(usize),

    /// A verification identity failed; the payload names it.
    #[error("identity check failed: {0}")]
    CheckFailed(String),
}

impl Error {
    /// Stable machine-readable name, used in JSON error reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::AmbientMismatch => "AmbientMismatch",
            Error::DimMismatch(_) => "DimMismatch",
            Error::NotNilpotent => "NotNilpotent",
            Error::NotInfinitesimallySymplectic => "NotInfinitesimallySymplectic",
            Error::NotSymplectic => "NotSymplectic",
            Error::NotInCompactDual(_) => "NotInCompactDual",
            Error::NotInPeriodDomain => "NotInPeriodDomain",
            Error::NotDirectSum => "NotDirectSum",
            Error::IndexTooHigh => "IndexTooHigh",
            Error::SolveFailed(_) => "SolveFailed",
            Error::NotRSplit => "NotRSplit",
            Error::NoTriple => "NoTriple",
            Error::NotAnOrbit => "NotAnOrbit",
            Error::WrongParity => "WrongParity",
            Error::Singular => "Singular",
            Error::BadParam(_) => "BadParam",
            Error::BadHodgeNumbers(_) => "BadHodgeNumbers",
            Error::ScheduleViolation(_) => "ScheduleViolation",
            Error::CheckFailed(_) => "CheckFailed",
        }
    }
}
