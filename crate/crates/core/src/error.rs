use thiserror::Error;

/// Error type for every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error(
        "insufficient Kronecker factors: {needed} nulls requested but the array factorizes into \
         {available} factors (antenna selection to a composite size is required)"
    )]
    InsufficientFactors { needed: usize, available: usize },

    #[error("degenerate scenario: a data path and a nulled path share the same angle")]
    DegenerateScenario,

    #[error("target angle coincides with a null angle")]
    TargetInNullSet,

    #[error("zero angular separation between paths")]
    ZeroSeparation,

    #[error("no binary orthogonal pilot construction for {users} users and length {len}")]
    UnsupportedPilotLength { users: usize, len: usize },

    #[error("{users} users cannot have orthogonal pilots of length {len}")]
    TooManyUsers { users: usize, len: usize },

    #[error("row index {row} out of range 2..={len}")]
    InvalidRowIndex { row: usize, len: usize },

    #[error("matrix is singular or not positive definite")]
    Singular,

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable class name.
    pub fn class(&self) -> &'static str {
        match self {
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InsufficientFactors { .. } => "InsufficientFactors",
            Error::DegenerateScenario => "DegenerateScenario",
            Error::TargetInNullSet => "TargetInNullSet",
            Error::ZeroSeparation => "ZeroSeparation",
            Error::UnsupportedPilotLength { .. } => "UnsupportedPilotLength",
            Error::TooManyUsers { .. } => "TooManyUsers",
            Error::InvalidRowIndex { .. } => "InvalidRowIndex",
            Error::Singular => "Singular",
            Error::EmptySpectrum => "EmptySpectrum",
            Error::UnknownPreset(_) => "UnknownPreset",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            got,
        })
    }
}
