use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime context mismatch: {left} vs {right}")]
    ContextMismatch { left: u64, right: u64 },
    #[error("cannot parse rational `{0}`")]
    ParseRational(String),
    #[error("alpha must exceed {min}, got {alpha}")]
    AlphaOutOfRange { alpha: f64, min: f64 },
    #[error("spectral guard violation: {0}")]
    GuardViolation(String),
    #[error("empty or inverted scale window")]
    EmptyWindow,
    #[error("frequency index {j} outside 1..={max}")]
    FrequencyOutOfRange { j: u32, max: u32 },
    #[error("evaluation point coincides with the source center")]
    CoincidentPoints,
    #[error("interaction points must be pairwise distinct")]
    DuplicatePoints,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("eta matrix required but absent")]
    MissingEta,
    #[error("eta matrix is singular")]
    SingularEta,
    #[error("point set is not closed under negation")]
    NotNegationClosed,
    #[error("singular linear system")]
    SingularSystem,
    #[error("characteristic function is not real-valued on the axis")]
    NonRealCharacteristic,
    #[error("contour passes too close to a zero")]
    ContourNearZero,
    #[error("rectangle violates the spectral guard: {0}")]
    InvalidRectangle(String),
    #[error("lambda sits on a jump of the spectral shift")]
    SpectralShiftJump,
    #[error("zero coupling: the free operator has no perturbed point spectrum")]
    FreeCoupling,
    #[error("modified wavelets require p >= 3")]
    PrimeTooSmall,
    #[error("green component carries lambda != -1")]
    GreenLambdaNotMinusOne,
    #[error("green center does not belong to the configured point set")]
    UnknownGreenCenter,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI maps this error to: 2 for validation
    /// problems, 3 for numerical refusals.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::GuardViolation(_)
            | Error::SingularSystem
            | Error::NonRealCharacteristic
            | Error::ContourNearZero
            | Error::SpectralShiftJump => 3,
            _ => 2,
        }
    }
}
