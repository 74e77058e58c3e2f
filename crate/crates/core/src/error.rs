use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("grid or mass mismatch between operands")]
    GridMismatch,

    #[error("zero mode carries {fraction:.3e} of the spectral mass; division by the dispersion is singular at m = 0")]
    SingularMode { fraction: f64 },

    #[error("boundary-decay invariant violated: outer-shell mass fraction {fraction:.3e} exceeds {threshold:.1e}")]
    DecayViolated { fraction: f64, threshold: f64 },

    #[error("non-finite sample in grid field")]
    NonFinite,

    #[error("region is not contained in the grid box with the required margin")]
    RegionOutsideGrid,

    #[error("massless formula requested with m = {0}")]
    MassNotZero(f64),

    #[error("data not localized in the region: exterior mass fraction {0:.3e}")]
    NotLocalized(f64),

    #[error("translation vector is not spacelike and right-pointing")]
    NotSpacelikeRight,

    #[error("linear solve failed: {0}")]
    SolveFailure(String),

    #[error("eigenvalue solve failed: {0}")]
    EigSolveFailure(String),

    #[error("truncation not converged: relative shift {shift:.3e} exceeds {tolerance:.1e}")]
    TruncationNotConverged { shift: f64, tolerance: f64 },

    #[error("boundary traces disagree by {0:.3e}")]
    TraceMismatch(f64),

    #[error("zero denominator in Rayleigh quotient")]
    ZeroDenominator,

    #[error("resampled profile is under-resolved (compression factor {0:.3})")]
    ResampleUnderResolved(f64),

    #[error("malformed file: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
