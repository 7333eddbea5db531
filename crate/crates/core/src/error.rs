use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin quantum number {0}: 2j must be a positive integer")]
    InvalidSpin(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("eigensolver failed to converge")]
    Eigensolver,

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("next-nearest neighbour of point {0} sits at zero distance")]
    CoincidentNeighbours(usize),

    #[error("parity blocks leak: off-block norm {0:e}")]
    ParityLeak(f64),

    #[error("tangent vectors collapsed at period {0}")]
    TangentCollapse(usize),

    #[error("empty initial-condition grid")]
    EmptyGrid,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable name of the variant, used in failure records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpin(_) => "invalid_spin",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NonFinite(_) => "non_finite",
            Error::Eigensolver => "eigensolver",
            Error::TooFewPoints { .. } => "too_few_points",
            Error::CoincidentNeighbours(_) => "coincident_neighbours",
            Error::ParityLeak(_) => "parity_leak",
            Error::TangentCollapse(_) => "tangent_collapse",
            Error::EmptyGrid => "empty_grid",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }

    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_)
                | Error::Eigensolver
                | Error::CoincidentNeighbours(_)
                | Error::ParityLeak(_)
                | Error::TangentCollapse(_)
        )
    }
}
