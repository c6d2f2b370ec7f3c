use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Lame parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("lambda = {lambda} lies within {tol:e} of the pole {pole}")]
    PoleProximity { lambda: String, pole: f64, tol: f64 },

    #[error("singular matrix: pivot {pivot:e} at column {column}")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("contour misconfigured: {0}")]
    ContourMisconfigured(String),

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("no interior unknowns remain after Dirichlet elimination (mesh too coarse)")]
    EmptyInterior,

    #[error("factorization failed: zero pivot {pivot:e} at row {row}; the shift probably hits an eigenvalue")]
    Factorization { row: usize, pivot: f64 },

    #[error("eigen-solver did not converge: {0}")]
    NonConvergence(String),

    #[error("incomplete spectrum: {0}")]
    IncompleteSpectrum(String),

    #[error("empty fitting window: {0}")]
    EmptyWindow(String),

    #[error("rank-deficient fit: condition number {0:e} exceeds 1e8")]
    RankDeficientFit(f64),

    #[error("inconsistent fit: {0}")]
    InconsistentFit(String),

    #[error("inconsistent metadata: {0}")]
    Consistency(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Tag an upstream error with the pipeline stage it came from.
    pub fn at(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping stage labels.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
