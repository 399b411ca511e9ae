use thiserror::Error;

/// Errors raised by the geometry, mesh, local element and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate edge: parametric speed {speed:e} is below the regularity threshold")]
    DegenerateEdge { speed: f64 },

    #[error("cell boundary does not close (largest gap {gap:e})")]
    OpenLoop { gap: f64 },

    #[error("cell has non-positive signed area {area:e}")]
    NegativeArea { area: f64 },

    #[error("star point is invalid: fan Jacobian changes sign")]
    StarPointInvalid,

    #[error("mesh deformation inverts cell {cell}")]
    InvertedCell { cell: usize },

    #[error("curve meets edge {edge} tangentially")]
    TangentialIntersection { edge: usize },

    #[error("boundary of cell {cell} is crossed {crossings} times by the cutting curve")]
    TooManyCrossings { cell: usize, crossings: usize },

    #[error("cutting curve ends inside cell {cell}")]
    CurveEndsInsideCell { cell: usize },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("index {index} out of range for basis of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("polynomial change-of-basis matrix is singular")]
    SingularBasis,

    #[error("{what} is not symmetric positive definite")]
    NotSpd { what: &'static str },

    #[error("vector mass matrix of cell {cell} is singular")]
    SingularGram { cell: usize },

    #[error("divergence coupling of cell {cell} is rank deficient")]
    RankDeficientB { cell: usize },

    #[error("natural boundary is empty; pressure is only determined up to a constant")]
    EmptyNaturalBoundary,

    #[error("global system is singular or inaccurate (relative residual {residual:e}): {detail}")]
    SingularSystem { residual: f64, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether the error stems from malformed input rather than from a
    /// geometric or numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Self::Parse { .. }
                | Self::InvalidInput(_)
                | Self::Io(_)
                | Self::Topology(_)
                | Self::IndexOutOfRange { .. }
                | Self::EmptyNaturalBoundary
        )
    }
}
