use thiserror::Error;

/// Errors raised while building, validating or evolving search models.
#[derive(Debug, Error)]
pub enum Error {
    #[error("normalization error: level weights sum to {sum} (expected 1)")]
    Normalization { sum: f64 },

    #[error("empty kernel: no level with theta = 0 carries target weight")]
    EmptyKernel,

    #[error("phase out of range: {what} = {value}")]
    PhaseRange { what: &'static str, value: f64 },

    #[error("invalid level {index}: {reason}")]
    InvalidLevel { index: usize, reason: String },

    #[error("no gapped level: theta_min is undefined")]
    Gap,

    #[error("tolerance {0} outside (0, 1e-6]")]
    Tolerance(f64),

    #[error("degenerate bracket between poles {lo} and {hi}")]
    Bracket { lo: f64, hi: f64 },

    #[error("eigenphase {lambda} coincides with level phase {theta}")]
    Singularity { lambda: f64, theta: f64 },

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("first moment must vanish, got {0}")]
    Moment(f64),

    #[error("index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },

    #[error("dimension {dim} exceeds the dense cap {cap}")]
    Size { dim: usize, cap: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),

    #[error("target ({x}, {y}) outside a lattice of side {side}")]
    Target { x: usize, y: usize, side: usize },

    #[error("degenerate trace: {0}")]
    DegenerateTrace(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors caused by invalid input data rather than I/O.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
