use thiserror::Error;

/// Errors raised by the numerical routines and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample {value} at node {coords:?}")]
    NonFinite { coords: Vec<f64>, value: String },

    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "grid too narrow for mode cap {modes}: turning radius {turning:.3} plus margin exceeds half-width {half_width}"
    )]
    GridTooNarrow {
        modes: usize,
        turning: f64,
        half_width: f64,
    },

    #[error("support overflow at scale {scale}: {detail}")]
    SupportOverflow { scale: f64, detail: String },

    #[error("Mehler quadrature unreliable at |sin t| = {0:.3e} (needs > 0.1)")]
    MehlerSingular(f64),

    #[error("dispersive ratio undefined at t = {0} (sin t = 0)")]
    DispersiveSingular(f64),

    #[error("Picard iteration did not converge in {iterations} iterations (last residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("non-uniform sampling: {0}")]
    NonUniform(String),

    #[error("decomposition bookkeeping violated: relative mismatch {0:.3e}")]
    Bookkeeping(f64),

    #[error("time lattice too coarse: spacing {spacing:.3e} exceeds {limit:.3e}")]
    LatticeTooCoarse { spacing: f64, limit: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
