use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dumbbell spec: {0}")]
    InvalidSpec(String),
    #[error("tube profile is not positive: rho({x}) = {value}")]
    DegenerateProfile { x: f64, value: f64 },
    #[error("x1 = {x} lies outside the tube [-{half_length}, {half_length}]")]
    OutOfDomain { x: f64, half_length: f64 },
    #[error("boundary polygon is not simple: {0}")]
    NonSimpleBoundary(String),
    #[error("mesh generation failed: {0}")]
    MeshFailure(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("triangle {index} is degenerate (area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("{method} did not converge after {iterations} iterations")]
    NoConvergence { method: &'static str, iterations: usize },
    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("invalid 1D grid: {0}")]
    InvalidGrid(String),
    #[error("no sign change on ({lo}, {hi})")]
    NoBracket { lo: f64, hi: f64 },
    #[error("w = {w} is a pole of cot(wL)")]
    PoleAt { w: f64 },
    #[error("sample point x1 = {x} is not covered by the tube mesh")]
    OutsideTube { x: f64 },
    #[error("function has (near) zero norm")]
    ZeroFunction,
    #[error("value {value} at index {index} must be positive")]
    NonPositiveValue { index: usize, value: f64 },
    #[error("need at least {needed} data points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpec(_)
                | Error::DegenerateProfile { .. }
                | Error::OutOfDomain { .. }
                | Error::NonSimpleBoundary(_)
                | Error::InvalidMesh(_)
                | Error::InvalidGrid(_)
                | Error::NonPositiveValue { .. }
                | Error::InsufficientData { .. }
                | Error::InvalidArgument(_)
                | Error::Json(_)
        )
    }
}
