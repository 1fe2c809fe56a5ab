use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Fock cutoff n_max = {n_max} leaves tail mass {tail:e} (limit 1e-12)")]
    TruncationTooSmall { n_max: usize, tail: f64 },

    #[error("index {index} exceeds Fock cutoff n_max = {n_max}")]
    InvalidCutoff { index: usize, n_max: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix trace {trace} differs from 1")]
    NotUnitTrace { trace: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("empty input")]
    EmptyInput,

    #[error("degenerate sweep: {0}")]
    DegenerateSweep(String),

    #[error("phase-space grid too coarse: integral {integral} vs expected {expected}")]
    GridTooCoarse { integral: f64, expected: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}
