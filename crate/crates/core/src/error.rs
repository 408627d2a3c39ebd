//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid of size {grid} cannot resolve band [{lo}, {hi}]")]
    BandTooWide { lo: i64, hi: i64, grid: usize },
    #[error("source degree {degree} aliases into band [{lo}, {hi}] on a grid of size {grid}")]
    Aliased {
        degree: i64,
        lo: i64,
        hi: i64,
        grid: usize,
    },
    #[error("function vanishes on the circle (min |f| = {min:e}, max |f| = {max:e})")]
    ZeroOnCircle { min: f64, max: f64 },
    #[error("winding number {winding} around the origin, expected 0")]
    WindingNonzero { winding: i64 },
    #[error("phase step {step:.3} exceeds pi/2, grid too coarse to resolve winding")]
    WindingUnresolved { step: f64 },
    #[error("discarded spectral tail {tail:e} exceeds tolerance {tol:e}")]
    TruncationLoss { tail: f64, tol: f64 },
    #[error("constant term vanishes or series has negative degrees, no Taylor reciprocal")]
    SingularAtZero,
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("newton iteration did not converge (residual {residual:e} after {iterations} steps)")]
    NewtonDiverged { residual: f64, iterations: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("integration blew up at t = {time}")]
    BlowUp { time: f64 },
    #[error("spectral tail {tail:e} exceeds {limit:e} at t = {time}")]
    TailOverflow { tail: f64, limit: f64, time: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
