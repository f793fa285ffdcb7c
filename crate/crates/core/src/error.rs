use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite potential sample {value} at grid index {index}")]
    NonFinitePotential { index: usize, value: f64 },

    #[error("eigensolver did not converge for level {level} after {iterations} iterations (residual {residual:e})")]
    Convergence {
        level: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("requested {requested} eigenpairs from a matrix of dimension {dim}")]
    LevelCount { requested: usize, dim: usize },

    #[error("eigenpairs live on different grids ({left} vs {right} points)")]
    GridMismatch { left: usize, right: usize },

    #[error("well window [{lo:e}, {hi:e}] lies outside the grid")]
    WindowOutsideGrid { lo: f64, hi: f64 },

    #[error("only {found} of {wanted} levels localized in the tracked well at t = {time:e}")]
    InsufficientLevels {
        wanted: usize,
        found: usize,
        time: f64,
    },

    #[error("level {level} overlap {overlap:.3} between samples {step} and {next} is below the continuity floor; time step too coarse")]
    ContinuityLoss {
        level: usize,
        step: usize,
        next: usize,
        overlap: f64,
    },

    #[error("time samples must be strictly monotone")]
    NonMonotoneTimes,

    #[error("degenerate splitting {0:e} between levels")]
    DegenerateSplitting(f64),

    #[error("time step {dt:e} exceeds the stability bound {bound:e}")]
    StepSize { dt: f64, bound: f64 },

    #[error("initial state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("no oscillation detected (max population {0:.3e})")]
    NoOscillation(f64),

    #[error("{0} must be strictly positive")]
    NonPositive(&'static str),

    #[error("xx coupling is zero; no iSWAP gate time exists")]
    ZeroCoupling,
}
