use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("system is not strictly hyperbolic at {state:?} (minimal gap {gap:e})")]
    NotStrictlyHyperbolic { state: Vec<f64>, gap: f64 },
    #[error("eigen-solver did not converge at {0:?}")]
    NonConvergence(Vec<f64>),
    #[error("solution left the validity ball or became non-finite at t = {t}")]
    BlowUp { t: f64 },
    #[error("time step underflow: dt = {dt:e} at t = {t}")]
    StepUnderflow { t: f64, dt: f64 },
    #[error("grid or time-range mismatch: {0}")]
    GridMismatch(String),
    #[error("time must be positive, got {0}")]
    NonpositiveTime(f64),
    #[error("profile integration diverged at x = {x}")]
    Divergence { x: f64 },
    #[error("resonant denominator {denominator:e} for families i = {i}, j = {j}")]
    ResonantDenominator { i: usize, j: usize, denominator: f64 },
    #[error("Newton iteration stalled with residual {residual:e}{}", cell.map(|c| format!(" at cell {c}")).unwrap_or_default())]
    NewtonStall { residual: f64, cell: Option<usize> },
    #[error("speed gap must be positive, got {0}")]
    NonpositiveGap(f64),
    #[error("operation requires a scalar model")]
    NotScalar,
    #[error("operation requires a model with a flux function")]
    NoFlux,
    #[error("the backward triangle contains no grid points")]
    EmptyTriangle,
    #[error("curve left the ball of radius {radius} (distance {distance:e})")]
    LeftBall { radius: f64, distance: f64 },
    #[error("fixed-point iteration did not converge (last contraction ratio {ratio:.3e})")]
    NoConvergence { ratio: f64 },
    #[error("speed ranges of families {0} and {1} overlap")]
    SpeedOverlap(usize, usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
