use thiserror::Error;

/// Errors raised by synthesis, simulation and verification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("spectral weights sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("spectral weight {index} is not strictly positive ({value})")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("eigenvalues are not strictly increasing at index {index}")]
    NotIncreasing { index: usize },

    #[error("eigenvalue gap at index {index} is degenerate ({gap:e} below threshold {threshold:e})")]
    DegenerateSpectrum { index: usize, gap: f64, threshold: f64 },

    #[error("recurrence norm lost positivity while building polynomial {index}")]
    RecurrenceBreakdown { index: usize },

    #[error("parameter `{name}` = {value} outside its admissible range {range}")]
    ParameterOutOfRange { name: &'static str, value: f64, range: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("time grid is empty")]
    EmptyGrid,

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalizedState { norm_sqr: f64 },

    #[error("noise model on site {site} has T2 > 2 T1, giving a negative dephasing rate")]
    NegativeRate { site: usize },

    #[error("adaptive integrator failed to meet tolerance near t = {time} ns")]
    StepSizeFailure { time: f64 },

    #[error("integration invariant breached: {0}")]
    InvariantBreach(String),

    #[error("detunings around cycle {cycle:?} do not close (residual {residual:e})")]
    InconsistentLoop { cycle: Vec<usize>, residual: f64 },

    #[error("cycle {cycle:?} carries a gauge-invariant flux of {flux} rad")]
    GaugeFlux { cycle: Vec<usize>, flux: f64 },

    #[error("graph is not connected (vertex {vertex} unreachable)")]
    Disconnected { vertex: usize },

    #[error("graph is not distance-regular at layer {layer}: {detail}")]
    NotDistanceRegular { layer: usize, detail: String },

    #[error("non-uniform parameters in layer {layer}: {detail}")]
    NonUniformLayer { layer: usize, detail: String },

    #[error("optimizer parameter {index} reached the boundary of (0, 1) ({value:e})")]
    BoundaryHit { index: usize, value: f64 },

    #[error("no converged solution (best residual infidelity {residual:e})")]
    Unconverged { residual: f64 },

    #[error("sub-designs are incommensurate: synthesis times {row_tau} ns and {col_tau} ns")]
    Incommensurate { row_tau: f64, col_tau: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
