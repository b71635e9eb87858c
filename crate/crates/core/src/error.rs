//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("torus dimension must be at least 3, got d = {0}")]
    DimensionTooSmall(usize),

    #[error("points per axis must be an even integer >= 8, got n = {0}")]
    BadGridSize(usize),

    #[error("grid with d = {d}, n = {n} does not fit in memory")]
    GridTooLarge { d: usize, n: usize },

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("frequency {k:?} is outside the grid frequency box")]
    FrequencyOutOfBox { k: Vec<i64> },

    #[error(
        "lattice series diverges: need 2s(1 - d/p) > d, got s = {s}, p = {p}, d = {d}"
    )]
    DivergentParameters { s: f64, p: f64, d: usize },

    #[error(
        "tail tolerance {tol:.3e} is out of reach within the lattice budget; best achievable bound {best:.3e}"
    )]
    TolInfeasible { tol: f64, best: f64 },

    #[error("partition cell {index} is not aligned to the grid planes (n = {n})")]
    MisalignedPartition { index: usize, n: usize },

    #[error("cell {index} extends outside the unit cube")]
    CellOutOfRange { index: usize },

    #[error("cells {first} and {second} have overlapping interiors")]
    OverlappingCells { first: usize, second: usize },

    #[error("bandwidth B = {b} does not fit on the grid: need B < n/2 = {half}")]
    BandwidthExceedsGrid { b: usize, half: usize },

    #[error("haar level {level} needs n divisible by 2^level, got n = {n}")]
    HaarLevelExceedsGrid { level: u32, n: usize },

    #[error(
        "resonance guard failed after {nudges} nudges: |symbol| = {min_abs:.3e} at m = {m:?} (threshold {threshold:.3e})"
    )]
    GuardFailure {
        nudges: usize,
        min_abs: f64,
        m: Vec<i64>,
        threshold: f64,
    },

    #[error("iteration diverging: residual grew for {0} consecutive steps (t too small?)")]
    SolverDiverged(usize),

    #[error("iteration cap {cap} reached with residual {residual:.3e}")]
    IterationCap { cap: usize, residual: f64 },

    #[error("alternating projection did not converge within {0} iterations")]
    ProjectionCap(usize),

    #[error(
        "no N <= {n_max} satisfies the balancing threshold {threshold}; norm at N_max is {at_max:.6}"
    )]
    BalancingNotFound {
        n_max: usize,
        threshold: f64,
        at_max: f64,
    },

    #[error("calibration failed after {doublings} doublings; last contraction ratio {ratio:.4}")]
    CalibrationFailure { doublings: usize, ratio: f64 },

    #[error("conductivity must be strictly positive and real; offending value {0:.3e}")]
    PositivityViolation(f64),

    #[error("provenance mismatch: {0}")]
    Provenance(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
