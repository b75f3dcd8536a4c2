use thiserror::Error;

/// Errors raised by grid, kernel, maximal, weight and sparse routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cell count must be a power of two, got {0}")]
    NotPowerOfTwo(usize),
    #[error("invalid domain [{lo}, {hi}]")]
    InvalidDomain { lo: f64, hi: f64 },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite sample at cell {0}")]
    NonFinite(usize),
    #[error("interval [{lo}, {hi}) is outside a grid of {n} cells")]
    IntervalOutOfRange { lo: usize, hi: usize, n: usize },
    #[error("point {0} is outside the domain")]
    PointOutOfDomain(f64),
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("singular kernel evaluation: x = y_(m+1) = {0}")]
    Singular(f64),
    #[error("non-finite accumulation in {0}")]
    NonFiniteAccumulation(&'static str),
    #[error("scale t = {t} is not resolved by cell width h = {h} (need t >= 2h)")]
    ScaleUnresolved { t: f64, h: f64 },
    #[error("weight must be strictly positive, cell {cell} holds {value}")]
    NonPositiveWeight { cell: usize, value: f64 },
    #[error("{0} reaches the domain boundary; enlarge the domain")]
    BoundaryContact(&'static str),
    #[error("interval [{lo}, {hi}) is not dyadic in the grid lattice")]
    NotDyadic { lo: usize, hi: usize },
    #[error("recursion depth {depth} exceeds lattice depth {max}")]
    RecursionDepth { depth: usize, max: usize },
    #[error(
        "threshold escalation failed on [{lo}, {hi}): |E| = {e_cells} cells after {doublings} doublings (C2 = {c2})"
    )]
    Escalation { lo: usize, hi: usize, e_cells: usize, doublings: u32, c2: f64 },
    #[error("evaluator failed: {0}")]
    Evaluator(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
