//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid spacing {spacing} exceeds sigma/8 = {limit}")]
    GridTooCoarse { spacing: f64, limit: f64 },
    #[error("grid does not span the sources with an 8-sigma margin")]
    GridTooSmall,
    #[error("state overlap {overlap:e} is at or above the 1e-8 tolerance")]
    OverlapTooLarge { overlap: f64 },
    #[error("wavefunctions live on different grids")]
    GridMismatch,
    #[error("matrix is not unitary: max |UU^dag - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error("basis is not unbiased: max ||U_jk| - 1/sqrt(n)| = {deviation:e}")]
    NotUnbiased { deviation: f64 },
    #[error("outcome index {index} out of range for {n} components")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid dimension n = {n}: need n >= 2")]
    InvalidDimension { n: usize },
    #[error("probability {leaked:e} within {cells} cells of the grid edge: spectral wraparound")]
    AliasingDetected { leaked: f64, cells: usize },
    #[error("flight time {t} below far-field threshold {threshold}")]
    NotFarField { t: f64, threshold: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("momenta are degenerate: p1 = p2")]
    DegenerateMomenta,
    #[error("entangled state has no probability to sample")]
    EmptyState,
    #[error("sample runs use incompatible screen grids")]
    IncompatibleGrids,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("output directory is locked by another run: {0}")]
    OutputLocked(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
