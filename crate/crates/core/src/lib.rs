//! Linear-complexity low-rank compression of rectangular kernel matrices
//! `K[i][j] = κ(x_i, y_j)` built from geometric subset selection.
//!
//! The crate provides:
//!
//! - [`pointset`]: point-set data model, the closeness statistic `δ`,
//!   standardization, CSV ingestion and the synthetic benchmark geometries.
//! - [`selectors`]: farthest point sampling, uniform random, mixed and
//!   anchor-grid subset selection, all linear in the data size.
//! - [`kernels`]: the kernel registry and lazy block evaluation.
//! - [`linalg`]: dense primitives at desk scale — column-pivoted QR,
//!   interpolative decomposition with a max-norm bound on the coefficient
//!   block, truncated pseudoinverse, Jacobi SVD/EVD, spectral norms.
//! - [`factor`]: the two-sided, one-sided and symmetric data-driven
//!   factorizations plus an ACA baseline, with exact error evaluation.
//! - [`bounds`]: brute-force verifiers for the max-norm error estimates.
//! - [`indicators`]: the five subset-quality indicators and the
//!   ratio-based comparison protocol.
//! - [`harness`]: experiment runner, presets, CSV/JSON reporting and the
//!   matrix-free spectral-norm estimator used beyond desk scale.
//!
//! All randomized operations take an explicit integer seed and are
//! bit-reproducible; there is no global RNG state.

pub mod bounds;
pub mod factor;
pub mod harness;
pub mod indicators;
pub mod kernels;
pub mod linalg;
pub mod pointset;
pub mod selectors;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("index {index} out of bounds for set of size {len}")]
    IndexOutOfBounds { index: usize, len: usize },

    #[error("sample count {requested} exceeds available points {available}")]
    SampleTooLarge { requested: usize, available: usize },

    #[error("rank {rank} out of range for {rows}x{cols} matrix")]
    RankOutOfRange { rank: usize, rows: usize, cols: usize },

    #[error("kernel '{kernel}' is singular at entry ({i}, {j}): |x - y| = 0")]
    SingularKernelEntry { kernel: String, i: usize, j: usize },

    #[error("kernel '{kernel}' evaluated outside its domain at entry ({i}, {j}): {detail}")]
    KernelDomain { kernel: String, i: usize, j: usize, detail: String },

    #[error("invalid kernel parameter: {0}")]
    InvalidKernelParam(String),

    #[error("dense evaluation guard exceeded: {rows}x{cols} > {guard} entries; use the sampled estimator")]
    SizeGuardExceeded { rows: usize, cols: usize, guard: usize },

    #[error("symmetric factorization requires X = Y and a symmetric kernel: {0}")]
    NotSymmetric(String),

    #[error("discrete Lipschitz constant is infinite: duplicated points with differing kernel values")]
    InfiniteLipschitz,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown preset '{name}'; available: {available}")]
    UnknownPreset { name: String, available: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
