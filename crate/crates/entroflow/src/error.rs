//! Error type shared across the crate.
//!
//! Every variant names the violated invariant and carries the offending
//! magnitude (and the tolerance it was compared against, where one applies),
//! so a failure message is enough to diagnose the input without re-running.

use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error enum.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix that must be square is not.
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// Hermiticity check failed: some entry differs from the conjugate of
    /// its transpose partner by more than the tolerance.
    #[error(
        "matrix is not Hermitian: max |m[i][j] - conj(m[j][i])| = {deviation:e} exceeds {tol:e}"
    )]
    NotHermitian { deviation: f64, tol: f64 },

    /// Trace-one check failed for a density operator.
    #[error("trace is not one: Tr = {trace}, |Tr - 1| = {deviation:e} exceeds {tol:e}")]
    TraceNotOne { trace: f64, deviation: f64, tol: f64 },

    /// An eigenvalue sits below the negativity tolerance, so the operator
    /// is not positive semidefinite.
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} lies below -{tol:e}")]
    NotPositive { eigenvalue: f64, tol: f64 },

    /// Unitarity check failed: U^H U deviates from the identity.
    #[error("matrix is not unitary: max |(U^H U - I)[i][j]| = {deviation:e} exceeds {tol:e}")]
    NotUnitary { deviation: f64, tol: f64 },

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: usize, actual: usize },

    /// The iterative eigensolver did not converge.
    #[error("eigensolver failed to converge on a {dim}x{dim} matrix")]
    ConvergenceFailure { dim: usize },

    /// A random draw produced a numerically singular matrix even after
    /// retrying; with continuous distributions this is practically
    /// unreachable, so it usually signals a broken RNG stream.
    #[error("random draw was numerically singular after {attempts} attempts")]
    DegenerateDraw { attempts: usize },

    /// A subsystem index does not exist in the partition.
    #[error("factor index {index} is out of range for a {factors}-factor partition")]
    BadFactorIndex { index: usize, factors: usize },

    /// An operation defined only for bipartite objects was given a
    /// different number of factors.
    #[error("operation requires exactly two factors, got {factors}")]
    NotBipartite { factors: usize },

    /// Two sequences that must have equal length do not.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A probability or weight that must be nonnegative is negative
    /// beyond the clipping tolerance.
    #[error("negative input at position {index}: {value:e}")]
    NegativeInput { value: f64, index: usize },

    /// A probability distribution does not sum to one.
    #[error("probabilities sum to {sum}, |sum - 1| = {deviation:e} exceeds {tol:e}")]
    NotNormalized { sum: f64, deviation: f64, tol: f64 },

    /// A row of a doubly stochastic matrix does not sum to one.
    #[error("row {index} sums to {sum}, which is not 1 within {tol:e}")]
    RowSumNotOne { index: usize, sum: f64, tol: f64 },

    /// A column of a doubly stochastic matrix does not sum to one.
    #[error("column {index} sums to {sum}, which is not 1 within {tol:e}")]
    ColumnSumNotOne { index: usize, sum: f64, tol: f64 },

    /// A configuration file or parameter set is invalid.
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    /// An operator file exists but its contents do not match the schema.
    #[error("malformed operator file {path}: {detail}")]
    MalformedFile { path: PathBuf, detail: String },

    /// An I/O operation failed; the path names the file involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
