//! Operator files: a minimal JSON container for matrices.
//!
//! One schema covers every matrix the tool reads or writes:
//!
//! ```json
//! {
//!   "dim": 2,
//!   "matrix": [[0.5, 0.0], [0.0, -0.25], [0.0, 0.25], [0.5, 0.0]]
//! }
//! ```
//!
//! `matrix` lists the entries in row-major order, one `[re, im]` pair per
//! entry, as decimal doubles. Real matrices (stochastic transitions) use
//! the same container with every imaginary part exactly zero, so a single
//! pair of save/load routines round-trips everything.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::inequalities::DoublyStochasticMatrix;
use crate::tolerance::ToleranceSet;

/// On-disk form of a square complex matrix.
#[derive(Debug, Serialize, Deserialize)]
struct OperatorFile {
    dim: usize,
    matrix: Vec<[f64; 2]>,
}

fn malformed(path: &Path, detail: impl Into<String>) -> Error {
    Error::MalformedFile { path: path.to_path_buf(), detail: detail.into() }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Writes a square complex matrix to `path` in the operator schema.
pub fn save_matrix(matrix: &DMatrix<Complex64>, path: &Path) -> Result<()> {
    let file = OperatorFile {
        dim: matrix.nrows(),
        matrix: matrix
            .row_iter()
            .flat_map(|row| row.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
            .collect(),
    };
    let text = serde_json::to_string_pretty(&file).expect("operator schema always serializes");
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Reads a square complex matrix from `path`, checking shape and
/// finiteness but no operator-class invariants.
pub fn load_matrix(path: &Path) -> Result<DMatrix<Complex64>> {
    let text = read(path)?;
    let file: OperatorFile =
        serde_json::from_str(&text).map_err(|e| malformed(path, e.to_string()))?;
    let expected = file
        .dim
        .checked_mul(file.dim)
        .ok_or_else(|| malformed(path, format!("dim {} overflows", file.dim)))?;
    if file.dim == 0 {
        return Err(malformed(path, "dim must be at least 1"));
    }
    if file.matrix.len() != expected {
        return Err(malformed(
            path,
            format!("dim {} needs {} entries, found {}", file.dim, expected, file.matrix.len()),
        ));
    }
    if let Some(idx) = file.matrix.iter().position(|[re, im]| !re.is_finite() || !im.is_finite()) {
        return Err(malformed(path, format!("non-finite entry at index {idx}")));
    }
    Ok(DMatrix::from_iterator(
        file.dim,
        file.dim,
        // from_iterator fills column-major; transpose the row-major file.
        (0..expected).map(|k| {
            let [re, im] = file.matrix[(k % file.dim) * file.dim + k / file.dim];
            Complex64::new(re, im)
        }),
    ))
}

/// Reads and validates a density operator.
pub fn load_density(path: &Path, tol: &ToleranceSet) -> Result<DensityOperator> {
    let matrix = load_matrix(path)?;
    DensityOperator::new(matrix, tol).map_err(|e| malformed(path, e.to_string()))
}

/// Reads a real matrix (all imaginary parts zero) and validates it as
/// doubly stochastic.
pub fn load_transition(path: &Path, tol: &ToleranceSet) -> Result<DoublyStochasticMatrix> {
    let matrix = load_matrix(path)?;
    if let Some((idx, z)) = matrix.iter().enumerate().find(|(_, z)| z.im != 0.0) {
        return Err(malformed(
            path,
            format!("transition matrices must be real, entry {idx} has imaginary part {:e}", z.im),
        ));
    }
    let n = matrix.nrows();
    let m = &matrix;
    let entries: Vec<f64> = (0..n).flat_map(|i| (0..n).map(move |j| m[(i, j)].re)).collect();
    DoublyStochasticMatrix::new(n, entries, tol).map_err(|e| malformed(path, e.to_string()))
}
