//! Independent oracles for the integration tests.
//!
//! Everything here recomputes library quantities through a different
//! algorithm and touches matrices only through indexing, so agreement
//! with the library is evidence, not tautology: eigenvalues come from a
//! hand-rolled cyclic Jacobi iteration (the library uses nalgebra's
//! tridiagonalization), and partial traces from the textbook double-index
//! summation (the library walks block strides).

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// ascending. Independent of nalgebra's eigensolver; uses only entry
/// reads and writes.
pub fn eigenvalues_oracle(m: &DMatrix<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "oracle needs a square matrix");
    let mut a = m.clone();
    let scale = a.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
    for _sweep in 0..200 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let modulus = apq.norm();
                if modulus <= 1e-18 * scale {
                    continue;
                }
                // Split the plane rotation into the phase that makes the
                // pivot real and the real Jacobi angle that zeroes it.
                let phase = apq.conj() / modulus;
                // Zeroing the pivot needs m(1 - t^2) + (aqq - app) t = 0,
                // i.e. t^2 - 2 tau t - 1 = 0; take the small root for a
                // rotation angle below pi/4 (standard Jacobi stability).
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * modulus);
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A <- A G with G = I except
                // G[p][p] = c, G[q][p] = s*phase, G[p][q] = -s, G[q][q] = c*phase.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp + s * phase * akq;
                    a[(k, q)] = -s * akp + c * phase * akq;
                }
                // A <- G^H A.
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk + s * phase.conj() * aqk;
                    a[(q, k)] = -s * apk + c * phase.conj() * aqk;
                }
            }
        }
    }
    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eigenvalues
}

/// `sum lambda ln lambda` over oracle eigenvalues, with `0 ln 0 = 0` and
/// the usual clipping window for the tiny negatives rounding produces.
pub fn information_oracle(m: &DMatrix<Complex64>) -> f64 {
    eigenvalues_oracle(m)
        .into_iter()
        .map(|lambda| if lambda > 0.0 { lambda * lambda.ln() } else { 0.0 })
        .sum()
}

/// Partial trace by explicit index summation: decode every (row, column)
/// pair into factor indices, keep the pairs diagonal in all traced
/// factors, and accumulate. Quadratic in the full dimension, quadratic in
/// the kept one — the slow, obviously correct way.
pub fn partial_trace_oracle(
    m: &DMatrix<Complex64>,
    dims: &[usize],
    keep: usize,
) -> DMatrix<Complex64> {
    let total: usize = dims.iter().product();
    assert_eq!(m.nrows(), total, "matrix size must match the factor sizes");
    assert!(keep < dims.len());
    let decode = |mut flat: usize| -> Vec<usize> {
        let mut idx = vec![0; dims.len()];
        for (i, &d) in dims.iter().enumerate().rev() {
            idx[i] = flat % d;
            flat /= d;
        }
        idx
    };
    let mut out = DMatrix::<Complex64>::zeros(dims[keep], dims[keep]);
    for row in 0..total {
        let ri = decode(row);
        for col in 0..total {
            let ci = decode(col);
            let diagonal_elsewhere = (0..dims.len()).all(|f| f == keep || ri[f] == ci[f]);
            if diagonal_elsewhere {
                out[(ri[keep], ci[keep])] += m[(row, col)];
            }
        }
    }
    out
}

/// The maximally entangled two-qubit state `|00> + |11>` (normalized),
/// written out entry by entry.
pub fn bell_state() -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(4, 4);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(i, j)] = Complex64::new(0.5, 0.0);
    }
    m
}

/// Largest entrywise modulus of the difference of two matrices.
pub fn max_entry_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).iter().map(|z| z.norm()).fold(0.0f64, f64::max)
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn jacobi_matches_the_closed_form_on_2x2() {
        let b = Complex64::new(0.3, -0.4);
        let (a, d) = (1.25, -0.75);
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(a, 0.0), b, b.conj(), Complex64::new(d, 0.0)],
        );
        let mid = (a + d) / 2.0;
        let radius = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        let got = eigenvalues_oracle(&m);
        assert!((got[0] - (mid - radius)).abs() < 1e-14);
        assert!((got[1] - (mid + radius)).abs() < 1e-14);
    }

    #[test]
    fn oracle_trace_is_preserved() {
        let m = bell_state();
        let reduced = partial_trace_oracle(&m, &[2, 2], 0);
        assert!((reduced[(0, 0)].re + reduced[(1, 1)].re - 1.0).abs() < 1e-15);
        assert!(reduced[(0, 1)].norm() < 1e-15, "Bell marginal is maximally mixed");
    }
}
