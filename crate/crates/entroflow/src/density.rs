//! Density operators, unitaries, Hermitian generators, and the information
//! functional.
//!
//! The central quantity is the information functional
//! `I(rho) = Tr(rho ln rho) = sum_k lambda_k ln lambda_k <= 0`,
//! evaluated over the eigenvalues of a density operator with the
//! `0 ln 0 = 0` convention. Entropy is its rescaled negative,
//! `S = -k_B I`. Unitary conjugation permutes nothing in the spectrum,
//! so `I` is exactly conserved by [`DensityOperator::evolve`]; the numeric
//! drift of that conservation is what the `conserve` experiment measures.
//!
//! All matrices are dense, complex, and validated at construction: a
//! [`DensityOperator`] is Hermitian, unit-trace, and positive semidefinite
//! within named tolerances, a [`UnitaryOperator`] satisfies `U^H U = I`,
//! and a [`HermitianOperator`] is Hermitian. Internal results that are
//! guaranteed by construction (e.g. `U rho U^H`) skip re-validation but
//! carry debug assertions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::tolerance::ToleranceSet;

/// Entries with modulus above this threshold can anchor the phase
/// convention of an eigenvector column. Columns are unit-norm, so the
/// largest modulus is at least `1/sqrt(dim)`, far above the anchor.
const PHASE_ANCHOR_MIN: f64 = 1e-12;

/// Iteration cap handed to the eigensolver; QR iteration on Hermitian
/// matrices of the sizes used here converges orders of magnitude sooner.
const EIGEN_MAX_SWEEPS: usize = 100_000;

/// `sum_k x_k ln x_k` with the `0 ln 0 = 0` convention.
///
/// Callers are responsible for clipping: values must be nonnegative
/// (exact zeros are fine, negatives are not).
pub(crate) fn xlnx_sum(values: &[f64]) -> f64 {
    values.iter().map(|&x| if x > 0.0 { x * x.ln() } else { 0.0 }).sum()
}

/// Max entrywise deviation of `m` from its own conjugate transpose.
fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let mut max = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            if dev > max {
                max = dev;
            }
        }
    }
    max
}

/// Max entrywise deviation of `U^H U` from the identity.
fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let gram = m.adjoint() * m;
    let mut max = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            let dev = (gram[(i, j)] - target).norm();
            if dev > max {
                max = dev;
            }
        }
    }
    max
}

fn check_square(m: &DMatrix<Complex64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

fn check_hermitian(m: &DMatrix<Complex64>, tol: f64) -> Result<()> {
    let deviation = hermiticity_deviation(m);
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix, sorted and phase-fixed.
///
/// The input is first projected onto its Hermitian part `(M + M^H)/2` —
/// exact for a genuinely Hermitian matrix — so the solver never sees the
/// tiny anti-Hermitian residue that matrix products leave behind.
/// Eigenvalues come back ascending (ties keep the solver's order), and each
/// eigenvector column is rotated by a global phase so that its first entry
/// with modulus above [`PHASE_ANCHOR_MIN`] is real and positive. Together
/// with the sort this makes the decomposition of a nondegenerate matrix
/// deterministic down to the bit pattern.
pub(crate) fn spectral_decompose_matrix(m: &DMatrix<Complex64>) -> Result<Spectrum> {
    let dim = m.nrows();
    let hermitian_part = (m + m.adjoint()).unscale(2.0);
    let eig = hermitian_part
        .try_symmetric_eigen(f64::EPSILON, EIGEN_MAX_SWEEPS)
        .ok_or(Error::ConvergenceFailure { dim })?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("Hermitian eigenvalues are finite reals")
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::zeros(dim, dim);
    for (col, &k) in order.iter().enumerate() {
        eigenvectors.set_column(col, &eig.eigenvectors.column(k));
    }

    // Fix the arbitrary global phase of each column.
    for mut col in eigenvectors.column_iter_mut() {
        if let Some(anchor) = col.iter().copied().find(|z| z.norm() > PHASE_ANCHOR_MIN) {
            let phase = anchor.conj() / anchor.norm();
            for z in col.iter_mut() {
                *z *= phase;
            }
        }
    }

    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Clips the tiny negative eigenvalues that finite-precision
/// diagonalization produces on a PSD matrix.
///
/// Values in `[-tol_psd, 0)` become exact zeros; anything below `-tol_psd`
/// is a genuine violation and errors.
pub(crate) fn clip_eigenvalues(eigenvalues: &[f64], tol_psd: f64) -> Result<Vec<f64>> {
    let mut clipped = Vec::with_capacity(eigenvalues.len());
    for &lambda in eigenvalues {
        if lambda < -tol_psd {
            return Err(Error::NotPositive { eigenvalue: lambda, tol: tol_psd });
        }
        clipped.push(if lambda < 0.0 { 0.0 } else { lambda });
    }
    Ok(clipped)
}

/// Sorted, phase-fixed eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl Spectrum {
    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary matrix whose column `k` is the eigenvector of
    /// `eigenvalues()[k]`, with the phase convention described on
    /// [`spectral_decompose_matrix`].
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    /// Rebuilds `V diag(lambda) V^H`; used to bound the decomposition
    /// residual against the original matrix.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let dim = self.eigenvalues.len();
        let diag = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(self.eigenvalues[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        &self.eigenvectors * diag * self.eigenvectors.adjoint()
    }

    /// The eigenbasis as a validated unitary operator.
    pub fn basis(&self) -> UnitaryOperator {
        UnitaryOperator::from_valid(self.eigenvectors.clone())
    }
}

/// A Hermitian, unit-trace, positive-semidefinite matrix: the state of a
/// finite quantum system.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    /// Validates `matrix` as a density operator.
    ///
    /// Checks run in order: square shape, Hermiticity within `tol.herm`,
    /// `|Tr - 1| <= tol.trace`, and positive semidefiniteness within
    /// `tol.psd` (via the eigenvalues). The first failure is returned.
    pub fn new(matrix: DMatrix<Complex64>, tol: &ToleranceSet) -> Result<Self> {
        check_square(&matrix)?;
        check_hermitian(&matrix, tol.herm)?;
        let trace = matrix.trace();
        let deviation = (trace - Complex64::new(1.0, 0.0)).norm();
        if deviation > tol.trace {
            return Err(Error::TraceNotOne { trace: trace.re, deviation, tol: tol.trace });
        }
        let spectrum = spectral_decompose_matrix(&matrix)?;
        clip_eigenvalues(spectrum.eigenvalues(), tol.psd)?;
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is a density operator by construction
    /// (products of validated states, unitary conjugations, partial
    /// traces). Debug builds still spot-check the cheap invariants.
    pub(crate) fn from_valid(matrix: DMatrix<Complex64>) -> Self {
        debug_assert!(matrix.nrows() == matrix.ncols());
        debug_assert!(
            hermiticity_deviation(&matrix) < 1e-8,
            "from_valid got a non-Hermitian matrix"
        );
        debug_assert!(
            (matrix.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-8,
            "from_valid got a matrix with trace far from one"
        );
        Self { matrix }
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// The maximally mixed state `I/d`, the unique spectrum-flat state.
    pub fn maximally_mixed(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        let w = Complex64::new(1.0 / dim as f64, 0.0);
        let matrix =
            DMatrix::from_fn(dim, dim, |i, j| if i == j { w } else { Complex64::new(0.0, 0.0) });
        Self { matrix }
    }

    /// Sorted, phase-fixed eigendecomposition.
    pub fn spectral_decompose(&self) -> Result<Spectrum> {
        spectral_decompose_matrix(&self.matrix)
    }

    /// The information functional `I = Tr(rho ln rho) = sum_k lambda_k
    /// ln lambda_k`, always `<= 0`, with `0 ln 0 = 0`.
    ///
    /// Eigenvalues in `[-tol.psd, 0)` are clipped to zero before the sum;
    /// anything more negative errors rather than silently feeding `ln` a
    /// negative number.
    pub fn information(&self, tol: &ToleranceSet) -> Result<f64> {
        let spectrum = self.spectral_decompose()?;
        let eigenvalues = clip_eigenvalues(spectrum.eigenvalues(), tol.psd)?;
        Ok(xlnx_sum(&eigenvalues))
    }

    /// Von Neumann entropy `S = -k_B Tr(rho ln rho) = -k_B * I >= 0`.
    pub fn entropy(&self, k_b: f64, tol: &ToleranceSet) -> Result<f64> {
        assert!(k_b > 0.0 && k_b.is_finite(), "k_B must be positive and finite");
        Ok(-k_b * self.information(tol)?)
    }

    /// Unitary conjugation `U rho U^H`: closed-system evolution.
    ///
    /// Conserves the spectrum, hence the information functional, exactly
    /// in exact arithmetic. Errors only on a dimension mismatch.
    pub fn evolve(&self, u: &UnitaryOperator) -> Result<DensityOperator> {
        if u.dim() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), actual: u.dim() });
        }
        let evolved = u.matrix() * &self.matrix * u.matrix().adjoint();
        Ok(DensityOperator::from_valid(evolved))
    }

    /// Draws a random rank-`rank` density operator: `A A^H / Tr(A A^H)`
    /// for an independent complex-Gaussian `dim x rank` matrix `A`.
    ///
    /// `rank = dim` gives full-rank states; `rank = 1` gives pure states.
    ///
    /// # Panics
    /// If `dim < 1` or `rank` is not in `1..=dim`.
    pub fn random(dim: usize, rank: usize, rng: &mut RngStream) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        assert!((1..=dim).contains(&rank), "rank must be in 1..=dim");
        let a = DMatrix::from_fn(dim, rank, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let gram = &a * a.adjoint();
        let trace = gram.trace().re;
        assert!(trace > 0.0, "Gaussian draw produced a zero matrix");
        Self::from_valid(gram / Complex64::new(trace, 0.0))
    }
}

/// A matrix with `U^H U = I`: a basis change or a closed-system evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: DMatrix<Complex64>,
}

impl UnitaryOperator {
    /// Validates `matrix` as unitary: square, and `U^H U = I` entrywise
    /// within `tol.unitary`.
    pub fn new(matrix: DMatrix<Complex64>, tol: &ToleranceSet) -> Result<Self> {
        check_square(&matrix)?;
        let deviation = unitarity_deviation(&matrix);
        if deviation > tol.unitary {
            return Err(Error::NotUnitary { deviation, tol: tol.unitary });
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is unitary by construction (QR orthonormal
    /// factors, eigenvector bases, matrix exponentials of Hermitians).
    pub(crate) fn from_valid(matrix: DMatrix<Complex64>) -> Self {
        debug_assert!(unitarity_deviation(&matrix) < 1e-8, "from_valid got a non-unitary matrix");
        Self { matrix }
    }

    /// Dimension of the space the operator acts on.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// The identity operator.
    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self { matrix: DMatrix::identity(dim, dim) }
    }

    /// `U(t) = exp(-i H t)`, built from the spectral decomposition of `H`
    /// as `V diag(exp(-i lambda_k t)) V^H`.
    ///
    /// `t = 0` returns the identity up to decomposition roundoff.
    pub fn from_hamiltonian(h: &HermitianOperator, t: f64) -> Result<Self> {
        assert!(t.is_finite(), "evolution time must be finite");
        let spectrum = h.spectral_decompose()?;
        let dim = h.dim();
        let phases = DVector::from_iterator(
            dim,
            spectrum.eigenvalues().iter().map(|&lambda| Complex64::new(0.0, -lambda * t).exp()),
        );
        let v = spectrum.eigenvectors();
        let mut scaled = v.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            for z in col.iter_mut() {
                *z *= phases[k];
            }
        }
        Ok(Self::from_valid(scaled * v.adjoint()))
    }

    /// Draws a Haar-like random unitary: QR of a complex-Gaussian matrix,
    /// with each column of `Q` rotated by the phase of the matching
    /// diagonal entry of `R` so the factorization is the canonical one
    /// (diagonal of `R` real positive).
    ///
    /// A numerically singular draw is retried; with Gaussian entries that
    /// is a measure-zero event, so exhausting the retries signals a broken
    /// stream and returns [`Error::DegenerateDraw`].
    pub fn random(dim: usize, rng: &mut RngStream) -> Result<Self> {
        assert!(dim >= 1, "dimension must be at least 1");
        const ATTEMPTS: usize = 3;
        for _ in 0..ATTEMPTS {
            let g = DMatrix::from_fn(dim, dim, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let scale = g.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
            if scale == 0.0 {
                continue;
            }
            let qr = g.qr();
            let r = qr.r();
            let mut q = qr.q();
            let mut singular = false;
            for k in 0..dim {
                let rkk = r[(k, k)];
                let modulus = rkk.norm();
                if modulus < 1e-12 * scale {
                    singular = true;
                    break;
                }
                let phase = rkk / modulus;
                for z in q.column_mut(k).iter_mut() {
                    *z *= phase;
                }
            }
            if !singular {
                return Ok(Self::from_valid(q));
            }
        }
        Err(Error::DegenerateDraw { attempts: ATTEMPTS })
    }
}

/// A Hermitian matrix: an observable or a Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<Complex64>,
}

impl HermitianOperator {
    /// Validates `matrix` as Hermitian within `tol.herm`.
    pub fn new(matrix: DMatrix<Complex64>, tol: &ToleranceSet) -> Result<Self> {
        check_square(&matrix)?;
        check_hermitian(&matrix, tol.herm)?;
        Ok(Self { matrix })
    }

    /// Wraps a matrix Hermitian by construction (`(G + G^H)/2` draws,
    /// sums and real scalings of Hermitians).
    pub(crate) fn from_valid(matrix: DMatrix<Complex64>) -> Self {
        debug_assert!(
            hermiticity_deviation(&matrix) < 1e-8,
            "from_valid got a non-Hermitian matrix"
        );
        Self { matrix }
    }

    /// Dimension of the space the operator acts on.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Sorted, phase-fixed eigendecomposition.
    pub fn spectral_decompose(&self) -> Result<Spectrum> {
        spectral_decompose_matrix(&self.matrix)
    }
}
