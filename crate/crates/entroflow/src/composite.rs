//! Composite systems: tensor products, partial traces, collapse to
//! product form, and the correlation information exchanged between them.
//!
//! A composite Hilbert space factors as `H = H_1 (x) ... (x) H_k`; the
//! composite basis index carries the FIRST factor as most significant:
//! `n = n_1 (d_2 ... d_k) + n_2 (d_3 ... d_k) + ... + n_k`. Tensor
//! products, partial traces, product bases, and joint distributions all
//! share this convention, as does the underlying Kronecker product.
//!
//! The physical pivot of the module is the pair
//! [`collapse_to_product`] / [`correlation_information`]: replacing a
//! state by the tensor product of its marginals models measuring every
//! part's entropy, and the information surrendered in that replacement,
//! `I(rho) - sum_i I(rho_i)`, is nonnegative — correlations can only be
//! lost at collapse, never created. Subsystem entropies pick up exactly
//! `k_B` times that amount, which is what makes the cycle experiments in
//! [`crate::cycle`] produce their entropy staircase.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::density::{clip_eigenvalues, xlnx_sum, DensityOperator, UnitaryOperator};
use crate::error::{Error, Result};
use crate::inequalities::JointDistribution;
use crate::tolerance::ToleranceSet;

/// How a composite Hilbert space factors into subsystems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    dims: Vec<usize>,
    total: usize,
}

impl Partition {
    /// Builds a partition from per-factor dimensions, each at least 1.
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::ConfigInvalid("partition needs at least one factor".into()));
        }
        if dims.contains(&0) {
            return Err(Error::ConfigInvalid("partition factors must have dimension >= 1".into()));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total.checked_mul(d).ok_or_else(|| {
                Error::ConfigInvalid("partition total dimension overflows".into())
            })?;
        }
        Ok(Self { dims, total })
    }

    /// Per-factor dimensions.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of factors.
    pub fn factor_count(&self) -> usize {
        self.dims.len()
    }

    /// Product of the factor dimensions.
    pub fn total_dim(&self) -> usize {
        self.total
    }
}

/// Tensor product of states: the joint state of independently prepared
/// subsystems, ordered first factor most significant.
///
/// # Panics
/// If `factors` is empty.
pub fn tensor_product(factors: &[DensityOperator]) -> DensityOperator {
    assert!(!factors.is_empty(), "tensor product needs at least one factor");
    let mut matrix = factors[0].matrix().clone();
    for f in &factors[1..] {
        matrix = matrix.kronecker(f.matrix());
    }
    DensityOperator::from_valid(matrix)
}

/// Sums one factor out of a matrix laid out over `dims`, returning the
/// reduced matrix and the reduced dimension list.
fn trace_out_factor(
    m: &DMatrix<Complex64>,
    dims: &[usize],
    factor: usize,
) -> (DMatrix<Complex64>, Vec<usize>) {
    let d = dims[factor];
    let left: usize = dims[..factor].iter().product();
    let right: usize = dims[factor + 1..].iter().product();
    let out_dim = left * right;
    let mut out = DMatrix::zeros(out_dim, out_dim);
    for la in 0..left {
        for ra in 0..right {
            let a = la * right + ra;
            for lb in 0..left {
                for rb in 0..right {
                    let b = lb * right + rb;
                    let mut sum = Complex64::new(0.0, 0.0);
                    for t in 0..d {
                        sum +=
                            m[(la * d * right + t * right + ra, lb * d * right + t * right + rb)];
                    }
                    out[(a, b)] = sum;
                }
            }
        }
    }
    let mut reduced: Vec<usize> = dims.to_vec();
    reduced.remove(factor);
    (out, reduced)
}

/// Reduces a composite state to the marginal state of factor `keep`,
/// summing matrix elements diagonal in every other factor's index.
///
/// Factors other than `keep` are traced out one at a time in ascending
/// order; the result is independent of that order.
pub fn partial_trace(
    rho: &DensityOperator,
    partition: &Partition,
    keep: usize,
) -> Result<DensityOperator> {
    if partition.total_dim() != rho.dim() {
        return Err(Error::DimMismatch { expected: partition.total_dim(), actual: rho.dim() });
    }
    if keep >= partition.factor_count() {
        return Err(Error::BadFactorIndex { index: keep, factors: partition.factor_count() });
    }
    let mut matrix = rho.matrix().clone();
    let mut dims = partition.dims().to_vec();
    let mut keep_pos = keep;
    while dims.len() > 1 {
        let drop = if keep_pos == 0 { 1 } else { 0 };
        let (reduced, reduced_dims) = trace_out_factor(&matrix, &dims, drop);
        matrix = reduced;
        dims = reduced_dims;
        if drop < keep_pos {
            keep_pos -= 1;
        }
    }
    Ok(DensityOperator::from_valid(matrix))
}

/// Every marginal of a composite state, in factor order.
pub fn marginals(rho: &DensityOperator, partition: &Partition) -> Result<Vec<DensityOperator>> {
    (0..partition.factor_count()).map(|keep| partial_trace(rho, partition, keep)).collect()
}

/// Replaces a composite state by the tensor product of its marginals:
/// the state an observer holds after measuring each part's entropy
/// separately. Idempotent; destroys exactly the correlation information.
pub fn collapse_to_product(
    rho: &DensityOperator,
    partition: &Partition,
) -> Result<DensityOperator> {
    Ok(tensor_product(&marginals(rho, partition)?))
}

/// Correlation information `I(rho) - sum_i I(rho_i) >= 0`: how much of
/// the state's information lives in correlations between the factors
/// rather than in the factors themselves. Zero exactly on product
/// states; this is the amount lost at [`collapse_to_product`].
pub fn correlation_information(
    rho: &DensityOperator,
    partition: &Partition,
    tol: &ToleranceSet,
) -> Result<f64> {
    let total = rho.information(tol)?;
    let mut parts = 0.0;
    for marginal in marginals(rho, partition)? {
        parts += marginal.information(tol)?;
    }
    Ok(total - parts)
}

/// One local orthonormal basis per factor, the measurement frame for
/// [`joint_distribution`]. The composite basis vector `|m_1 ... m_k>` is
/// the Kronecker column of the factor columns.
#[derive(Debug, Clone)]
pub struct ProductBasis {
    factors: Vec<UnitaryOperator>,
}

impl ProductBasis {
    /// Builds a product basis from per-factor unitaries (their columns
    /// are the local basis vectors).
    ///
    /// # Panics
    /// If `factors` is empty.
    pub fn new(factors: Vec<UnitaryOperator>) -> Self {
        assert!(!factors.is_empty(), "product basis needs at least one factor");
        Self { factors }
    }

    /// The computational basis of a partition: identity on every factor.
    pub fn standard(partition: &Partition) -> Self {
        Self::new(partition.dims().iter().map(|&d| UnitaryOperator::identity(d)).collect())
    }

    /// Per-factor basis unitaries.
    pub fn factors(&self) -> &[UnitaryOperator] {
        &self.factors
    }

    /// Per-factor dimensions.
    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|u| u.dim()).collect()
    }

    /// Product of the factor dimensions.
    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|u| u.dim()).product()
    }

    /// The composite change-of-basis matrix, column `m` holding the
    /// product basis vector `|m_1 ... m_k>`.
    pub fn full_matrix(&self) -> DMatrix<Complex64> {
        let mut matrix = self.factors[0].matrix().clone();
        for u in &self.factors[1..] {
            matrix = matrix.kronecker(u.matrix());
        }
        matrix
    }
}

/// Checks that a product basis is factor-by-factor compatible with a
/// partition, reporting the first mismatching factor.
fn check_basis_partition(basis: &ProductBasis, partition: &Partition) -> Result<()> {
    let basis_dims = basis.dims();
    if basis_dims.len() != partition.factor_count() {
        return Err(Error::LengthMismatch {
            left: basis_dims.len(),
            right: partition.factor_count(),
        });
    }
    for (&b, &p) in basis_dims.iter().zip(partition.dims()) {
        if b != p {
            return Err(Error::DimMismatch { expected: p, actual: b });
        }
    }
    Ok(())
}

/// Outcome distribution of measuring every factor in its local basis:
/// `W_m = <m_1 ... m_k| rho |m_1 ... m_k>`, indexed first factor most
/// significant — a valid joint distribution over the factor outcomes.
pub fn joint_distribution(
    rho: &DensityOperator,
    partition: &Partition,
    basis: &ProductBasis,
    tol: &ToleranceSet,
) -> Result<JointDistribution> {
    check_basis_partition(basis, partition)?;
    if partition.total_dim() != rho.dim() {
        return Err(Error::DimMismatch { expected: partition.total_dim(), actual: rho.dim() });
    }
    let b = basis.full_matrix();
    let rotated = b.adjoint() * rho.matrix() * &b;
    let entries: Vec<f64> = (0..rho.dim()).map(|m| rotated[(m, m)].re).collect();
    JointDistribution::new(partition.dims().to_vec(), entries, tol)
}

/// Information retained when a state is projected onto the diagonal of
/// an orthonormal basis: `sum_m W'_m ln W'_m` for the outcome
/// distribution `W'_m = <b_m| rho |b_m>`.
///
/// Writing `W'` as the image of the spectrum under the doubly stochastic
/// overlap table `T_nm = |<v_n|b_m>|^2` shows the projection can only
/// shed information: the result is `<= information(rho)` up to roundoff,
/// with equality when `basis` is an eigenbasis of `rho`.
pub fn projection_information(
    rho: &DensityOperator,
    basis: &UnitaryOperator,
    tol: &ToleranceSet,
) -> Result<f64> {
    if basis.dim() != rho.dim() {
        return Err(Error::DimMismatch { expected: rho.dim(), actual: basis.dim() });
    }
    let spectrum = rho.spectral_decompose()?;
    let eigenvalues = clip_eigenvalues(spectrum.eigenvalues(), tol.psd)?;
    let overlaps = spectrum.eigenvectors().adjoint() * basis.matrix();
    let dim = rho.dim();
    let mut outcome = vec![0.0; dim];
    for n in 0..dim {
        let w = eigenvalues[n];
        if w == 0.0 {
            continue;
        }
        for (m, o) in outcome.iter_mut().enumerate() {
            *o += w * overlaps[(n, m)].norm_sqr();
        }
    }
    Ok(xlnx_sum(&outcome))
}
