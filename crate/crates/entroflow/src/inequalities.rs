//! Classical rearrangement inequalities as margin-returning operations.
//!
//! Four scalar inequalities carry the whole entropy story, and each is
//! exposed here as a function returning its *margin*: the satisfied side
//! minus the bounding side, a number that is nonnegative in exact
//! arithmetic and sits above `-tol` in floating point.
//!
//! * `lemma1_margin`: `x ln x - (x - 1) >= 0`, zero only at `x = 1` — the
//!   scalar seed everything else reduces to.
//! * `lemma2_margin`: convexity of `x ln x` in Jensen form,
//!   `sum_i x_i w_i ln w_i >= w-bar ln w-bar` under a probability
//!   weighting `x`.
//! * `lemma3_margin`: a doubly stochastic map contracts
//!   `sum_i W_i ln W_i` — mixing can only push a distribution toward
//!   uniform.
//! * `lemma4_margin`: a joint distribution carries at least as much
//!   `sum W ln W` as its two marginals combined, with equality exactly
//!   for factorized joints.
//!
//! Margins rather than booleans so tests and sweep drivers can assert
//! quantitative nonnegativity and equality cases at explicit tolerances.
//! Zero entries follow the `0 ln 0 = 0` convention throughout, and tiny
//! negative entries from upstream numerics (within `-tol.psd`) are
//! clipped to zero at type boundaries.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::Exp1;

use crate::composite::{partial_trace, Partition};
use crate::density::{xlnx_sum, DensityOperator};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::tolerance::ToleranceSet;

/// Clips entries in `[-tol_psd, 0)` to zero; a value below `-tol_psd` is
/// a genuine sign violation and errors with its position.
fn clip_entries(entries: &mut [f64], tol_psd: f64) -> Result<()> {
    for (index, e) in entries.iter_mut().enumerate() {
        if *e < -tol_psd || e.is_nan() {
            return Err(Error::NegativeInput { value: *e, index });
        }
        if *e < 0.0 {
            *e = 0.0;
        }
    }
    Ok(())
}

fn check_normalized(sum: f64, tol_trace: f64) -> Result<()> {
    let deviation = (sum - 1.0).abs();
    if deviation > tol_trace {
        return Err(Error::NotNormalized { sum, deviation, tol: tol_trace });
    }
    Ok(())
}

/// A finite probability distribution: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    entries: Vec<f64>,
}

impl ProbabilityVector {
    /// Validates `entries` as a distribution: entries at least `-tol.psd`
    /// (the window below zero is clipped), sum within `tol.trace` of one.
    pub fn new(mut entries: Vec<f64>, tol: &ToleranceSet) -> Result<Self> {
        clip_entries(&mut entries, tol.psd)?;
        check_normalized(entries.iter().sum(), tol.trace)?;
        Ok(Self { entries })
    }

    /// Wraps entries that are a distribution by construction (normalized
    /// draws, images under stochastic maps, marginals of valid joints).
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        debug_assert!(entries.iter().all(|&e| e >= 0.0), "from_raw got a negative entry");
        debug_assert!(
            (entries.iter().sum::<f64>() - 1.0).abs() < 1e-12,
            "from_raw got an unnormalized vector"
        );
        Self { entries }
    }

    /// The uniform distribution on `n` states.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "need at least one state");
        Self { entries: vec![1.0 / n as f64; n] }
    }

    /// The point mass on state `index`.
    pub fn point(n: usize, index: usize) -> Self {
        assert!(n >= 1, "need at least one state");
        assert!(index < n, "point mass index out of range");
        let mut entries = vec![0.0; n];
        entries[index] = 1.0;
        Self { entries }
    }

    /// Draws a flat-Dirichlet random distribution (normalized unit
    /// exponentials), the uniform measure on the simplex.
    pub fn random(n: usize, rng: &mut RngStream) -> Self {
        assert!(n >= 1, "need at least one state");
        let mut entries: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let sum: f64 = entries.iter().sum();
        for e in &mut entries {
            *e /= sum;
        }
        Self::from_raw(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `sum_i W_i ln W_i <= 0`, the classical information functional.
    pub fn information(&self) -> f64 {
        xlnx_sum(&self.entries)
    }
}

/// A square nonnegative matrix whose every row and column sums to one.
///
/// Row-major storage; `entries[i * n + j]` is the transition weight from
/// state `i` to state `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublyStochasticMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DoublyStochasticMatrix {
    /// Validates an `n x n` row-major matrix: entry count, sign (with the
    /// usual clipping window), and all row and column sums within
    /// `tol.trace` of one.
    pub fn new(n: usize, mut entries: Vec<f64>, tol: &ToleranceSet) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::LengthMismatch { left: entries.len(), right: n * n });
        }
        clip_entries(&mut entries, tol.psd)?;
        for i in 0..n {
            let row: f64 = entries[i * n..(i + 1) * n].iter().sum();
            if (row - 1.0).abs() > tol.trace {
                return Err(Error::RowSumNotOne { index: i, sum: row, tol: tol.trace });
            }
        }
        for j in 0..n {
            let col: f64 = (0..n).map(|i| entries[i * n + j]).sum();
            if (col - 1.0).abs() > tol.trace {
                return Err(Error::ColumnSumNotOne { index: j, sum: col, tol: tol.trace });
            }
        }
        Ok(Self { n, entries })
    }

    /// Wraps entries doubly stochastic by construction (permutation
    /// mixtures, unitary overlap tables).
    pub(crate) fn from_raw(n: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        debug_assert!(
            (0..n).all(|i| (entries[i * n..(i + 1) * n].iter().sum::<f64>() - 1.0).abs() < 1e-12),
            "from_raw got a bad row sum"
        );
        debug_assert!(
            (0..n).all(|j| ((0..n).map(|i| entries[i * n + j]).sum::<f64>() - 1.0).abs() < 1e-12),
            "from_raw got a bad column sum"
        );
        Self { n, entries }
    }

    /// The identity map on `n` states.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "need at least one state");
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self { n, entries }
    }

    /// The maximally mixing map: every entry `1/n`.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "need at least one state");
        Self { n, entries: vec![1.0 / n as f64; n * n] }
    }

    /// The permutation matrix sending state `i` to state `perm[i]`.
    ///
    /// # Panics
    /// If `perm` is not a permutation of `0..n`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        assert!(n >= 1, "need at least one state");
        let mut seen = vec![false; n];
        let mut entries = vec![0.0; n * n];
        for (i, &j) in perm.iter().enumerate() {
            assert!(j < n && !seen[j], "not a permutation of 0..n");
            seen[j] = true;
            entries[i * n + j] = 1.0;
        }
        Self { n, entries }
    }

    /// Draws a convex combination of `k_terms` uniformly random
    /// permutation matrices with flat-Dirichlet weights.
    ///
    /// Mixtures of permutations satisfy both sum constraints exactly (up
    /// to the rounding of the weight normalization), so no iterative
    /// rebalancing is needed. `k_terms = 1` gives a bare permutation.
    pub fn random(n: usize, k_terms: usize, rng: &mut RngStream) -> Self {
        assert!(n >= 1, "need at least one state");
        assert!(k_terms >= 1, "need at least one permutation term");
        let mut weights: Vec<f64> = (0..k_terms).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= sum;
        }
        let mut entries = vec![0.0; n * n];
        let mut perm: Vec<usize> = (0..n).collect();
        for &weight in &weights {
            perm.shuffle(rng);
            for (i, &j) in perm.iter().enumerate() {
                entries[i * n + j] += weight;
            }
        }
        Self::from_raw(n, entries)
    }

    /// Number of states.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Transition weight from state `i` to state `j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }
}

/// A joint probability distribution over a tuple of finite factors.
///
/// Entries are stored flat over the composite index with the first factor
/// most significant, matching the tensor-product convention of
/// [`crate::composite`].
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    dims: Vec<usize>,
    entries: Vec<f64>,
}

impl JointDistribution {
    /// Validates a flat entry vector over `dims`: count equals the
    /// product of the factor sizes, entries nonnegative (with clipping
    /// window), total within `tol.trace` of one.
    pub fn new(dims: Vec<usize>, mut entries: Vec<f64>, tol: &ToleranceSet) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::ConfigInvalid(
                "joint distribution needs at least one factor, all of positive size".into(),
            ));
        }
        let total: usize = dims.iter().product();
        if entries.len() != total {
            return Err(Error::LengthMismatch { left: entries.len(), right: total });
        }
        clip_entries(&mut entries, tol.psd)?;
        check_normalized(entries.iter().sum(), tol.trace)?;
        Ok(Self { dims, entries })
    }

    /// Wraps entries that form a joint distribution by construction.
    pub(crate) fn from_raw(dims: Vec<usize>, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), dims.iter().product::<usize>());
        debug_assert!(entries.iter().all(|&e| e >= 0.0));
        debug_assert!((entries.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        Self { dims, entries }
    }

    /// The factorized joint `W_ij = a_i b_j` of two distributions.
    pub fn from_outer(a: &ProbabilityVector, b: &ProbabilityVector) -> Self {
        let mut entries = Vec::with_capacity(a.len() * b.len());
        for &ai in a.entries() {
            for &bj in b.entries() {
                entries.push(ai * bj);
            }
        }
        Self::from_raw(vec![a.len(), b.len()], entries)
    }

    /// Draws a flat-Dirichlet random joint over the given factor sizes.
    pub fn random(dims: &[usize], rng: &mut RngStream) -> Self {
        assert!(!dims.is_empty() && dims.iter().all(|&d| d >= 1), "factor sizes must be >= 1");
        let total: usize = dims.iter().product();
        let mut entries: Vec<f64> = (0..total).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let sum: f64 = entries.iter().sum();
        for e in &mut entries {
            *e /= sum;
        }
        Self::from_raw(dims.to_vec(), entries)
    }

    /// Factor sizes.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Flat entries, first factor most significant.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Marginal distribution of factor `axis`, summing out the others.
    pub fn marginal(&self, axis: usize) -> Result<ProbabilityVector> {
        if axis >= self.dims.len() {
            return Err(Error::BadFactorIndex { index: axis, factors: self.dims.len() });
        }
        let stride: usize = self.dims[axis + 1..].iter().product();
        let d = self.dims[axis];
        let mut out = vec![0.0; d];
        for (flat, &w) in self.entries.iter().enumerate() {
            out[(flat / stride) % d] += w;
        }
        Ok(ProbabilityVector::from_raw(out))
    }

    /// `sum W ln W` over all cells, with `0 ln 0 = 0`.
    pub fn information(&self) -> f64 {
        xlnx_sum(&self.entries)
    }

    /// Max entrywise deviation of a bipartite joint from the product of
    /// its marginals: the quantitative "how far from factorized" paired
    /// with [`lemma4_margin`]'s equality condition.
    pub fn factorization_deviation(&self) -> Result<f64> {
        if self.dims.len() != 2 {
            return Err(Error::NotBipartite { factors: self.dims.len() });
        }
        let a = self.marginal(0)?;
        let b = self.marginal(1)?;
        let m = b.len();
        let mut max = 0.0f64;
        for (flat, &w) in self.entries.iter().enumerate() {
            let dev = (w - a.entries()[flat / m] * b.entries()[flat % m]).abs();
            if dev > max {
                max = dev;
            }
        }
        Ok(max)
    }
}

/// `x ln x - (x - 1) >= 0` for `x >= 0`, with `0 ln 0 = 0`; zero exactly
/// at `x = 1`. The scalar inequality the other three reduce to.
pub fn lemma1_margin(x: f64) -> Result<f64> {
    if x < 0.0 || !x.is_finite() {
        return Err(Error::NegativeInput { value: x, index: 0 });
    }
    let xlnx = if x > 0.0 { x * x.ln() } else { 0.0 };
    Ok(xlnx - (x - 1.0))
}

/// Jensen-form convexity of `x ln x`: for weights `w_i >= 0` averaged
/// under the distribution `x`,
/// `sum_i x_i w_i ln w_i - w_bar ln w_bar >= 0` with
/// `w_bar = sum_i x_i w_i`. The `0 ln 0 = 0` convention covers both zero
/// weights and the degenerate `w_bar = 0` case. Zero when all `w_i`
/// carrying positive `x_i` coincide.
pub fn lemma2_margin(w: &[f64], x: &ProbabilityVector) -> Result<f64> {
    if w.len() != x.len() {
        return Err(Error::LengthMismatch { left: w.len(), right: x.len() });
    }
    for (index, &wi) in w.iter().enumerate() {
        if wi < 0.0 || !wi.is_finite() {
            return Err(Error::NegativeInput { value: wi, index });
        }
    }
    let mut avg_xlnx = 0.0;
    let mut w_bar = 0.0;
    for (&wi, &xi) in w.iter().zip(x.entries()) {
        if wi > 0.0 {
            avg_xlnx += xi * (wi * wi.ln());
        }
        w_bar += xi * wi;
    }
    let bar_term = if w_bar > 0.0 { w_bar * w_bar.ln() } else { 0.0 };
    Ok(avg_xlnx - bar_term)
}

/// Image of a distribution under a doubly stochastic map:
/// `W'_j = sum_i W_i T_ij`. Mass and sign are preserved exactly, so the
/// result is a valid distribution by construction.
pub fn doubly_stochastic_apply(
    w: &ProbabilityVector,
    t: &DoublyStochasticMatrix,
) -> Result<ProbabilityVector> {
    if w.len() != t.n() {
        return Err(Error::DimMismatch { expected: t.n(), actual: w.len() });
    }
    let n = t.n();
    let mut out = vec![0.0; n];
    for (i, &wi) in w.entries().iter().enumerate() {
        if wi == 0.0 {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o += wi * t.get(i, j);
        }
    }
    Ok(ProbabilityVector::from_raw(out))
}

/// Contraction of `sum W ln W` under a doubly stochastic map:
/// `sum_i W_i ln W_i - sum_j W'_j ln W'_j >= 0`. Zero whenever `t` is a
/// permutation (the multiset of entries is preserved).
pub fn lemma3_margin(w: &ProbabilityVector, t: &DoublyStochasticMatrix) -> Result<f64> {
    let image = doubly_stochastic_apply(w, t)?;
    Ok(w.information() - image.information())
}

/// Superadditivity of `sum W ln W` on a bipartite joint:
/// `sum_ij W_ij ln W_ij - sum_i W_i ln W_i - sum_j W'_j ln W'_j >= 0`,
/// marginals computed internally; zero exactly when the joint factorizes
/// as `W_ij = W_i W'_j`.
pub fn lemma4_margin(joint: &JointDistribution) -> Result<f64> {
    if joint.dims().len() != 2 {
        return Err(Error::NotBipartite { factors: joint.dims().len() });
    }
    let a = joint.marginal(0)?;
    let b = joint.marginal(1)?;
    Ok(joint.information() - a.information() - b.information())
}

/// Quantum subadditivity margin of a bipartite state:
/// `I(rho) - I(rho_a) - I(rho_b) >= 0`, equal to the correlation
/// information of the bipartition; zero exactly for product states.
pub fn quantum_subadditivity_margin(
    rho: &DensityOperator,
    p: &Partition,
    tol: &ToleranceSet,
) -> Result<f64> {
    if p.factor_count() != 2 {
        return Err(Error::NotBipartite { factors: p.factor_count() });
    }
    let total = rho.information(tol)?;
    let a = partial_trace(rho, p, 0)?.information(tol)?;
    let b = partial_trace(rho, p, 1)?.information(tol)?;
    Ok(total - a - b)
}
