//! Evolve-measure cycles on multipartite quantum systems and
//! doubly-stochastic chains on classical distributions.
//!
//! A cycle experiment iterates the two moves the rest of the crate
//! provides: unitary evolution under an interacting Hamiltonian (which
//! entangles the parts while conserving total information), then
//! collapse to the product of marginals (which measures every part's
//! entropy and surrenders the correlation information built up since the
//! last measurement). The recorded sum of subsystem entropies can
//! therefore never decrease, and each increment equals `k_B` times the
//! correlation information destroyed at that collapse — the staircase
//! the records expose.
//!
//! The classical chain is the commutative shadow of the same story: a
//! doubly stochastic transition matrix applied repeatedly to a
//! distribution, with the contraction margin of `sum W ln W` logged at
//! every step.

use crate::composite::{marginals, tensor_product, Partition};
use crate::density::{
    spectral_decompose_matrix, DensityOperator, HermitianOperator, UnitaryOperator,
};
use crate::error::{Error, Result};
use crate::inequalities::{doubly_stochastic_apply, DoublyStochasticMatrix, ProbabilityVector};
use crate::rng::{self, RngStream};
use crate::tolerance::ToleranceSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Where a cycle experiment starts.
#[derive(Debug, Clone)]
pub enum InitialState {
    /// Independent full-rank random states on every factor, drawn from
    /// per-factor streams of the given master seed.
    RandomProduct { seed: u64 },
    /// An explicit, already validated state (e.g. loaded from a file, or
    /// a handcrafted pure product in tests).
    Given(DensityOperator),
}

/// Full description of one cycle experiment.
#[derive(Debug, Clone)]
pub struct CycleConfig {
    /// Subsystem structure of the composite space.
    pub partition: Partition,
    /// Number of evolve-measure cycles; 0 records only the initial
    /// measurement.
    pub n_cycles: usize,
    /// Master seed of the Hamiltonian draw.
    pub hamiltonian_seed: u64,
    /// Weight of the global interaction term relative to the local
    /// terms; 0 keeps the parts uncoupled.
    pub coupling_strength: f64,
    /// Time the evolution unitary `exp(-i H t)` runs per cycle.
    pub evolution_time: f64,
    /// Starting state.
    pub initial_state: InitialState,
    /// Entropy scale; SI value or 1 for natural units.
    pub k_b: f64,
    /// Tolerances for the validators and information evaluations.
    pub tolerances: ToleranceSet,
    /// Hard cap on the composite dimension.
    pub max_total_dim: usize,
}

impl CycleConfig {
    /// Checks the parameter ranges and internal consistency.
    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        if self.partition.total_dim() > self.max_total_dim {
            return Err(Error::ConfigInvalid(format!(
                "total dimension {} exceeds the cap of {}",
                self.partition.total_dim(),
                self.max_total_dim
            )));
        }
        if !(self.coupling_strength >= 0.0 && self.coupling_strength.is_finite()) {
            return Err(Error::ConfigInvalid(format!(
                "coupling_strength must be a non-negative finite number, got {}",
                self.coupling_strength
            )));
        }
        if !(self.evolution_time >= 0.0 && self.evolution_time.is_finite()) {
            return Err(Error::ConfigInvalid(format!(
                "evolution_time must be a non-negative finite number, got {}",
                self.evolution_time
            )));
        }
        if !(self.k_b > 0.0 && self.k_b.is_finite()) {
            return Err(Error::ConfigInvalid(format!(
                "k_B must be a positive finite number, got {}",
                self.k_b
            )));
        }
        if let InitialState::Given(rho) = &self.initial_state {
            if rho.dim() != self.partition.total_dim() {
                return Err(Error::DimMismatch {
                    expected: self.partition.total_dim(),
                    actual: rho.dim(),
                });
            }
        }
        Ok(())
    }
}

/// One measured cycle (or, for `cycle_index` 0, the initial measurement).
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    /// 1-based cycle number; 0 only for the initial record of a
    /// zero-cycle run.
    pub cycle_index: usize,
    /// `Tr(rho ln rho)` of the evolved state, before collapse (nats).
    /// Conserved across the evolution within `tol.conserve`.
    pub info_total: f64,
    /// `-k_B sum_i Tr(rho_i ln rho_i)` over the marginals measured this
    /// cycle; non-decreasing from record to record.
    pub entropy_sum: f64,
    /// `I(rho) - sum_i I(rho_i)` of the evolved state: the correlation
    /// information the collapse is about to destroy (nats, >= 0).
    pub correlation_info_before_collapse: f64,
    /// `entropy_sum` minus the previous record's (0 for the initial
    /// record); equals `k_B * correlation_info_before_collapse`.
    pub delta_entropy: f64,
}

/// Draws a Hermitian matrix `(G + G^H)/2` from complex-Gaussian `G` and
/// rescales it to unit spectral radius, so coupling weights between
/// terms are comparable.
fn random_unit_scale_hermitian(dim: usize, stream: &mut RngStream) -> Result<HermitianOperator> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(stream.sample(StandardNormal), stream.sample(StandardNormal))
    });
    let h = (&g + g.adjoint()) / Complex64::new(2.0, 0.0);
    let spectrum = spectral_decompose_matrix(&h)?;
    let radius = spectrum.eigenvalues().iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    if radius == 0.0 {
        // A zero draw has measure zero; pass it through as a harmless
        // zero term rather than failing the run.
        return Ok(HermitianOperator::from_valid(h));
    }
    Ok(HermitianOperator::from_valid(h / Complex64::new(radius, 0.0)))
}

/// Builds the cycle Hamiltonian `H = sum_i h_i + coupling * g`: one
/// random local term per factor (embedded with identities on the other
/// factors) plus a global interaction term, every term normalized to
/// unit spectral radius so `coupling` is a dimensionless knob.
///
/// `coupling = 0` leaves `H` an exact sum of local terms, so evolution
/// factorizes over the partition and keeps product states product. The
/// local terms and the interaction term are drawn from `stream` in
/// factor order (interaction last), so runs at different couplings share
/// their local physics when given the same stream.
///
/// # Panics
/// If `coupling` is negative or non-finite.
pub fn build_interacting_hamiltonian(
    partition: &Partition,
    coupling: f64,
    stream: &mut RngStream,
) -> Result<HermitianOperator> {
    assert!(coupling >= 0.0 && coupling.is_finite(), "coupling must be non-negative and finite");
    let dims = partition.dims();
    let total = partition.total_dim();
    let mut h = DMatrix::<Complex64>::zeros(total, total);
    for (i, &d) in dims.iter().enumerate() {
        let local = random_unit_scale_hermitian(d, stream)?;
        let left: usize = dims[..i].iter().product();
        let right: usize = dims[i + 1..].iter().product();
        let embedded = DMatrix::<Complex64>::identity(left, left)
            .kronecker(local.matrix())
            .kronecker(&DMatrix::<Complex64>::identity(right, right));
        h += embedded;
    }
    let interaction = random_unit_scale_hermitian(total, stream)?;
    h += interaction.matrix() * Complex64::new(coupling, 0.0);
    Ok(HermitianOperator::from_valid(h))
}

/// Measures every part: marginals, their summed information, and the
/// total information of the unmeasured state.
fn measure(
    rho: &DensityOperator,
    partition: &Partition,
    tol: &ToleranceSet,
) -> Result<(Vec<DensityOperator>, f64, f64)> {
    let parts = marginals(rho, partition)?;
    let mut part_info_sum = 0.0;
    for part in &parts {
        part_info_sum += part.information(tol)?;
    }
    let info_total = rho.information(tol)?;
    Ok((parts, part_info_sum, info_total))
}

/// Reprojects a state onto the Hermitian, unit-trace manifold.
///
/// The cycle loop is an iterated map, and the collapse step *multiplies*
/// the marginals together, so the one-ulp trace excess and anti-Hermitian
/// residue the evolution leaves behind would otherwise compound
/// geometrically with the factor count (doubling per cycle on a
/// bipartition). Taking the Hermitian part and rescaling the trace are
/// both exact no-ops on the true state, and together they pin the
/// iteration to the manifold it lives on.
fn renormalize(rho: &DensityOperator) -> DensityOperator {
    let m = rho.matrix();
    let hermitian_part = (m + m.adjoint()).unscale(2.0);
    let trace = hermitian_part.trace().re;
    DensityOperator::from_valid(hermitian_part / Complex64::new(trace, 0.0))
}

/// Runs the evolve-measure protocol and returns one record per cycle.
///
/// The initial state is measured once at the start (collapsing it to the
/// product of its marginals); each cycle then evolves the current
/// product state by `exp(-i H t)`, records the conserved total
/// information and the correlation information the evolution built, and
/// collapses again (renormalizing the product's trace, see
/// [`renormalize`]). With `n_cycles = 0` the list holds the single
/// initial-measurement record instead.
pub fn run_cycle_experiment(cfg: &CycleConfig) -> Result<Vec<CycleRecord>> {
    cfg.validate()?;
    let tol = &cfg.tolerances;

    let mut h_stream = rng::stream(cfg.hamiltonian_seed, 0);
    let hamiltonian =
        build_interacting_hamiltonian(&cfg.partition, cfg.coupling_strength, &mut h_stream)?;
    let u = UnitaryOperator::from_hamiltonian(&hamiltonian, cfg.evolution_time)?;

    let initial = match &cfg.initial_state {
        InitialState::RandomProduct { seed } => {
            let factors: Vec<DensityOperator> = cfg
                .partition
                .dims()
                .iter()
                .enumerate()
                .map(|(i, &d)| DensityOperator::random(d, d, &mut rng::stream(*seed, i as u64)))
                .collect();
            tensor_product(&factors)
        }
        InitialState::Given(rho) => rho.clone(),
    };

    let (parts, part_info_sum, info_total) = measure(&initial, &cfg.partition, tol)?;
    let mut entropy_sum = -cfg.k_b * part_info_sum;

    if cfg.n_cycles == 0 {
        return Ok(vec![CycleRecord {
            cycle_index: 0,
            info_total,
            entropy_sum,
            correlation_info_before_collapse: info_total - part_info_sum,
            delta_entropy: 0.0,
        }]);
    }

    let mut state = renormalize(&tensor_product(&parts));
    let mut records = Vec::with_capacity(cfg.n_cycles);
    for cycle_index in 1..=cfg.n_cycles {
        let evolved = state.evolve(&u)?;
        let (parts, part_info_sum, info_total) = measure(&evolved, &cfg.partition, tol)?;
        let new_entropy_sum = -cfg.k_b * part_info_sum;
        records.push(CycleRecord {
            cycle_index,
            info_total,
            entropy_sum: new_entropy_sum,
            correlation_info_before_collapse: info_total - part_info_sum,
            delta_entropy: new_entropy_sum - entropy_sum,
        });
        entropy_sum = new_entropy_sum;
        state = renormalize(&tensor_product(&parts));
    }
    Ok(records)
}

/// Transition matrix of a classical chain.
#[derive(Debug, Clone)]
pub enum TransitionSpec {
    /// An explicit validated doubly stochastic matrix.
    Fixed(DoublyStochasticMatrix),
    /// A seeded mixture of `k_terms` random permutation matrices.
    Random { k_terms: usize, seed: u64 },
}

/// Full description of one classical chain run.
#[derive(Debug, Clone)]
pub struct ChainConfig {
    /// Number of classical states.
    pub n_states: usize,
    /// Number of transition applications.
    pub n_steps: usize,
    /// The transition matrix (or how to draw it).
    pub transition: TransitionSpec,
    /// Starting distribution.
    pub initial: ProbabilityVector,
}

/// One step of a classical chain (step 0 is the initial distribution).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRecord {
    /// 0-based step; step 0 is the initial distribution.
    pub step: usize,
    /// The distribution after this step.
    pub entries: Vec<f64>,
    /// `sum_i W_i ln W_i` of the distribution (nats, <= 0).
    pub shannon_info: f64,
    /// Contraction margin realized by this step,
    /// `shannon_info(previous) - shannon_info(this)`; 0 for step 0.
    pub margin: f64,
}

/// Applies a doubly stochastic transition repeatedly, logging the
/// distribution, its `sum W ln W`, and the per-step contraction margin.
/// Returns `n_steps + 1` records, the first being the initial state.
pub fn run_classical_chain(cfg: &ChainConfig) -> Result<Vec<ChainRecord>> {
    if cfg.n_states == 0 {
        return Err(Error::ConfigInvalid("n_states must be at least 1".into()));
    }
    if cfg.initial.len() != cfg.n_states {
        return Err(Error::DimMismatch { expected: cfg.n_states, actual: cfg.initial.len() });
    }
    let transition = match &cfg.transition {
        TransitionSpec::Fixed(t) => {
            if t.n() != cfg.n_states {
                return Err(Error::DimMismatch { expected: cfg.n_states, actual: t.n() });
            }
            t.clone()
        }
        TransitionSpec::Random { k_terms, seed } => {
            if *k_terms == 0 {
                return Err(Error::ConfigInvalid("k_terms must be at least 1".into()));
            }
            DoublyStochasticMatrix::random(cfg.n_states, *k_terms, &mut rng::stream(*seed, 0))
        }
    };

    let mut w = cfg.initial.clone();
    let mut info = w.information();
    let mut records = Vec::with_capacity(cfg.n_steps + 1);
    records.push(ChainRecord {
        step: 0,
        entries: w.entries().to_vec(),
        shannon_info: info,
        margin: 0.0,
    });
    for step in 1..=cfg.n_steps {
        let next = doubly_stochastic_apply(&w, &transition)?;
        let next_info = next.information();
        records.push(ChainRecord {
            step,
            entries: next.entries().to_vec(),
            shannon_info: next_info,
            margin: info - next_info,
        });
        w = next;
        info = next_info;
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> ToleranceSet {
        ToleranceSet::default()
    }

    fn base_config(dims: Vec<usize>) -> CycleConfig {
        CycleConfig {
            partition: Partition::new(dims).unwrap(),
            n_cycles: 10,
            hamiltonian_seed: 7,
            coupling_strength: 1.0,
            evolution_time: 1.0,
            initial_state: InitialState::RandomProduct { seed: 11 },
            k_b: 1.0,
            tolerances: tol(),
            max_total_dim: 64,
        }
    }

    /// Rank-1 projector onto a product of single-factor basis states.
    fn pure_product(dims: &[usize]) -> DensityOperator {
        let factors: Vec<DensityOperator> = dims
            .iter()
            .map(|&d| {
                let mut m = DMatrix::<Complex64>::zeros(d, d);
                m[(0, 0)] = Complex64::new(1.0, 0.0);
                DensityOperator::new(m, &tol()).unwrap()
            })
            .collect();
        tensor_product(&factors)
    }

    #[test]
    fn unit_scale_terms_have_unit_spectral_radius() {
        let mut stream = rng::stream(50, 0);
        for dim in [2usize, 4, 9] {
            let h = random_unit_scale_hermitian(dim, &mut stream).unwrap();
            let radius = h
                .spectral_decompose()
                .unwrap()
                .eigenvalues()
                .iter()
                .fold(0.0f64, |m, &l| m.max(l.abs()));
            assert_abs_diff_eq!(radius, 1.0, epsilon = tol().spec);
        }
    }

    #[test]
    fn zero_coupling_hamiltonian_keeps_products_product() {
        let p = Partition::new(vec![2, 2]).unwrap();
        let mut stream = rng::stream(51, 0);
        let h = build_interacting_hamiltonian(&p, 0.0, &mut stream).unwrap();
        let u = UnitaryOperator::from_hamiltonian(&h, 1.0).unwrap();
        let rho = pure_product(&[2, 2]);
        let evolved = rho.evolve(&u).unwrap();
        let corr = crate::composite::correlation_information(&evolved, &p, &tol()).unwrap();
        assert!(corr.abs() <= 1e-9, "uncoupled evolution created correlation {corr:e}");
    }

    #[test]
    fn zero_coupling_hamiltonian_is_block_structured() {
        // With no interaction term, H = h_a (x) I + I (x) h_b, whose
        // matrix elements vanish unless one factor index is diagonal.
        let p = Partition::new(vec![2, 3]).unwrap();
        let mut stream = rng::stream(52, 0);
        let h = build_interacting_hamiltonian(&p, 0.0, &mut stream).unwrap();
        for a0 in 0..2 {
            for b0 in 0..3 {
                for a1 in 0..2 {
                    for b1 in 0..3 {
                        if a0 != a1 && b0 != b1 {
                            let entry = h.matrix()[(a0 * 3 + b0, a1 * 3 + b1)];
                            assert_eq!(
                                entry,
                                Complex64::new(0.0, 0.0),
                                "off-block entry ({a0}{b0},{a1}{b1}) nonzero"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn same_stream_shares_local_terms_across_couplings() {
        let p = Partition::new(vec![2, 2]).unwrap();
        let h0 = build_interacting_hamiltonian(&p, 0.0, &mut rng::stream(53, 0)).unwrap();
        let h1 = build_interacting_hamiltonian(&p, 0.5, &mut rng::stream(53, 0)).unwrap();
        let h2 = build_interacting_hamiltonian(&p, 1.0, &mut rng::stream(53, 0)).unwrap();
        // h1 - h0 = 0.5 g and h2 - h0 = 1.0 g for the same g.
        let g_half = h1.matrix() - h0.matrix();
        let g_full = h2.matrix() - h0.matrix();
        let dev = (g_full - g_half * Complex64::new(2.0, 0.0))
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        assert!(dev <= 1e-12, "interaction term not shared: {dev:e}");
    }

    #[test]
    fn cycle_records_are_monotone_and_obey_the_increment_identity() {
        let cfg = base_config(vec![2, 2]);
        let records = run_cycle_experiment(&cfg).unwrap();
        assert_eq!(records.len(), 10);
        let mut prev = None;
        for r in &records {
            assert!(r.delta_entropy >= -tol().entropy, "entropy decreased: {}", r.delta_entropy);
            assert!(
                (r.delta_entropy - cfg.k_b * r.correlation_info_before_collapse).abs() <= 1e-9,
                "increment identity violated at cycle {}",
                r.cycle_index
            );
            assert!(r.correlation_info_before_collapse >= -1e-12);
            assert!(r.entropy_sum <= cfg.k_b * 4.0f64.ln() + tol().entropy, "above the ceiling");
            if let Some(prev) = prev {
                assert!(r.entropy_sum >= prev - tol().entropy);
            }
            prev = Some(r.entropy_sum);
        }
    }

    #[test]
    fn conservation_holds_within_each_cycle() {
        // info_total of the evolved state equals the information of the
        // product state that entered the evolution, which is the previous
        // record's -entropy_sum / k_B (products carry additive info).
        let cfg = base_config(vec![2, 4]);
        let records = run_cycle_experiment(&cfg).unwrap();
        for pair in records.windows(2) {
            let expected = -pair[0].entropy_sum / cfg.k_b;
            let drift = (pair[1].info_total - expected).abs();
            assert!(
                drift <= tol().conserve,
                "conservation drift {:e} at cycle {}",
                drift,
                pair[1].cycle_index
            );
        }
    }

    #[test]
    fn zero_coupling_run_has_flat_entropy() {
        let mut cfg = base_config(vec![2, 2]);
        cfg.coupling_strength = 0.0;
        let records = run_cycle_experiment(&cfg).unwrap();
        for r in &records {
            assert!(
                r.delta_entropy.abs() <= 1e-12,
                "uncoupled increment {:e} at cycle {}",
                r.delta_entropy,
                r.cycle_index
            );
        }
    }

    #[test]
    fn pure_product_with_frozen_evolution_stays_at_zero_entropy() {
        let mut cfg = base_config(vec![2, 2]);
        cfg.evolution_time = 0.0;
        cfg.initial_state = InitialState::Given(pure_product(&[2, 2]));
        let records = run_cycle_experiment(&cfg).unwrap();
        for r in &records {
            assert!(
                r.entropy_sum.abs() <= 1e-12,
                "entropy {:e} at cycle {}",
                r.entropy_sum,
                r.cycle_index
            );
        }
    }

    #[test]
    fn zero_cycles_returns_the_initial_record_only() {
        let mut cfg = base_config(vec![2, 2]);
        cfg.n_cycles = 0;
        cfg.initial_state = InitialState::Given(pure_product(&[2, 2]));
        let records = run_cycle_experiment(&cfg).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].cycle_index, 0);
        assert_eq!(records[0].delta_entropy, 0.0);
        assert!(records[0].entropy_sum.abs() <= 1e-12);
    }

    #[test]
    fn single_cycle_returns_a_single_record() {
        let mut cfg = base_config(vec![2, 2]);
        cfg.n_cycles = 1;
        let records = run_cycle_experiment(&cfg).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].cycle_index, 1);
    }

    #[test]
    fn cycle_experiment_is_deterministic() {
        let cfg = base_config(vec![3, 3]);
        let a = run_cycle_experiment(&cfg).unwrap();
        let b = run_cycle_experiment(&cfg).unwrap();
        assert_eq!(a, b, "same config and seeds must reproduce records bitwise");
    }

    /// Frozen record of the pinned-seed bipartite run. Guards the whole
    /// deterministic pipeline (seed streams, Hamiltonian draw, evolution,
    /// collapse) against silent drift: a change in any of them moves these
    /// digits. The literals keep all 17 digits of the observed values.
    #[test]
    #[allow(clippy::excessive_precision)]
    fn pinned_seed_run_reproduces_frozen_values() {
        let mut cfg = base_config(vec![2, 2]);
        cfg.n_cycles = 1;
        let records = run_cycle_experiment(&cfg).unwrap();
        let r = &records[0];
        assert!(
            r.correlation_info_before_collapse > 1e-3,
            "coupled evolution should build real correlation, got {:e}",
            r.correlation_info_before_collapse
        );
        let checks = [
            (r.correlation_info_before_collapse, 0.229_981_312_222_441_89),
            (r.info_total, -0.679_753_344_889_156_6),
            (r.entropy_sum, 0.909_734_657_111_598_5),
            (r.delta_entropy, 0.229_981_312_222_442_45),
        ];
        for (got, want) in checks {
            assert!(
                (got - want).abs() <= 1e-9,
                "frozen value drifted: got {got:.17e}, want {want:.17e}"
            );
        }
    }

    #[test]
    fn config_validation_rejects_bad_parameters() {
        let mut cfg = base_config(vec![2, 2]);
        cfg.coupling_strength = -0.1;
        assert!(matches!(cfg.validate(), Err(Error::ConfigInvalid(_))));

        let mut cfg = base_config(vec![2, 2]);
        cfg.evolution_time = f64::NAN;
        assert!(matches!(cfg.validate(), Err(Error::ConfigInvalid(_))));

        let mut cfg = base_config(vec![2, 2]);
        cfg.k_b = 0.0;
        assert!(matches!(cfg.validate(), Err(Error::ConfigInvalid(_))));

        let cfg = base_config(vec![4, 4, 8]);
        assert!(matches!(cfg.validate(), Err(Error::ConfigInvalid(_))));

        let mut cfg = base_config(vec![2, 2]);
        cfg.initial_state = InitialState::Given(DensityOperator::maximally_mixed(8));
        assert!(matches!(cfg.validate(), Err(Error::DimMismatch { expected: 4, actual: 8 })));
    }

    #[test]
    fn interacting_golden_run_builds_substantial_correlation() {
        // Regression anchor: one evolution step of the pinned-seed 2x2
        // experiment must entangle well past the noise floor.
        let p = Partition::new(vec![2, 2]).unwrap();
        let h = build_interacting_hamiltonian(&p, 1.0, &mut rng::stream(7, 0)).unwrap();
        let u = UnitaryOperator::from_hamiltonian(&h, 1.0).unwrap();
        let factors = [
            DensityOperator::random(2, 2, &mut rng::stream(11, 0)),
            DensityOperator::random(2, 2, &mut rng::stream(11, 1)),
        ];
        let rho = tensor_product(&factors).evolve(&u).unwrap();
        let corr = crate::composite::correlation_information(&rho, &p, &tol()).unwrap();
        assert!(corr > 1e-3, "golden run correlation {corr:e} too small");
    }

    #[test]
    fn classical_identity_chain_is_constant() {
        let initial = ProbabilityVector::new(vec![0.4, 0.3, 0.2, 0.1], &tol()).unwrap();
        let cfg = ChainConfig {
            n_states: 4,
            n_steps: 10,
            transition: TransitionSpec::Fixed(DoublyStochasticMatrix::identity(4)),
            initial: initial.clone(),
        };
        let records = run_classical_chain(&cfg).unwrap();
        assert_eq!(records.len(), 11);
        for r in &records {
            assert_eq!(r.entries, initial.entries(), "distribution moved at step {}", r.step);
            assert_eq!(r.margin, 0.0);
        }
    }

    #[test]
    fn classical_uniform_chain_flattens_in_one_step() {
        let cfg = ChainConfig {
            n_states: 4,
            n_steps: 3,
            transition: TransitionSpec::Fixed(DoublyStochasticMatrix::uniform(4)),
            initial: ProbabilityVector::point(4, 2),
        };
        let records = run_classical_chain(&cfg).unwrap();
        assert_eq!(records[0].shannon_info, 0.0);
        for r in &records[1..] {
            assert_abs_diff_eq!(r.shannon_info, -4.0f64.ln(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(records[1].margin, 4.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn classical_random_chain_contracts_at_every_step() {
        let cfg = ChainConfig {
            n_states: 8,
            n_steps: 100,
            transition: TransitionSpec::Random { k_terms: 5, seed: 60 },
            initial: ProbabilityVector::point(8, 0),
        };
        let records = run_classical_chain(&cfg).unwrap();
        assert_eq!(records.len(), 101);
        for r in &records[1..] {
            assert!(r.margin >= -1e-12, "margin {:e} at step {}", r.margin, r.step);
        }
    }

    #[test]
    fn classical_uniform_start_is_a_fixed_point() {
        let cfg = ChainConfig {
            n_states: 8,
            n_steps: 50,
            transition: TransitionSpec::Random { k_terms: 5, seed: 61 },
            initial: ProbabilityVector::uniform(8),
        };
        let records = run_classical_chain(&cfg).unwrap();
        for r in &records {
            assert_abs_diff_eq!(r.shannon_info, -8.0f64.ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn classical_mixture_chain_converges_to_uniform() {
        // Irreducible aperiodic mixtures contract toward uniform; the
        // step count is recorded by the test, not asserted a priori.
        let n = 4;
        let cfg = ChainConfig {
            n_states: n,
            n_steps: 10_000,
            transition: TransitionSpec::Random { k_terms: 5, seed: 62 },
            initial: ProbabilityVector::point(n, 0),
        };
        let records = run_classical_chain(&cfg).unwrap();
        let target = 1.0 / n as f64;
        let converged_at =
            records.iter().find(|r| r.entries.iter().all(|&e| (e - target).abs() <= 1e-6));
        let converged_at = converged_at.expect("chain failed to reach uniform within 10^4 steps");
        assert!(converged_at.step > 0);
    }

    #[test]
    fn classical_chain_rejects_inconsistent_dims() {
        let cfg = ChainConfig {
            n_states: 4,
            n_steps: 1,
            transition: TransitionSpec::Fixed(DoublyStochasticMatrix::identity(3)),
            initial: ProbabilityVector::uniform(4),
        };
        assert!(matches!(
            run_classical_chain(&cfg),
            Err(Error::DimMismatch { expected: 4, actual: 3 })
        ));
        let cfg = ChainConfig {
            n_states: 3,
            n_steps: 1,
            transition: TransitionSpec::Fixed(DoublyStochasticMatrix::identity(3)),
            initial: ProbabilityVector::uniform(4),
        };
        assert!(matches!(
            run_classical_chain(&cfg),
            Err(Error::DimMismatch { expected: 3, actual: 4 })
        ));
    }
}
