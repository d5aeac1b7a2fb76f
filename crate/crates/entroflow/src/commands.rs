//! The four batch commands behind the CLI: randomized inequality sweeps,
//! the evolve-measure cycle experiment, the classical chain, and the
//! conservation check.
//!
//! Every command reads one section of the config file, runs fully
//! deterministically from a single master seed (command-line flag beats
//! the config's `seed` key, which defaults to 0), writes plot-ready CSV
//! plus any summary into the output directory, and finishes with the run
//! manifest. Trials draw from per-index RNG streams, so row `i` of any
//! sweep can be reproduced in isolation from the seed column of its CSV.

use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::composite::Partition;
use crate::config::{ConfigFile, Section};
use crate::cycle::{
    run_classical_chain, run_cycle_experiment, ChainConfig, CycleConfig, InitialState,
    TransitionSpec,
};
use crate::density::{DensityOperator, UnitaryOperator};
use crate::error::{Error, Result};
use crate::inequalities::{
    lemma1_margin, lemma2_margin, lemma3_margin, lemma4_margin, DoublyStochasticMatrix,
    JointDistribution, ProbabilityVector,
};
use crate::report::{fmt_f64, write_csv, write_json, RunManifest};
use crate::rng::{self, stream_seed, RngStream};
use crate::serialize::{load_density, load_transition};

/// Default cap on any Hilbert-space or state-space dimension, overridable
/// through the `ENTROFLOW_MAX_DIM` environment variable.
pub const DEFAULT_MAX_DIM: usize = 64;

/// How a run ended: every property held, or at least one was violated.
/// Hard errors (bad config, unreadable files) travel as `Err` instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Violation,
}

/// Everything a command needs besides its config section.
#[derive(Debug, Clone)]
pub struct RunContext {
    /// Path of the config file (also anchors relative paths inside it).
    pub config_path: PathBuf,
    /// Directory the outputs land in; created if absent.
    pub out_dir: PathBuf,
    /// Master seed from the command line, overriding the config.
    pub seed_flag: Option<u64>,
    /// Hard cap on dimensions, from `ENTROFLOW_MAX_DIM` or the default.
    pub max_dim: usize,
}

impl RunContext {
    /// Resolves the master seed: flag beats config `seed`, default 0.
    fn master_seed(&self, section: &Section) -> Result<u64> {
        Ok(match self.seed_flag {
            Some(s) => s,
            None => section.get_u64("seed")?.unwrap_or(0),
        })
    }

    /// Resolves a path from the config against the config's directory.
    fn resolve(&self, raw: &str) -> PathBuf {
        let p = Path::new(raw);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.config_path.parent().unwrap_or(Path::new(".")).join(p)
        }
    }

    fn prepare_out_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|source| Error::Io { path: self.out_dir.clone(), source })
    }

    fn check_dim(&self, what: &str, dim: usize) -> Result<()> {
        if dim > self.max_dim {
            return Err(Error::ConfigInvalid(format!(
                "{what} {dim} exceeds the dimension cap {} (ENTROFLOW_MAX_DIM)",
                self.max_dim
            )));
        }
        Ok(())
    }
}

/// Reads the dimension cap from `ENTROFLOW_MAX_DIM` (default
/// [`DEFAULT_MAX_DIM`]).
pub fn max_dim_from_env() -> Result<usize> {
    match std::env::var("ENTROFLOW_MAX_DIM") {
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_MAX_DIM),
        Err(e) => Err(Error::ConfigInvalid(format!("ENTROFLOW_MAX_DIM is not unicode: {e}"))),
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(|| {
            Error::ConfigInvalid(format!("ENTROFLOW_MAX_DIM = `{v}` is not a positive integer"))
        }),
    }
}

/// One row of a lemma sweep CSV.
struct MarginRow {
    lemma: usize,
    instance: usize,
    n: usize,
    margin: f64,
    seed: u64,
}

impl MarginRow {
    fn cells(&self) -> Vec<String> {
        vec![
            self.lemma.to_string(),
            self.instance.to_string(),
            self.n.to_string(),
            fmt_f64(self.margin),
            self.seed.to_string(),
        ]
    }
}

/// Per-instance stream index: lemma number in the high half, instance in
/// the low half, so no two draws in a run share a stream.
fn lemma_stream_index(lemma: usize, instance: usize) -> u64 {
    ((lemma as u64) << 32) | instance as u64
}

/// Randomized sweeps of the four classical inequalities. Writes one CSV
/// per lemma; exits clean iff every margin clears `-tol_entropy`.
pub fn cmd_lemmas(ctx: &RunContext) -> Result<Outcome> {
    let config = ConfigFile::load(&ctx.config_path)?;
    let section = config.section("lemmas")?;
    section.check_keys(&[
        "instances_lemma1",
        "instances_lemma2",
        "instances_lemma3",
        "instances_lemma4",
        "max_n",
    ])?;
    let tol = section.tolerances()?;
    let master = ctx.master_seed(section)?;
    let max_n = section.get_usize("max_n")?.unwrap_or(16);
    if max_n < 4 {
        return Err(Error::ConfigInvalid(format!(
            "max_n = {max_n} leaves no room for a bipartite joint (need >= 4)"
        )));
    }
    ctx.check_dim("max_n", max_n)?;
    let instances = |key: &str| -> Result<usize> {
        let n = section.get_usize(key)?.unwrap_or(1000);
        if n >= u32::MAX as usize {
            return Err(Error::ConfigInvalid(format!("{key} = {n} exceeds the sweep limit")));
        }
        Ok(n)
    };

    ctx.prepare_out_dir()?;
    let manifest = RunManifest::begin("lemmas", &ctx.config_path, master);
    let mut outputs = Vec::new();
    let mut worst: Option<&MarginRow> = None;
    let mut tables: Vec<Vec<MarginRow>> = Vec::new();

    for lemma in 1..=4 {
        let count = instances(&format!("instances_lemma{lemma}"))?;
        let mut rows = Vec::with_capacity(count);
        for instance in 0..count {
            let seed = stream_seed(master, lemma_stream_index(lemma, instance));
            let mut stream = rng::from_seed(seed);
            let (n, margin) = draw_lemma_instance(lemma, max_n, &mut stream)?;
            rows.push(MarginRow { lemma, instance, n, margin, seed });
        }
        tables.push(rows);
    }

    for rows in &tables {
        for row in rows {
            if worst.is_none_or(|w| row.margin < w.margin) {
                worst = Some(row);
            }
        }
    }
    let outcome = match worst {
        Some(w) if w.margin < -tol.entropy => {
            eprintln!(
                "lemma{} instance {} (seed {}): margin {:e} is below -{:e}",
                w.lemma, w.instance, w.seed, w.margin, tol.entropy
            );
            Outcome::Violation
        }
        _ => Outcome::Pass,
    };

    for (rows, lemma) in tables.iter().zip(1..) {
        let path = ctx.out_dir.join(format!("lemma{lemma}.csv"));
        let cells: Vec<Vec<String>> = rows.iter().map(MarginRow::cells).collect();
        write_csv(&path, &["lemma", "instance", "n", "margin", "seed"], &cells)?;
        outputs.push(path);
    }
    manifest.finish(&ctx.out_dir, &outputs)?;
    Ok(outcome)
}

/// Draws one instance of the given lemma and returns `(size, margin)`.
fn draw_lemma_instance(lemma: usize, max_n: usize, stream: &mut RngStream) -> Result<(usize, f64)> {
    match lemma {
        // Scalar inequality; a unit exponential covers (0, inf) with
        // plenty of mass near the equality point x = 1.
        1 => {
            let x: f64 = stream.sample(Exp1);
            Ok((1, lemma1_margin(x)?))
        }
        2 => {
            let n = stream.gen_range(2..=max_n);
            let x = ProbabilityVector::random(n, stream);
            let w: Vec<f64> = (0..n).map(|_| stream.sample(Exp1)).collect();
            Ok((n, lemma2_margin(&w, &x)?))
        }
        3 => {
            let n = stream.gen_range(2..=max_n);
            let w = ProbabilityVector::random(n, stream);
            let k_terms = stream.gen_range(1..=n);
            let t = DoublyStochasticMatrix::random(n, k_terms, stream);
            Ok((n, lemma3_margin(&w, &t)?))
        }
        4 => {
            let n_a = stream.gen_range(2..=max_n / 2);
            let n_b = stream.gen_range(2..=max_n / n_a);
            let joint = JointDistribution::random(&[n_a, n_b], stream);
            Ok((n_a * n_b, lemma4_margin(&joint)?))
        }
        _ => unreachable!("lemma index is 1..=4"),
    }
}

/// Summary the cycle command writes next to its records CSV.
#[derive(Debug, Serialize)]
struct CycleSummary {
    /// Whether the entropy staircase never stepped down (within
    /// `tol_entropy`).
    monotone: bool,
    /// Largest downward step observed, as a positive number; 0 if none.
    max_violation: f64,
    /// Entropy sum after the last cycle.
    final_entropy: f64,
    /// `k_B ln d`: the entropy ceiling of the composite space.
    ceiling: f64,
}

/// Parses `2x2x3`-style partition shapes.
fn parse_partition(raw: &str) -> Result<Partition> {
    let dims: Option<Vec<usize>> = raw.split('x').map(|p| p.trim().parse().ok()).collect();
    let dims =
        dims.ok_or_else(|| Error::ConfigInvalid(format!("partition `{raw}` is not like `2x2`")))?;
    Partition::new(dims)
}

/// The evolve-measure cycle experiment. Writes the per-cycle records CSV
/// and a JSON summary; exits clean iff the entropy sum never decreases
/// beyond `tol_entropy`.
pub fn cmd_cycle(ctx: &RunContext) -> Result<Outcome> {
    let config = ConfigFile::load(&ctx.config_path)?;
    let section = config.section("cycle")?;
    section.check_keys(&["partition", "n_cycles", "coupling", "time", "k_b", "initial"])?;
    let tol = section.tolerances()?;
    let master = ctx.master_seed(section)?;

    let partition =
        parse_partition(section.get_str("partition").ok_or_else(|| {
            Error::ConfigInvalid("[cycle] needs `partition = <d1>x<d2>...`".into())
        })?)?;
    let initial = match section.get_str("initial").unwrap_or("random") {
        "random" => InitialState::RandomProduct { seed: stream_seed(master, 1) },
        raw => match raw.strip_prefix("file:") {
            Some(path) => InitialState::Given(load_density(&ctx.resolve(path), &tol)?),
            None => {
                return Err(Error::ConfigInvalid(format!(
                    "initial = `{raw}` is neither `random` nor `file:<path>`"
                )))
            }
        },
    };
    let cfg = CycleConfig {
        partition,
        n_cycles: section.get_usize("n_cycles")?.unwrap_or(20),
        hamiltonian_seed: stream_seed(master, 0),
        coupling_strength: section.get_f64("coupling")?.unwrap_or(1.0),
        evolution_time: section.get_f64("time")?.unwrap_or(1.0),
        initial_state: initial,
        k_b: section.get_f64("k_b")?.unwrap_or(1.0),
        tolerances: tol,
        max_total_dim: ctx.max_dim,
    };
    cfg.validate()?;

    let records = run_cycle_experiment(&cfg)?;

    ctx.prepare_out_dir()?;
    let manifest = RunManifest::begin("cycle", &ctx.config_path, master);
    let csv_path = ctx.out_dir.join("cycle.csv");
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.cycle_index.to_string(),
                fmt_f64(r.info_total),
                fmt_f64(r.entropy_sum),
                fmt_f64(r.correlation_info_before_collapse),
                fmt_f64(r.delta_entropy),
            ]
        })
        .collect();
    write_csv(
        &csv_path,
        &["cycle", "info_total", "entropy_sum", "correlation_info", "delta_entropy"],
        &rows,
    )?;

    let max_violation = records.iter().map(|r| -r.delta_entropy).fold(0.0f64, f64::max).max(0.0);
    let monotone = max_violation <= cfg.k_b * tol.entropy;
    let summary = CycleSummary {
        monotone,
        max_violation,
        final_entropy: records.last().expect("at least one record").entropy_sum,
        ceiling: cfg.k_b * (cfg.partition.total_dim() as f64).ln(),
    };
    let summary_path = ctx.out_dir.join("summary.json");
    write_json(&summary_path, &summary)?;
    manifest.finish(&ctx.out_dir, &[csv_path, summary_path])?;

    if !monotone {
        eprintln!(
            "entropy sum decreased by {:e} somewhere (tolerance {:e})",
            max_violation,
            cfg.k_b * tol.entropy
        );
        return Ok(Outcome::Violation);
    }
    Ok(Outcome::Pass)
}

/// The classical chain: a doubly stochastic map applied repeatedly.
/// Writes the per-step CSV; exits clean iff every contraction margin
/// clears `-tol_entropy`.
pub fn cmd_classical(ctx: &RunContext) -> Result<Outcome> {
    let config = ConfigFile::load(&ctx.config_path)?;
    let section = config.section("classical")?;
    section.check_keys(&["n_states", "n_steps", "transition", "initial"])?;
    let tol = section.tolerances()?;
    let master = ctx.master_seed(section)?;

    let n_states = section
        .get_usize("n_states")?
        .ok_or_else(|| Error::ConfigInvalid("[classical] needs `n_states`".into()))?;
    ctx.check_dim("n_states", n_states)?;
    let transition_raw = section
        .get_str("transition")
        .ok_or_else(|| Error::ConfigInvalid("[classical] needs `transition`".into()))?;
    let transition = if let Some(path) = transition_raw.strip_prefix("file:") {
        TransitionSpec::Fixed(load_transition(&ctx.resolve(path), &tol)?)
    } else if let Some(k) = transition_raw.strip_prefix("random:") {
        let k_terms = k.trim().parse().map_err(|_| {
            Error::ConfigInvalid(format!("transition `random:{k}` needs an integer term count"))
        })?;
        TransitionSpec::Random { k_terms, seed: stream_seed(master, 0) }
    } else {
        return Err(Error::ConfigInvalid(format!(
            "transition = `{transition_raw}` is neither `file:<path>` nor `random:<k>`"
        )));
    };
    let initial = match section.get_str("initial").unwrap_or("uniform") {
        "uniform" => ProbabilityVector::uniform(n_states),
        "random" => ProbabilityVector::random(n_states, &mut rng::stream(master, 1)),
        raw => {
            if let Some(idx) = raw.strip_prefix("point:") {
                let index: usize = idx.trim().parse().map_err(|_| {
                    Error::ConfigInvalid(format!("initial `point:{idx}` needs an integer index"))
                })?;
                if index >= n_states {
                    return Err(Error::ConfigInvalid(format!(
                        "initial point index {index} is out of range for {n_states} states"
                    )));
                }
                ProbabilityVector::point(n_states, index)
            } else if let Some(list) = raw.strip_prefix("inline:") {
                let entries: Option<Vec<f64>> =
                    list.split(',').map(|p| p.trim().parse().ok()).collect();
                let entries = entries.ok_or_else(|| {
                    Error::ConfigInvalid(format!("initial `inline:{list}` has a non-numeric entry"))
                })?;
                ProbabilityVector::new(entries, &tol)?
            } else {
                return Err(Error::ConfigInvalid(format!(
                    "initial = `{raw}` is not one of uniform | point:<i> | random | inline:<w0,w1,...>"
                )));
            }
        }
    };
    let cfg = ChainConfig {
        n_states,
        n_steps: section
            .get_usize("n_steps")?
            .ok_or_else(|| Error::ConfigInvalid("[classical] needs `n_steps`".into()))?,
        transition,
        initial,
    };

    let records = run_classical_chain(&cfg)?;

    ctx.prepare_out_dir()?;
    let manifest = RunManifest::begin("classical", &ctx.config_path, master);
    let mut header: Vec<String> = vec!["step".into()];
    header.extend((0..n_states).map(|i| format!("w_{i}")));
    header.push("shannon_info".into());
    header.push("margin".into());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let mut row = vec![r.step.to_string()];
            row.extend(r.entries.iter().copied().map(fmt_f64));
            row.push(fmt_f64(r.shannon_info));
            row.push(fmt_f64(r.margin));
            row
        })
        .collect();
    let csv_path = ctx.out_dir.join("chain.csv");
    write_csv(&csv_path, &header_refs, &rows)?;
    manifest.finish(&ctx.out_dir, &[csv_path])?;

    let worst = records.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    if worst < -tol.entropy {
        eprintln!("contraction margin {worst:e} is below -{:e}", tol.entropy);
        return Ok(Outcome::Violation);
    }
    Ok(Outcome::Pass)
}

/// Information conservation under unitary evolution: random `(rho, U)`
/// pairs per dimension, reporting `|I(U rho U^H) - I(rho)|`. Exits clean
/// iff the largest drift stays within `tol_conserve`.
pub fn cmd_conserve(ctx: &RunContext) -> Result<Outcome> {
    let config = ConfigFile::load(&ctx.config_path)?;
    let section = config.section("conserve")?;
    section.check_keys(&["dims", "trials", "use_identity"])?;
    let tol = section.tolerances()?;
    let master = ctx.master_seed(section)?;

    let dims = section
        .get_usize_list("dims")?
        .ok_or_else(|| Error::ConfigInvalid("[conserve] needs `dims = 2,4,...`".into()))?;
    for &dim in &dims {
        ctx.check_dim("dim", dim)?;
    }
    let trials = section.get_usize("trials")?.unwrap_or(100);
    let use_identity = section.get_bool("use_identity")?.unwrap_or(false);

    let mut rows = Vec::with_capacity(dims.len() * trials);
    let mut max_drift = 0.0f64;
    for (dim_idx, &dim) in dims.iter().enumerate() {
        for trial in 0..trials {
            let pair = (dim_idx * trials + trial) as u64;
            let rho = DensityOperator::random(dim, dim, &mut rng::stream(master, 2 * pair));
            let u = if use_identity {
                UnitaryOperator::identity(dim)
            } else {
                UnitaryOperator::random(dim, &mut rng::stream(master, 2 * pair + 1))?
            };
            let drift = (rho.evolve(&u)?.information(&tol)? - rho.information(&tol)?).abs();
            max_drift = max_drift.max(drift);
            rows.push(vec![dim.to_string(), trial.to_string(), fmt_f64(drift)]);
        }
    }

    ctx.prepare_out_dir()?;
    let manifest = RunManifest::begin("conserve", &ctx.config_path, master);
    let csv_path = ctx.out_dir.join("conserve.csv");
    write_csv(&csv_path, &["dim", "trial", "delta_info"], &rows)?;
    manifest.finish(&ctx.out_dir, &[csv_path])?;

    if max_drift > tol.conserve {
        eprintln!("information drift {max_drift:e} exceeds {:e}", tol.conserve);
        return Ok(Outcome::Violation);
    }
    Ok(Outcome::Pass)
}
