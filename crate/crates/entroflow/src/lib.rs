//! Numerical toolkit for information conservation, entropy inequalities,
//! and evolve-measure cycle experiments on finite quantum and classical
//! systems.
//!
//! The library tracks one scalar through everything it does: the
//! information functional `I = Tr(rho ln rho)` of a density operator (and
//! its classical counterpart `sum_i W_i ln W_i` of a probability
//! distribution), a nonpositive number whose negative rescales to entropy,
//! `S = -k_B I`. Three facts about `I` drive the experiments in
//! [`cycle`] and the `entroflow` binary:
//!
//! * unitary evolution conserves it exactly ([`density`]);
//! * replacing a composite state by the product of its marginals can only
//!   lower it — correlation information is nonnegative ([`composite`]);
//! * a family of classical rearrangement inequalities bounds every such
//!   step from first principles ([`inequalities`]).
//!
//! Alternating the first two produces the staircase the cycle experiment
//! records: total subsystem entropy never decreases, and each increment
//! equals `k_B` times the correlation information surrendered at the
//! measurement-like collapse.

pub mod commands;
pub mod composite;
pub mod config;
pub mod cycle;
pub mod density;
pub mod error;
pub mod inequalities;
pub mod report;
pub mod rng;
pub mod serialize;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::{ToleranceSet, BOLTZMANN_SI};
