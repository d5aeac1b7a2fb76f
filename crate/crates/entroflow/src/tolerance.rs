//! Numeric tolerances used by validators, margin checks, and gates.
//!
//! Every comparison against "should be zero" in this crate goes through a
//! named field of [`ToleranceSet`] rather than an inline literal, so a run
//! can tighten or loosen individual checks from its configuration file.

use crate::error::{Error, Result};

/// Boltzmann constant in J/K (2019 SI exact value). The default `k_B` for
/// entropy reports; experiments that prefer natural units pass `k_B = 1`.
pub const BOLTZMANN_SI: f64 = 1.380_649e-23;

/// Named tolerances for the validators and checks in this crate.
///
/// * `herm` — max entrywise deviation allowed by the Hermiticity check.
/// * `trace` — allowed deviation of a trace or probability sum from 1.
/// * `unitary` — max entrywise deviation of `U^H U` from the identity.
/// * `psd` — eigenvalue negativity window: eigenvalues in `[-psd, 0]` are
///   clipped to 0, anything below `-psd` is an error.
/// * `spec` — allowed residual when a spectral decomposition is
///   reconstructed against the original matrix.
/// * `conserve` — allowed drift of the information functional under
///   unitary evolution.
/// * `entropy` — slack for entropy monotonicity and inequality gates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSet {
    pub herm: f64,
    pub trace: f64,
    pub unitary: f64,
    pub psd: f64,
    pub spec: f64,
    pub conserve: f64,
    pub entropy: f64,
}

impl Default for ToleranceSet {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            trace: 1e-10,
            unitary: 1e-10,
            psd: 1e-9,
            spec: 1e-9,
            conserve: 1e-9,
            entropy: 1e-9,
        }
    }
}

impl ToleranceSet {
    /// Checks that every tolerance is strictly positive and finite.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("herm", self.herm),
            ("trace", self.trace),
            ("unitary", self.unitary),
            ("psd", self.psd),
            ("spec", self.spec),
            ("conserve", self.conserve),
            ("entropy", self.entropy),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::ConfigInvalid(format!(
                    "tolerance {name} must be a positive finite number, got {value}"
                )));
            }
        }
        Ok(())
    }
}
