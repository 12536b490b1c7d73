//! Exceptional sets and their measures for Borel-type growth lemmas, both
//! for sampled continuous growth functions `T(r)` and for sequences `T_n`.

mod lemmas;
mod profile;
mod sets;

pub use lemmas::{
    borel_xi_set, e0_linear_measure_scan, f_eta_set, growth_relation_check, E0Report, E0Verdict, GrowthRelationReport,
    RelationVerdict, Trend, XiPreset, UNBOUNDED_SLOPE,
};
pub use profile::{GrowthProfile, Integrability, ProfileKind, Weight};
pub use sets::{measure, ExceptionalSet, MeasureKind, MeasureRow, Members, SetSample};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrowthParams {
    /// Threshold `η` defining the set where the relative increment is large.
    pub eta: f64,
    /// The assumed limit `ζ`.
    pub zeta: f64,
    /// Growth factor `C > 1`.
    #[serde(rename = "C")]
    pub c_const: f64,
    /// Shift length `|c|`.
    pub c_abs: f64,
    pub nu: f64,
    pub epsilon: f64,
    /// Shift `s` in `T(r + s)`.
    pub s: f64,
    /// Fraction of the grid forming the trailing window.
    pub window: f64,
    /// Deviations at most this large count as settled.
    pub abs_tol: f64,
}

impl Default for GrowthParams {
    fn default() -> Self {
        GrowthParams {
            eta: 1.0,
            zeta: 0.0,
            c_const: 2.0,
            c_abs: 1.0,
            nu: 1.0,
            epsilon: 0.1,
            s: 1.0,
            window: 1.0 / 3.0,
            abs_tol: 1e-3,
        }
    }
}

impl GrowthParams {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.eta > 0.0, "eta must be positive"),
            (self.zeta >= 0.0, "zeta must be non-negative"),
            (self.c_const > 1.0, "C must exceed 1"),
            (self.c_abs >= 0.0, "|c| must be non-negative"),
            (self.nu > 0.0, "nu must be positive"),
            (self.epsilon > 0.0, "epsilon must be positive"),
            (self.s > 0.0, "s must be positive"),
            (self.window > 0.0 && self.window <= 1.0, "window must lie in (0, 1]"),
            (self.abs_tol >= 0.0, "abs_tol must be non-negative"),
        ];
        match checks.iter().find(|c| !c.0) {
            Some((_, msg)) => Err(Error::validation(*msg)),
            None => Ok(()),
        }
    }
}
