//! Numerical engines for the correlator integrals.
//!
//! Every integral that appears in the leading-order density matrix reduces to
//! one of three shapes:
//!
//! * [`fermi_gaussian`]: a Gaussian against a Fermi–Dirac factor over ℝ;
//! * [`singular_oscillatory`]: `∫₀^∞ e^{−a x²} w(x) / √(cosh α − cosh x)` with an
//!   inverse-square-root singularity at `x = α` and an oscillating weight;
//! * [`image_sum`]: truncation of the sum over BTZ images.
//!
//! Finite intervals are integrated by [`tanh_sinh`] panels that bisect when a
//! panel does not converge at the finest level.

mod fermi;
mod image_sum;
mod singular;
pub mod tanh_sinh;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fermi::{fermi_factor, fermi_gaussian};
pub use image_sum::{image_sum, ImageRange, ImageSumOutcome, Magnitude};
pub use singular::{
    singular_oscillatory, singular_oscillatory_with_branch, truncation_point, SingularIntegralSpec,
    SingularKind, SingularOutcome, BRANCH_SIGN,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureControls {
    pub tol_rel: f64,
    pub tol_abs: f64,
    /// Total number of panel bisections allowed for one integral.
    pub max_subdivisions: usize,
}

impl Default for QuadratureControls {
    fn default() -> Self {
        Self {
            tol_rel: 1e-10,
            tol_abs: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_rel > 0.0 && self.tol_abs > 0.0) {
            return Err(Error::invalid("quadrature tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImageSumControls {
    /// Stop once terms fall below `tol_rel` of the running sum ...
    pub tol_rel: f64,
    /// ... or below this absolute floor.
    pub tol_abs: f64,
    /// Number of successive small terms required before stopping.
    pub consecutive_small: usize,
    /// Hard cap on `|n|`.
    pub n_cap: u64,
}

impl Default for ImageSumControls {
    fn default() -> Self {
        Self {
            tol_rel: 1e-10,
            tol_abs: 1e-16,
            consecutive_small: 2,
            n_cap: 100_000,
        }
    }
}

impl ImageSumControls {
    pub fn validate(&self) -> Result<()> {
        if self.n_cap < 1 {
            return Err(Error::invalid("image sum cap must be at least one"));
        }
        if self.consecutive_small < 1 {
            return Err(Error::invalid("consecutive_small must be at least one"));
        }
        if !(self.tol_rel > 0.0 && self.tol_abs >= 0.0) {
            return Err(Error::invalid("image sum tolerances must be positive"));
        }
        Ok(())
    }
}
