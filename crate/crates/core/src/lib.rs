//! Entanglement harvesting by three static Unruh–DeWitt detectors hovering
//! outside a static BTZ black hole.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: the BTZ background, static detectors, proper distances and
//!   the hyperbolic image angles that parametrise every correlator.
//! * [`quadrature`]: the Fermi-weighted Gaussian integral, the square-root
//!   singular Gaussian-damped oscillatory integral over `[0, ∞)`, and the
//!   image-sum accumulator.
//! * [`correlators`]: the leading-order density-matrix elements `P_j`, `C_jk`
//!   and `X_jk`, both through single-integral forms (fast path) and through a
//!   brute-force regulated double integral ([`correlators::oracle`]).
//! * [`entanglement`]: density matrices, partial transposes, negativities and
//!   the π-tangle.
//!
//! Units: the switching width σ is fixed to one, so every length and time is
//! measured in units of σ and every energy in units of 1/σ. All correlator
//! values are stored per squared dimensionless coupling λ̃².

pub mod correlators;
pub mod entanglement;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod special;

pub use correlators::{
    CorrelatorSet, DetectorConfiguration, DetectorLabel, Numerics, PairLabel,
};
pub use entanglement::{DensityMatrix, EntanglementReport, NegativityMode, NegativitySettings};
pub use error::{Error, Result};
pub use geometry::{BoundaryCondition, BtzBackground, PairGeometry, StaticDetector};
pub use quadrature::{ImageSumControls, QuadratureControls};

/// Version of the numerical scheme. Bump whenever a change can alter any
/// computed correlator bit pattern; result caches key on it.
pub const NUMERICS_VERSION: u32 = 1;
