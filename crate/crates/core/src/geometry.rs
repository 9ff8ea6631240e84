//! BTZ background, static detectors, proper distances and image angles.
//!
//! A static detector at radius `R` is described internally by its horizon
//! rapidity `ρ = d(r_h, R) / ℓ`, so that `R = r_h cosh ρ` and the redshift
//! factor is `γ = (r_h / ℓ) sinh ρ`. Working with `ρ` keeps every near-horizon
//! quantity free of the cancellation in `R² − r_h²`.
//!
//! Image angles use the convention `Δφ + 2πn`. The Wightman image sum is
//! sometimes written with `Δφ − 2πn`; both give the same sum over `n ∈ ℤ`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{acosh_1p, acosh_from_ln, ln_cosh, ln_sinh};

/// Radii closer than this relative margin to the horizon are rejected.
pub const HORIZON_GUARD: f64 = 1e-12;

/// Boundary condition at the timelike AdS boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// ζ = 1
    Dirichlet,
    /// ζ = 0
    Transparent,
    /// ζ = −1
    Neumann,
}

impl BoundaryCondition {
    pub fn from_zeta(zeta: i32) -> Result<Self> {
        match zeta {
            1 => Ok(BoundaryCondition::Dirichlet),
            0 => Ok(BoundaryCondition::Transparent),
            -1 => Ok(BoundaryCondition::Neumann),
            other => Err(Error::invalid(format!(
                "boundary condition zeta must be -1, 0 or 1, got {other}"
            ))),
        }
    }

    pub fn zeta(self) -> f64 {
        match self {
            BoundaryCondition::Dirichlet => 1.0,
            BoundaryCondition::Transparent => 0.0,
            BoundaryCondition::Neumann => -1.0,
        }
    }
}

/// Non-rotating BTZ black hole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BtzBackground {
    ell: f64,
    mass: f64,
    boundary: BoundaryCondition,
    r_h: f64,
}

impl BtzBackground {
    pub fn new(ell: f64, mass: f64, boundary: BoundaryCondition) -> Result<Self> {
        if !(ell.is_finite() && ell > 0.0) {
            return Err(Error::invalid(format!("AdS length must be positive, got {ell}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::invalid(format!("mass must be positive, got {mass}")));
        }
        Ok(Self {
            ell,
            mass,
            boundary,
            r_h: ell * mass.sqrt(),
        })
    }

    /// Dirichlet background, the case every figure preset uses.
    pub fn dirichlet(ell: f64, mass: f64) -> Result<Self> {
        Self::new(ell, mass, BoundaryCondition::Dirichlet)
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn boundary(&self) -> BoundaryCondition {
        self.boundary
    }

    pub fn zeta(&self) -> f64 {
        self.boundary.zeta()
    }

    pub fn horizon_radius(&self) -> f64 {
        self.r_h
    }

    /// `r_h / ℓ`, the rate at which image angles grow with `n`.
    pub fn horizon_ratio(&self) -> f64 {
        self.r_h / self.ell
    }

    fn check_radius(&self, r: f64, what: &str) -> Result<()> {
        if !r.is_finite() || r < self.r_h {
            return Err(Error::domain(format!(
                "{what} = {r} lies inside the horizon r_h = {}",
                self.r_h
            )));
        }
        Ok(())
    }

    /// `r + sqrt(r² − r_h²)`, the exponential of the radial proper coordinate.
    fn radial_exponent(&self, r: f64) -> f64 {
        r + ((r - self.r_h) * (r + self.r_h)).sqrt()
    }

    /// Proper radial distance between `r1` and `r2 >= r1` on a constant-t slice.
    pub fn proper_distance(&self, r1: f64, r2: f64) -> Result<f64> {
        self.check_radius(r1, "r1")?;
        self.check_radius(r2, "r2")?;
        if r1 > r2 {
            return Err(Error::domain(format!(
                "proper distance needs r1 <= r2, got r1 = {r1}, r2 = {r2}"
            )));
        }
        Ok(self.ell * (self.radial_exponent(r2) / self.radial_exponent(r1)).ln())
    }

    /// Radius at proper distance `d` outward from `r1`.
    pub fn radius_at_distance(&self, r1: f64, d: f64) -> Result<f64> {
        self.check_radius(r1, "r1")?;
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::domain(format!("distance must be non-negative, got {d}")));
        }
        let u2 = self.radial_exponent(r1) * (d / self.ell).exp();
        Ok(0.5 * (u2 + self.r_h * self.r_h / u2))
    }
}

/// Free function form of [`BtzBackground::proper_distance`].
pub fn proper_distance(bg: &BtzBackground, r1: f64, r2: f64) -> Result<f64> {
    bg.proper_distance(r1, r2)
}

/// Free function form of [`BtzBackground::radius_at_distance`].
pub fn radius_at_distance(bg: &BtzBackground, r1: f64, d: f64) -> Result<f64> {
    bg.radius_at_distance(r1, d)
}

/// Which image term: `−` pairs with `1/√σ`, `+` with the boundary term
/// `ζ/√(σ+2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImageBranch {
    Minus,
    Plus,
}

/// A detector hovering at fixed `(R, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticDetector {
    rapidity: f64,
    radius: f64,
    phi: f64,
    gap: f64,
    gamma: f64,
    temperature: f64,
}

impl StaticDetector {
    /// Detector at BTZ radial coordinate `radius`.
    pub fn at_radius(bg: &BtzBackground, radius: f64, phi: f64, gap: f64) -> Result<Self> {
        let r_h = bg.horizon_radius();
        if !(radius.is_finite() && radius > r_h * (1.0 + HORIZON_GUARD)) {
            return Err(Error::domain(format!(
                "detector radius {radius} is not outside the horizon r_h = {r_h}"
            )));
        }
        let sinh_rho = ((radius - r_h) * (radius + r_h)).sqrt() / r_h;
        Self::build(bg, sinh_rho.asinh(), radius, phi, gap)
    }

    /// Detector at proper distance `distance` from the horizon.
    pub fn at_horizon_distance(
        bg: &BtzBackground,
        distance: f64,
        phi: f64,
        gap: f64,
    ) -> Result<Self> {
        if !(distance.is_finite() && distance > 0.0) {
            return Err(Error::domain(format!(
                "distance from the horizon must be positive, got {distance}"
            )));
        }
        let rapidity = distance / bg.ell();
        let radius = bg.horizon_radius() * rapidity.cosh();
        if radius <= bg.horizon_radius() * (1.0 + HORIZON_GUARD) {
            return Err(Error::domain(format!(
                "distance {distance} places the detector on the horizon"
            )));
        }
        Self::build(bg, rapidity, radius, phi, gap)
    }

    fn build(bg: &BtzBackground, rapidity: f64, radius: f64, phi: f64, gap: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::invalid("detector angle must be finite"));
        }
        if !gap.is_finite() {
            return Err(Error::invalid("energy gap must be finite"));
        }
        let gamma = bg.horizon_ratio() * rapidity.sinh();
        let temperature = bg.horizon_radius() / (2.0 * PI * bg.ell() * bg.ell() * gamma);
        Ok(Self {
            rapidity,
            radius,
            phi: phi.rem_euclid(TAU),
            gap,
            gamma,
            temperature,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// Redshift factor `γ = sqrt(R² − r_h²) / ℓ`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Local Hartle–Hawking temperature `r_h / (2π ℓ² γ)`.
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// `d(r_h, R) / ℓ`.
    pub fn rapidity(&self) -> f64 {
        self.rapidity
    }

    pub fn horizon_distance(&self, bg: &BtzBackground) -> f64 {
        self.rapidity * bg.ell()
    }

    /// Gaussian damping `a_j = ℓ⁴ γ² / (4 r_h²)` of the single-detector integrals.
    pub fn damping(&self, bg: &BtzBackground) -> f64 {
        let ratio = bg.ell() * bg.ell() * self.gamma / bg.horizon_radius();
        0.25 * ratio * ratio
    }

    /// Oscillation frequency `β_j = ℓ² γ Ω / r_h`.
    pub fn frequency(&self, bg: &BtzBackground) -> f64 {
        bg.ell() * bg.ell() * self.gamma * self.gap / bg.horizon_radius()
    }
}

/// Hyperbolic image angle between detectors with rapidities `rho_j`, `rho_k`
/// at angular phase `phase = (r_h/ℓ)(Δφ + 2πn)`.
///
/// The arccosh argument is formed as `1 + δ` with `δ` a sum of non-negative
/// terms, so the coincident limit returns exactly zero.
fn image_angle(rho_j: f64, rho_k: f64, phase: f64, branch: ImageBranch) -> Result<f64> {
    let half = 0.5 * phase.abs();
    let diff = 0.5 * (rho_j - rho_k);
    let denom_ln = ln_sinh(rho_j) + ln_sinh(rho_k);
    let radial = match branch {
        ImageBranch::Minus => 2.0 * diff.sinh().powi(2),
        ImageBranch::Plus => 2.0 * diff.cosh().powi(2),
    };
    let alpha = if half > 300.0 {
        // ln δ without forming sinh²(phase/2)
        let angular_ln = std::f64::consts::LN_2 + ln_cosh(rho_j) + ln_cosh(rho_k) + 2.0 * ln_sinh(half);
        let ln_num = if radial > 0.0 {
            angular_ln + (radial.ln() - angular_ln).exp().ln_1p()
        } else {
            angular_ln
        };
        let ln_delta = ln_num - denom_ln;
        acosh_from_ln(ln_delta + (-ln_delta).exp().ln_1p())
    } else {
        let angular = 2.0 * rho_j.cosh() * rho_k.cosh() * half.sinh().powi(2);
        let delta = (angular + radial) / (rho_j.sinh() * rho_k.sinh());
        if delta.is_infinite() {
            let ln_delta = (angular + radial).ln() - denom_ln;
            acosh_from_ln(ln_delta + (-ln_delta).exp().ln_1p())
        } else {
            acosh_1p(delta)
        }
    };
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::domain(format!(
            "image angle is not a valid arccosh (rho_j = {rho_j}, rho_k = {rho_k}, phase = {phase})"
        )));
    }
    Ok(alpha)
}

/// Image angle `α^±_{j,n}` of a single detector.
pub fn alpha_single(
    det: &StaticDetector,
    bg: &BtzBackground,
    n: i64,
    branch: ImageBranch,
) -> Result<f64> {
    let phase = bg.horizon_ratio() * TAU * n as f64;
    image_angle(det.rapidity, det.rapidity, phase, branch)
}

/// Coefficients of the pair integrals for detectors `j`, `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry {
    pub rho_j: f64,
    pub rho_k: f64,
    pub gamma_j: f64,
    pub gamma_k: f64,
    /// `Δφ = φ_j − φ_k`
    pub delta_phi: f64,
    pub gap: f64,
    pub a_jk: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub k_plus: f64,
    pub k_minus: f64,
    pub a_j: f64,
    pub beta_j: f64,
    pub a_k: f64,
    pub beta_k: f64,
}

impl PairGeometry {
    pub fn new(bg: &BtzBackground, j: &StaticDetector, k: &StaticDetector) -> Result<Self> {
        if j.gap != k.gap {
            return Err(Error::invalid(format!(
                "pair correlators need equal gaps, got {} and {}",
                j.gap, k.gap
            )));
        }
        let (gj, gk) = (j.gamma, k.gamma);
        let sum_sq = gj * gj + gk * gk;
        let ell2_over_rh = bg.ell() * bg.ell() / bg.horizon_radius();
        let omega = j.gap;
        let prefactor = (gj * gk).sqrt() / (2.0 * PI.sqrt() * sum_sq.sqrt());
        let k_of = |s: f64| prefactor * (-omega * omega * s * s / (2.0 * sum_sq)).exp();
        Ok(Self {
            rho_j: j.rapidity,
            rho_k: k.rapidity,
            gamma_j: gj,
            gamma_k: gk,
            delta_phi: j.phi - k.phi,
            gap: omega,
            a_jk: gj * gj * gk * gk / (2.0 * sum_sq) * ell2_over_rh * ell2_over_rh,
            beta_plus: gj * gk * (gj + gk) / sum_sq * ell2_over_rh * omega,
            beta_minus: gj * gk * (gj - gk) / sum_sq * ell2_over_rh * omega,
            k_plus: k_of(gj + gk),
            k_minus: k_of(gj - gk),
            a_j: j.damping(bg),
            beta_j: j.frequency(bg),
            a_k: k.damping(bg),
            beta_k: k.frequency(bg),
        })
    }
}

/// Image angle `α^±_{jk,n}` of a detector pair.
pub fn alpha_pair(pg: &PairGeometry, bg: &BtzBackground, n: i64, branch: ImageBranch) -> Result<f64> {
    let phase = bg.horizon_ratio() * (pg.delta_phi + TAU * n as f64);
    image_angle(pg.rho_j, pg.rho_k, phase, branch)
}
