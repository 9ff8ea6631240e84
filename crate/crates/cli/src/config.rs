//! Run configuration, read from TOML.
//!
//! ```toml
//! omega = 1.0
//!
//! [background]
//! ell = 10.0
//! mass = 0.01
//! zeta = 1
//!
//! [geometry]
//! kind = "line"        # or "triangle" with only d_horizon
//! d_horizon = 0.5
//! spacing = 1.0
//!
//! [numerics]
//! lambda_eval = 1e-3
//! negativity_mode = "eigen"
//! epsilons = [0.04, 0.02, 0.01]
//!
//! [numerics.correlators.quadrature]
//! tol_rel = 1e-10
//!
//! [output]
//! format = "csv"
//! ```
//!
//! Every key has a default; unknown keys are rejected.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use btz_tripartite::correlators::oracle::OracleSettings;
use btz_tripartite::{
    BoundaryCondition, BtzBackground, DetectorConfiguration, NegativityMode, NegativitySettings, Numerics,
    StaticDetector,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Smallest distance of the nearest line detector from the horizon.
pub const MIN_LINE_DISTANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub background: BackgroundConfig,
    /// Energy gap `Ωσ`.
    pub omega: f64,
    pub geometry: GeometryConfig,
    pub numerics: NumericsConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            background: BackgroundConfig::default(),
            omega: 1.0,
            geometry: GeometryConfig::Triangle { d_horizon: 1.0 },
            numerics: NumericsConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackgroundConfig {
    /// AdS length `ℓ/σ`.
    pub ell: f64,
    pub mass: f64,
    /// Boundary condition: 1 Dirichlet, 0 transparent, −1 Neumann.
    pub zeta: i32,
}

impl Default for BackgroundConfig {
    fn default() -> Self {
        Self {
            ell: 10.0,
            mass: 0.01,
            zeta: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeometryConfig {
    /// Equilateral triangle at common proper distance from the horizon.
    Triangle { d_horizon: f64 },
    /// Radial line at `φ = 0`; `d_horizon` is that of the nearest detector.
    Line { d_horizon: f64, spacing: f64 },
}

impl GeometryConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            GeometryConfig::Triangle { .. } => "triangle",
            GeometryConfig::Line { .. } => "line",
        }
    }

    pub fn d_horizon(&self) -> f64 {
        match *self {
            GeometryConfig::Triangle { d_horizon } | GeometryConfig::Line { d_horizon, .. } => d_horizon,
        }
    }

    pub fn spacing(&self) -> Option<f64> {
        match *self {
            GeometryConfig::Triangle { .. } => None,
            GeometryConfig::Line { spacing, .. } => Some(spacing),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsConfig {
    pub correlators: Numerics,
    pub lambda_eval: f64,
    pub negativity_mode: NegativityMode,
    /// Regulators of the oracle, geometric and decreasing.
    pub epsilons: Vec<f64>,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let neg = NegativitySettings::default();
        Self {
            correlators: Numerics::default(),
            lambda_eval: neg.lambda_eval,
            negativity_mode: neg.mode,
            epsilons: OracleSettings::default().epsilons,
        }
    }
}

impl NumericsConfig {
    pub fn negativity(&self) -> NegativitySettings {
        NegativitySettings {
            mode: self.negativity_mode,
            lambda_eval: self.lambda_eval,
        }
    }

    pub fn oracle(&self) -> OracleSettings {
        OracleSettings {
            epsilons: self.epsilons.clone(),
            ..OracleSettings::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// File or directory to write; standard output when absent.
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Mass,
    DHorizon,
    Omega,
    Ell,
    Spacing,
}

impl Parameter {
    pub const ALL: [Parameter; 5] = [
        Parameter::Mass,
        Parameter::DHorizon,
        Parameter::Omega,
        Parameter::Ell,
        Parameter::Spacing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Parameter::Mass => "mass",
            Parameter::DHorizon => "d_horizon",
            Parameter::Omega => "omega",
            Parameter::Ell => "ell",
            Parameter::Spacing => "spacing",
        }
    }
}

impl std::str::FromStr for Parameter {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Parameter::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Parameter::ALL.iter().map(|p| p.name()).collect();
                CliError::Config(format!("unknown sweep parameter '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let b = &self.background;
        if !(b.ell.is_finite() && b.ell > 0.0) {
            return bad(format!("background.ell must be positive, got {}", b.ell));
        }
        if !(b.mass.is_finite() && b.mass > 0.0) {
            return bad(format!("background.mass must be positive, got {}", b.mass));
        }
        BoundaryCondition::from_zeta(b.zeta)?;
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return bad(format!("omega must be positive, got {}", self.omega));
        }
        match self.geometry {
            GeometryConfig::Triangle { d_horizon } => {
                if !(d_horizon.is_finite() && d_horizon > 0.0) {
                    return bad(format!("geometry.d_horizon must be positive, got {d_horizon}"));
                }
            }
            GeometryConfig::Line { d_horizon, spacing } => {
                if !(d_horizon.is_finite() && d_horizon >= MIN_LINE_DISTANCE) {
                    return bad(format!(
                        "geometry.d_horizon must be at least {MIN_LINE_DISTANCE} for a line, got {d_horizon}"
                    ));
                }
                if !(spacing.is_finite() && spacing > 0.0) {
                    return bad(format!("geometry.spacing must be positive, got {spacing}"));
                }
            }
        }
        self.numerics.correlators.validate()?;
        self.numerics.negativity().validate()?;
        self.numerics.oracle().validate()?;
        Ok(())
    }

    pub fn get(&self, p: Parameter) -> Option<f64> {
        match p {
            Parameter::Mass => Some(self.background.mass),
            Parameter::Ell => Some(self.background.ell),
            Parameter::Omega => Some(self.omega),
            Parameter::DHorizon => Some(self.geometry.d_horizon()),
            Parameter::Spacing => self.geometry.spacing(),
        }
    }

    /// Copy with one parameter replaced.
    pub fn with(&self, p: Parameter, value: f64) -> CliResult<Self> {
        let mut out = self.clone();
        match p {
            Parameter::Mass => out.background.mass = value,
            Parameter::Ell => out.background.ell = value,
            Parameter::Omega => out.omega = value,
            Parameter::DHorizon => match &mut out.geometry {
                GeometryConfig::Triangle { d_horizon } | GeometryConfig::Line { d_horizon, .. } => *d_horizon = value,
            },
            Parameter::Spacing => match &mut out.geometry {
                GeometryConfig::Line { spacing, .. } => *spacing = value,
                GeometryConfig::Triangle { .. } => {
                    return Err(CliError::Config("spacing applies to the line geometry only".into()))
                }
            },
        }
        Ok(out)
    }

    pub fn background(&self) -> CliResult<BtzBackground> {
        let b = &self.background;
        Ok(BtzBackground::new(b.ell, b.mass, BoundaryCondition::from_zeta(b.zeta)?)?)
    }

    pub fn build(&self) -> CliResult<DetectorConfiguration> {
        let bg = self.background()?;
        Ok(match self.geometry {
            GeometryConfig::Triangle { d_horizon } => build_triangle(&bg, d_horizon, self.omega)?,
            GeometryConfig::Line { d_horizon, spacing } => build_line(&bg, d_horizon, spacing, self.omega)?,
        })
    }
}

/// Three detectors at the corners of an equilateral triangle.
pub fn build_triangle(bg: &BtzBackground, d_horizon: f64, omega: f64) -> btz_tripartite::Result<DetectorConfiguration> {
    let detectors = (0..3)
        .map(|i| StaticDetector::at_horizon_distance(bg, d_horizon, TAU * i as f64 / 3.0, omega))
        .collect::<btz_tripartite::Result<Vec<_>>>()?;
    DetectorConfiguration::new(*bg, detectors)
}

/// Three detectors on the radial line `φ = 0`, `spacing` apart in proper
/// distance, the nearest at `d_horizon_a` from the horizon.
pub fn build_line(
    bg: &BtzBackground,
    d_horizon_a: f64,
    spacing: f64,
    omega: f64,
) -> btz_tripartite::Result<DetectorConfiguration> {
    if !(d_horizon_a >= MIN_LINE_DISTANCE) {
        return Err(btz_tripartite::Error::Domain(format!(
            "nearest line detector must be at least {MIN_LINE_DISTANCE} from the horizon, got {d_horizon_a}"
        )));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(btz_tripartite::Error::Domain(format!("spacing must be positive, got {spacing}")));
    }
    let detectors = (0..3)
        .map(|i| StaticDetector::at_horizon_distance(bg, d_horizon_a + spacing * i as f64, 0.0, omega))
        .collect::<btz_tripartite::Result<Vec<_>>>()?;
    DetectorConfiguration::new(*bg, detectors)
}
