//! Parameter sets behind each figure.
//!
//! Every preset fixes `ℓ = 10`, `ζ = 1` and writes one CSV per panel with all
//! columns. Coarse grids target a laptop run of a few minutes.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::cache::Cache;
use crate::config::{GeometryConfig, Parameter, RunConfig};
use crate::error::{CliError, CliResult};
use crate::record::{write_csv, Columns, Record};
use crate::sweep::{grid, run_points, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    #[default]
    Coarse,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
pub enum Preset {
    #[value(name = "fig2-top")]
    Fig2Top,
    #[value(name = "fig2-bottom")]
    Fig2Bottom,
    #[value(name = "fig3")]
    Fig3,
    #[value(name = "fig4-top")]
    Fig4Top,
    #[value(name = "fig4-bottom")]
    Fig4Bottom,
    #[value(name = "fig5")]
    Fig5,
    #[value(name = "fig6")]
    Fig6,
    #[value(name = "fig7")]
    Fig7,
}

/// Energy gaps drawn in the line-configuration figures.
pub const FIG4_GAPS: [f64; 4] = [0.01, 0.1, 0.5, 1.0];
pub const FIG6_GAPS: [f64; 5] = [1.0, 1.5, 1.75, 2.0, 2.5];

/// Range of `d(r_h, R_A)` in the line figures.
pub const LINE_D_RANGE: (f64, f64) = (0.01, 60.0);
/// Range of `d(r_h, R)` and `M` in the triangle figures.
pub const TRIANGLE_D_RANGE: (f64, f64) = (0.2, 10.0);
pub const TRIANGLE_MASS_RANGE: (f64, f64) = (0.005, 0.05);
pub const FIG3_GAP_RANGE: (f64, f64) = (0.1, 3.0);

/// One CSV worth of points.
#[derive(Debug, Clone)]
pub struct Panel {
    pub name: String,
    pub points: Vec<RunConfig>,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2Top => "fig2-top",
            Preset::Fig2Bottom => "fig2-bottom",
            Preset::Fig3 => "fig3",
            Preset::Fig4Top => "fig4-top",
            Preset::Fig4Bottom => "fig4-bottom",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
        }
    }

    pub fn panels(self, resolution: Resolution, base: &RunConfig) -> CliResult<Vec<Panel>> {
        let full = resolution == Resolution::Full;
        let (grid2, line_steps) = if full { (60, 121) } else { (25, 31) };
        let panel = |name: &str, points: Vec<RunConfig>| Panel {
            name: name.to_string(),
            points,
        };
        Ok(match self {
            Preset::Fig2Top | Preset::Fig2Bottom => {
                vec![panel(self.name(), triangle_mass_grid(base, grid2)?)]
            }
            Preset::Fig3 => {
                let cfg = triangle(base, 0.01, 1.0);
                let specs = [
                    SweepSpec::linear(Parameter::Omega, FIG3_GAP_RANGE.0, FIG3_GAP_RANGE.1, grid2)?,
                    SweepSpec::linear(Parameter::DHorizon, TRIANGLE_D_RANGE.0, TRIANGLE_D_RANGE.1, grid2)?,
                ];
                vec![panel("fig3", grid(&cfg, &specs)?)]
            }
            Preset::Fig4Top => vec![panel("fig4-top", line_series(base, 0.01, 1.0, &FIG4_GAPS, line_steps)?)],
            Preset::Fig4Bottom => vec![panel("fig4-bottom", line_series(base, 1.0, 1.0, &FIG4_GAPS, line_steps)?)],
            Preset::Fig5 => vec![
                panel("fig5-top", line_series(base, 0.01, 1.0, &[0.01], line_steps)?),
                panel("fig5-bottom", line_series(base, 0.01, 1.0, &[0.1], line_steps)?),
            ],
            Preset::Fig6 => vec![panel("fig6", line_series(base, 0.01, 5.0, &FIG6_GAPS, line_steps)?)],
            Preset::Fig7 => vec![panel("fig7", line_series(base, 0.01, 5.0, &[2.5], line_steps)?)],
        })
    }
}

fn triangle(base: &RunConfig, mass: f64, omega: f64) -> RunConfig {
    let mut cfg = base.clone();
    cfg.background.ell = 10.0;
    cfg.background.zeta = 1;
    cfg.background.mass = mass;
    cfg.omega = omega;
    cfg.geometry = GeometryConfig::Triangle { d_horizon: 1.0 };
    cfg
}

fn line(base: &RunConfig, mass: f64, spacing: f64, omega: f64) -> RunConfig {
    let mut cfg = triangle(base, mass, omega);
    cfg.geometry = GeometryConfig::Line { d_horizon: 1.0, spacing };
    cfg
}

/// Triangle grid over `M` (log) and `d` (linear), `M` outermost.
pub fn triangle_mass_grid(base: &RunConfig, steps: usize) -> CliResult<Vec<RunConfig>> {
    let specs = [
        SweepSpec::log(Parameter::Mass, TRIANGLE_MASS_RANGE.0, TRIANGLE_MASS_RANGE.1, steps)?,
        SweepSpec::linear(Parameter::DHorizon, TRIANGLE_D_RANGE.0, TRIANGLE_D_RANGE.1, steps)?,
    ];
    grid(&triangle(base, 0.01, 1.0), &specs)
}

/// Line points over a log grid of `d`, one series per gap.
pub fn line_series(base: &RunConfig, mass: f64, spacing: f64, gaps: &[f64], steps: usize) -> CliResult<Vec<RunConfig>> {
    let spec = [SweepSpec::log(Parameter::DHorizon, LINE_D_RANGE.0, LINE_D_RANGE.1, steps)?];
    let mut out = Vec::new();
    for &omega in gaps {
        out.extend(grid(&line(base, mass, spacing, omega), &spec)?);
    }
    Ok(out)
}

/// Run every panel of `preset` and write `<dir>/<panel>.csv`.
pub fn run_preset(
    preset: Preset,
    resolution: Resolution,
    base: &RunConfig,
    dir: &Path,
    workers: usize,
    cache: &Cache,
) -> CliResult<Vec<(PathBuf, Vec<Record>)>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut out = Vec::new();
    for panel in preset.panels(resolution, base)? {
        log::info!("{}: {} points", panel.name, panel.points.len());
        let records = run_points(&panel.points, workers, cache)?;
        let path = dir.join(format!("{}.csv", panel.name));
        let file = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        write_csv(&records, Columns::All, std::io::BufWriter::new(file))?;
        out.push((path, records));
    }
    Ok(out)
}
