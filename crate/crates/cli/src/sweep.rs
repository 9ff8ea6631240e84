//! Single points and parameter grids.

use btz_tripartite::entanglement::pi_tangle_with;
use btz_tripartite::{CorrelatorSet, EntanglementReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::Cache;
use crate::config::{Parameter, RunConfig};
use crate::error::{CliError, CliResult};
use crate::record::Record;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

/// `name:min:max:steps[:log]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub parameter: Parameter,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl SweepSpec {
    pub fn new(parameter: Parameter, min: f64, max: f64, steps: usize, scale: Scale) -> CliResult<Self> {
        let spec = Self {
            parameter,
            min,
            max,
            steps,
            scale,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn linear(parameter: Parameter, min: f64, max: f64, steps: usize) -> CliResult<Self> {
        Self::new(parameter, min, max, steps, Scale::Linear)
    }

    pub fn log(parameter: Parameter, min: f64, max: f64, steps: usize) -> CliResult<Self> {
        Self::new(parameter, min, max, steps, Scale::Log)
    }

    fn validate(&self) -> CliResult<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(CliError::Config(format!(
                "sweep over {} needs min < max, got {} and {}",
                self.parameter.name(),
                self.min,
                self.max
            )));
        }
        if self.steps < 2 {
            return Err(CliError::Config(format!("sweep over {} needs at least two steps", self.parameter.name())));
        }
        if self.scale == Scale::Log && self.min <= 0.0 {
            return Err(CliError::Config(format!(
                "log sweep over {} needs a positive minimum",
                self.parameter.name()
            )));
        }
        Ok(())
    }

    /// Grid values, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == self.steps - 1 {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + (self.max - self.min) * t,
                    Scale::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect()
    }
}

impl std::str::FromStr for SweepSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::Config(format!("sweep '{s}' is not name:min:max:steps[:log]"));
        if !(4..=5).contains(&parts.len()) {
            return Err(bad());
        }
        let parameter: Parameter = parts[0].parse()?;
        let min: f64 = parts[1].parse().map_err(|_| bad())?;
        let max: f64 = parts[2].parse().map_err(|_| bad())?;
        let steps: usize = parts[3].parse().map_err(|_| bad())?;
        let scale = match parts.get(4) {
            None | Some(&"linear") => Scale::Linear,
            Some(&"log") => Scale::Log,
            Some(_) => return Err(bad()),
        };
        Self::new(parameter, min, max, steps, scale)
    }
}

/// Correlators (through the cache) and the entanglement report of one point.
pub fn run_point(cfg: &RunConfig, cache: &Cache) -> CliResult<(CorrelatorSet, EntanglementReport)> {
    cfg.validate()?;
    let detectors = cfg.build()?;
    let set = cache.get_or_compute(&detectors, &cfg.numerics.correlators)?;
    let report = pi_tangle_with(&set, &cfg.numerics.negativity())?;
    Ok((set, report))
}

/// Record of one point; numerical failures become `converge_fail` rows.
pub fn evaluate(index: usize, cfg: &RunConfig, cache: &Cache) -> Record {
    let record = Record::new(index, cfg);
    match run_point(cfg, cache) {
        Ok((set, report)) => Record {
            correlators: Some(set),
            report: Some(report),
            ..record
        },
        Err(e) => {
            log::warn!(
                "point {index} ({} d={} M={} omega={}) failed: {e}",
                record.geometry,
                record.d_horizon,
                record.mass,
                record.omega
            );
            record.failed(e.to_string())
        }
    }
}

/// Configurations on the Cartesian grid of `specs`, first spec outermost.
pub fn grid(base: &RunConfig, specs: &[SweepSpec]) -> CliResult<Vec<RunConfig>> {
    let mut points = vec![base.clone()];
    for spec in specs {
        let values = spec.values();
        let mut next = Vec::with_capacity(points.len() * values.len());
        for p in &points {
            for &v in &values {
                next.push(p.with(spec.parameter, v)?);
            }
        }
        points = next;
    }
    for p in &points {
        p.validate()?;
        p.build()?;
    }
    Ok(points)
}

/// Evaluate `points` on `workers` threads (0 picks the core count). Output
/// order follows input order whatever the scheduling.
pub fn run_points(points: &[RunConfig], workers: usize, cache: &Cache) -> CliResult<Vec<Record>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let total = points.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    Ok(pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, cfg)| {
                let r = evaluate(i, cfg, cache);
                let n = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                log::debug!("point {i} done ({n}/{total})");
                r
            })
            .collect()
    }))
}

pub fn run_sweep(base: &RunConfig, specs: &[SweepSpec], workers: usize, cache: &Cache) -> CliResult<Vec<Record>> {
    run_points(&grid(base, specs)?, workers, cache)
}
