//! Driver for the `btz-tripartite` command: configuration files, detector
//! layouts, the result cache, sweeps, figure presets, the oracle calibration
//! report and the acceptance checks.

pub mod acceptance;
pub mod cache;
pub mod config;
pub mod error;
pub mod oracle_report;
pub mod presets;
pub mod record;
pub mod sweep;

pub use cache::{Cache, CacheKey, CACHE_ENV};
pub use config::{build_line, build_triangle, GeometryConfig, Parameter, RunConfig};
pub use error::{CliError, CliResult};
pub use record::{Columns, Record, Status};
pub use sweep::{run_point, run_points, run_sweep, Scale, SweepSpec};
pub use presets::{Preset, Resolution};
