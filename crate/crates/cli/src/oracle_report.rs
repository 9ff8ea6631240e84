//! Fast path against the brute-force oracle, written out as a report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use btz_tripartite::correlators::oracle::{
    compare_with_fast_path, OracleComparison, OracleSettings, AGREEMENT_ABS, AGREEMENT_REL,
};
use btz_tripartite::quadrature::BRANCH_SIGN;
use btz_tripartite::{BtzBackground, CorrelatorSet, DetectorConfiguration, Numerics, StaticDetector, NUMERICS_VERSION};
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Pair at 1 and 2 from the horizon of an `M = 1`, `ℓ = 10` hole, same angle,
/// `Ωσ = 1`.
pub fn calibration_configuration() -> DetectorConfiguration {
    let bg = BtzBackground::dirichlet(10.0, 1.0).expect("valid background");
    let a = StaticDetector::at_horizon_distance(&bg, 1.0, 0.0, 1.0).expect("valid detector");
    let b = StaticDetector::at_horizon_distance(&bg, 2.0, 0.0, 1.0).expect("valid detector");
    DetectorConfiguration::new(bg, vec![a, b]).expect("valid configuration")
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub branch_sign: f64,
    pub numerics_version: u32,
    pub mass: f64,
    pub ell: f64,
    pub omega: f64,
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    pub settings: OracleSettings,
    pub agreement_rel: f64,
    pub agreement_abs: f64,
    pub rows: Vec<OracleComparison>,
}

impl CalibrationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(OracleComparison::within_tolerance)
    }

    pub fn failures(&self) -> Vec<String> {
        self.rows
            .iter()
            .filter(|r| !r.within_tolerance())
            .map(|r| format!("{} (relative difference {:.3e})", r.target, r.rel_diff))
            .collect()
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Oracle calibration\n");
        let _ = writeln!(
            s,
            "Background M = {}, l = {}, zeta = 1; gap {}; radii {:?}; angles {:?}.\n",
            self.mass, self.ell, self.omega, self.radii, self.angles
        );
        let _ = writeln!(s, "Branch sign of the x > alpha continuation: {}", self.branch_sign);
        let _ = writeln!(s, "Numerics version: {}", self.numerics_version);
        let _ = writeln!(
            s,
            "Regulators: {:?}, outer tolerance {:e}, {} inner nodes.\n",
            self.settings.epsilons, self.settings.tol_rel, self.settings.inner_nodes
        );
        let _ = writeln!(
            s,
            "Required agreement: max({:e} relative, {:e} absolute).\n",
            self.agreement_rel, self.agreement_abs
        );
        let _ = writeln!(s, "| element | fast path | oracle | oracle error | relative difference | pass |");
        let _ = writeln!(s, "|---|---|---|---|---|---|");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "| {} | {:.10e} {:+.10e}i | {:.10e} {:+.10e}i | {:.2e} | {:.2e} | {} |",
                r.target,
                r.fast.re,
                r.fast.im,
                r.oracle.value.re,
                r.oracle.value.im,
                r.oracle.error,
                r.rel_diff,
                if r.within_tolerance() { "yes" } else { "no" }
            );
        }
        let _ = writeln!(s, "\nRaw values per regulator:\n");
        for r in &self.rows {
            let raw: Vec<String> = r
                .oracle
                .raw
                .iter()
                .map(|v| format!("{:.10e} {:+.10e}i", v.re, v.im))
                .collect();
            let _ = writeln!(s, "- {}: {}", r.target, raw.join(", "));
        }
        s
    }
}

pub fn calibrate(
    cfg: &DetectorConfiguration,
    numerics: &Numerics,
    settings: &OracleSettings,
) -> CliResult<CalibrationReport> {
    settings.validate()?;
    let fast = CorrelatorSet::compute(cfg, numerics)?;
    let rows = compare_with_fast_path(cfg, &fast, settings)?;
    Ok(CalibrationReport {
        branch_sign: BRANCH_SIGN,
        numerics_version: NUMERICS_VERSION,
        mass: cfg.background().mass(),
        ell: cfg.background().ell(),
        omega: cfg.gap(),
        radii: cfg.detectors().iter().map(|d| d.radius()).collect(),
        angles: cfg.detectors().iter().map(|d| d.phi()).collect(),
        settings: settings.clone(),
        agreement_rel: AGREEMENT_REL,
        agreement_abs: AGREEMENT_ABS,
        rows,
    })
}

/// Write `oracle_calibration.md` and `.json` into `dir`.
pub fn write_report(report: &CalibrationReport, dir: &Path) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let md = dir.join("oracle_calibration.md");
    std::fs::write(&md, report.to_markdown()).map_err(|e| CliError::io(&md, e))?;
    let json = dir.join("oracle_calibration.json");
    let text = serde_json::to_string_pretty(report).expect("plain data always serializes");
    std::fs::write(&json, text + "\n").map_err(|e| CliError::io(&json, e))?;
    Ok(vec![md, json])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_passes_and_is_idempotent() {
        let cfg = calibration_configuration();
        let report = calibrate(&cfg, &Numerics::default(), &OracleSettings::default()).unwrap();
        assert!(report.passed(), "{:?}", report.failures());
        assert_eq!(report.rows.len(), 4);
        let dir = tempfile::tempdir().unwrap();
        let first = write_report(&report, dir.path()).unwrap();
        let bytes: Vec<Vec<u8>> = first.iter().map(|p| std::fs::read(p).unwrap()).collect();
        let again = calibrate(&cfg, &Numerics::default(), &OracleSettings::default()).unwrap();
        write_report(&again, dir.path()).unwrap();
        for (p, b) in first.iter().zip(&bytes) {
            assert_eq!(&std::fs::read(p).unwrap(), b);
        }
        assert!(report.to_markdown().contains("Branch sign of the x > alpha continuation: -1"));
    }
}
