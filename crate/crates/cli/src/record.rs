//! One evaluated point and its CSV layout.
//!
//! Column order is fixed. Floats are written with Rust's shortest round-trip
//! exponent form, which never depends on the locale. Failed points keep their
//! parameters and leave the numeric columns empty.

use std::io::Write;

use btz_tripartite::entanglement::ORDERED_PAIRS;
use btz_tripartite::{CorrelatorSet, DetectorLabel, EntanglementReport, PairLabel};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ConvergeFail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::ConvergeFail => "converge_fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub index: usize,
    pub status: Status,
    pub geometry: &'static str,
    pub ell: f64,
    pub mass: f64,
    pub zeta: i32,
    pub omega: f64,
    pub d_horizon: f64,
    pub spacing: Option<f64>,
    pub correlators: Option<CorrelatorSet>,
    pub report: Option<EntanglementReport>,
    pub error: Option<String>,
}

impl Record {
    pub fn new(index: usize, cfg: &RunConfig) -> Self {
        Self {
            index,
            status: Status::Ok,
            geometry: cfg.geometry.kind(),
            ell: cfg.background.ell,
            mass: cfg.background.mass,
            zeta: cfg.background.zeta,
            omega: cfg.omega,
            d_horizon: cfg.geometry.d_horizon(),
            spacing: cfg.geometry.spacing(),
            correlators: None,
            report: None,
            error: None,
        }
    }

    pub fn failed(mut self, message: String) -> Self {
        self.status = Status::ConvergeFail;
        self.error = Some(message);
        self
    }

    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    /// `π/λ̃⁴`, NaN for failed points.
    pub fn pi(&self) -> f64 {
        self.report.as_ref().map_or(f64::NAN, |r| r.pi)
    }
}

/// Column groups to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Columns {
    Correlators,
    Negativity,
    All,
}

impl Columns {
    fn correlators(self) -> bool {
        matches!(self, Columns::Correlators | Columns::All)
    }

    fn negativities(self) -> bool {
        matches!(self, Columns::Negativity | Columns::All)
    }
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn header(columns: Columns) -> Vec<String> {
    let mut h: Vec<String> = ["index", "status", "geometry", "ell", "mass", "zeta", "omega", "d_horizon", "spacing"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if columns.correlators() {
        for d in DetectorLabel::ALL {
            h.push(format!("P_{d}"));
        }
        for p in PairLabel::ALL {
            h.push(format!("C_{p}"));
        }
        for p in PairLabel::ALL {
            h.push(format!("X_{p}_re"));
            h.push(format!("X_{p}_im"));
            h.push(format!("X_{p}_abs"));
        }
    }
    if columns.negativities() {
        for (j, k) in ORDERED_PAIRS {
            h.push(format!("N_{j}({k})"));
        }
        for j in DetectorLabel::ALL {
            let rest: String = DetectorLabel::ALL.iter().filter(|&&d| d != j).map(|d| d.to_string()).collect();
            h.push(format!("N_{j}({rest})"));
        }
        for j in DetectorLabel::ALL {
            h.push(format!("pi_{j}"));
        }
        h.push("pi".into());
        h.push("method".into());
    }
    h.push("error".into());
    h
}

fn row(r: &Record, columns: Columns) -> Vec<String> {
    let mut out = vec![
        r.index.to_string(),
        r.status.as_str().to_string(),
        r.geometry.to_string(),
        num(r.ell),
        num(r.mass),
        r.zeta.to_string(),
        num(r.omega),
        num(r.d_horizon),
        opt(r.spacing),
    ];
    if columns.correlators() {
        let cs = r.correlators.as_ref();
        for d in DetectorLabel::ALL {
            out.push(opt(cs.map(|c| c.p(d))));
        }
        for p in PairLabel::ALL {
            out.push(opt(cs.map(|c| c.c(p))));
        }
        for p in PairLabel::ALL {
            let x = cs.map(|c| c.x(p));
            out.push(opt(x.map(|x| x.re)));
            out.push(opt(x.map(|x| x.im)));
            out.push(opt(x.map(|x| x.norm())));
        }
    }
    if columns.negativities() {
        let rep = r.report.as_ref();
        for i in 0..6 {
            out.push(opt(rep.map(|x| x.bipartite[i])));
        }
        for i in 0..3 {
            out.push(opt(rep.map(|x| x.one_vs_rest[i])));
        }
        for i in 0..3 {
            out.push(opt(rep.map(|x| x.pi_components[i])));
        }
        out.push(opt(rep.map(|x| x.pi)));
        out.push(rep.map(|x| x.method.to_string()).unwrap_or_default());
    }
    out.push(r.error.clone().unwrap_or_default());
    out
}

pub fn write_csv<W: Write>(records: &[Record], columns: Columns, writer: W) -> CliResult<()> {
    let to_err = |e: csv::Error| CliError::Io {
        path: "csv output".into(),
        source: std::io::Error::other(e.to_string()),
    };
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header(columns)).map_err(to_err)?;
    for r in records {
        w.write_record(row(r, columns)).map_err(to_err)?;
    }
    w.flush().map_err(|e| CliError::io("csv output", e))?;
    Ok(())
}

pub fn write_json<W: Write>(records: &[Record], mut writer: W) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut writer, records).map_err(|e| CliError::Io {
        path: "json output".into(),
        source: std::io::Error::other(e.to_string()),
    })?;
    writeln!(writer).map_err(|e| CliError::io("json output", e))
}
