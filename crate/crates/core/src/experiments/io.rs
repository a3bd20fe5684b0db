//! CSV and JSON files written and read by the experiments and the CLI.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::error_study::{ExperimentReport, ReplicationRecord};
use super::v_study::VStudyReport;
use crate::error::Result;
use crate::rectify::Rectified;
use crate::ReflectionSummary;

pub fn write_records(path: impl AsRef<Path>, records: &[ReplicationRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: impl AsRef<Path>, value: &impl Serialize) -> Result<()> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}

/// One row of `outcomes.csv`: the terminal state of one reflected skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRow {
    pub replication: u64,
    pub n: usize,
    pub x0: f64,
    pub y_n: f64,
    pub l_n: f64,
    pub u_n: f64,
    pub increment_sum: f64,
    pub rho_l: usize,
    pub rho_u: usize,
    pub switches: usize,
    pub s_event: bool,
}

impl OutcomeRow {
    pub fn new(replication: u64, s: &ReflectionSummary) -> Self {
        Self {
            replication,
            n: s.n,
            x0: s.x0,
            y_n: s.y_n,
            l_n: s.l_n,
            u_n: s.u_n,
            increment_sum: s.increment_sum,
            rho_l: s.rho_l,
            rho_u: s.rho_u,
            switches: s.switches,
            s_event: s.s_event,
        }
    }

    pub fn summary(&self) -> ReflectionSummary {
        ReflectionSummary {
            x0: self.x0,
            n: self.n,
            y_n: self.y_n,
            l_n: self.l_n,
            u_n: self.u_n,
            increment_sum: self.increment_sum,
            rho_l: self.rho_l,
            rho_u: self.rho_u,
            switches: self.switches,
            s_event: self.s_event,
        }
    }
}

/// Coarse outcomes of an error study, for later rectification.
pub fn coarse_outcomes(report: &ExperimentReport) -> Vec<OutcomeRow> {
    report
        .records
        .iter()
        .map(|r| {
            OutcomeRow {
                replication: r.replication,
                n: report.config.n,
                x0: report.config.x0,
                y_n: r.y_coarse,
                l_n: r.l_coarse,
                u_n: r.u_coarse,
                increment_sum: r.x_coarse,
                rho_l: r.coarse_rho_l,
                rho_u: r.coarse_rho_u,
                switches: r.coarse_switches,
                s_event: r.coarse_s_event,
            }
        })
        .collect()
}

pub fn write_outcomes(path: impl AsRef<Path>, rows: &[OutcomeRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_outcomes(path: impl AsRef<Path>) -> Result<Vec<OutcomeRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectifiedRow {
    pub replication: u64,
    pub y_n: f64,
    pub rectified: f64,
    pub adjustment: f64,
    pub boundary_skipped: bool,
}

pub fn write_rectified(path: impl AsRef<Path>, rows: &[OutcomeRow], rectified: &Rectified<f64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for (i, row) in rows.iter().enumerate() {
        w.serialize(RectifiedRow {
            replication: row.replication,
            y_n: row.y_n,
            rectified: rectified.values[i],
            adjustment: rectified.adjustments[i],
            boundary_skipped: rectified.boundary_skipped[i],
        })?;
    }
    w.flush()?;
    Ok(())
}

/// One value per line, no header.
pub fn write_samples(path: impl AsRef<Path>, samples: &[f64]) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    for v in samples {
        writeln!(w, "{v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    fs::read_to_string(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<f64>()
                .map_err(|e| crate::Error::Parameter(format!("bad sample {l:?}: {e}")))
        })
        .collect()
}

/// `v,density` rows.
pub fn write_density(path: impl AsRef<Path>, grid: &crate::DensityGrid) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["v", "density"])?;
    for (x, y) in grid.points.iter().zip(&grid.values) {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `records.csv`, `outcomes.csv` and `report.json` into `dir`.
pub fn write_experiment(dir: impl AsRef<Path>, report: &ExperimentReport) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    write_records(dir.join("records.csv"), &report.records)?;
    write_outcomes(dir.join("outcomes.csv"), &coarse_outcomes(report))?;
    write_json(dir.join("report.json"), report)
}

/// Writes `report.json` and, per cell, `cell_<i>_density.csv` and
/// `cell_<i>_samples.txt` into `dir`.
pub fn write_v_study(dir: impl AsRef<Path>, report: &VStudyReport) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    for (i, cell) in report.cells.iter().enumerate() {
        write_density(dir.join(format!("cell_{i}_density.csv")), &cell.density)?;
        write_samples(dir.join(format!("cell_{i}_samples.txt")), &cell.samples)?;
    }
    write_json(dir.join("report.json"), report)
}
