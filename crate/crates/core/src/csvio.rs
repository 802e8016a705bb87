//! CSV emission for fields, metric pairs and trajectories.
//!
//! All floats are written with 17 significant digits so files are
//! byte-stable across runs and parse back bit-exactly. Every experiment
//! file starts with '#' provenance comment lines (config hash, seed, grid,
//! dt) so a result can be traced to its inputs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::adiabaticity::{AdiabaticityReport, TrajectoryRecord};
use crate::error::Result;
use crate::grid::Grid;
use crate::metrics::MetricPair;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Short hex digest of the raw config text, for provenance headers.
pub fn config_hash(config_text: &str) -> String {
    let digest = Sha256::digest(config_text.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Provenance lines shared by all files of one experiment.
#[derive(Debug, Clone, Default)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub grid: Option<Grid>,
    pub dt: Option<f64>,
}

impl Provenance {
    fn header(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# config_hash = {}", self.config_hash);
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "# seed = {seed}");
        }
        if let Some(grid) = self.grid {
            let _ = writeln!(
                s,
                "# grid = [{}, {}] n_points = {}",
                fmt_f64(grid.x_min()),
                fmt_f64(grid.x_max()),
                grid.n_points()
            );
        }
        if let Some(dt) = self.dt {
            let _ = writeln!(s, "# dt = {}", fmt_f64(dt));
        }
        s
    }
}

/// Two-column "x,value" CSV of a real field.
pub fn real_field_csv(grid: Grid, values: &[f64]) -> String {
    let mut s = String::from("x,value\n");
    for (x, v) in grid.points().zip(values) {
        let _ = writeln!(s, "{},{}", fmt_f64(x), fmt_f64(*v));
    }
    s
}

/// Three-column "x,re,im" CSV of a complex field.
pub fn complex_field_csv(grid: Grid, values: &[Complex64]) -> String {
    let mut s = String::from("x,re,im\n");
    for (x, v) in grid.points().zip(values) {
        let _ = writeln!(s, "{},{},{}", fmt_f64(x), fmt_f64(v.re), fmt_f64(v.im));
    }
    s
}

/// Pairwise metric CSV with a trailing summary line carrying the fit.
pub fn pairs_csv(
    provenance: &Provenance,
    rows: &[(String, MetricPair, Option<(f64, f64)>)],
    slope: f64,
    r_squared: f64,
) -> String {
    let mut s = provenance.header();
    let with_ratios = rows.iter().any(|(_, _, extra)| extra.is_some());
    if with_ratios {
        s.push_str("pair_id,d_psi,d_n,ratio_gridded,ratio_analytic\n");
    } else {
        s.push_str("pair_id,d_psi,d_n\n");
    }
    for (id, pair, extra) in rows {
        match extra {
            Some((gridded, analytic)) => {
                let _ = writeln!(
                    s,
                    "{id},{},{},{},{}",
                    fmt_f64(pair.d_psi),
                    fmt_f64(pair.d_n),
                    fmt_f64(*gridded),
                    fmt_f64(*analytic)
                );
            }
            None => {
                let _ = writeln!(s, "{id},{},{}", fmt_f64(pair.d_psi), fmt_f64(pair.d_n));
            }
        }
    }
    let _ = writeln!(
        s,
        "# slope = {}, r_squared = {}",
        fmt_f64(slope),
        fmt_f64(r_squared)
    );
    s
}

pub const TRAJECTORY_COLUMNS: &str =
    "t,d_psi_0t,d_n_0t,d_psi_gst,d_n_gst,d_psi_0gs,d_n_0gs,epsilon,e0,e1,norm";

pub fn trajectory_csv(provenance: &Provenance, records: &[TrajectoryRecord]) -> String {
    let mut s = provenance.header();
    s.push_str(TRAJECTORY_COLUMNS);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.d_psi_0t),
            fmt_f64(r.d_n_0t),
            fmt_f64(r.d_psi_gst),
            fmt_f64(r.d_n_gst),
            fmt_f64(r.d_psi_0gs),
            fmt_f64(r.d_n_0gs),
            fmt_f64(r.epsilon),
            fmt_f64(r.e0),
            fmt_f64(r.e1),
            fmt_f64(r.norm)
        );
    }
    s
}

/// Human-readable key-value report block.
pub fn report_text(report: &AdiabaticityReport) -> String {
    let opt = |v: Option<f64>| v.map_or("absent".to_string(), fmt_f64);
    format!(
        "max_degree_percent = {}\n\
         mean_degree_percent = {}\n\
         arch_period_psi = {}\n\
         arch_period_n = {}\n\
         above_line_fraction = {}\n\
         slope_used = {}\n",
        fmt_f64(report.max_degree_percent),
        fmt_f64(report.mean_degree_percent),
        opt(report.arch_period_psi),
        opt(report.arch_period_n),
        fmt_f64(report.above_line_fraction),
        fmt_f64(report.slope_used),
    )
}

pub const REPORT_COLUMNS: &str =
    "max_degree_percent,mean_degree_percent,arch_period_psi,arch_period_n,above_line_fraction,slope_used";

/// Machine-readable one-row summary (empty cell for an absent period).
pub fn report_csv_row(report: &AdiabaticityReport) -> String {
    let opt = |v: Option<f64>| v.map_or(String::new(), fmt_f64);
    format!(
        "{},{},{},{},{},{}",
        fmt_f64(report.max_degree_percent),
        fmt_f64(report.mean_degree_percent),
        opt(report.arch_period_psi),
        opt(report.arch_period_n),
        fmt_f64(report.above_line_fraction),
        fmt_f64(report.slope_used),
    )
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}
