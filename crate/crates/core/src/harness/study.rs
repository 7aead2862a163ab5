use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use serde::Serialize;

use super::config::RunConfig;
use super::run::run;
use crate::analysis::NormReport;
use crate::spaces::Degrees;
use crate::{Error, Result};

/// Simultaneous space-time refinement sweep.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub problem: String,
    pub degrees: Vec<usize>,
    /// `(cells per slab, slab count)`, coarse to fine. Cell counts must be squares.
    pub levels: Vec<(usize, usize)>,
    pub nus: Vec<f64>,
    pub alpha: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub slabs: usize,
    pub error: f64,
    pub rate: Option<f64>,
    pub components: NormReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub p: usize,
    pub nu: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }

    pub fn stem(&self) -> String {
        format!("p{}_nu{:e}", self.p, self.nu)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["cells", "slabs", "error", "rate"])?;
        for r in &self.rows {
            w.write_record([
                r.cells.to_string(),
                r.slabs.to_string(),
                format!("{:.6e}", r.error),
                r.rate.map_or(String::new(), |v| format!("{v:.4}")),
            ])?;
        }
        finish(w)
    }

    pub fn components_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["cells".to_string(), "slabs".to_string()];
        header.extend(NormReport::NAMES.iter().map(|s| s.to_string()));
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.cells.to_string(), r.slabs.to_string()];
            rec.extend(r.components.components().iter().map(|v| format!("{v:.6e}")));
            w.write_record(&rec)?;
        }
        finish(w)
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn side(cells: usize) -> Result<usize> {
    let n = (cells as f64).sqrt().round() as usize;
    if n * n != cells || n == 0 {
        return Err(Error::config("levels", format!("{cells} is not a square cell count")));
    }
    Ok(n)
}

/// Runs every `(p, ν)` pair over all levels. Tables are written to
/// `convergence_<stem>.csv` and `components_<stem>.csv` when `out` is set.
pub fn convergence_study(cfg: &StudyConfig) -> Result<Vec<ConvergenceTable>> {
    let mut tables = Vec::new();
    for &nu in &cfg.nus {
        for &p in &cfg.degrees {
            let degrees = Degrees::uniform(p)?;
            let mut rows: Vec<ConvergenceRow> = Vec::new();
            for &(cells, slabs) in &cfg.levels {
                let mut rc = RunConfig::new(&cfg.problem, side(cells)?, slabs, degrees, nu);
                rc.alpha = cfg.alpha;
                let report = run(&rc)?;
                let components =
                    report.error.ok_or_else(|| Error::config("problem", "convergence needs an exact solution"))?;
                let error = components.s();
                let rate = rows.last().map(|prev| (prev.error / error).log2());
                rows.push(ConvergenceRow { cells, slabs, error, rate, components });
            }
            let table = ConvergenceTable { p, nu, rows };
            if let Some(dir) = &cfg.out {
                fs::create_dir_all(dir)?;
                fs::write(dir.join(format!("convergence_{}.csv", table.stem())), table.to_csv()?)?;
                fs::write(dir.join(format!("components_{}.csv", table.stem())), table.components_csv()?)?;
            }
            tables.push(table);
        }
    }
    Ok(tables)
}

pub fn format_table(tables: &[ConvergenceTable]) -> String {
    let mut s = String::new();
    for t in tables {
        let _ = writeln!(s, "p = {}, nu = {:e}", t.p, t.nu);
        let _ = writeln!(s, "{:>8} {:>7} {:>12} {:>6}", "cells", "slabs", "error", "rate");
        for r in &t.rows {
            let rate = r.rate.map_or("-".to_string(), |v| format!("{v:.1}"));
            let _ = writeln!(s, "{:>8} {:>7} {:>12.2e} {:>6}", r.cells, r.slabs, r.error, rate);
        }
        s.push('\n');
    }
    s
}
