use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::march::SlabSolution;
use crate::geometry::SpaceTimeSlab;
use crate::spaces::Degrees;
use crate::{Error, Result};

/// Metadata stored next to a coefficient dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub slab: usize,
    pub t0: f64,
    pub t1: f64,
    pub degrees: Degrees,
    pub n_elements: usize,
    pub n_modes: usize,
    #[serde(skip)]
    pub coeffs: Vec<Vec<f64>>,
}

fn paths(dir: &Path, slab: usize) -> (PathBuf, PathBuf) {
    (dir.join(format!("slab_{slab:04}.txt")), dir.join(format!("slab_{slab:04}.json")))
}

/// Writes `slab_NNNN.txt` (one `element mode value` line per coefficient)
/// and the `slab_NNNN.json` sidecar. Returns the text path.
pub fn write_checkpoint(dir: &Path, slab: &SpaceTimeSlab, degrees: Degrees, sol: &SlabSolution) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let (txt, json) = paths(dir, slab.index);
    let mut out = BufWriter::new(fs::File::create(&txt)?);
    for (e, c) in sol.coeffs.iter().enumerate() {
        for (m, v) in c.iter().enumerate() {
            writeln!(out, "{e} {m} {v:.17e}")?;
        }
    }
    out.flush()?;
    let meta = Checkpoint {
        slab: slab.index,
        t0: slab.t0,
        t1: slab.t1,
        degrees,
        n_elements: sol.coeffs.len(),
        n_modes: sol.coeffs.first().map_or(0, Vec::len),
        coeffs: Vec::new(),
    };
    fs::write(&json, serde_json::to_string_pretty(&meta)?)?;
    Ok(txt)
}

/// Reads a checkpoint written by [`write_checkpoint`] for slab `slab`.
pub fn read_checkpoint(dir: &Path, slab: usize) -> Result<Checkpoint> {
    let (txt, json) = paths(dir, slab);
    let mut meta: Checkpoint = serde_json::from_str(&fs::read_to_string(json)?)?;
    let mut coeffs = vec![vec![f64::NAN; meta.n_modes]; meta.n_elements];
    for (i, line) in fs::read_to_string(txt)?.lines().enumerate() {
        let bad = |message: &str| Error::Checkpoint { line: i + 1, message: message.to_string() };
        let mut it = line.split_whitespace();
        let e: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("element index"))?;
        let m: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("mode index"))?;
        let v: f64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("value"))?;
        *coeffs.get_mut(e).and_then(|c| c.get_mut(m)).ok_or_else(|| bad("index out of range"))? = v;
    }
    if coeffs.iter().flatten().any(|v| v.is_nan()) {
        return Err(Error::Checkpoint { line: 0, message: "missing coefficients".into() });
    }
    meta.coeffs = coeffs;
    Ok(meta)
}
