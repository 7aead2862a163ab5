use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::DEFAULT_SEED;
use crate::solver::DEFAULT_TOLERANCE;
use crate::spaces::Degrees;
use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    /// Per-slab error and residual table.
    #[serde(default)]
    pub csv: Option<PathBuf>,
    /// Legacy VTK file with every slab and the discrete solution.
    #[serde(default)]
    pub vtk: Option<PathBuf>,
    /// Directory for per-slab coefficient checkpoints.
    #[serde(default)]
    pub checkpoints: Option<PathBuf>,
}

/// A single run, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: String,
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// Cells per direction, one entry per spatial dimension.
    pub grid: Vec<usize>,
    pub slabs: usize,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub dt: Option<f64>,
    pub degrees: Degrees,
    #[serde(default)]
    pub nu: f64,
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Mesh deformation amplitude (or translation speed for `poly-exact`).
    #[serde(default)]
    pub amplitude: Option<f64>,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_dim() -> usize {
    2
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

impl RunConfig {
    pub fn new(problem: &str, grid: usize, slabs: usize, degrees: Degrees, nu: f64) -> Self {
        RunConfig {
            problem: problem.to_string(),
            dim: 2,
            grid: vec![grid, grid],
            slabs,
            t_end: None,
            dt: None,
            degrees,
            nu,
            alpha: None,
            amplitude: None,
            output: OutputPaths::default(),
            seed: DEFAULT_SEED,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.dim) {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if self.grid.len() != self.dim || self.grid.contains(&0) {
            return Err(Error::config("grid", "needs one positive cell count per spatial dimension"));
        }
        if self.slabs == 0 {
            return Err(Error::config("slabs", "must be positive"));
        }
        Degrees::new(self.degrees.p_t, self.degrees.p_s)?;
        if !(self.nu >= 0.0) {
            return Err(Error::config("nu", "must be non-negative"));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0) {
                return Err(Error::config("alpha", "must be positive"));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::config("tolerance", "must be positive"));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(Error::config("dt", "must be positive"));
            }
            if let Some(t) = self.t_end {
                if (self.slabs as f64 * dt - t).abs() > 1e-12 * t.abs().max(1.0) {
                    return Err(Error::config("dt", "slabs * dt must equal t_end"));
                }
            }
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0) {
                return Err(Error::config("t_end", "must be positive"));
            }
        }
        Ok(())
    }

    /// Final time: explicit, else `slabs · dt`, else the benchmark default.
    pub fn final_time(&self, default: f64) -> f64 {
        self.t_end.or(self.dt.map(|dt| dt * self.slabs as f64)).unwrap_or(default)
    }

    pub fn cells(&self) -> usize {
        self.grid.iter().product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        r#"{"problem": "rotating-pulse", "grid": [8, 8], "slabs": 8, "degrees": {"p_t": 1, "p_s": 1}, "nu": 0.01}"#;

    #[test]
    fn defaults_are_filled() {
        let c = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.dim, 2);
        assert_eq!(c.seed, 42);
        assert_eq!(c.final_time(1.0), 1.0);
        assert_eq!(c.cells(), 64);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = MINIMAL.replace("\"nu\"", "\"viscosity\"");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Json(_))));
    }

    #[test]
    fn inconsistent_time_step_is_rejected() {
        let text = MINIMAL.replace("\"nu\": 0.01", "\"nu\": 0.01, \"dt\": 0.1, \"t_end\": 1.0");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Config { .. })));
        let text = MINIMAL.replace("\"nu\": 0.01", "\"nu\": 0.01, \"dt\": 0.125, \"t_end\": 1.0");
        assert_eq!(RunConfig::from_json(&text).unwrap().final_time(3.0), 1.0);
    }

    #[test]
    fn degree_range_is_checked() {
        let text = MINIMAL.replace("\"p_s\": 1", "\"p_s\": 7");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::UnsupportedDegree { .. })));
    }
}
