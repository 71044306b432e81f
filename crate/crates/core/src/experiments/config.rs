//! Sweep configuration files.
//!
//! ```toml
//! method = "qsp"                       # qsp | trotter | both
//! N = 4
//! tau_grid = ["0.1:0.1:5", "5.25:0.25:20", 30.0]
//! p_levels = [1e-4, 1e-3]
//! eps_target = 1e-4
//! schedules = [[1, 2, 3], [1, 1.25, 1.5]]
//! shots = 5_000_000
//! seed = 2024
//! output_path = "results/sweep.csv"
//! ```
//!
//! Grid entries are numbers or inclusive `start:step:stop` ranges.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::ExperimentError;
use crate::model::TfimSpec;
use crate::zne::ScalingSchedule;

/// Circuit families a sweep covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSelection {
    Qsp,
    Trotter,
    Both,
}

impl MethodSelection {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "qsp" => Some(Self::Qsp),
            "trotter" => Some(Self::Trotter),
            "both" => Some(Self::Both),
            _ => None,
        }
    }

    pub fn includes_qsp(self) -> bool {
        self != Self::Trotter
    }

    pub fn includes_trotter(self) -> bool {
        self != Self::Qsp
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub method: MethodSelection,
    /// Number of spin sites.
    pub n: usize,
    pub tau_grid: Vec<f64>,
    pub p_levels: Vec<f64>,
    /// Target simulation error: `eps_QSP` for QSP (the truncation runs at a
    /// tenth of it) and `dt^2` for Trotter.
    pub eps_target: f64,
    pub schedules: Vec<ScalingSchedule>,
    pub shots: u64,
    pub seed: u64,
    pub output_path: PathBuf,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GridItem {
    Value(f64),
    Range(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    method: String,
    #[serde(rename = "N")]
    n: usize,
    tau_grid: Vec<GridItem>,
    p_levels: Vec<GridItem>,
    eps_target: f64,
    schedules: Vec<Vec<f64>>,
    shots: u64,
    seed: u64,
    output_path: PathBuf,
}

fn config_error(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

/// Expands `start:step:stop` into the inclusive arithmetic sequence.
pub fn parse_range(token: &str) -> Result<Vec<f64>, ExperimentError> {
    let parts: Vec<&str> = token.split(':').map(str::trim).collect();
    let [start, step, stop] = parts[..] else {
        return Err(config_error(format!("range `{token}` is not start:step:stop")));
    };
    let num = |s: &str| s.parse::<f64>().map_err(|_| config_error(format!("bad number `{s}` in range `{token}`")));
    let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(config_error(format!("range `{token}` is empty or not ascending")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    // Rounding keeps decimal grids such as 0.1:0.1:5 free of accumulated drift.
    Ok((0..count).map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12).collect())
}

fn expand(items: Vec<GridItem>) -> Result<Vec<f64>, ExperimentError> {
    let mut out = Vec::new();
    for item in items {
        match item {
            GridItem::Value(v) => out.push(v),
            GridItem::Range(r) => out.extend(parse_range(&r)?),
        }
    }
    Ok(out)
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| config_error(e.to_string()))?;
        let method = MethodSelection::parse(&raw.method)
            .ok_or_else(|| config_error(format!("unknown method `{}`", raw.method)))?;
        let schedules = raw
            .schedules
            .into_iter()
            .map(|s| ScalingSchedule::new(s).map_err(|e| config_error(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let config = Self {
            method,
            n: raw.n,
            tau_grid: expand(raw.tau_grid)?,
            p_levels: expand(raw.p_levels)?,
            eps_target: raw.eps_target,
            schedules,
            shots: raw.shots,
            seed: raw.seed,
            output_path: raw.output_path,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        TfimSpec::standard(self.n).validate().map_err(|e| config_error(e.to_string()))?;
        if self.n < 3 {
            return Err(config_error(format!("N must be at least 3, got {}", self.n)));
        }
        for (key, empty) in [
            ("tau_grid", self.tau_grid.is_empty()),
            ("p_levels", self.p_levels.is_empty()),
            ("schedules", self.schedules.is_empty()),
        ] {
            if empty {
                return Err(config_error(format!("{key} must be non-empty")));
            }
        }
        if let Some(t) = self.tau_grid.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            return Err(config_error(format!("tau must be positive, got {t}")));
        }
        if !(self.eps_target > 0.0 && self.eps_target < 1.0) {
            return Err(config_error(format!("eps_target must lie in (0, 1), got {}", self.eps_target)));
        }
        if self.shots == 0 {
            return Err(config_error("shots must be at least 1"));
        }
        for &p in &self.p_levels {
            for s in &self.schedules {
                s.check_noise(p).map_err(|e| config_error(format!("p = {p}, schedule {s}: {e}")))?;
            }
        }
        Ok(())
    }
}
