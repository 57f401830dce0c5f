//! Flat `key = value` run configuration.
//!
//! ```text
//! # small-disorder run
//! beta = 1
//! kappa0_qbar = 1
//! disorder_width = 0.05
//! ```
//!
//! Blank lines and `#` comments are ignored. Omitted keys take their
//! defaults; unknown or repeated keys are errors.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rehf_core::{DisorderSpec, Grid, SolveConfig};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub beta: f64,
    /// Mean coefficient `q̄`; the mean density is `q̄/a³`.
    pub kappa0_qbar: f64,
    pub disorder_width: f64,
    pub lattice_a: f64,
    pub n_cells: usize,
    pub n_pts: usize,
    pub tol_residual: f64,
    pub tol_delta: f64,
    pub max_iter: usize,
    pub mixing: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SolveConfig::default();
        Self {
            beta: 1.0,
            kappa0_qbar: 1.0,
            disorder_width: 0.05,
            lattice_a: 1.0,
            n_cells: 4,
            n_pts: 3,
            tol_residual: s.tol_residual,
            tol_delta: s.tol_delta,
            max_iter: s.max_iter,
            mixing: s.mixing,
        }
    }
}

pub const KEYS: [&str; 10] = [
    "beta",
    "kappa0_qbar",
    "disorder_width",
    "lattice_a",
    "n_cells",
    "n_pts",
    "tol_residual",
    "tol_delta",
    "max_iter",
    "mixing",
];

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str, line: usize) -> AppResult<T> {
    raw.parse().map_err(|_| AppError::Config(format!("line {line}: cannot parse {key} = {raw:?}")))
}

impl RunConfig {
    pub fn parse(text: &str) -> AppResult<Self> {
        let mut cfg = Self::default();
        let mut seen = BTreeSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| AppError::Config(format!("line {line}: expected key = value, got {body:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(AppError::Config(format!("line {line}: duplicate key {key}")));
            }
            match key {
                "beta" => cfg.beta = parse_value(key, value, line)?,
                "kappa0_qbar" => cfg.kappa0_qbar = parse_value(key, value, line)?,
                "disorder_width" => cfg.disorder_width = parse_value(key, value, line)?,
                "lattice_a" => cfg.lattice_a = parse_value(key, value, line)?,
                "n_cells" => cfg.n_cells = parse_value(key, value, line)?,
                "n_pts" => cfg.n_pts = parse_value(key, value, line)?,
                "tol_residual" => cfg.tol_residual = parse_value(key, value, line)?,
                "tol_delta" => cfg.tol_delta = parse_value(key, value, line)?,
                "max_iter" => cfg.max_iter = parse_value(key, value, line)?,
                "mixing" => cfg.mixing = parse_value(key, value, line)?,
                other => {
                    return Err(AppError::Config(format!(
                        "line {line}: unknown key {other:?} (known: {})",
                        KEYS.join(", ")
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> AppResult<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(AppError::Config(format!("beta must be positive, got {}", self.beta)));
        }
        self.grid()?;
        self.disorder_spec(0)?;
        self.solve_config().validate()?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "beta = {}", self.beta);
        let _ = writeln!(s, "kappa0_qbar = {}", self.kappa0_qbar);
        let _ = writeln!(s, "disorder_width = {}", self.disorder_width);
        let _ = writeln!(s, "lattice_a = {}", self.lattice_a);
        let _ = writeln!(s, "n_cells = {}", self.n_cells);
        let _ = writeln!(s, "n_pts = {}", self.n_pts);
        let _ = writeln!(s, "tol_residual = {:e}", self.tol_residual);
        let _ = writeln!(s, "tol_delta = {:e}", self.tol_delta);
        let _ = writeln!(s, "max_iter = {}", self.max_iter);
        let _ = writeln!(s, "mixing = {}", self.mixing);
        s
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0_qbar / self.lattice_a.powi(3)
    }

    pub fn grid(&self) -> AppResult<Grid> {
        Ok(Grid::new(self.lattice_a, self.n_cells, self.n_pts)?)
    }

    pub fn disorder_spec(&self, seed: u64) -> AppResult<DisorderSpec> {
        Ok(DisorderSpec::new(self.lattice_a, self.kappa0_qbar, self.disorder_width, seed)?)
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            tol_delta: self.tol_delta,
            tol_residual: self.tol_residual,
            max_iter: self.max_iter,
            mixing: self.mixing,
            gauge_shift: None,
        }
    }
}
