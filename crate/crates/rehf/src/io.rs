//! On-disk formats: solve reports (JSON), field dumps and CSV tables.

use std::fmt::Write as _;
use std::path::Path;

use rehf_core::{m_contour_oracle, m_of_p, Grid, PhysParams, RealField, SolveReport};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

/// Serialized form of a solve report. Field order is the key order on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub iterations: usize,
    pub step_norms: Vec<f64>,
    pub ratios: Vec<f64>,
    pub residual: f64,
    pub phi_l2: f64,
    pub phi_h2: f64,
    pub kappa_prime_l2: f64,
    pub mu: f64,
    pub mu_h: f64,
    pub neutrality: f64,
    pub converged: bool,
}

impl From<&SolveReport> for ReportJson {
    fn from(r: &SolveReport) -> Self {
        Self {
            iterations: r.iterations,
            step_norms: r.step_norms.clone(),
            ratios: r.ratios.clone(),
            residual: r.residual,
            phi_l2: r.phi_l2,
            phi_h2: r.phi_h2,
            kappa_prime_l2: r.kappa_prime_l2,
            mu: r.mu,
            mu_h: r.mu_h,
            neutrality: r.neutrality,
            converged: r.converged,
        }
    }
}

pub fn report_json(r: &SolveReport) -> String {
    let mut s = serde_json::to_string_pretty(&ReportJson::from(r)).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> AppResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| AppError::io(path, e))
}

/// Text dump: a `#` header with the grid, then `i j k value` per point with
/// 17 significant digits.
pub fn field_dump(name: &str, f: &RealField) -> String {
    let g = f.grid();
    let mut s = String::with_capacity(40 * g.len());
    let _ = writeln!(s, "# field {name}");
    let _ = writeln!(s, "# lattice_a = {:?}", g.a());
    let _ = writeln!(s, "# n_cells = {}", g.n_cells());
    let _ = writeln!(s, "# n_pts = {}", g.n_pts());
    let _ = writeln!(s, "# i j k value");
    for (idx, v) in f.values().iter().enumerate() {
        let [i, j, k] = g.coords(idx);
        let _ = writeln!(s, "{i} {j} {k} {v:.16e}");
    }
    s
}

pub fn parse_field_dump(text: &str) -> AppResult<(String, RealField)> {
    let bad = |msg: String| AppError::Config(format!("field dump: {msg}"));
    let mut name = None;
    let (mut a, mut nc, mut np) = (None, None, None);
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(h) = line.strip_prefix('#') {
            let h = h.trim();
            if let Some(v) = h.strip_prefix("field ") {
                name = Some(v.trim().to_string());
            } else if let Some((k, v)) = h.split_once('=') {
                let v = v.trim();
                match k.trim() {
                    "lattice_a" => a = v.parse::<f64>().ok(),
                    "n_cells" => nc = v.parse::<usize>().ok(),
                    "n_pts" => np = v.parse::<usize>().ok(),
                    _ => {}
                }
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(bad(format!("malformed row {line:?}")));
        }
        let ijk: Result<Vec<usize>, _> = parts[..3].iter().map(|p| p.parse::<usize>()).collect();
        let v: f64 = parts[3].parse().map_err(|_| bad(format!("bad value in {line:?}")))?;
        rows.push((ijk.map_err(|_| bad(format!("bad index in {line:?}")))?, v));
    }
    let (a, nc, np) = match (a, nc, np) {
        (Some(a), Some(nc), Some(np)) => (a, nc, np),
        _ => return Err(bad("missing grid header".into())),
    };
    let grid = Grid::new(a, nc, np)?;
    if rows.len() != grid.len() {
        return Err(bad(format!("{} rows for a grid of {} points", rows.len(), grid.len())));
    }
    let mut values = vec![f64::NAN; grid.len()];
    for (ijk, v) in rows {
        if ijk.iter().any(|&x| x >= grid.m()) {
            return Err(bad(format!("index {ijk:?} outside the grid")));
        }
        values[grid.index(ijk[0], ijk[1], ijk[2])] = v;
    }
    Ok((name.unwrap_or_default(), RealField::new(grid, values)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierRow {
    pub p: f64,
    pub m_closed_form: f64,
    pub m_contour: f64,
    pub rel_diff: f64,
    pub l_symbol: f64,
}

pub fn log_spaced(p_min: f64, p_max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![p_min];
    }
    let (lo, hi) = (p_min.ln(), p_max.ln());
    let mut v: Vec<f64> = (0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()).collect();
    v[0] = p_min;
    v[n - 1] = p_max;
    v
}

pub fn multiplier_rows(params: &PhysParams, p_min: f64, p_max: f64, n: usize) -> AppResult<Vec<MultiplierRow>> {
    if !(p_min > 0.0 && p_max >= p_min && n >= 1) {
        return Err(AppError::Config(format!(
            "need 0 < p_min <= p_max and at least one point, got [{p_min}, {p_max}] with {n}"
        )));
    }
    log_spaced(p_min, p_max, n)
        .into_iter()
        .map(|p| {
            let m = m_of_p(p, params)?;
            let c = m_contour_oracle(p, params)?;
            Ok(MultiplierRow {
                p,
                m_closed_form: m,
                m_contour: c,
                rel_diff: (c - m).abs() / m,
                l_symbol: p * p / (4.0 * std::f64::consts::PI) + m,
            })
        })
        .collect()
}

pub fn multiplier_csv(rows: &[MultiplierRow]) -> String {
    let mut s = String::from("p,m_closed_form,m_contour,rel_diff,L_symbol\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.6e},{:.16e}",
            r.p, r.m_closed_form, r.m_contour, r.rel_diff, r.l_symbol
        );
    }
    s
}
