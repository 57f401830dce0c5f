//! Periodic cubic supercell grids and the fields that live on them.
//!
//! A grid samples `n_cells³` unit cells of the lattice `a·ℤ³` with `n_pts`
//! points per unit-cell edge, so each edge carries `M = n_cells·n_pts` points
//! with spacing `h = a / n_pts`. Point `(i, j, k)` sits at `h·(i, j, k)` and is
//! stored at `(i·M + j)·M + k`.
//!
//! Fourier coefficients follow the mean-preserving convention
//!
//! ```text
//!   f̂(G) = (1/N) Σ_x f(x) e^{-iG·x},    f(x) = Σ_G f̂(G) e^{iG·x},
//! ```
//!
//! with `G = (2π/L)·ν` and each component of `ν` folded into `(-M/2, M/2]`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::dft::Dft3;
use crate::error::{invalid, Result};

/// Margin `β(|G_max|² − μ)` below which truncated Fermi-Dirac sums are suspect.
pub const CUTOFF_MARGIN: f64 = 30.0;

/// Largest supported number of points per edge.
pub const MAX_POINTS_PER_EDGE: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    n_cells: usize,
    n_pts: usize,
}

impl Grid {
    pub fn new(a: f64, n_cells: usize, n_pts: usize) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(invalid!("lattice constant must be positive and finite, got {a}"));
        }
        if n_cells == 0 || n_pts == 0 {
            return Err(invalid!("n_cells and n_pts must be at least 1"));
        }
        if n_cells * n_pts > MAX_POINTS_PER_EDGE {
            return Err(invalid!(
                "{} points per edge exceeds the supported maximum {MAX_POINTS_PER_EDGE}",
                n_cells * n_pts
            ));
        }
        Ok(Self { a, n_cells, n_pts })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }
    pub fn n_pts(&self) -> usize {
        self.n_pts
    }
    /// Points per supercell edge.
    pub fn m(&self) -> usize {
        self.n_cells * self.n_pts
    }
    /// Total number of grid points.
    pub fn len(&self) -> usize {
        let m = self.m();
        m * m * m
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn spacing(&self) -> f64 {
        self.a / self.n_pts as f64
    }
    /// Supercell edge `L = a·n_cells`.
    pub fn edge(&self) -> f64 {
        self.a * self.n_cells as f64
    }
    pub fn volume(&self) -> f64 {
        let l = self.edge();
        l * l * l
    }
    pub fn cell_volume(&self) -> f64 {
        self.a * self.a * self.a
    }
    /// Volume element `h³` of one grid point.
    pub fn point_volume(&self) -> f64 {
        let h = self.spacing();
        h * h * h
    }
    /// `2π/L`, the spacing of reciprocal vectors.
    pub fn momentum_unit(&self) -> f64 {
        2.0 * PI / self.edge()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let m = self.m();
        (i * m + j) * m + k
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let m = self.m();
        [idx / (m * m), (idx / m) % m, idx % m]
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let [i, j, k] = self.coords(idx);
        [i as f64 * h, j as f64 * h, k as f64 * h]
    }

    /// Folded integer frequency of axis index `j`, in `(-M/2, M/2]`.
    pub fn fold(&self, j: usize) -> i64 {
        let m = self.m() as i64;
        let j = j as i64;
        if j > m / 2 {
            j - m
        } else {
            j
        }
    }

    /// Axis index of a (possibly negative or out-of-range) frequency.
    pub fn wrap(&self, nu: i64) -> usize {
        nu.rem_euclid(self.m() as i64) as usize
    }

    pub fn frequency(&self, idx: usize) -> [i64; 3] {
        let [i, j, k] = self.coords(idx);
        [self.fold(i), self.fold(j), self.fold(k)]
    }

    /// `|ν|²` for the folded frequency at `idx`; `|G|² = (2π/L)²·|ν|²`.
    pub fn frequency_norm_sq(&self, idx: usize) -> u64 {
        self.frequency(idx).iter().map(|&v| (v * v) as u64).sum()
    }

    /// `|G|²` at every grid index.
    pub fn g2_table(&self) -> Vec<f64> {
        let k2 = self.momentum_unit() * self.momentum_unit();
        (0..self.len()).map(|i| k2 * self.frequency_norm_sq(i) as f64).collect()
    }

    /// Distinct values of `|ν|²` with their multiplicities, ascending.
    pub fn shells(&self) -> BTreeMap<u64, usize> {
        let mut out = BTreeMap::new();
        for i in 0..self.len() {
            *out.entry(self.frequency_norm_sq(i)).or_insert(0) += 1;
        }
        out
    }

    /// Largest axis momentum `(2π/L)·⌊M/2⌋`.
    pub fn g_max(&self) -> f64 {
        self.momentum_unit() * (self.m() / 2) as f64
    }

    /// `β(|G_max|² − μ)`; truncated Fermi-Dirac sums are trusted above
    /// [`CUTOFF_MARGIN`].
    pub fn cutoff_margin(&self, beta: f64, mu: f64) -> f64 {
        beta * (self.g_max() * self.g_max() - mu)
    }

    pub fn passes_cutoff(&self, beta: f64, mu: f64) -> bool {
        self.cutoff_margin(beta, mu) > CUTOFF_MARGIN
    }

    /// Unit cell owning axis index `i`: the one whose lattice site
    /// `c·a` is nearest, ties going to the upper site.
    pub fn cell_of_axis_index(&self, i: usize) -> usize {
        ((i + self.n_pts / 2) / self.n_pts) % self.n_cells
    }

    /// Flat index `(c₀·n + c₁)·n + c₂` of the unit cell owning grid point `idx`.
    pub fn cell_of(&self, idx: usize) -> usize {
        let n = self.n_cells;
        let [i, j, k] = self.coords(idx);
        (self.cell_of_axis_index(i) * n + self.cell_of_axis_index(j)) * n + self.cell_of_axis_index(k)
    }

    pub fn n_unit_cells(&self) -> usize {
        self.n_cells * self.n_cells * self.n_cells
    }
}

/// Real samples of a periodic function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid!("field has {} values but the grid has {} points", values.len(), grid.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid!("field value at index {i} is not finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self { grid, values }
    }

    /// `amplitude·cos(G·x)` for the reciprocal vector with integer frequency `nu`.
    pub fn cos_mode(grid: Grid, nu: [i64; 3], amplitude: f64) -> Self {
        let m = grid.m() as i64;
        let values = (0..grid.len())
            .map(|idx| {
                let c = grid.coords(idx);
                let phase: i64 = (0..3).map(|d| nu[d] * c[d] as i64).sum();
                let t = phase.rem_euclid(m) as f64 / m as f64;
                amplitude * libm::cos(2.0 * PI * t)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &RealField, b: f64) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Self { grid: self.grid, values }
    }

    pub fn add(&self, other: &RealField) -> Self {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &RealField) -> Self {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn offset(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    pub fn max_abs_diff(&self, other: &RealField) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.values.iter().zip(&other.values).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }
}

/// Fourier coefficients of a field, indexed like the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(invalid!(
                "spectral field has {} coefficients but the grid has {} points",
                coeffs.len(),
                grid.len()
            ));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff_at(&self, nu: [i64; 3]) -> Complex64 {
        let g = &self.grid;
        self.coeffs[g.index(g.wrap(nu[0]), g.wrap(nu[1]), g.wrap(nu[2]))]
    }

    /// Largest `|f̂(-G) - conj f̂(G)|`; zero for transforms of real fields.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        (0..g.len())
            .map(|idx| {
                let nu = g.frequency(idx);
                (self.coeff_at([-nu[0], -nu[1], -nu[2]]) - self.coeffs[idx].conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Multiplies every coefficient by a real weight indexed like the grid.
    pub fn scale_by(&self, weights: &[f64]) -> Self {
        assert_eq!(weights.len(), self.coeffs.len());
        let coeffs = self.coeffs.iter().zip(weights).map(|(c, w)| c * *w).collect();
        Self { grid: self.grid, coeffs }
    }
}

pub fn to_spectral(f: &RealField) -> SpectralField {
    let grid = f.grid;
    let mut data: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Dft3::new(grid.m()).transform(&mut data, false);
    let inv_n = 1.0 / grid.len() as f64;
    for c in &mut data {
        *c *= inv_n;
    }
    SpectralField { grid, coeffs: data }
}

/// Synthesises the real part of `Σ f̂(G) e^{iG·x}`.
pub fn to_real(s: &SpectralField) -> RealField {
    let grid = s.grid;
    let mut data = s.coeffs.clone();
    Dft3::new(grid.m()).transform(&mut data, true);
    RealField { grid, values: data.iter().map(|c| c.re).collect() }
}

/// Applies the Fourier multiplier `weights[idx]` to a real field.
pub fn apply_multiplier(f: &RealField, weights: &[f64]) -> RealField {
    to_real(&to_spectral(f).scale_by(weights))
}

/// `sqrt((V/N) Σ f²)` over the supercell.
pub fn norm_l2_cell(f: &RealField) -> f64 {
    let g = f.grid;
    let ss: f64 = f.values.iter().map(|v| v * v).sum();
    libm::sqrt(g.point_volume() * ss)
}

/// `sqrt(V Σ_G (1+|G|²)² |f̂(G)|²)`, i.e. `‖(1-Δ)f‖` in the same normalisation
/// as [`norm_l2_cell`].
pub fn norm_h2_cell(f: &RealField) -> f64 {
    let g = f.grid;
    let s = to_spectral(f);
    let g2 = g.g2_table();
    let ss: f64 = s
        .coeffs
        .iter()
        .zip(&g2)
        .map(|(c, q)| {
            let w = 1.0 + q;
            w * w * c.norm_sqr()
        })
        .sum();
    libm::sqrt(g.volume() * ss)
}

/// L² norm over each unit cell, indexed like [`Grid::cell_of`].
pub fn unit_cell_l2_norms(f: &RealField) -> Vec<f64> {
    let g = f.grid;
    let mut acc = vec![0.0; g.n_unit_cells()];
    for (idx, v) in f.values.iter().enumerate() {
        acc[g.cell_of(idx)] += v * v;
    }
    let dv = g.point_volume();
    acc.into_iter().map(|s| libm::sqrt(dv * s)).collect()
}

/// Translation by whole unit cells: returns `g(x) = f(x - a·ℓ)`.
pub fn shift_lattice(f: &RealField, ell: [i64; 3]) -> RealField {
    let n = f.grid.n_pts as i64;
    shift_points(f, [ell[0] * n, ell[1] * n, ell[2] * n])
}

/// Translation by an arbitrary displacement, which must be a whole number
/// of grid spacings along every axis.
pub fn translate(f: &RealField, displacement: [f64; 3]) -> Result<RealField> {
    let h = f.grid.spacing();
    let mut steps = [0i64; 3];
    for d in 0..3 {
        let s = displacement[d] / h;
        let r = libm::round(s);
        if !s.is_finite() || (s - r).abs() > 1e-9 * s.abs().max(1.0) {
            return Err(invalid!(
                "displacement {} along axis {d} is not a multiple of the grid spacing {h}",
                displacement[d]
            ));
        }
        steps[d] = r as i64;
    }
    Ok(shift_points(f, steps))
}

fn shift_points(f: &RealField, steps: [i64; 3]) -> RealField {
    let g = f.grid;
    let mut values = vec![0.0; g.len()];
    for (idx, slot) in values.iter_mut().enumerate() {
        let [i, j, k] = g.coords(idx);
        let src = g.index(g.wrap(i as i64 - steps[0]), g.wrap(j as i64 - steps[1]), g.wrap(k as i64 - steps[2]));
        *slot = f.values[src];
    }
    RealField { grid: g, values }
}
