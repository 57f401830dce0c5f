//! Anderson-type background charges `κ(x) = Σ_ℓ q_ℓ χ(x - ℓ)`.
//!
//! `χ` is the smooth bump `exp(-1/(1 - (r/R)²))` on `r < R`, normalised to
//! unit mass by the grid sum so that discrete charge bookkeeping is exact.
//! Coefficients are i.i.d. uniform on `[q̄ - w, q̄ + w]`. Each coefficient is
//! drawn from its own ChaCha stream keyed by the lattice coordinates of its
//! site, so a realization does not depend on the supercell layout or on the
//! order in which cells are visited.

use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{invalid, Result};
use crate::grid::{norm_l2_cell, shift_lattice, unit_cell_l2_norms, Grid, RealField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisorderSpec {
    pub lattice_a: f64,
    /// Mean coefficient `q̄`.
    pub qbar: f64,
    /// Half-width `w` of the uniform coefficient law.
    pub width: f64,
    pub seed: u64,
    /// Bump radius in units of `a`; at most ½ so the support stays in one cell.
    pub bump_radius: f64,
}

impl DisorderSpec {
    pub fn new(lattice_a: f64, qbar: f64, width: f64, seed: u64) -> Result<Self> {
        let s = Self { lattice_a, qbar, width, seed, bump_radius: 0.5 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lattice_a.is_finite() && self.lattice_a > 0.0) {
            return Err(invalid!("lattice constant must be positive, got {}", self.lattice_a));
        }
        if !(self.qbar.is_finite() && self.qbar > 0.0) {
            return Err(invalid!("mean coefficient qbar must be positive, got {}", self.qbar));
        }
        if !(self.width.is_finite() && self.width >= 0.0) {
            return Err(invalid!("disorder width must be non-negative, got {}", self.width));
        }
        if !(self.bump_radius > 0.0 && self.bump_radius <= 0.5) {
            return Err(invalid!(
                "bump radius {}·a does not fit inside one unit cell (needs 0 < r ≤ 0.5)",
                self.bump_radius
            ));
        }
        Ok(())
    }

    /// Expected mean background density `κ₀ = q̄/a³`.
    pub fn kappa0(&self) -> f64 {
        self.qbar / (self.lattice_a * self.lattice_a * self.lattice_a)
    }

    pub fn with_width(self, width: f64) -> Self {
        Self { width, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    /// Uniform variate in `[0, 1)` for the lattice site `ℓ`.
    fn variate(&self, site: [u64; 3]) -> f64 {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream((site[0] << 42) | (site[1] << 21) | site[2]);
        (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Coefficient `q_ℓ` of the site with lattice coordinates `site`.
    pub fn coefficient(&self, site: [u64; 3]) -> f64 {
        self.qbar + self.width * (2.0 * self.variate(site) - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisorderRealization {
    pub spec: DisorderSpec,
    /// `q_ℓ` per unit cell, indexed like [`Grid::cell_of`].
    pub coefficients: Vec<f64>,
    pub kappa: RealField,
    /// `κ - κ₀`.
    pub kappa_prime: RealField,
    pub kappa0: f64,
}

impl DisorderRealization {
    pub fn grid(&self) -> &Grid {
        self.kappa.grid()
    }

    /// The realization translated by whole unit cells `ℓ`.
    pub fn shifted(&self, ell: [i64; 3]) -> Self {
        let g = *self.grid();
        let n = g.n_cells() as i64;
        let mut coefficients = self.coefficients.clone();
        for c0 in 0..n {
            for c1 in 0..n {
                for c2 in 0..n {
                    let dst = ((c0 * n + c1) * n + c2) as usize;
                    let s = [(c0 - ell[0]).rem_euclid(n), (c1 - ell[1]).rem_euclid(n), (c2 - ell[2]).rem_euclid(n)];
                    coefficients[dst] = self.coefficients[((s[0] * n + s[1]) * n + s[2]) as usize];
                }
            }
        }
        Self {
            spec: self.spec,
            coefficients,
            kappa: shift_lattice(&self.kappa, ell),
            kappa_prime: shift_lattice(&self.kappa_prime, ell),
            kappa0: self.kappa0,
        }
    }
}

/// Offset (in grid steps) of axis index `i` from its owning lattice site.
fn site_offset(grid: &Grid, i: usize) -> i64 {
    let n = grid.n_pts();
    i as i64 - (((i + n / 2) / n) * n) as i64
}

/// Bump values on the points of one unit cell, normalised to unit mass.
fn bump_table(spec: &DisorderSpec, grid: &Grid) -> Result<Vec<f64>> {
    let n = grid.n_pts();
    let h = grid.spacing();
    let radius = spec.bump_radius * spec.lattice_a;
    let lo = -((n / 2) as i64);
    let mut table = Vec::with_capacity(n * n * n);
    for a in 0..n as i64 {
        for b in 0..n as i64 {
            for c in 0..n as i64 {
                let d = [(lo + a) as f64 * h, (lo + b) as f64 * h, (lo + c) as f64 * h];
                let u2 = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (radius * radius);
                table.push(if u2 < 1.0 { libm::exp(-1.0 / (1.0 - u2)) } else { 0.0 });
            }
        }
    }
    let mass: f64 = table.iter().sum::<f64>() * grid.point_volume();
    if !(mass > 0.0) {
        return Err(invalid!("bump has no support on the grid; increase n_pts"));
    }
    for v in &mut table {
        *v /= mass;
    }
    Ok(table)
}

/// Samples one realization of the background on `grid`.
pub fn sample(spec: &DisorderSpec, grid: &Grid) -> Result<DisorderRealization> {
    spec.validate()?;
    if (grid.a() - spec.lattice_a).abs() > 1e-12 * spec.lattice_a {
        return Err(invalid!(
            "grid lattice constant {} differs from the disorder lattice constant {}",
            grid.a(),
            spec.lattice_a
        ));
    }
    let nc = grid.n_cells();
    let mut coefficients = Vec::with_capacity(grid.n_unit_cells());
    for c0 in 0..nc as u64 {
        for c1 in 0..nc as u64 {
            for c2 in 0..nc as u64 {
                coefficients.push(spec.coefficient([c0, c1, c2]));
            }
        }
    }
    let bump = bump_table(spec, grid)?;
    let n = grid.n_pts() as i64;
    let half = n / 2;
    let values: Vec<f64> = (0..grid.len())
        .map(|idx| {
            let [i, j, k] = grid.coords(idx);
            let o = [site_offset(grid, i), site_offset(grid, j), site_offset(grid, k)];
            let local = (((o[0] + half) * n + o[1] + half) * n + o[2] + half) as usize;
            coefficients[grid.cell_of(idx)] * bump[local]
        })
        .collect();
    let kappa0 = spec.kappa0();
    let kappa = RealField::new(*grid, values)?;
    let kappa_prime = kappa.offset(-kappa0);
    Ok(DisorderRealization { spec: *spec, coefficients, kappa, kappa_prime, kappa0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaPrimeNorms {
    pub per_supercell: f64,
    pub max_per_unit_cell: f64,
    pub per_unit_cell: Vec<f64>,
}

pub fn norm_kappa_prime(r: &DisorderRealization) -> KappaPrimeNorms {
    let per_unit_cell = unit_cell_l2_norms(&r.kappa_prime);
    KappaPrimeNorms {
        per_supercell: norm_l2_cell(&r.kappa_prime),
        max_per_unit_cell: per_unit_cell.iter().copied().fold(0.0, f64::max),
        per_unit_cell,
    }
}
