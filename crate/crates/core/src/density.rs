//! Electron density `ρ[φ] = den f_FD(β(-Δ - φ - μ))` on a supercell, and the
//! nonlinear remainder of its expansion around jellium.
//!
//! The Hamiltonian `-Δ - φ` is diagonalised densely in the real-space grid
//! basis, where it is real symmetric: `-Δ` is the spectral Laplacian (a
//! Kronecker sum of one-dimensional circulants) and `φ` acts diagonally. This
//! is unitarily equivalent to the plane-wave matrix
//! `H[G,G'] = |G|²δ - φ̂(G - G')` assembled by [`build_hamiltonian`].

use alloc::vec;
use alloc::vec::Vec;

use faer::complex_native::c64;
use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fermi::occupation;
use crate::grid::{norm_l2_cell, to_spectral, Grid, RealField};
use crate::jellium::density_a_discrete;
use crate::params::PhysParams;
use crate::screening::{apply_m, Lsymbol};

/// Largest dense dimension diagonalised without an explicit override.
pub const DEFAULT_EIG_BUDGET: usize = 4096;

fn check_budget(grid: &Grid, budget: usize) -> Result<()> {
    if grid.len() > budget {
        return Err(Error::Resource { dimension: grid.len(), budget });
    }
    Ok(())
}

/// Plane-wave matrix of `-Δ - φ`, row-major over grid momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralHamiltonian {
    grid: Grid,
    data: Vec<Complex64>,
}

impl SpectralHamiltonian {
    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    /// `max |H - H†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.entry(r, c) - self.entry(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim();
        let m = Mat::<c64>::from_fn(n, n, |r, c| {
            let z = self.entry(r, c);
            c64::new(z.re, z.im)
        });
        let mut ev = m.selfadjoint_eigenvalues(Side::Lower);
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// `H[G,G'] = |G|²δ_{GG'} - φ̂(G - G')` with `G - G'` folded on the grid torus.
pub fn build_hamiltonian(phi: &RealField, budget: usize) -> Result<SpectralHamiltonian> {
    let grid = *phi.grid();
    check_budget(&grid, budget)?;
    let n = grid.len();
    let fhat = to_spectral(phi);
    let g2 = grid.g2_table();
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for r in 0..n {
        let a = grid.frequency(r);
        for c in 0..n {
            let b = grid.frequency(c);
            let mut v = -fhat.coeff_at([a[0] - b[0], a[1] - b[1], a[2] - b[2]]);
            if r == c {
                v += g2[r];
            }
            data[r * n + c] = v;
        }
    }
    Ok(SpectralHamiltonian { grid, data })
}

/// Eigenpairs of `-Δ - φ` in the real-space grid basis.
pub struct HamiltonianSpectrum {
    eigenvalues: Vec<f64>,
    vectors: Mat<f64>,
}

impl HamiltonianSpectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvector `n` as grid values.
    pub fn vector(&self, n: usize) -> Vec<f64> {
        (0..self.vectors.nrows()).map(|r| self.vectors.read(r, n)).collect()
    }

    /// Largest `‖Hv - εv‖ / max(1, |ε|)` over all pairs.
    pub fn max_residual(&self, eval: &DensityEvaluator, phi: &RealField) -> f64 {
        let h = eval.real_hamiltonian(phi);
        let hu = h.as_ref() * self.vectors.as_ref();
        let n = self.eigenvalues.len();
        let mut worst: f64 = 0.0;
        for c in 0..n {
            let e = self.eigenvalues[c];
            let mut ss = 0.0;
            for r in 0..n {
                let d = hu.read(r, c) - e * self.vectors.read(r, c);
                ss += d * d;
            }
            worst = worst.max(libm::sqrt(ss) / e.abs().max(1.0));
        }
        worst
    }

    /// Largest `|⟨u_i, u_j⟩ - δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.vectors.transpose() * self.vectors.as_ref();
        let n = g.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g.read(i, j) - target).abs());
            }
        }
        worst
    }
}

/// Reusable density evaluator for one grid.
#[derive(Debug, Clone)]
pub struct DensityEvaluator {
    grid: Grid,
    // One-dimensional spectral Laplacian, M×M row-major.
    t1: Vec<f64>,
}

impl DensityEvaluator {
    pub fn new(grid: &Grid, budget: usize) -> Result<Self> {
        check_budget(grid, budget)?;
        let m = grid.m();
        let h = grid.spacing();
        let g: Vec<f64> = (0..m).map(|j| grid.momentum_unit() * grid.fold(j) as f64).collect();
        let mut t1 = vec![0.0; m * m];
        for x in 0..m {
            for y in 0..m {
                let d = x as f64 - y as f64;
                t1[x * m + y] = g.iter().map(|gj| gj * gj * libm::cos(gj * d * h)).sum::<f64>() / m as f64;
            }
        }
        Ok(Self { grid: *grid, t1 })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn real_hamiltonian(&self, phi: &RealField) -> Mat<f64> {
        let m = self.grid.m();
        let n = self.grid.len();
        let t1 = &self.t1;
        let v = phi.values();
        Mat::<f64>::from_fn(n, n, |r, c| {
            let (ri, rj, rk) = (r / (m * m), (r / m) % m, r % m);
            let (ci, cj, ck) = (c / (m * m), (c / m) % m, c % m);
            let mut h = 0.0;
            if rj == cj && rk == ck {
                h += t1[ri * m + ci];
            }
            if ri == ci && rk == ck {
                h += t1[rj * m + cj];
            }
            if ri == ci && rj == cj {
                h += t1[rk * m + ck];
            }
            if r == c {
                h -= v[r];
            }
            h
        })
    }

    pub fn spectrum(&self, phi: &RealField) -> Result<HamiltonianSpectrum> {
        if *phi.grid() != self.grid {
            return Err(invalid!("potential grid does not match the evaluator grid"));
        }
        let h = self.real_hamiltonian(phi);
        let evd = h.selfadjoint_eigendecomposition(Side::Lower);
        let n = self.grid.len();
        let s = evd.s().column_vector();
        let mut eigenvalues: Vec<f64> = (0..n).map(|i| s.read(i)).collect();
        // Cheap consistency check: Σε = tr H.
        let trace: f64 = (0..n).map(|i| h.read(i, i)).sum();
        let sum: f64 = eigenvalues.iter().sum();
        let scale: f64 = eigenvalues.iter().map(|e| e.abs()).sum::<f64>().max(1.0);
        if !(sum.is_finite() && (sum - trace).abs() <= 1e-10 * scale) {
            return Err(Error::Eigensolver { residual: (sum - trace).abs() / scale, tolerance: 1e-10 });
        }
        let mut vectors = evd.u().to_owned();
        if eigenvalues.windows(2).any(|w| w[1] < w[0]) {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
            vectors = Mat::from_fn(n, n, |r, c| vectors.read(r, order[c]));
            eigenvalues = order.iter().map(|&i| eigenvalues[i]).collect();
        }
        Ok(HamiltonianSpectrum { eigenvalues, vectors })
    }

    /// `ρ[φ](x) = Σ_n f_FD(β(ε_n - μ)) u_n(x)² / h³` at the chemical potential
    /// in `params`.
    pub fn rho(&self, phi: &RealField, params: &PhysParams) -> Result<RealField> {
        params.validate()?;
        if phi.values().iter().all(|&v| v == 0.0) {
            // Jellium: the spectrum is |G|² and the density is uniform.
            let c = density_a_discrete(params.mu, params.beta, &self.grid);
            return Ok(RealField::constant(self.grid, c));
        }
        let spec = self.spectrum(phi)?;
        Ok(density_from_spectrum(&spec, params, &self.grid))
    }
}

fn density_from_spectrum(spec: &HamiltonianSpectrum, params: &PhysParams, grid: &Grid) -> RealField {
    let n = grid.len();
    let occ: Vec<f64> = spec.eigenvalues.iter().map(|&e| occupation(params.beta, params.mu, e)).collect();
    let inv_dv = 1.0 / grid.point_volume();
    let mut rho = vec![0.0; n];
    for (c, &f) in occ.iter().enumerate() {
        if f == 0.0 {
            continue;
        }
        let col = spec.vectors.col(c);
        for (r, slot) in rho.iter_mut().enumerate() {
            let u = col.read(r);
            *slot += f * u * u;
        }
    }
    for v in &mut rho {
        *v *= inv_dv;
    }
    RealField::new(*grid, rho).expect("density has grid length")
}

/// One-shot density with the default dense budget.
pub fn rho(phi: &RealField, params: &PhysParams) -> Result<RealField> {
    DensityEvaluator::new(phi.grid(), DEFAULT_EIG_BUDGET)?.rho(phi, params)
}

/// `N(φ) = -(ρ[φ] - ρ₀ - Mφ)` together with `ρ[φ]`, where `ρ₀ = A_h(μ)` and
/// `M` is the multiplier carried by `sym`.
pub(crate) fn nonlinearity_with_rho(
    eval: &DensityEvaluator,
    phi: &RealField,
    params: &PhysParams,
    sym: &Lsymbol,
) -> Result<(RealField, RealField)> {
    let rho = eval.rho(phi, params)?;
    if phi.values().iter().all(|&v| v == 0.0) {
        return Ok((RealField::zeros(*phi.grid()), rho));
    }
    let rho0 = density_a_discrete(params.mu, params.beta, eval.grid());
    let m_phi = apply_m(phi, sym)?;
    let n = rho.offset(-rho0).sub(&m_phi).scale(-1.0);
    Ok((n, rho))
}

pub fn nonlinearity_n(
    eval: &DensityEvaluator,
    phi: &RealField,
    params: &PhysParams,
    sym: &Lsymbol,
) -> Result<RealField> {
    nonlinearity_with_rho(eval, phi, params, sym).map(|(n, _)| n)
}

/// Default amplitude for [`extract_n2`].
pub const N2_EPSILON: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct N2Estimate {
    /// Extrapolated quadratic coefficient `N₂(φ)`.
    pub n2: RealField,
    /// `‖N₂ - N(εφ/2)/(ε/2)²‖_{L²}`.
    pub error_estimate: f64,
    /// `‖N(εφ)/ε² - N(εφ/2)/(ε/2)²‖ / ‖N₂‖`.
    pub disagreement: f64,
}

/// Quadratic term of `N` by Richardson extrapolation: with
/// `R(ε) = N(εφ)/ε² = N₂(φ) + O(ε)`, returns `2R(ε/2) - R(ε)`.
pub fn extract_n2(
    eval: &DensityEvaluator,
    phi: &RealField,
    params: &PhysParams,
    sym: &Lsymbol,
    eps: f64,
) -> Result<N2Estimate> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid!("Richardson amplitude must be positive, got {eps}"));
    }
    let coarse = nonlinearity_n(eval, &phi.scale(eps), params, sym)?.scale(1.0 / (eps * eps));
    let half = 0.5 * eps;
    let fine = nonlinearity_n(eval, &phi.scale(half), params, sym)?.scale(1.0 / (half * half));
    let n2 = fine.lin_comb(2.0, &coarse, -1.0);
    let size = norm_l2_cell(&n2);
    let disagreement = if size > 0.0 { norm_l2_cell(&fine.sub(&coarse)) / size } else { 0.0 };
    const LIMIT: f64 = 0.1;
    if disagreement > LIMIT {
        return Err(Error::Regime { disagreement, limit: LIMIT });
    }
    Ok(N2Estimate { error_estimate: norm_l2_cell(&n2.sub(&fine)), n2, disagreement })
}
