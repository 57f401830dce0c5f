//! Screened fixed-point iteration
//!
//! ```text
//!   φ ← (1 - α)φ + α L⁻¹(κ' + N(φ)),    N(φ) = -(ρ[φ] - ρ₀ - Mφ),
//! ```
//!
//! at the grid-calibrated chemical potential μ_h. Because the same `M`
//! appears in `L` and `N`, a fixed point satisfies the discrete equation
//! `(-Δ/4π)φ = κ - ρ[φ]` exactly.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::density::{nonlinearity_with_rho, DensityEvaluator};
use crate::disorder::{norm_kappa_prime, DisorderRealization};
use crate::error::{invalid, Error, Result};
use crate::grid::{apply_multiplier, norm_h2_cell, norm_l2_cell, Grid, RealField};
use crate::jellium::{calibrate_mu_discrete, solve_mu, DiscreteMu};
use crate::params::PhysParams;
use crate::screening::{apply_l_inverse, build_symbol, Lsymbol, MultiplierSource};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    /// Tolerance on `‖φ_{k+1} - φ_k‖_{H²}`.
    pub tol_delta: f64,
    /// Tolerance on the L² residual of the discrete equation.
    pub tol_residual: f64,
    pub max_iter: usize,
    pub mixing: f64,
    /// Evaluate the residual at `(φ + t, μ_h - t)` after convergence.
    pub gauge_shift: Option<f64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { tol_delta: 1e-9, tol_residual: 1e-8, max_iter: 200, mixing: 1.0, gauge_shift: None }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_delta > 0.0 && self.tol_residual > 0.0) {
            return Err(invalid!("solver tolerances must be positive"));
        }
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return Err(invalid!("mixing must lie in (0, 1], got {}", self.mixing));
        }
        if self.max_iter == 0 {
            return Err(invalid!("max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// Everything a solve needs that does not depend on the realization.
#[derive(Debug, Clone)]
pub struct SolveSetup {
    /// Parameters at the calibrated chemical potential μ_h.
    pub params: PhysParams,
    /// Continuum jellium chemical potential.
    pub mu: f64,
    pub discrete: DiscreteMu,
    pub symbol: Lsymbol,
    pub evaluator: DensityEvaluator,
}

impl SolveSetup {
    pub fn new(grid: &Grid, beta: f64, kappa0: f64, source: MultiplierSource, eig_budget: usize) -> Result<Self> {
        let mu = solve_mu(kappa0, beta)?.mu;
        let discrete = calibrate_mu_discrete(kappa0, beta, grid)?;
        let params = PhysParams::new(beta, discrete.mu_h, kappa0)?;
        let evaluator = DensityEvaluator::new(grid, eig_budget)?;
        let symbol = build_symbol(grid, &params, source)?;
        Ok(Self { params, mu, discrete, symbol, evaluator })
    }

    pub fn grid(&self) -> &Grid {
        self.evaluator.grid()
    }

    /// Same setup with a different symbol, e.g. a deliberately perturbed one.
    pub fn with_symbol(&self, symbol: Lsymbol) -> Result<Self> {
        symbol.check_grid(self.grid())?;
        Ok(Self { symbol, ..self.clone() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `‖φ_{k+1} - φ_k‖_{H²}` per update.
    pub step_norms: Vec<f64>,
    /// Successive step ratios.
    pub ratios: Vec<f64>,
    pub residual: f64,
    pub phi_l2: f64,
    pub phi_h2: f64,
    pub kappa_prime_l2: f64,
    pub kappa_prime_max_cell: f64,
    pub mu: f64,
    pub mu_h: f64,
    /// Supercell mean of `κ - ρ[φ]`.
    pub neutrality: f64,
    pub converged: bool,
    /// Change of the residual under `(φ, μ_h) → (φ + t, μ_h - t)`, if requested.
    pub gauge: Option<f64>,
    pub warnings: Vec<String>,
}

impl SolveReport {
    /// Largest ratio over the last five steps.
    pub fn tail_ratio_max(&self) -> f64 {
        let k = self.ratios.len().saturating_sub(5);
        self.ratios[k..].iter().copied().fold(0.0, f64::max)
    }

    pub fn ratio_max(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

/// `‖(-Δ/4π)φ - (κ - ρ)‖_{L²}` given `ρ = ρ[φ]`.
fn residual_from_rho(phi: &RealField, kappa: &RealField, rho: &RealField) -> f64 {
    let lap: Vec<f64> = phi.grid().g2_table().iter().map(|g2| g2 / (4.0 * PI)).collect();
    let lhs = apply_multiplier(phi, &lap);
    norm_l2_cell(&lhs.sub(&kappa.sub(rho)))
}

/// Residual of the discrete equation at `φ` with chemical potential `mu`.
pub fn physical_residual(setup: &SolveSetup, kappa: &RealField, phi: &RealField, mu: f64) -> Result<f64> {
    let rho = setup.evaluator.rho(phi, &setup.params.with_mu(mu))?;
    Ok(residual_from_rho(phi, kappa, &rho))
}

pub fn solve(
    realization: &DisorderRealization,
    setup: &SolveSetup,
    cfg: &SolveConfig,
    phi0: &RealField,
) -> Result<(RealField, SolveReport)> {
    cfg.validate()?;
    let grid = setup.grid();
    if realization.grid() != grid || phi0.grid() != grid {
        return Err(invalid!("realization, initial guess and setup use different grids"));
    }
    if (realization.kappa0 - setup.params.kappa0).abs() > 1e-12 * setup.params.kappa0 {
        return Err(invalid!(
            "realization mean density {} differs from the calibrated kappa0 {}",
            realization.kappa0,
            setup.params.kappa0
        ));
    }
    let mut warnings = Vec::new();
    if cfg.mixing < 1.0 {
        warnings.push(format!("mixing {} < 1: outside the strict-contraction regime", cfg.mixing));
    }
    if setup.discrete.cutoff_warning {
        warnings.push(format!("cutoff margin {:.1} below the recommended 30", setup.discrete.cutoff_margin));
    }
    let kappa = &realization.kappa;
    let kp = &realization.kappa_prime;
    let norms = norm_kappa_prime(realization);

    let mut phi = phi0.clone();
    let mut steps: Vec<f64> = Vec::new();
    let mut ratios: Vec<f64> = Vec::new();
    let mut first_step: Option<f64> = None;
    for k in 0..=cfg.max_iter {
        let (n, rho) = nonlinearity_with_rho(&setup.evaluator, &phi, &setup.params, &setup.symbol)?;
        let residual = residual_from_rho(&phi, kappa, &rho);
        let small_step = steps.last().is_some_and(|&d| d <= cfg.tol_delta);
        if small_step && residual <= cfg.tol_residual {
            let neutrality = kappa.sub(&rho).mean();
            let gauge = match cfg.gauge_shift {
                Some(t) => {
                    let shifted = physical_residual(setup, kappa, &phi.offset(t), setup.params.mu - t)?;
                    Some((shifted - residual).abs())
                }
                None => None,
            };
            let mut report = SolveReport {
                iterations: k,
                step_norms: steps,
                ratios,
                residual,
                phi_l2: norm_l2_cell(&phi),
                phi_h2: norm_h2_cell(&phi),
                kappa_prime_l2: norms.per_supercell,
                kappa_prime_max_cell: norms.max_per_unit_cell,
                mu: setup.mu,
                mu_h: setup.params.mu,
                neutrality,
                converged: true,
                gauge,
                warnings,
            };
            if report.ratio_max() > 0.5 {
                report
                    .warnings
                    .push(format!("contraction ratio reached {:.3}; disorder may be too large", report.ratio_max()));
            }
            return Ok((phi, report));
        }
        if k == cfg.max_iter {
            break;
        }
        let target = apply_l_inverse(&kp.add(&n), &setup.symbol)?;
        let next = phi.lin_comb(1.0 - cfg.mixing, &target, cfg.mixing);
        let d = norm_h2_cell(&next.sub(&phi));
        if let Some(&prev) = steps.last() {
            if prev > 0.0 {
                ratios.push(d / prev);
            }
        }
        steps.push(d);
        match first_step {
            None if d > 0.0 => first_step = Some(d),
            Some(f) if d > 10.0 * f => {
                return Err(Error::Divergence { iteration: k + 1, first: f, current: d, ratios });
            }
            _ => {}
        }
        if !d.is_finite() {
            return Err(Error::Divergence { iteration: k + 1, first: first_step.unwrap_or(0.0), current: d, ratios });
        }
        phi = next;
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iter,
        last_step: steps.last().copied().unwrap_or(f64::NAN),
        ratios,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessVerdict {
    /// Largest `‖φ_i - φ_j‖_{H²}` over converged solutions.
    pub max_pairwise_distance: f64,
    pub unique: bool,
    pub reports: Vec<SolveReport>,
}

/// Tolerance for calling two solutions identical.
pub const UNIQUENESS_TOL: f64 = 1e-6;

/// Solves from each initial guess and compares the limits. Every guess must
/// lie in the ball `‖φ₀‖_{H²} ≤ ball`.
pub fn solve_multi_init(
    realization: &DisorderRealization,
    setup: &SolveSetup,
    cfg: &SolveConfig,
    inits: &[RealField],
    ball: f64,
) -> Result<UniquenessVerdict> {
    if inits.is_empty() {
        return Err(invalid!("at least one initial guess is required"));
    }
    let mut sols = Vec::with_capacity(inits.len());
    let mut reports = Vec::with_capacity(inits.len());
    for (index, init) in inits.iter().enumerate() {
        let r = norm_h2_cell(init);
        if r > ball {
            return Err(invalid!("initial guess {index} has H² norm {r:e} outside the ball of radius {ball:e}"));
        }
        let (phi, rep) = solve(realization, setup, cfg, init)
            .map_err(|e| Error::Member { index, source: alloc::boxed::Box::new(e) })?;
        sols.push(phi);
        reports.push(rep);
    }
    let mut worst: f64 = 0.0;
    for i in 0..sols.len() {
        for j in i + 1..sols.len() {
            worst = worst.max(norm_h2_cell(&sols[i].sub(&sols[j])));
        }
    }
    Ok(UniquenessVerdict { max_pairwise_distance: worst, unique: worst < UNIQUENESS_TOL, reports })
}

/// Linear response `L⁻¹κ'`.
pub fn linear_response(realization: &DisorderRealization, setup: &SolveSetup) -> Result<RealField> {
    apply_l_inverse(&realization.kappa_prime, &setup.symbol)
}
