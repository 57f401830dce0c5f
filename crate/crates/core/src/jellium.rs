//! The homogeneous problem: find μ with `A(μ) = κ₀`, where
//!
//! ```text
//!   A(μ) = (1/2π²) ∫₀^∞ q² f_FD(β(q² - μ)) dq
//! ```
//!
//! is the density of the free Fermi gas, and its supercell analogue
//! `A_h(μ) = (1/L³) Σ_G f_FD(β(|G|² - μ))`.

use core::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::fermi::{occupation, occupation_divided_difference};
use crate::grid::Grid;
use crate::quad::{breakpoints, integrate, Tolerance};
use crate::roots::solve_increasing;

/// `1/(8π^{3/2})`: `A(μ) ≤ c1 e^{βμ} β^{-3/2}`.
pub const C1: f64 = 0.022_448_390_265_645_82;
/// `1/(12π²)`: `A(μ) ≥ c2 μ^{3/2}` for μ > 0.
pub const C2: f64 = 0.008_443_431_970_194_815;

/// Upper integration limit in units where the occupation is below `e^{-40}`.
pub(crate) const TAIL_DECADES: f64 = 40.0;

pub(crate) const QUAD_TOL: Tolerance = Tolerance { abs: 1e-15, rel: 1e-13, max_panels: 4000 };

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(invalid!("beta must be positive and finite, got {beta}"));
    }
    Ok(())
}

/// Momentum cutoff `Q = sqrt(max(μ,0) + 40/β)` used for the occupied band.
pub(crate) fn band_cutoff(mu: f64, beta: f64) -> f64 {
    libm::sqrt(mu.max(0.0) + TAIL_DECADES / beta)
}

/// Bound on `∫_Q^∞ q² f_FD(β(q²-μ)) dq` using `f_FD(x) ≤ e^{-x}`.
pub(crate) fn tail_bound_q2(q: f64, mu: f64, beta: f64) -> f64 {
    let decay = libm::exp(beta * (mu - q * q));
    decay * (q / (2.0 * beta) + 1.0 / (4.0 * beta * beta * q))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEstimate {
    pub value: f64,
    pub quad_error: f64,
    /// Bound on the neglected tail beyond the integration cutoff.
    pub tail_bound: f64,
}

pub fn density_a_estimate(mu: f64, beta: f64) -> Result<DensityEstimate> {
    check_beta(beta)?;
    if !mu.is_finite() {
        return Err(invalid!("mu must be finite, got {mu}"));
    }
    let q_max = band_cutoff(mu, beta);
    let pts = breakpoints(0.0, q_max, &[libm::sqrt(mu.max(0.0))]);
    let est = integrate(|q: f64| q * q * occupation(beta, mu, q * q), &pts, QUAD_TOL, "density_A")?;
    let norm = 1.0 / (2.0 * PI * PI);
    Ok(DensityEstimate {
        value: norm * est.value,
        quad_error: norm * est.error,
        tail_bound: norm * tail_bound_q2(q_max, mu, beta),
    })
}

/// Free-gas density `A(μ)` at inverse temperature β.
pub fn density_a(mu: f64, beta: f64) -> Result<f64> {
    density_a_estimate(mu, beta).map(|e| e.value)
}

/// `B(μ) = c1 e^{βμ} β^{-3/2}`, an upper bound on `A(μ)`.
pub fn upper_bound_b(mu: f64, beta: f64) -> f64 {
    C1 * libm::exp(beta * mu) * libm::pow(beta, -1.5)
}

/// `C(μ) = c2 μ^{3/2}`, a lower bound on `A(μ)` for μ > 0.
pub fn lower_bound_c(mu: f64) -> f64 {
    C2 * libm::pow(mu.max(0.0), 1.5)
}

/// Interval guaranteed to contain the solution of `A(μ) = κ₀`:
/// `((1/β) ln(κ₀β^{3/2}/c1), (κ₀/c2)^{2/3})`.
pub fn mu_bracket(kappa0: f64, beta: f64) -> Result<(f64, f64)> {
    check_beta(beta)?;
    if !(kappa0.is_finite() && kappa0 > 0.0) {
        return Err(invalid!("kappa0 must be positive and finite, got {kappa0}"));
    }
    let threshold = C1 * libm::pow(beta, -1.5);
    if kappa0 <= threshold {
        return Err(Error::Hypothesis(alloc::format!(
            "kappa0 = {kappa0} must exceed c1·beta^(-3/2) = {threshold} for a positive chemical potential"
        )));
    }
    let lo = libm::log(kappa0 * libm::pow(beta, 1.5) / C1) / beta;
    let hi = libm::pow(kappa0 / C2, 2.0 / 3.0);
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuSolution {
    pub mu: f64,
    pub bracket: (f64, f64),
    /// `A(μ)` at the returned μ.
    pub density: f64,
}

/// Chemical potential of jellium with background density κ₀.
pub fn solve_mu(kappa0: f64, beta: f64) -> Result<MuSolution> {
    let (lo, hi) = mu_bracket(kappa0, beta)?;
    let mu = solve_increasing(|m| density_a(m, beta), lo, hi, kappa0, 1e-12 * kappa0)?;
    if !(mu > lo && mu < hi) {
        return Err(Error::Internal(alloc::format!("root {mu} escaped the bracket ({lo}, {hi})")));
    }
    Ok(MuSolution { mu, bracket: (lo, hi), density: density_a(mu, beta)? })
}

/// Supercell density `A_h(μ) = (1/L³) Σ_G f_FD(β(|G|² - μ))`.
pub fn density_a_discrete(mu: f64, beta: f64, grid: &Grid) -> f64 {
    let k2 = grid.momentum_unit() * grid.momentum_unit();
    let sum: f64 = grid.shells().iter().map(|(&n2, &count)| count as f64 * occupation(beta, mu, k2 * n2 as f64)).sum();
    sum / grid.volume()
}

/// `dA_h/dμ`, which is also the zero-momentum discrete screening multiplier.
pub fn density_a_discrete_derivative(mu: f64, beta: f64, grid: &Grid) -> f64 {
    let k2 = grid.momentum_unit() * grid.momentum_unit();
    let sum: f64 = grid
        .shells()
        .iter()
        .map(|(&n2, &count)| {
            let e = k2 * n2 as f64;
            -(count as f64) * occupation_divided_difference(beta, mu, e, e)
        })
        .sum();
    sum / grid.volume()
}

/// Continuum estimate of the density carried by momenta beyond the grid's
/// largest axis momentum.
pub fn cutoff_tail(mu: f64, beta: f64, grid: &Grid) -> f64 {
    tail_bound_q2(grid.g_max(), mu, beta) / (2.0 * PI * PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteMu {
    pub mu_h: f64,
    /// `A_h(μ_h)`.
    pub density: f64,
    pub cutoff_margin: f64,
    pub tail: f64,
    /// Set when the cutoff margin is below the recommended value but the
    /// tail is still negligible.
    pub cutoff_warning: bool,
}

/// Chemical potential `μ_h` with `A_h(μ_h) = κ₀` on the supercell.
pub fn calibrate_mu_discrete(kappa0: f64, beta: f64, grid: &Grid) -> Result<DiscreteMu> {
    let continuum = solve_mu(kappa0, beta)?;
    let check_tail = |mu: f64| {
        let tail = cutoff_tail(mu, beta, grid);
        if tail > 1e-10 * kappa0 {
            return Err(invalid!(
                "grid cutoff too low: momenta beyond |G_max| = {:.4} carry an estimated density {tail:e} > 1e-10·kappa0; refine n_pts",
                grid.g_max()
            ));
        }
        Ok(tail)
    };
    check_tail(continuum.mu)?;
    let g = |m: f64| Ok(density_a_discrete(m, beta, grid));
    let (mut lo, mut hi) = (continuum.mu - 1.0, continuum.mu + 1.0);
    let mut width = 1.0;
    for _ in 0..200 {
        if g(lo)? < kappa0 {
            break;
        }
        width *= 2.0;
        lo -= width;
    }
    width = 1.0;
    for _ in 0..200 {
        if g(hi)? > kappa0 {
            break;
        }
        width *= 2.0;
        hi += width;
    }
    let mu_h = solve_increasing(g, lo, hi, kappa0, 1e-14 * kappa0)?;
    let tail = check_tail(mu_h)?;
    let margin = grid.cutoff_margin(beta, mu_h);
    Ok(DiscreteMu {
        mu_h,
        density: density_a_discrete(mu_h, beta, grid),
        cutoff_margin: margin,
        tail,
        cutoff_warning: margin <= crate::grid::CUTOFF_MARGIN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match_closed_forms() {
        assert!((C1 - 1.0 / (8.0 * libm::pow(PI, 1.5))).abs() < 1e-17);
        assert!((C2 - 1.0 / (12.0 * PI * PI)).abs() < 1e-17);
    }

    #[test]
    fn low_temperature_limit_is_twice_the_lower_bound() {
        // Filled Fermi sphere μ^{3/2}/(6π²); the bound only uses f ≥ ½ below μ.
        // The Sommerfeld correction is O((βμ)^-2).
        let (mu, beta) = (1.0, 200.0);
        let a = density_a(mu, beta).unwrap();
        assert!((a / (2.0 * lower_bound_c(mu)) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn bracket_rejects_low_density() {
        let beta = 1.0;
        let err = mu_bracket(0.9 * C1, beta).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
    }
}
