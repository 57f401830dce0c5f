use crate::error::{invalid, Result};
use crate::jellium::C1;

/// Physical parameters: inverse temperature, chemical potential and the mean
/// background density, all in units ℏ = 2m = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    pub beta: f64,
    pub mu: f64,
    pub kappa0: f64,
}

impl PhysParams {
    pub fn new(beta: f64, mu: f64, kappa0: f64) -> Result<Self> {
        let p = Self { beta, mu, kappa0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(invalid!("beta must be positive and finite, got {}", self.beta));
        }
        if !self.mu.is_finite() {
            return Err(invalid!("mu must be finite, got {}", self.mu));
        }
        if !(self.kappa0.is_finite() && self.kappa0 > 0.0) {
            return Err(invalid!("kappa0 must be positive and finite, got {}", self.kappa0));
        }
        Ok(())
    }

    pub fn with_mu(self, mu: f64) -> Self {
        Self { mu, ..self }
    }

    /// Threshold `c1 β^{-3/2}` that κ₀ must exceed for a positive jellium μ.
    pub fn kappa0_threshold(&self) -> f64 {
        C1 * libm::pow(self.beta, -1.5)
    }

    pub fn satisfies_jellium_hypothesis(&self) -> bool {
        self.kappa0 > self.kappa0_threshold()
    }

    /// Coercivity scale `m_* = min(μ, √μ)`; only meaningful for μ > 0.
    pub fn m_star(&self) -> f64 {
        self.mu.min(libm::sqrt(self.mu))
    }
}
