//! Screened fixed-point solver for the positive-temperature reduced
//! Hartree-Fock (REHF) equation
//!
//! ```text
//!   -(1/4π) Δφ = κ - den f_FD(β(-Δ - φ - μ))
//! ```
//!
//! on periodic cubic supercells, with an Anderson-type disordered background
//! charge κ. Units are ℏ = 2m = 1 with Poisson prefactor 4π.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`]: supercell grids, real and spectral fields, discrete norms.
//! * [`jellium`]: the homogeneous problem, solved for the chemical potential.
//! * [`screening`]: the screening multiplier `m(p)`, its contour-integral
//!   cross-check, and the preconditioner symbol `L̂(p) = p²/4π + m(p)`.
//! * [`disorder`]: Anderson background charges `κ(x) = Σ q_ℓ χ(x - ℓ)`.
//! * [`density`]: the electron density of `-Δ - φ` by dense diagonalisation
//!   and the nonlinear remainder `N(φ)`.
//! * [`solver`]: the contraction iteration `φ ← L⁻¹(κ' + N(φ))`.
//!
//! The crate builds without `std` (it needs `alloc`); the default `std`
//! feature only turns on runtime SIMD dispatch inside the eigensolver.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod dft;
mod roots;

pub mod density;
pub mod disorder;
pub mod error;
pub mod fermi;
pub mod grid;
pub mod jellium;
pub mod params;
pub mod quad;
pub mod screening;
pub mod solver;

pub use density::{
    build_hamiltonian, extract_n2, nonlinearity_n, rho, DensityEvaluator, HamiltonianSpectrum, N2Estimate,
    SpectralHamiltonian, DEFAULT_EIG_BUDGET,
};
pub use disorder::{norm_kappa_prime, sample, DisorderRealization, DisorderSpec, KappaPrimeNorms};
pub use error::{Error, ErrorCategory, Result};
pub use grid::{
    norm_h2_cell, norm_l2_cell, shift_lattice, to_real, to_spectral, translate, unit_cell_l2_norms, Grid, RealField,
    SpectralField,
};
pub use jellium::{calibrate_mu_discrete, density_a, density_a_discrete, solve_mu, DiscreteMu, MuSolution};
pub use params::PhysParams;
pub use screening::{
    apply_l, apply_l_inverse, apply_m, build_l_symbol, build_l_symbol_discrete, build_symbol, m_contour,
    m_contour_oracle, m_discrete, m_of_p, Lsymbol, MultiplierSource, ScreeningTable,
};
pub use solver::{
    linear_response, physical_residual, solve, solve_multi_init, SolveConfig, SolveReport, SolveSetup,
    UniquenessVerdict,
};
