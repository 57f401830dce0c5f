//! The screening multiplier and the linearised operator `L = -Δ/4π + M`.
//!
//! For a momentum `p > 0` the multiplier of the free gas is
//!
//! ```text
//!   m(p) = 1/(8π² p) ∫₀^∞ ln|(√(4t) + p)/(√(4t) - p)| f_FD(β(t - μ)) dt
//! ```
//!
//! with limit `m(0) = (1/8π²) ∫₀^∞ t^{-1/2} f_FD(β(t - μ)) dt = dA/dμ`.
//! [`m_contour`] evaluates the same quantity from a contour integral in the
//! complex energy plane and serves as an independent cross-check.
//!
//! On a supercell the exact linear response of the discrete density is a
//! lattice sum `m_h`, see [`m_discrete`]. [`Lsymbol`] can be assembled from
//! either.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fermi::{occupation, occupation_divided_difference};
use crate::grid::{apply_multiplier, Grid, RealField};
use crate::jellium::{band_cutoff, TAIL_DECADES};
use crate::params::PhysParams;
use crate::quad::{breakpoints, integrate, Tolerance};

const TOL: Tolerance = Tolerance { abs: 1e-15, rel: 1e-12, max_panels: 4000 };

/// `∫₀^{q_max} q ln|(2q+p)/(2q-p)| w(q) dq` for `p > 0`.
///
/// The logarithmic singularity at `q = p/2` is removed by substituting
/// `q = (p/2)(1 ∓ u²)` on either side of it.
fn kernel_integral<W: Fn(f64) -> f64>(p: f64, q_max: f64, hint: f64, w: W) -> Result<f64> {
    let s = 0.5 * p;
    if s >= q_max {
        let pts = breakpoints(0.0, q_max, &[hint]);
        let f = |q: f64| q * libm::log1p(4.0 * q / (p - 2.0 * q)) * w(q);
        return Ok(integrate(f, &pts, TOL, "screening multiplier")?.value);
    }
    let inner_hint = if hint > 0.0 && hint < s { libm::sqrt(1.0 - hint / s) } else { -1.0 };
    let inner = |u: f64| {
        let q = s * (1.0 - u * u);
        let u2 = u * u;
        q * libm::log1p((2.0 - 2.0 * u2) / u2) * w(q) * 2.0 * s * u
    };
    let a = integrate(inner, &breakpoints(0.0, 1.0, &[inner_hint]), TOL, "screening multiplier (q < p/2)")?;

    let u_max = libm::sqrt(q_max / s - 1.0);
    let outer_hint = if hint > s { libm::sqrt(hint / s - 1.0) } else { -1.0 };
    let outer = |u: f64| {
        let q = s * (1.0 + u * u);
        q * libm::log1p(2.0 / (u * u)) * w(q) * 2.0 * s * u
    };
    let b = integrate(outer, &breakpoints(0.0, u_max, &[outer_hint]), TOL, "screening multiplier (q > p/2)")?;
    Ok(a.value + b.value)
}

fn check_p(p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 0.0) {
        return Err(invalid!("momentum must be finite and non-negative, got {p}"));
    }
    Ok(())
}

/// Screening multiplier `m(p)` of the free gas at `(β, μ)`.
pub fn m_of_p(p: f64, params: &PhysParams) -> Result<f64> {
    check_p(p)?;
    params.validate()?;
    let PhysParams { beta, mu, .. } = *params;
    let q_max = band_cutoff(mu, beta);
    let fermi_pt = libm::sqrt(mu.max(0.0));
    if p == 0.0 {
        let pts = breakpoints(0.0, q_max, &[fermi_pt]);
        let est = integrate(|q: f64| occupation(beta, mu, q * q), &pts, TOL, "screening multiplier at p = 0")?;
        return Ok(est.value / (4.0 * PI * PI));
    }
    let v = kernel_integral(p, q_max, fermi_pt, |q| occupation(beta, mu, q * q))?;
    Ok(v / (4.0 * PI * PI * p))
}

/// The lower bound obtained by replacing `f_FD` with `½·1_{[0,μ]}`;
/// zero when μ ≤ 0.
pub fn m_minorant(p: f64, params: &PhysParams) -> Result<f64> {
    check_p(p)?;
    let mu = params.mu;
    if mu <= 0.0 {
        return Ok(0.0);
    }
    let kf = libm::sqrt(mu);
    if p == 0.0 {
        return Ok(0.5 * kf / (4.0 * PI * PI));
    }
    let v = kernel_integral(p, kf, -1.0, |_| 0.5)?;
    Ok(v / (4.0 * PI * PI * p))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourValue {
    /// Real part of the contour result, the multiplier.
    pub value: f64,
    /// Imaginary residue, zero up to quadrature error.
    pub imag: f64,
    /// Estimate of the neglected contribution beyond `Re z = μ + 40/β`.
    pub tail_bound: f64,
}

fn fermi_complex(w: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if w.re > 0.0 {
        let e = (-w).exp();
        e / (one + e)
    } else {
        one / (one + w.exp())
    }
}

/// `arctan(w) = (i/2)(ln(1 - iw) - ln(1 + iw))` with principal logarithms.
fn arctan_principal(w: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    i * 0.5 * ((one - i * w).ln() - (one + i * w).ln())
}

/// Multiplier from the contour integral
///
/// ```text
///   m(p) = -(1/8π²)(1/(ip)) ∮ f_FD(β(z - μ)) arctan(p/√(-4z)) dz
/// ```
///
/// around the positive real axis, on the rectangle-like path
/// `∞+iα → -α+iα → -α-iα → ∞-iα` truncated at `Re z = μ + 40/β`.
/// `alpha` must stay below the first Matsubara pole distance `π/β`.
pub fn m_contour(p: f64, params: &PhysParams, alpha: f64) -> Result<ContourValue> {
    params.validate()?;
    if !(p.is_finite() && p > 0.0) {
        return Err(invalid!("contour multiplier needs p > 0, got {p}"));
    }
    let PhysParams { beta, mu, .. } = *params;
    if !(alpha > 0.0 && alpha < PI / beta) {
        return Err(invalid!("contour offset {alpha} must lie in (0, π/β)"));
    }
    let f = |z: Complex64| {
        let occ = fermi_complex((z - mu) * beta);
        let root = (-4.0 * z).sqrt();
        occ * arctan_principal(Complex64::new(p, 0.0) / root)
    };
    let t_max = mu.max(0.0) + TAIL_DECADES / beta;
    let pts = breakpoints(-alpha, t_max, &[0.0, 0.25 * p * p, mu]);
    let horizontal = integrate(
        |t: f64| f(Complex64::new(t, -alpha)) - f(Complex64::new(t, alpha)),
        &pts,
        TOL,
        "contour multiplier (horizontal legs)",
    )?;
    let vertical = integrate(
        |y: f64| f(Complex64::new(-alpha, y)),
        &[-alpha, 0.0, alpha],
        TOL,
        "contour multiplier (vertical leg)",
    )?;
    let i = Complex64::new(0.0, 1.0);
    let total = horizontal.value - i * vertical.value;
    let m = total / (i * p) * (-1.0 / (8.0 * PI * PI));
    if m.im.abs() > 1e-8 * m.re.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Branch { real: m.re, imag: m.im });
    }
    // |arctan(p/√(-4z))| ≲ p/(2√t) for t ≫ p², and f_FD decays like e^{-β(t-μ)}.
    let tail = 2.0 * libm::exp(-beta * (t_max - mu)) / beta * (1.0 / libm::sqrt(t_max)) / (8.0 * PI * PI);
    Ok(ContourValue { value: m.re, imag: m.im, tail_bound: tail })
}

/// [`m_contour`] at the default offset `α = 1/(2β)`, returning the real value.
pub fn m_contour_oracle(p: f64, params: &PhysParams) -> Result<f64> {
    m_contour(p, params, 0.5 / params.beta).map(|c| c.value)
}

/// Exact linear response of the supercell density to the Fourier mode with
/// integer frequency `nu`:
/// `m_h(q) = -(1/L³) Σ_k D(|k|², |k+q|²)` where `D` is the divided difference
/// of the occupation and `k + q` is folded on the grid torus.
pub fn m_discrete(grid: &Grid, params: &PhysParams, nu: [i64; 3]) -> f64 {
    let PhysParams { beta, mu, .. } = *params;
    let m = grid.m();
    let k = grid.momentum_unit();
    let axis_e: Vec<f64> = (0..m)
        .map(|j| {
            let g = k * grid.fold(j) as f64;
            g * g
        })
        .collect();
    let shift = [grid.wrap(nu[0]), grid.wrap(nu[1]), grid.wrap(nu[2])];
    let mut sum = 0.0;
    for i in 0..m {
        let (ei, fi) = (axis_e[i], axis_e[(i + shift[0]) % m]);
        for j in 0..m {
            let (ej, fj) = (axis_e[j], axis_e[(j + shift[1]) % m]);
            for l in 0..m {
                let e1 = ei + ej + axis_e[l];
                let e2 = fi + fj + axis_e[(l + shift[2]) % m];
                sum += occupation_divided_difference(beta, mu, e1, e2);
            }
        }
    }
    -sum / grid.volume()
}

/// Sorted absolute frequency triple; `m_discrete` depends on nothing else.
fn symmetry_key(nu: [i64; 3]) -> [u64; 3] {
    let mut k = [nu[0].unsigned_abs(), nu[1].unsigned_abs(), nu[2].unsigned_abs()];
    k.sort_unstable();
    k
}

/// Tabulated multiplier with monotone (Fritsch-Carlson) cubic interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreeningTable {
    params: PhysParams,
    p_values: Vec<f64>,
    m_values: Vec<f64>,
    slopes: Vec<f64>,
}

impl ScreeningTable {
    /// Evaluates `m` at each of `p_values`, which must be strictly increasing
    /// and non-negative.
    pub fn tabulate(params: PhysParams, p_values: Vec<f64>) -> Result<Self> {
        if p_values.len() < 2 {
            return Err(invalid!("a screening table needs at least two momenta"));
        }
        if p_values[0] < 0.0 || p_values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid!("table momenta must be non-negative and strictly increasing"));
        }
        let m_values = p_values.iter().map(|&p| m_of_p(p, &params)).collect::<Result<Vec<_>>>()?;
        let slopes = pchip_slopes(&p_values, &m_values);
        Ok(Self { params, p_values, m_values, slopes })
    }

    /// `n` momenta: zero followed by `n - 1` log-spaced points on `[p_min, p_max]`.
    pub fn log_spaced(params: PhysParams, p_min: f64, p_max: f64, n: usize) -> Result<Self> {
        if !(p_min > 0.0 && p_max > p_min) || n < 3 {
            return Err(invalid!("need 0 < p_min < p_max and at least 3 points"));
        }
        let mut ps = vec![0.0];
        let r = libm::log(p_max / p_min);
        for i in 0..n - 1 {
            ps.push(p_min * libm::exp(r * i as f64 / (n - 2) as f64));
        }
        Self::tabulate(params, ps)
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }
    pub fn p_values(&self) -> &[f64] {
        &self.p_values
    }
    pub fn m_values(&self) -> &[f64] {
        &self.m_values
    }

    /// Interpolated `m(p)`; `p` must lie within the tabulated range.
    pub fn eval(&self, p: f64) -> Result<f64> {
        let xs = &self.p_values;
        let (lo, hi) = (xs[0], xs[xs.len() - 1]);
        if !(p >= lo && p <= hi) {
            return Err(invalid!("p = {p} lies outside the table range [{lo}, {hi}]"));
        }
        let k = match xs.binary_search_by(|x| x.total_cmp(&p)) {
            Ok(i) => return Ok(self.m_values[i]),
            Err(i) => i - 1,
        };
        let h = xs[k + 1] - xs[k];
        let t = (p - xs[k]) / h;
        let (y0, y1) = (self.m_values[k], self.m_values[k + 1]);
        let (d0, d1) = (self.slopes[k], self.slopes[k + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        Ok((2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * h * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * h * d1)
    }

    /// `L̂(p) = p²/4π + m(p)` from the interpolant.
    pub fn l_symbol(&self, p: f64) -> Result<f64> {
        Ok(p * p / (4.0 * PI) + self.eval(p)?)
    }

    pub fn is_positive(&self) -> bool {
        self.m_values.iter().all(|&m| m > 0.0)
    }

    pub fn is_decreasing(&self) -> bool {
        self.m_values.windows(2).all(|w| w[1] < w[0])
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let end = |h0: f64, h1: f64, m0: f64, m1: f64| {
        let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if d.signum() != m0.signum() {
            0.0
        } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
            3.0 * m0
        } else {
            d
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

/// Which multiplier an [`Lsymbol`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplierSource {
    /// Free-gas `m(|G|)`, evaluated by quadrature at each distinct `|G|`.
    Continuum,
    /// Exact supercell response `m_h(G)`.
    Discrete,
}

/// Spectral symbols of `M` and `L = -Δ/4π + M` on every grid momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct Lsymbol {
    grid: Grid,
    params: PhysParams,
    source: MultiplierSource,
    multiplier: Vec<f64>,
    symbol: Vec<f64>,
}

impl Lsymbol {
    fn assemble(grid: Grid, params: PhysParams, source: MultiplierSource, multiplier: Vec<f64>) -> Self {
        let symbol = grid.g2_table().iter().zip(&multiplier).map(|(g2, m)| g2 / (4.0 * PI) + m).collect();
        Self { grid, params, source, multiplier, symbol }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn params(&self) -> &PhysParams {
        &self.params
    }
    pub fn source(&self) -> MultiplierSource {
        self.source
    }
    /// `m` at every grid index.
    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }
    /// `L̂` at every grid index.
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }
    /// The screening mass `L̂(0) = m(0)`.
    pub fn mass(&self) -> f64 {
        self.multiplier[0]
    }

    /// Copy with the multiplier scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let m = self.multiplier.iter().map(|v| v * factor).collect();
        Self::assemble(self.grid, self.params, self.source, m)
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if *grid != self.grid {
            return Err(Error::Internal(alloc::format!("symbol tabulated for {:?} applied on {:?}", self.grid, grid)));
        }
        Ok(())
    }

    /// Smallest `L̂(G)/(|G|²/4π + m_*)` over the grid momenta.
    pub fn coercivity_ratio(&self) -> f64 {
        let m_star = self.params.m_star();
        self.grid
            .g2_table()
            .iter()
            .zip(&self.symbol)
            .map(|(g2, l)| l / (g2 / (4.0 * PI) + m_star))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Symbol with the free-gas multiplier at every distinct `|G|` of the grid.
pub fn build_l_symbol(grid: &Grid, params: &PhysParams) -> Result<Lsymbol> {
    params.validate()?;
    let k = grid.momentum_unit();
    let mut by_shell = BTreeMap::new();
    for &n2 in grid.shells().keys() {
        by_shell.insert(n2, m_of_p(k * libm::sqrt(n2 as f64), params)?);
    }
    let multiplier = (0..grid.len()).map(|i| by_shell[&grid.frequency_norm_sq(i)]).collect();
    Ok(Lsymbol::assemble(*grid, *params, MultiplierSource::Continuum, multiplier))
}

/// Symbol with the exact supercell response `m_h`.
pub fn build_l_symbol_discrete(grid: &Grid, params: &PhysParams) -> Result<Lsymbol> {
    params.validate()?;
    let mut by_key: BTreeMap<[u64; 3], f64> = BTreeMap::new();
    let mut multiplier = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let nu = grid.frequency(i);
        let m = *by_key.entry(symmetry_key(nu)).or_insert_with(|| m_discrete(grid, params, nu));
        multiplier.push(m);
    }
    Ok(Lsymbol::assemble(*grid, *params, MultiplierSource::Discrete, multiplier))
}

pub fn build_symbol(grid: &Grid, params: &PhysParams, source: MultiplierSource) -> Result<Lsymbol> {
    match source {
        MultiplierSource::Continuum => build_l_symbol(grid, params),
        MultiplierSource::Discrete => build_l_symbol_discrete(grid, params),
    }
}

pub fn apply_l(f: &RealField, sym: &Lsymbol) -> Result<RealField> {
    sym.check_grid(f.grid())?;
    Ok(apply_multiplier(f, &sym.symbol))
}

pub fn apply_m(f: &RealField, sym: &Lsymbol) -> Result<RealField> {
    sym.check_grid(f.grid())?;
    Ok(apply_multiplier(f, &sym.multiplier))
}

/// `L⁻¹ r`, well defined on the zero mode because `L̂(0) = m(0) > 0`.
pub fn apply_l_inverse(r: &RealField, sym: &Lsymbol) -> Result<RealField> {
    sym.check_grid(r.grid())?;
    if let Some(i) = sym.symbol.iter().position(|&l| !(l > 0.0)) {
        return Err(Error::Internal(alloc::format!("symbol is not positive at grid index {i}")));
    }
    let inv: Vec<f64> = sym.symbol.iter().map(|l| 1.0 / l).collect();
    Ok(apply_multiplier(r, &inv))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoercivityScan {
    /// `min_p L̂(p)/(p²/4π + m_*)`.
    pub min_ratio: f64,
    pub argmin: f64,
}

/// Scans `L̂(p)/(p²/4π + m_*)` over the given momenta (μ must be positive).
pub fn coercivity_scan(params: &PhysParams, p_values: &[f64]) -> Result<CoercivityScan> {
    if params.mu <= 0.0 {
        return Err(Error::Hypothesis(alloc::format!("coercivity scale m_* needs mu > 0, got {}", params.mu)));
    }
    let m_star = params.m_star();
    let mut best = CoercivityScan { min_ratio: f64::INFINITY, argmin: f64::NAN };
    for &p in p_values {
        let kin = p * p / (4.0 * PI);
        let r = (kin + m_of_p(p, params)?) / (kin + m_star);
        if r < best.min_ratio {
            best = CoercivityScan { min_ratio: r, argmin: p };
        }
    }
    Ok(best)
}
