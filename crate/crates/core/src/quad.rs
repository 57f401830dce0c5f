//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! Panels are refined in order of decreasing error estimate until the total
//! estimate falls below `max(abs_tol, rel_tol·|I|)`. Integrands may be real or
//! complex; complex integrals are refined on the modulus of the error.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn modulus(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        libm::hypot(self.re, self.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-13, rel: 1e-12, max_panels: 4000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron = kron + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    (kron, (kron - gauss).modulus())
}

/// Integrates `f` over `[points[0], points[last]]`, using every entry of
/// `points` as an initial panel boundary. `points` must be increasing.
pub fn integrate<T, F>(f: F, points: &[f64], tol: Tolerance, context: &'static str) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if points.len() < 2 || points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(alloc::format!(
            "{context}: quadrature breakpoints must be strictly increasing"
        )));
    }
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        let (value, error) = kronrod(&f, w[0], w[1]);
        heap.push(Panel { a: w[0], b: w[1], value, error });
    }
    loop {
        let (total, err) = heap.iter().fold((T::zero(), 0.0), |(v, e), p| (v + p.value, e + p.error));
        let target = tol.abs.max(tol.rel * total.modulus());
        if err <= target {
            return Ok(Estimate { value: total, error: err, panels: heap.len() });
        }
        let worst = heap.pop().expect("non-empty panel heap");
        let mid = 0.5 * (worst.a + worst.b);
        let exhausted = heap.len() + 2 > tol.max_panels || !(mid > worst.a && mid < worst.b);
        if exhausted {
            // Accept a residual at the roundoff floor of the integrand.
            let floor = 64.0 * f64::EPSILON * total.modulus().max(tol.abs);
            if err <= floor {
                heap.push(worst);
                return Ok(Estimate { value: total, error: err, panels: heap.len() });
            }
            return Err(Error::Quadrature { context, estimate: err, panels: heap.len() + 1 });
        }
        let (lv, le) = kronrod(&f, worst.a, mid);
        let (rv, re) = kronrod(&f, mid, worst.b);
        heap.push(Panel { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Panel { a: mid, b: worst.b, value: rv, error: re });
    }
}

/// Sorted, deduplicated breakpoints from `[lo, hi]` plus any interior hints.
pub fn breakpoints(lo: f64, hi: f64, hints: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = Vec::with_capacity(hints.len() + 2);
    pts.push(lo);
    for &h in hints {
        if h.is_finite() && h > lo && h < hi {
            pts.push(h);
        }
    }
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    let scale = (hi - lo).abs().max(1.0);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * scale);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kronrod_rule_is_exact_for_degree_22() {
        for deg in 0..=22 {
            let (v, _) = kronrod(&|x: f64| libm::pow(x, deg as f64), 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((v - exact).abs() < 1e-14, "degree {deg}: {v} vs {exact}");
        }
    }

    #[test]
    fn gauss_rule_error_vanishes_through_degree_13() {
        for deg in 0..=13 {
            let (_, e) = kronrod(&|x: f64| libm::pow(x, deg as f64), -1.0, 2.0);
            assert!(e < 1e-12, "degree {deg}: {e}");
        }
    }

    #[test]
    fn adaptive_handles_endpoint_log_singularity() {
        let est = integrate(|x: f64| libm::log(x), &[0.0, 1.0], Tolerance::default(), "test").unwrap();
        assert!((est.value + 1.0).abs() < 1e-11);
    }

    #[test]
    fn complex_integrand() {
        // ∫₀^π e^{ix} dx = 2i
        let est = integrate(
            |x: f64| Complex64::new(libm::cos(x), libm::sin(x)),
            &[0.0, core::f64::consts::PI],
            Tolerance::default(),
            "test",
        )
        .unwrap();
        assert!(est.value.re.abs() < 1e-13 && (est.value.im - 2.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_unsorted_breakpoints() {
        assert!(integrate(|x: f64| x, &[1.0, 0.0], Tolerance::default(), "test").is_err());
    }

    #[test]
    fn reports_failure_when_panel_budget_is_exhausted() {
        let tol = Tolerance { abs: 1e-15, rel: 0.0, max_panels: 4 };
        let err = integrate(|x: f64| libm::sin(1.0 / x), &[1e-6, 1.0], tol, "test").unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }
}
