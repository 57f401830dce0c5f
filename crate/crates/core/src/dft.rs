//! Separable discrete Fourier transform on small cubic grids.
//!
//! Grids here have at most a few dozen points per edge, so a direct
//! per-axis transform with a twiddle table is fast enough and keeps the
//! crate free of an FFT dependency.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

pub(crate) struct Dft3 {
    m: usize,
    // e^{-2πi t/m} for t in 0..m
    twiddle: Vec<Complex64>,
}

impl Dft3 {
    pub(crate) fn new(m: usize) -> Self {
        let twiddle = (0..m)
            .map(|t| {
                let ang = -2.0 * PI * t as f64 / m as f64;
                Complex64::new(libm::cos(ang), libm::sin(ang))
            })
            .collect();
        Self { m, twiddle }
    }

    /// In-place unnormalised transform, `Σ_x f(x) e^{∓2πi k·x/m}`
    /// (minus sign when `inverse` is false).
    pub(crate) fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let m = self.m;
        debug_assert_eq!(data.len(), m * m * m);
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        let strides = [m * m, m, 1];
        for (axis, &stride) in strides.iter().enumerate() {
            let others: [usize; 2] = match axis {
                0 => [m, 1],
                1 => [m * m, 1],
                _ => [m * m, m],
            };
            for u in 0..m {
                for v in 0..m {
                    let base = u * others[0] + v * others[1];
                    for (t, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + t * stride];
                    }
                    self.line(&line, &mut out, inverse);
                    for (t, val) in out.iter().enumerate() {
                        data[base + t * stride] = *val;
                    }
                }
            }
        }
    }

    fn line(&self, input: &[Complex64], out: &mut [Complex64], inverse: bool) {
        let m = self.m;
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, val) in input.iter().enumerate() {
                let w = self.twiddle[(k * x) % m];
                acc += val * if inverse { w.conj() } else { w };
            }
            *o = acc;
        }
    }
}
