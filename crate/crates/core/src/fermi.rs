//! Fermi-Dirac occupation and its divided differences.

/// `f_FD(x) = 1 / (1 + eˣ)`, evaluated without overflow.
#[inline]
pub fn fermi_dirac(x: f64) -> f64 {
    if x > 0.0 {
        let e = libm::exp(-x);
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + libm::exp(x))
    }
}

/// Occupation of a level at energy `eps`: `f_FD(β(ε - μ))`.
#[inline]
pub fn occupation(beta: f64, mu: f64, eps: f64) -> f64 {
    fermi_dirac(beta * (eps - mu))
}

/// Divided difference `(g(ε₁) - g(ε₂)) / (ε₁ - ε₂)` of `g(ε) = f_FD(β(ε - μ))`,
/// equal to `g'(ε)` on the diagonal. Always ≤ 0.
///
/// Uses `f(x) - f(y) = -expm1(x - y) f(x) f(-y)` with `x ≤ y`, which has no
/// cancellation for nearly equal arguments and no overflow for distant ones.
pub fn occupation_divided_difference(beta: f64, mu: f64, e1: f64, e2: f64) -> f64 {
    let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
    let x = beta * (lo - mu);
    let y = beta * (hi - mu);
    let d = x - y;
    let ratio = if d.abs() < 1e-5 { 1.0 + d * (0.5 + d / 6.0) } else { libm::expm1(d) / d };
    -beta * ratio * fermi_dirac(x) * fermi_dirac(-y)
}
