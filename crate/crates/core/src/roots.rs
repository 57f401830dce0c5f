use crate::error::{Error, Result};

/// Solves `g(x) = target` for an increasing `g` on a bracket `[lo, hi]`
/// with `g(lo) < target < g(hi)`: bisection down to a width of `1e-3`, then
/// a safeguarded secant polish.
///
/// Stops when `|g(x) - target| <= tol` or the bracket has collapsed to a
/// few ulps.
pub(crate) fn solve_increasing<G>(g: G, lo: f64, hi: f64, target: f64, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let mut ga = g(a)? - target;
    let mut gb = g(b)? - target;
    if !(ga < 0.0 && gb > 0.0) {
        return Err(Error::Internal(alloc::format!(
            "root bracket [{lo}, {hi}] does not straddle the target (residuals {ga:e}, {gb:e})"
        )));
    }
    while b - a > 1e-3 {
        let m = 0.5 * (a + b);
        let gm = g(m)? - target;
        if gm.abs() <= tol {
            return Ok(m);
        }
        if gm < 0.0 {
            a = m;
            ga = gm;
        } else {
            b = m;
            gb = gm;
        }
    }
    for _ in 0..200 {
        let mut x = b - gb * (b - a) / (gb - ga);
        // Keep the secant point well inside the bracket.
        let margin = 0.01 * (b - a);
        if !(x > a + margin && x < b - margin) {
            x = 0.5 * (a + b);
        }
        let gx = g(x)? - target;
        if gx.abs() <= tol {
            return Ok(x);
        }
        if gx < 0.0 {
            a = x;
            ga = gx;
        } else {
            b = x;
            gb = gx;
        }
        if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            return Ok(if ga.abs() < gb.abs() { a } else { b });
        }
    }
    Err(Error::Internal(alloc::format!("root polish did not reach tolerance {tol:e} on [{a}, {b}]")))
}
