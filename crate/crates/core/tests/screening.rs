use std::f64::consts::PI;

use rehf_core::jellium::density_a_discrete_derivative;
use rehf_core::screening::{coercivity_scan, m_contour, m_minorant};
use rehf_core::{
    apply_l, apply_l_inverse, build_l_symbol, build_l_symbol_discrete, density_a, m_contour_oracle, m_discrete, m_of_p,
    Grid, Lsymbol, PhysParams, RealField, ScreeningTable,
};

fn params(beta: f64, mu: f64) -> PhysParams {
    PhysParams::new(beta, mu, 1.0).unwrap()
}

fn fd_compressibility(beta: f64, mu: f64) -> f64 {
    let h = 1e-5;
    (density_a(mu + h, beta).unwrap() - density_a(mu - h, beta).unwrap()) / (2.0 * h)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn zero_momentum_limit_is_compressibility() {
    for beta in [0.5, 1.0, 2.0] {
        for mu in [0.5, 1.0, 2.0] {
            let m0 = m_of_p(0.0, &params(beta, mu)).unwrap();
            let d = fd_compressibility(beta, mu);
            assert!(rel(m0, d) < 1e-6, "beta={beta} mu={mu}: {m0} vs {d}");
        }
    }
}

#[test]
fn small_p_approaches_zero_momentum_value() {
    let p = params(1.0, 1.0);
    let m0 = m_of_p(0.0, &p).unwrap();
    assert!(rel(m_of_p(1e-4, &p).unwrap(), m0) < 1e-6);
}

#[test]
fn large_momentum_asymptotics() {
    let p = params(1.0, 1.0);
    let kappa0 = density_a(1.0, 1.0).unwrap();
    let big = 100.0;
    let v = big * big * m_of_p(big, &p).unwrap();
    assert!(rel(v, 2.0 * kappa0) < 1e-3);
    let c = 50.0;
    let v = c * c * m_contour_oracle(c, &p).unwrap();
    assert!(rel(v, 2.0 * kappa0) < 5e-3);
}

#[test]
fn contour_oracle_agrees_with_closed_form() {
    let p = params(1.0, 1.0);
    for q in [0.5, 1.0, 2.0, 4.0] {
        let a = m_of_p(q, &p).unwrap();
        let b = m_contour_oracle(q, &p).unwrap();
        assert!(rel(b, a) < 1e-6, "p={q}: {a} vs {b}");
    }
}

#[test]
fn contour_is_independent_of_offset() {
    for (beta, mu) in [(1.0, 1.0), (2.0, 0.5)] {
        let p = params(beta, mu);
        for q in [0.3, 1.7, 6.0] {
            let a = m_contour(q, &p, 0.5 / beta).unwrap();
            let b = m_contour(q, &p, 0.25 / beta).unwrap();
            assert!(rel(b.value, a.value) < 1e-7);
            assert!(a.imag.abs() < 1e-8 * a.value);
            assert!(a.tail_bound < 1e-12);
        }
    }
}

#[test]
fn contour_rejects_offset_beyond_first_pole() {
    let p = params(1.0, 1.0);
    assert!(m_contour(1.0, &p, 3.2).is_err());
}

#[test]
fn known_lindhard_values() {
    // At low temperature m(p) approaches the static Lindhard form
    // (k_F/4π²)(1/2 + (1 - x²)/(4x) ln|(1+x)/(1-x)|), x = p/(2k_F).
    let mu: f64 = 1.0;
    let p = params(400.0, mu);
    let kf = mu.sqrt();
    for q in [0.5, 1.0, 3.0] {
        let x = q / (2.0 * kf);
        let lind = kf / (4.0 * PI * PI) * (0.5 + (1.0 - x * x) / (4.0 * x) * ((1.0 + x) / (1.0 - x)).abs().ln());
        assert!(rel(m_of_p(q, &p).unwrap(), lind) < 2e-3, "p={q}");
    }
}

#[test]
fn positive_and_decreasing_on_table() {
    for beta in [0.5, 1.0, 2.0] {
        for mu in [0.5, 1.0, 2.0] {
            let t = ScreeningTable::log_spaced(params(beta, mu), 0.05, 60.0, 40).unwrap();
            assert!(t.is_positive());
            assert!(t.is_decreasing());
        }
    }
}

#[test]
fn large_p_relative_error_below_one_percent() {
    for beta in [1.0, 2.0] {
        for mu in [0.5, 1.0, 2.0] {
            let p = 20.0 * f64::max(mu, 1.0).sqrt();
            let kappa0 = density_a(mu, beta).unwrap();
            let v = p * p * m_of_p(p, &params(beta, mu)).unwrap();
            assert!(rel(v, 2.0 * kappa0) < 0.01, "beta={beta} mu={mu}");
        }
    }
}

#[test]
fn large_p_correction_decays_like_inverse_square() {
    // p²m/(2κ₀) - 1 ≈ (4/3)⟨q⁴⟩/(⟨q²⟩p²): hot gases need larger p for 1%.
    let (beta, mu) = (0.5, 0.5);
    let kappa0 = density_a(mu, beta).unwrap();
    let err = |p: f64| p * p * m_of_p(p, &params(beta, mu)).unwrap() / (2.0 * kappa0) - 1.0;
    let (e1, e2) = (err(20.0), err(40.0));
    assert!(e1 > 0.01 && e2 < 0.01);
    assert!((e1 / e2 - 4.0).abs() < 0.25, "{e1} {e2}");
}

#[test]
fn minorant_bounds_multiplier_inside_fermi_sphere() {
    for (beta, mu) in [(1.0, 1.0), (2.0, 2.0), (0.5, 0.5)] {
        let p = params(beta, mu);
        for i in 0..20 {
            let q = 2.0 * mu.sqrt() * i as f64 / 20.0;
            assert!(m_of_p(q, &p).unwrap() >= m_minorant(q, &p).unwrap());
        }
    }
}

#[test]
fn table_interpolation_is_accurate_between_nodes() {
    let p = params(1.0, 1.0);
    let t = ScreeningTable::log_spaced(p, 0.01, 50.0, 120).unwrap();
    for q in [0.37, 1.3, 2.9, 17.0] {
        assert!(rel(t.eval(q).unwrap(), m_of_p(q, &p).unwrap()) < 1e-3);
    }
    assert!(t.eval(51.0).is_err());
    assert!((t.l_symbol(0.0).unwrap() - t.m_values()[0]).abs() < 1e-15);
}

#[test]
fn coercivity_constant_is_positive_and_stable() {
    let ps: Vec<f64> = (0..=200).map(|i| 0.05 * i as f64).collect();
    let reference = coercivity_scan(&params(1.0, 1.0), &ps).unwrap().min_ratio;
    assert!(reference > 0.0);
    for beta in [0.5, 1.0, 2.0] {
        for mu in [0.5, 1.0, 2.0] {
            let c = coercivity_scan(&params(beta, mu), &ps).unwrap().min_ratio;
            assert!(c >= 0.5 * reference && c <= 2.0 * reference, "beta={beta} mu={mu}: {c}");
        }
    }
}

fn small_symbol() -> (Grid, Lsymbol) {
    let g = Grid::new(1.0, 2, 3).unwrap();
    let s = build_l_symbol(&g, &params(1.0, 1.0)).unwrap();
    (g, s)
}

#[test]
fn inverse_round_trip() {
    let (g, s) = small_symbol();
    let f = RealField::from_fn(g, |x| (x[0] * 3.1).sin() + (x[1] * x[2]).cos());
    let back = apply_l_inverse(&apply_l(&f, &s).unwrap(), &s).unwrap();
    assert!(back.max_abs_diff(&f) < 1e-12);
}

#[test]
fn zero_mode_is_screened() {
    let (g, s) = small_symbol();
    let c = 0.3;
    let phi = apply_l_inverse(&RealField::constant(g, c), &s).unwrap();
    let m0 = m_of_p(0.0, &params(1.0, 1.0)).unwrap();
    assert!(phi.max_abs_diff(&RealField::constant(g, c / m0)) < 1e-12);
}

#[test]
fn single_mode_is_divided_by_symbol() {
    let (g, s) = small_symbol();
    let r = RealField::cos_mode(g, [1, 0, 0], 1.0);
    let gp = 2.0 * PI / g.edge();
    let expect = 1.0 / (gp * gp / (4.0 * PI) + m_of_p(gp, &params(1.0, 1.0)).unwrap());
    let phi = apply_l_inverse(&r, &s).unwrap();
    assert!(phi.max_abs_diff(&r.scale(expect)) < 1e-12);
}

#[test]
fn symbol_must_match_grid() {
    let (_, s) = small_symbol();
    let other = Grid::new(1.0, 3, 3).unwrap();
    assert!(apply_l_inverse(&RealField::zeros(other), &s).is_err());
}

#[test]
fn discrete_multiplier_zero_mode_is_discrete_compressibility() {
    let g = Grid::new(1.0, 2, 3).unwrap();
    let p = params(0.5, 4.4);
    let m0 = m_discrete(&g, &p, [0, 0, 0]);
    let d = density_a_discrete_derivative(4.4, 0.5, &g);
    assert!(rel(m0, d) < 1e-13);
    let h = 1e-5;
    let fd =
        (rehf_core::density_a_discrete(4.4 + h, 0.5, &g) - rehf_core::density_a_discrete(4.4 - h, 0.5, &g)) / (2.0 * h);
    assert!(rel(m0, fd) < 1e-8);
}

#[test]
fn discrete_multiplier_has_cubic_symmetry() {
    let g = Grid::new(1.0, 2, 3).unwrap();
    let p = params(1.0, 1.0);
    let a = m_discrete(&g, &p, [1, 2, 0]);
    for nu in [[2, 1, 0], [0, -1, 2], [-2, 0, -1], [1, -2, 0]] {
        assert!(rel(m_discrete(&g, &p, nu), a) < 1e-13);
    }
    let s = build_l_symbol_discrete(&g, &p).unwrap();
    assert!(s.multiplier().iter().all(|&m| m > 0.0));
}

#[test]
fn discrete_multiplier_approaches_continuum() {
    let p = params(0.5, 4.4);
    let mut errs = Vec::new();
    for n in [2, 3, 4] {
        let g = Grid::new(1.0, n, 3).unwrap();
        let nu = [n as i64, 0, 0];
        let q = 2.0 * PI;
        errs.push(rel(m_discrete(&g, &p, nu), m_of_p(q, &p).unwrap()));
    }
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}
