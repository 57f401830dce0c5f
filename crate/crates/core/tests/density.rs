use rehf_core::grid::{to_spectral, translate};
use rehf_core::jellium::density_a_discrete_derivative;
use rehf_core::{
    build_hamiltonian, build_l_symbol_discrete, density_a_discrete, extract_n2, m_discrete, nonlinearity_n,
    norm_h2_cell, norm_l2_cell, rho, shift_lattice, DensityEvaluator, Error, Grid, Lsymbol, PhysParams, RealField,
};

const BETA: f64 = 1.0;
const MU: f64 = 1.0;

fn params() -> PhysParams {
    PhysParams::new(BETA, MU, 1.0).unwrap()
}

fn setup(n_cells: usize, n_pts: usize) -> (Grid, DensityEvaluator, Lsymbol) {
    let g = Grid::new(1.0, n_cells, n_pts).unwrap();
    let e = DensityEvaluator::new(&g, 4096).unwrap();
    let s = build_l_symbol_discrete(&g, &params()).unwrap();
    (g, e, s)
}

/// Smooth pseudo-random potential built from a handful of low modes.
fn smooth_field(g: Grid, seed: u64) -> RealField {
    let mut s = seed.wrapping_mul(0x2545_F491_4F6C_DD1D) | 1;
    let mut next = move || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut f = RealField::zeros(g);
    for nu in [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [0, 1, -1], [2, 0, 1], [1, -1, 1]] {
        f = f.add(&RealField::cos_mode(g, nu, next()));
        let phase = RealField::from_fn(g, |x| {
            let k = 2.0 * std::f64::consts::PI / g.edge();
            (k * (nu[0] as f64 * x[0] + nu[1] as f64 * x[1] + nu[2] as f64 * x[2])).sin()
        });
        f = f.add(&phase.scale(next()));
    }
    f
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[test]
fn hamiltonian_of_constant_potential_is_diagonal() {
    let g = Grid::new(1.0, 2, 2).unwrap();
    let g2 = g.g2_table();
    for c in [0.0, 0.7] {
        let h = build_hamiltonian(&RealField::constant(g, c), 4096).unwrap();
        for (r, g2r) in g2.iter().enumerate() {
            for col in 0..h.dim() {
                let expect = if r == col { g2r - c } else { 0.0 };
                assert!((h.entry(r, col).re - expect).abs() < 1e-13 && h.entry(r, col).im.abs() < 1e-13);
            }
        }
    }
}

#[test]
fn hamiltonian_is_hermitian_and_matches_real_space_spectrum() {
    let (g, e, _) = setup(2, 2);
    let phi = smooth_field(g, 1);
    let h = build_hamiltonian(&phi, 4096).unwrap();
    assert!(h.hermiticity_defect() < 1e-13);
    let spectral = h.eigenvalues();
    let spec = e.spectrum(&phi).unwrap();
    for (a, b) in spectral.iter().zip(spec.eigenvalues()) {
        assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn eigenpairs_have_small_residuals() {
    let (g, e, _) = setup(2, 3);
    let phi = smooth_field(g, 2).scale(0.5);
    let spec = e.spectrum(&phi).unwrap();
    assert!(spec.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    assert!(spec.max_residual(&e, &phi) < 1e-9);
    assert!(spec.orthonormality_defect() < 1e-11);
    let v = spec.vector(0);
    assert_eq!(v.len(), g.len());
}

#[test]
fn over_budget_is_a_resource_error() {
    // 20³ = 8000 points.
    let g = Grid::new(1.0, 4, 5).unwrap();
    assert!(matches!(DensityEvaluator::new(&g, 4096), Err(Error::Resource { .. })));
}

#[test]
fn zero_potential_gives_discrete_jellium() {
    let (g, e, _) = setup(2, 3);
    let r = e.rho(&RealField::zeros(g), &params()).unwrap();
    let a = density_a_discrete(MU, BETA, &g);
    assert!(r.max_abs_diff(&RealField::constant(g, a)) < 1e-10 * a);
}

#[test]
fn tiny_potential_reproduces_discrete_jellium_through_the_eigensolver() {
    // Bypasses the φ = 0 shortcut: a 1e-14 bump perturbs ρ far below 1e-10.
    let (g, e, _) = setup(2, 3);
    let mut v = vec![0.0; g.len()];
    v[5] = 1e-14;
    let r = e.rho(&RealField::new(g, v).unwrap(), &params()).unwrap();
    let a = density_a_discrete(MU, BETA, &g);
    assert!(r.max_abs_diff(&RealField::constant(g, a)) < 1e-10 * a);
}

#[test]
fn constant_potential_shifts_the_chemical_potential() {
    let (g, e, _) = setup(2, 3);
    for c in [0.3, -0.2] {
        let r = e.rho(&RealField::constant(g, c), &params()).unwrap();
        let a = density_a_discrete(MU + c, BETA, &g);
        assert!(r.max_abs_diff(&RealField::constant(g, a)) < 1e-10 * a, "c={c}");
    }
}

#[test]
fn density_is_positive() {
    let (g, e, _) = setup(2, 3);
    let r = e.rho(&smooth_field(g, 3), &params()).unwrap();
    assert!(r.values().iter().all(|&v| v > 0.0));
}

#[test]
fn gauge_covariance() {
    let (g, e, _) = setup(2, 3);
    let phi = smooth_field(g, 4).scale(0.3);
    for t in [0.1, -0.1, 0.01, -0.01] {
        let a = e.rho(&phi.offset(t), &params()).unwrap();
        let b = e.rho(&phi, &params().with_mu(MU + t)).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10, "t={t}");
    }
}

#[test]
fn translation_covariance() {
    let (g, e, _) = setup(2, 3);
    let phi = smooth_field(g, 5);
    let base = e.rho(&phi, &params()).unwrap();
    let ell = [1, 0, 1];
    let moved = e.rho(&shift_lattice(&phi, ell), &params()).unwrap();
    assert!(moved.max_abs_diff(&shift_lattice(&base, ell)) < 1e-11);
    let step = g.spacing();
    let moved = e.rho(&translate(&phi, [step, 0.0, -2.0 * step]).unwrap(), &params()).unwrap();
    assert!(moved.max_abs_diff(&translate(&base, [step, 0.0, -2.0 * step]).unwrap()) < 1e-11);
}

#[test]
fn one_shot_and_reusable_evaluators_agree() {
    let (g, e, _) = setup(2, 2);
    let phi = smooth_field(g, 6);
    assert_eq!(rho(&phi, &params()).unwrap(), e.rho(&phi, &params()).unwrap());
}

#[test]
fn linear_response_is_diagonal_and_equals_discrete_multiplier() {
    let (g, e, _) = setup(2, 3);
    let eps = 1e-4;
    for nu in [[1, 0, 0], [1, 1, 0], [2, 1, 1]] {
        let mode = RealField::cos_mode(g, nu, 1.0);
        let plus = e.rho(&mode.scale(eps), &params()).unwrap();
        let minus = e.rho(&mode.scale(-eps), &params()).unwrap();
        let jac = plus.sub(&minus).scale(0.5 / eps);
        let m = m_discrete(&g, &params(), nu);
        assert!(jac.max_abs_diff(&mode.scale(m)) < 1e-8, "nu={nu:?}");
        let s = to_spectral(&jac);
        let off: f64 = (0..g.len())
            .filter(|&i| {
                let f = g.frequency(i);
                f != nu && f != [-nu[0], -nu[1], -nu[2]]
            })
            .map(|i| s.coeffs()[i].norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-8, "nu={nu:?}: {off}");
    }
}

#[test]
fn nonlinearity_vanishes_at_zero() {
    let (g, e, s) = setup(2, 3);
    let n = nonlinearity_n(&e, &RealField::zeros(g), &params(), &s).unwrap();
    assert!(n.values().iter().all(|&v| v == 0.0));
}

#[test]
fn nonlinearity_of_constant_matches_scalar_oracle() {
    let (g, e, s) = setup(2, 3);
    let m0 = density_a_discrete_derivative(MU, BETA, &g);
    let a0 = density_a_discrete(MU, BETA, &g);
    let mut ratios = Vec::new();
    for t in [1e-2, 1e-3] {
        let n = nonlinearity_n(&e, &RealField::constant(g, t), &params(), &s).unwrap();
        let oracle = -(density_a_discrete(MU + t, BETA, &g) - a0 - m0 * t);
        assert!(n.max_abs_diff(&RealField::constant(g, oracle)) < 1e-12, "t={t}");
        ratios.push(n.mean() / (t * t));
    }
    assert!((ratios[0] / ratios[1] - 1.0).abs() < 0.05, "{ratios:?}");
}

#[test]
fn nonlinearity_is_quadratically_small() {
    let (g, e, s) = setup(2, 3);
    let shape = smooth_field(g, 7);
    let shape = shape.scale(1.0 / norm_h2_cell(&shape));
    let hs = [0.02, 0.04, 0.08, 0.16];
    let ns: Vec<f64> =
        hs.iter().map(|&h| norm_l2_cell(&nonlinearity_n(&e, &shape.scale(h), &params(), &s).unwrap())).collect();
    let slope = fit_slope(&hs, &ns);
    assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
}

#[test]
fn quadratic_term_of_constant_is_half_second_derivative() {
    let (g, e, s) = setup(2, 3);
    let est = extract_n2(&e, &RealField::constant(g, 1.0), &params(), &s, 1e-2).unwrap();
    let d = 1e-3;
    let a2 = (density_a_discrete(MU + d, BETA, &g) - 2.0 * density_a_discrete(MU, BETA, &g)
        + density_a_discrete(MU - d, BETA, &g))
        / (d * d);
    let expect = -0.5 * a2;
    assert!((est.n2.mean() - expect).abs() < 0.01 * expect.abs(), "{} vs {expect}", est.n2.mean());
    assert!(est.disagreement < 0.1);
}

#[test]
fn quadratic_term_is_homogeneous_of_degree_two() {
    let (g, e, s) = setup(2, 3);
    let phi = smooth_field(g, 8);
    let a = extract_n2(&e, &phi, &params(), &s, 1e-2).unwrap().n2;
    let b = extract_n2(&e, &phi.scale(2.0), &params(), &s, 1e-2).unwrap().n2;
    assert!(norm_l2_cell(&b.sub(&a.scale(4.0))) < 0.01 * norm_l2_cell(&b));
}

#[test]
fn cubic_remainder_after_quadratic_term() {
    let (g, e, s) = setup(2, 3);
    let phi = smooth_field(g, 9);
    let n2 = extract_n2(&e, &phi, &params(), &s, 1e-2).unwrap().n2;
    let eps = [0.2, 0.1, 0.05];
    let rem: Vec<f64> = eps
        .iter()
        .map(|&t| {
            let n = nonlinearity_n(&e, &phi.scale(t), &params(), &s).unwrap();
            norm_l2_cell(&n.sub(&n2.scale(t * t)))
        })
        .collect();
    let slope = fit_slope(&eps, &rem);
    assert!((slope - 3.0).abs() < 0.2, "slope {slope}: {rem:?}");
}

#[test]
fn strongly_nonlinear_amplitude_is_a_regime_error() {
    let (g, e, s) = setup(2, 3);
    let phi = smooth_field(g, 10).scale(400.0);
    assert!(matches!(extract_n2(&e, &phi, &params(), &s, 1e-2), Err(Error::Regime { .. })));
}
