mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use common::*;
use whlpa::lattice::build_lattice;
use whlpa::oracle;
use whlpa::polyjet::log1p_series;
use whlpa::variational::{optimize_omega, trial_energy_gradient, variational_summary};
use whlpa::{run_flow, Polynomial};

/// Taylor coefficients of `log(1 + u(z))` from a discrete Cauchy integral on
/// the circle `|z| = r`, where `|u| < 1` keeps the logarithm on its principal branch.
fn contour_log1p(u: &[f64], order: usize, r: f64) -> Vec<f64> {
    let samples = 256;
    let f: Vec<Complex64> = (0..samples)
        .map(|s| {
            let z =
                Complex64::from_polar(r, 2.0 * std::f64::consts::PI * s as f64 / samples as f64);
            let uz = u
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
            (Complex64::new(1.0, 0.0) + uz).ln()
        })
        .collect();
    (0..=order)
        .map(|k| {
            let sum: Complex64 = f
                .iter()
                .enumerate()
                .map(|(s, v)| {
                    v * Complex64::from_polar(
                        1.0,
                        -2.0 * std::f64::consts::PI * (k * s) as f64 / samples as f64,
                    )
                })
                .sum();
            sum.re / samples as f64 / r.powi(k as i32)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log1p_matches_contour_integral(
        u0 in -0.9f64..0.9,
        tail in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        // |u| < 0.95 on the unit disk puts every singularity of log(1 + u)
        // outside |z| = 1, twice the sampling radius
        let budget = 0.95 - u0.abs();
        let mass: f64 = tail.iter().map(|c| c.abs()).sum();
        let scale = if mass > 0.0 { (budget / mass).min(1.0) } else { 1.0 };
        let mut u = vec![u0];
        u.extend(tail.iter().map(|c| c * scale));
        let series = log1p_series(&Polynomial::new(u.clone()), 6).unwrap();
        let oracle = contour_log1p(&u, 6, 0.5);
        for (k, &b) in oracle.iter().enumerate() {
            let a = series.coeff(k);
            prop_assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "k={} series={} contour={}", k, a, b);
        }
    }

    #[test]
    fn derivatives_compose(coeffs in prop::collection::vec(-5.0f64..5.0, 1..12), a in 0usize..5, b in 0usize..5) {
        let p = Polynomial::new(coeffs);
        let lhs = p.derivative(a).derivative(b);
        let rhs = p.derivative(a + b);
        let order = lhs.order().max(rhs.order());
        for k in 0..=order {
            let (x, y) = (lhs.coeff(k), rhs.coeff(k));
            prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0), "k={} {} vs {}", k, x, y);
        }
    }

    #[test]
    fn even_potentials_stay_even(g2 in 0.2f64..4.0, g4 in 0.0f64..60.0, g6 in 0.0f64..50.0) {
        let p = even_potential(g2, g4, g6, 8);
        let (beta, n) = SMALL;
        let h = flow(&p, beta, n, 8).unwrap();
        prop_assert_eq!(parity_defect(&h), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn constant_shift_is_invisible(c in -50.0f64..50.0, g4 in 0.0f64..240.0) {
        let p = even_potential(1.0, g4, 0.0, 6);
        let (beta, n) = SMALL;
        let d = shift_defect(&p, c, beta, n, 6).unwrap();
        prop_assert!(d < 1e-12, "defect {}", d);
    }

    #[test]
    fn equal_time_identity(g2 in 0.2f64..4.0, g4 in 0.0f64..240.0) {
        let (beta, n) = SMALL;
        let h = flow(&even_potential(g2, g4, 0.0, 6), beta, n, 6).unwrap();
        let a2 = whlpa::observables::smearing_width_sq(&h, 0.0).unwrap();
        prop_assert!(equal_time_defect(&h).unwrap() <= 4.0 * f64::EPSILON * a2);
    }

    #[test]
    fn modes_below_top_see_only_their_input(top_frac in 0.05f64..0.95) {
        let (beta, n) = SMALL;
        let (lat, spec) = build_lattice(beta, n, 1.0).unwrap();
        let full = run_flow(&anharmonic240(), &lat, &spec, 6).unwrap();
        let top = ((lat.n_modes() as f64) * top_frac) as usize;
        let restart = whlpa::flow::run_flow_from(&full.potential(top).unwrap(), &lat, &spec, 6, top).unwrap();
        prop_assert_eq!(restart.effective_potential().unwrap(), full.effective_potential().unwrap());
    }

    #[test]
    fn source_curvature_reproduces_correlator(
        offset in -1.0f64..1.0,
        harmonics in prop::collection::vec((-1.0f64..1.0, 0.0f64..6.3), 1..6),
    ) {
        let (beta, n) = SMALL;
        let h = flow(&anharmonic240(), beta, n, 6).unwrap();
        let j = smooth_source(&h, offset, &harmonics);
        let d = functional_derivative_defect(&h, &j, 1e-2).unwrap();
        prop_assert!(d < 1e-4, "relative defect {}", d);
    }

    #[test]
    fn variational_bound_and_stationarity(g2 in -1.0f64..2.0, g4 in 1.0f64..100.0) {
        let p = even_potential(g2, g4, 0.0, 4);
        let v = variational_summary(&p).unwrap();
        let exact = oracle::solve(&p, 10.0, 2001, 1).unwrap().energies[0];
        prop_assert!(v.w_min >= exact - 1e-3 * exact.abs().max(1.0), "W={} E={}", v.w_min, exact);
        // at fixed x0 the optimum frequency is a stationary point of W
        let r = optimize_omega(&p, v.x0bar).unwrap();
        prop_assert!(trial_energy_gradient(&p, v.x0bar, r.omega).abs() < 1e-8);
    }
}

#[test]
fn oracle_converges_quadratically_under_grid_doubling() {
    let p = anharmonic240();
    let levels = |n: usize| oracle::solve(&p, 4.0, n, 2).unwrap().energies;
    let (a, b, c) = (levels(501), levels(1001), levels(2001));
    for k in 0..2 {
        let ratio = (a[k] - b[k]) / (b[k] - c[k]);
        assert!((3.5..4.5).contains(&ratio), "level {k}: ratio {ratio}");
    }
}
