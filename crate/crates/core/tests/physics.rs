mod common;

use common::*;
use whlpa::config::{Preset, RunConfig};
use whlpa::observables::{finite_beta_density, rg_density, uniform_grid};
use whlpa::{pipeline, Error, Polynomial};

fn harmonic() -> Polynomial {
    Polynomial::new(vec![0.0, 0.0, 0.5])
}

#[test]
fn finite_beta_density_is_the_thermal_gaussian() {
    // for the oscillator the x0 average widens a^2 by exactly 1/beta, giving
    // the thermal variance coth(beta/2)/2 up to lattice corrections
    let beta = 4.0;
    let h = flow(&harmonic(), beta, 1 << 12, 2).unwrap();
    let xs = uniform_grid(-4.0, 4.0, 81);
    let x0s = uniform_grid(-6.0, 6.0, 1201);
    let d = finite_beta_density(&h, &xs, &x0s).unwrap();
    let var = 0.5 / (beta / 2.0).tanh();
    for (x, rho) in d.xs.iter().zip(&d.rho) {
        let exact = (-x * x / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
        assert!((rho - exact).abs() < 1e-4, "x={x}: {rho} vs {exact}");
    }
}

#[test]
fn finite_beta_density_approaches_the_saddle_gaussian() {
    let xs = uniform_grid(-1.0, 1.0, 41);
    let x0s = uniform_grid(-1.5, 1.5, 601);
    let gap = |beta: f64, n: usize| {
        let h = flow(&anharmonic240(), beta, n, 6).unwrap();
        let a = finite_beta_density(&h, &xs, &x0s).unwrap();
        let b = rg_density(&h, &xs).unwrap();
        a.rho
            .iter()
            .zip(&b.rho)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    };
    let d = [gap(10.0, 1 << 10), gap(40.0, 1 << 12), gap(160.0, 1 << 14)];
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    assert!(d[2] < 0.01, "{d:?}");
}

#[test]
fn harmonic_decay_rate_is_one() {
    let r = pipeline::correlate(&RunConfig::preset(Preset::Harmonic)).unwrap();
    let rate = r.decay_rate.unwrap();
    assert!((rate - 1.0).abs() < 0.02, "{rate}");
}

#[test]
fn anharmonic_connected_correlator_changes_sign() {
    // the curvature V_m'' grows from 1 in the ultraviolet to about 14.7 at
    // m = 0, and with that mode dependence the mode sum dips below zero
    // around dt = 1. A log-slope fit therefore has nothing to fit.
    let r = pipeline::correlate(&RunConfig::preset(Preset::Anharmonic240)).unwrap();
    assert!(matches!(r.decay_rate, Err(Error::InvalidInput(_))));
    let at = |dt: f64| {
        let i = r
            .thermal
            .dts
            .iter()
            .position(|&t| (t - dt).abs() < 1e-9)
            .unwrap();
        r.thermal.values[i]
    };
    assert!(at(0.5) > 0.0 && at(1.5) < 0.0);
}

#[test]
fn double_well_needs_order_ten() {
    let cfg = RunConfig::preset(Preset::DoubleWell2_4);
    let low = RunConfig {
        order: 6,
        ..cfg.clone()
    };
    let h6 = pipeline::flow_history(&low).unwrap();
    assert!(h6.breakdown_at().is_some());
    let h10 = pipeline::flow_history(&cfg).unwrap();
    assert!(h10.is_complete());
    let s = pipeline::summarize_flow(&h10, &cfg).unwrap();
    // the flow convexifies the double well into a single minimum at 0
    assert_eq!(s.x0bar, 0.0);
    assert!(s.gap > 0.0 && s.a_sq > 1.0);
}

#[test]
fn default_regime_breaks_the_double_well_at_every_order_tried() {
    // at beta = 40 even the tenth-order truncation cannot hold the log
    // argument positive through the infrared modes
    for order in [6, 10] {
        let cfg = RunConfig {
            beta: 40.0,
            n_slices: 1 << 14,
            order,
            ..RunConfig::preset(Preset::DoubleWell2_4)
        };
        let h = pipeline::flow_history(&cfg).unwrap();
        assert!(h.breakdown_at().is_some(), "order {order}");
    }
}

#[test]
fn variational_double_well_row() {
    let v = pipeline::variational(&RunConfig::preset(Preset::DoubleWell2_4)).unwrap();
    assert!((v.w_min - 0.549).abs() < 1e-3, "{}", v.w_min);
    let e1 = v.w_min + v.gap_var.unwrap();
    assert!((e1 - 1.035).abs() < 1e-3, "{e1}");
}

#[test]
fn variational_first_level_uses_the_curvature_of_w() {
    // for lambda = 240 the curvature of W gives E1 = 1.53125 + 4 = 5.53125,
    // about 3.4% above the quoted 5.3482; the mismatch is kept, not tuned away
    let v = pipeline::variational(&RunConfig::preset(Preset::Anharmonic240)).unwrap();
    let e1 = v.w_min + v.gap_var.unwrap();
    assert!((e1 - 5.53125).abs() < 1e-4, "{e1}");
}
