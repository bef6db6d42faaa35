//! Measurements shared by the property suites and the acceptance run. Each
//! returns a defect that should be zero up to rounding.
#![allow(dead_code)]

use whlpa::lattice::build_lattice;
use whlpa::observables::{
    background, correlator_series, energy_gap, ground_energy, log_generating, smearing_width_sq,
    two_point, SourceVector,
};
use whlpa::{run_flow, FlowHistory, Polynomial};

/// Small lattice that keeps the O(N^2) checks cheap.
pub const SMALL: (f64, usize) = (10.0, 512);

/// `g2 x^2/2 + g4 x^4/24 + g6 x^6/720` truncated at `order`.
pub fn even_potential(g2: f64, g4: f64, g6: f64, order: usize) -> Polynomial {
    let terms: Vec<(usize, f64)> = [(2, g2), (4, g4), (6, g6)]
        .into_iter()
        .filter(|t| t.1 != 0.0)
        .collect();
    Polynomial::from_couplings(&terms, order).unwrap()
}

pub fn anharmonic240() -> Polynomial {
    even_potential(1.0, 240.0, 0.0, 6)
}

pub fn flow(p: &Polynomial, beta: f64, n: usize, order: usize) -> whlpa::Result<FlowHistory> {
    let (lat, spec) = build_lattice(beta, n, 1.0)?;
    run_flow(p, &lat, &spec, order)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Largest relative change of the shift-invariant observables when `c` is
/// added to the potential, and the error in the ground-energy shift.
pub fn shift_defect(
    p: &Polynomial,
    c: f64,
    beta: f64,
    n: usize,
    order: usize,
) -> whlpa::Result<f64> {
    let shifted = p.add(&Polynomial::constant(c, p.order()));
    let h0 = flow(p, beta, n, order)?;
    let h1 = flow(&shifted, beta, n, order)?;
    let x0 = background(&h0)?;
    let x1 = background(&h1)?;
    let e_shift = ((ground_energy(&h1)? - ground_energy(&h0)?) - c).abs() / (1.0 + c.abs());
    let defects = [
        e_shift,
        (x1 - x0).abs(),
        rel(energy_gap(&h1)?, energy_gap(&h0)?),
        rel(smearing_width_sq(&h1, x1)?, smearing_width_sq(&h0, x0)?),
        rel(
            two_point(&h1, 0.7)? - x1 * x1,
            two_point(&h0, 0.7)? - x0 * x0,
        ),
    ];
    Ok(defects.into_iter().fold(0.0, f64::max))
}

/// Largest odd coefficient anywhere in the flow of an even potential.
pub fn parity_defect(h: &FlowHistory) -> f64 {
    (0..=h.lattice().n_modes())
        .filter_map(|m| h.coeffs_at(m))
        .flat_map(|c| c.iter().skip(1).step_by(2).copied())
        .fold(0.0, |acc, v: f64| acc.max(v.abs()))
}

/// `|two_point(0) - x0^2 - a^2|`.
pub fn equal_time_defect(h: &FlowHistory) -> whlpa::Result<f64> {
    let x0 = background(h)?;
    Ok((two_point(h, 0.0)? - x0 * x0 - smearing_width_sq(h, x0)?).abs())
}

/// Smooth periodic source `sum_k a_k sin(2 pi k t / beta + phi_k)` plus an offset.
pub fn smooth_source(h: &FlowHistory, offset: f64, harmonics: &[(f64, f64)]) -> Vec<f64> {
    let beta = h.lattice().beta;
    h.lattice()
        .slice_times()
        .iter()
        .map(|&t| {
            offset
                + harmonics
                    .iter()
                    .enumerate()
                    .map(|(k, &(a, phi))| {
                        a * (2.0 * std::f64::consts::PI * (k + 1) as f64 * t / beta + phi).sin()
                    })
                    .sum::<f64>()
        })
        .collect()
}

/// Relative mismatch between the central second difference of
/// `log_generating(s j)` at `s = 0` and the source-smeared connected correlator
/// `sum_{n,p} eps^2 j_n j_p [two_point(|t_n - t_p|) - x0^2]`.
pub fn functional_derivative_defect(h: &FlowHistory, j: &[f64], step: f64) -> whlpa::Result<f64> {
    let src = SourceVector::new(j.to_vec(), h)?;
    let l = |s: f64| log_generating(h, &src.scaled(s));
    let second = (l(step)? - 2.0 * l(0.0)? + l(-step)?) / (step * step);

    let lat = h.lattice();
    let eps = lat.epsilon;
    let n = j.len();
    let lags: Vec<f64> = (0..n).map(|k| k as f64 * eps).collect();
    let series = correlator_series(h, &lags)?;
    let x0 = background(h)?;
    let mut smeared = 0.0;
    for k in 0..n {
        let c = series.values[k] - x0 * x0;
        let pairs: f64 = (0..n - k).map(|p| j[p] * j[p + k]).sum();
        smeared += if k == 0 { c * pairs } else { 2.0 * c * pairs };
    }
    smeared *= eps * eps;
    Ok(rel(second, smeared))
}
