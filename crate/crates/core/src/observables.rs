//! Zero-temperature observables read off a completed flow: ground energy,
//! gap, the Gaussian smearing width, the particle density, the two-point
//! function, and the source-dependent effective potential.
//!
//! Every mode sum uses the curvatures `V_m''` recorded during the flow,
//! evaluated at a single background `x0` (the minimum of `V_0` unless stated
//! otherwise). Lattice eigenvalues enter the denominators; the oscillatory
//! factors use the continuum frequencies `nu_m = 2 pi m / beta`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::flow::{find_minimum_with, FlowHistory, MinimumSearch};

/// Discrete source `j(t_n)`, `n = 1..=N+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceVector {
    values: Vec<f64>,
}

impl SourceVector {
    pub fn new(values: Vec<f64>, history: &FlowHistory) -> Result<Self> {
        let expected = history.lattice().n_slices + 1;
        if values.len() != expected {
            return Err(Error::InvalidInput(format!(
                "source has {} entries, lattice has {expected} slices",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("source has non-finite entries".into()));
        }
        Ok(SourceVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, s: f64) -> SourceVector {
        SourceVector {
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// `eps sum_n j(t_n) e^{i nu_m t_n}` as `(re, im)`.
    pub fn fourier(&self, history: &FlowHistory, m: usize) -> (f64, f64) {
        let lat = history.lattice();
        let nu = history.spectrum().nu(m);
        let (mut re, mut im) = (0.0, 0.0);
        for (i, &j) in self.values.iter().enumerate() {
            let t = (i + 1) as f64 * lat.epsilon;
            let (s, c) = (nu * t).sin_cos();
            re += j * c;
            im += j * s;
        }
        (lat.epsilon * re, lat.epsilon * im)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub xs: Vec<f64>,
    pub rho: Vec<f64>,
    /// Trapezoid integral of `rho` over `xs`.
    pub normalization: f64,
}

impl DensityProfile {
    pub fn new(xs: Vec<f64>, rho: Vec<f64>) -> Self {
        let normalization = trapezoid(&xs, &rho);
        DensityProfile {
            xs,
            rho,
            normalization,
        }
    }

    /// Linear interpolation, zero outside the grid.
    pub fn value_at(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 0 || x < self.xs[0] || x > self.xs[n - 1] {
            return 0.0;
        }
        let i = self.xs.partition_point(|&g| g <= x).clamp(1, n - 1);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        if x1 == x0 {
            return self.rho[i];
        }
        let t = (x - x0) / (x1 - x0);
        self.rho[i - 1] * (1.0 - t) + self.rho[i] * t
    }

    /// Index of the largest density value.
    pub fn argmax(&self) -> usize {
        self.rho
            .iter()
            .enumerate()
            .fold(0, |best, (i, &r)| if r > self.rho[best] { i } else { best })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorSeries {
    pub dts: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Uniform grid of `count` points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count).map(|i| lo + i as f64 * step).collect()
        }
    }
}

/// Minimum `x0` of the effective potential.
pub fn background(h: &FlowHistory) -> Result<f64> {
    background_with(h, &MinimumSearch::default())
}

pub fn background_with(h: &FlowHistory, search: &MinimumSearch) -> Result<f64> {
    find_minimum_with(&h.effective_potential()?, search)
}

/// `V_0` at its minimum: the zero-temperature ground energy with the
/// zero-mode integral dropped.
pub fn effective_potential_minimum(h: &FlowHistory) -> Result<f64> {
    let v0 = h.effective_potential()?;
    Ok(v0.eval(background(h)?))
}

/// Ground-state energy `-(1/beta) log Z`, with the remaining zero-mode
/// integral `int dx0 sqrt(M/(2 pi beta)) exp(-beta V_0(x0))` done in the
/// Gaussian approximation about the minimum:
///
/// ```text
/// E_0 = V_0(x0) + (1/(2 beta)) log(beta^2 V_0''(x0) / M)
/// ```
///
/// The correction vanishes as `beta -> infinity`; at finite `beta` it
/// cancels the `log(beta)/beta` deficit of `min V_0`.
pub fn ground_energy(h: &FlowHistory) -> Result<f64> {
    let v0 = h.effective_potential()?;
    let x0 = background(h)?;
    let curvature = v0.derivative_at(2, x0);
    if !(curvature > 0.0) {
        return Err(Error::NonConvex { curvature });
    }
    let lat = h.lattice();
    let beta = lat.beta;
    Ok(v0.eval(x0) + (beta * beta * curvature / lat.mass).ln() / (2.0 * beta))
}

/// `E_1 - E_0 = sqrt(V_0''(x0))`.
pub fn energy_gap(h: &FlowHistory) -> Result<f64> {
    let v0 = h.effective_potential()?;
    let x0 = background(h)?;
    let curvature = v0.derivative_at(2, x0);
    if !(curvature > 0.0) {
        return Err(Error::NonConvex { curvature });
    }
    Ok(curvature.sqrt())
}

/// `M w_m^2 + V_m''(x0)` for every mode, index `m - 1`.
fn propagator_denominators(h: &FlowHistory, x0: f64) -> Result<Vec<f64>> {
    let mass = h.lattice().mass;
    let curv = h.curvatures_at(x0)?;
    let spec = h.spectrum();
    curv.iter()
        .enumerate()
        .map(|(i, &c)| {
            let d = mass * spec.omega_sq(i + 1) + c;
            if d > 0.0 {
                Ok(d)
            } else {
                Err(Error::NegativeModeMass {
                    mode: i + 1,
                    denominator: d,
                })
            }
        })
        .collect()
}

/// `a^2(x0) = (2/beta) sum_{m=1}^{N/2} 1 / (M w_m^2 + V_m''(x0))`.
pub fn smearing_width_sq(h: &FlowHistory, x0: f64) -> Result<f64> {
    let denom = propagator_denominators(h, x0)?;
    let sum: f64 = denom.iter().rev().map(|d| 1.0 / d).sum();
    Ok(2.0 * sum / h.lattice().beta)
}

/// Gaussian density `exp(-(x - x0)^2 / (2 a^2)) / sqrt(2 pi a^2)` on `grid`.
pub fn particle_density(x0bar: f64, a_sq: f64, grid: &[f64]) -> Result<DensityProfile> {
    if !(a_sq > 0.0) {
        return Err(Error::InvalidInput(format!(
            "density width must be positive, got {a_sq}"
        )));
    }
    let norm = 1.0 / (2.0 * PI * a_sq).sqrt();
    let rho = grid
        .iter()
        .map(|&x| norm * (-(x - x0bar).powi(2) / (2.0 * a_sq)).exp())
        .collect();
    Ok(DensityProfile::new(grid.to_vec(), rho))
}

/// Density at the flow's minimum and smearing width.
pub fn rg_density(h: &FlowHistory, grid: &[f64]) -> Result<DensityProfile> {
    let x0 = background(h)?;
    particle_density(x0, smearing_width_sq(h, x0)?, grid)
}

/// Finite-temperature density: the Gaussian of width `a^2(x0)` averaged over
/// backgrounds with weight `sqrt(M/(2 pi beta)) exp(-beta V_0(x0))`,
/// by the trapezoid rule on `x0_grid`. Tends to [`rg_density`] as `beta` grows.
pub fn finite_beta_density(
    h: &FlowHistory,
    grid: &[f64],
    x0_grid: &[f64],
) -> Result<DensityProfile> {
    let v0 = h.effective_potential()?;
    let beta = h.lattice().beta;
    let energies: Vec<f64> = x0_grid.iter().map(|&x0| v0.eval(x0)).collect();
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies
        .iter()
        .map(|&e| (-beta * (e - e_min)).exp())
        .collect();
    let widths = x0_grid
        .iter()
        .zip(&weights)
        .map(|(&x0, &w)| {
            if w > 1e-300 {
                smearing_width_sq(h, x0)
            } else {
                Ok(1.0)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let z = trapezoid(x0_grid, &weights);
    let rho = grid
        .iter()
        .map(|&x| {
            let integrand: Vec<f64> = x0_grid
                .iter()
                .zip(weights.iter().zip(&widths))
                .map(|(&x0, (&w, &a2))| {
                    w * (-(x - x0).powi(2) / (2.0 * a2)).exp() / (2.0 * PI * a2).sqrt()
                })
                .collect();
            trapezoid(x0_grid, &integrand) / z
        })
        .collect();
    Ok(DensityProfile::new(grid.to_vec(), rho))
}

/// Connected part of the two-point function at separation `dt`,
/// `(2/beta) sum_{m>=1} cos(nu_m dt) / (M w_m^2 + V_m''(x0))`.
fn connected_sum(h: &FlowHistory, denom: &[f64], dt: f64) -> f64 {
    let nu = h.spectrum().nu_all();
    let sum: f64 = denom
        .iter()
        .zip(nu)
        .rev()
        .map(|(d, n)| (n * dt).cos() / d)
        .sum();
    2.0 * sum / h.lattice().beta
}

fn check_dt(h: &FlowHistory, dt: f64) -> Result<()> {
    let beta = h.lattice().beta;
    if !(0.0..=beta).contains(&dt) {
        return Err(Error::InvalidInput(format!(
            "time separation {dt} outside [0, {beta}]"
        )));
    }
    Ok(())
}

/// `<x(t) x(t')>` at `|t - t'| = dt` in the zero-temperature saddle:
///
/// ```text
/// x0^2 - 1/(beta V_0''(x0)) + (1/beta) sum_{m=-N/2}^{N/2} e^{i nu_m dt} / (M w_m^2 + V_m''(x0))
/// ```
///
/// The `m = 0` term cancels the explicit `-1/(beta V_0'')`, leaving
/// `x0^2 + (2/beta) sum_{m>=1} cos(nu_m dt) / (M w_m^2 + V_m''(x0))`.
pub fn two_point(h: &FlowHistory, dt: f64) -> Result<f64> {
    check_dt(h, dt)?;
    let x0 = background(h)?;
    let denom = propagator_denominators(h, x0)?;
    Ok(x0 * x0 + connected_sum(h, &denom, dt))
}

/// [`two_point`] plus the Gaussian fluctuation of the zero mode,
/// `1/(beta V_0''(x0))`: the full finite-`beta` correlator, periodic in `dt`
/// with period `beta`.
pub fn thermal_two_point(h: &FlowHistory, dt: f64) -> Result<f64> {
    let zero_mode = 1.0 / (h.lattice().beta * energy_gap(h)?.powi(2));
    Ok(two_point(h, dt)? + zero_mode)
}

pub fn correlator_series(h: &FlowHistory, dts: &[f64]) -> Result<CorrelatorSeries> {
    series(h, dts, false)
}

pub fn thermal_correlator_series(h: &FlowHistory, dts: &[f64]) -> Result<CorrelatorSeries> {
    series(h, dts, true)
}

fn series(h: &FlowHistory, dts: &[f64], thermal: bool) -> Result<CorrelatorSeries> {
    let x0 = background(h)?;
    let denom = propagator_denominators(h, x0)?;
    let offset = if thermal {
        x0 * x0 + 1.0 / (h.lattice().beta * energy_gap(h)?.powi(2))
    } else {
        x0 * x0
    };
    let values = dts
        .iter()
        .map(|&dt| {
            check_dt(h, dt)?;
            Ok(offset + connected_sum(h, &denom, dt))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(CorrelatorSeries {
        dts: dts.to_vec(),
        values,
    })
}

/// Least-squares slope of `log(values - subtract)` against `dt` over
/// `lo <= dt <= hi`. For a correlator decaying as `e^{-E dt}` this is `-E`.
pub fn fit_log_slope(series: &CorrelatorSeries, subtract: f64, lo: f64, hi: f64) -> Result<f64> {
    let mut pts = Vec::new();
    for (&t, &v) in series.dts.iter().zip(&series.values) {
        if t < lo || t > hi {
            continue;
        }
        let y = v - subtract;
        if !(y > 0.0) {
            return Err(Error::InvalidInput(format!(
                "correlator not positive at dt={t} ({y:e}); cannot fit a decay rate"
            )));
        }
        pts.push((t, y.ln()));
    }
    if pts.len() < 2 {
        return Err(Error::InvalidInput(
            "fewer than two points in the fit window".into(),
        ));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Source-dependent effective potential with the source dropped from the
/// flow itself:
///
/// ```text
/// V_0^j(x0) = V_0(x0) - (1/beta^2) sum_{m=1}^{N/2} |j_m|^2 / (M w_m^2 + V_m''(x0))
/// ```
///
/// where `j_m = eps sum_n j(t_n) e^{i nu_m t_n}`. The `+-m` pair contributes
/// `2 |j_m|^2` and the Gaussian integral over the mode halves it again; this
/// normalization makes the second source derivative of [`log_generating`]
/// equal the two-point function.
pub fn generating_functional(h: &FlowHistory, x0: f64, j: &SourceVector) -> Result<f64> {
    let v0 = h.effective_potential()?;
    let denom = propagator_denominators(h, x0)?;
    let beta = h.lattice().beta;
    let mut sum = 0.0;
    for (i, d) in denom.iter().enumerate() {
        let (re, im) = j.fourier(h, i + 1);
        sum += (re * re + im * im) / d;
    }
    Ok(v0.eval(x0) - sum / (beta * beta))
}

/// Connected log generating function `-beta (V_0^j(x0) - V_0(x0)) + x0 eps sum_n j(t_n)`
/// at the minimum `x0`; its second derivative along a source direction is the
/// two-point function smeared with that source.
pub fn log_generating(h: &FlowHistory, j: &SourceVector) -> Result<f64> {
    let x0 = background(h)?;
    let v0 = h.effective_potential()?.eval(x0);
    let vj = generating_functional(h, x0, j)?;
    let lat = h.lattice();
    let zero_mode: f64 = lat.epsilon * j.values().iter().sum::<f64>();
    Ok(-lat.beta * (vj - v0) + x0 * zero_mode)
}
