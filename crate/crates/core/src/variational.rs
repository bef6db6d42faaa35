//! Zero-temperature Feynman-Kleinert variational baseline.
//!
//! For a background `x0` and trial frequency `Omega` (unit mass),
//!
//! ```text
//! W(x0; Omega) = Omega/4 + <V(x0 + xi)>,   xi ~ N(0, a^2),  a^2 = 1/(2 Omega)
//! ```
//!
//! is minimized over `Omega`, then over `x0`.

use crate::error::{Error, Result};
use crate::flow::golden_section;
use crate::polyjet::Polynomial;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalResult {
    pub x0bar: f64,
    pub omega: f64,
    pub w_min: f64,
    pub a_sq_var: f64,
    /// `sqrt(W''(x0bar))`; only set by [`variational_summary`].
    pub gap_var: Option<f64>,
}

/// Gaussian average of `p` about `x0` with variance `a_sq`, from the
/// closed-form moments `E[xi^{2j}] = (2j-1)!! a^{2j}`.
pub fn smeared_potential(p: &Polynomial, a_sq: f64, x0: f64) -> f64 {
    let mut total = 0.0;
    for (k, &c) in p.coeffs().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        // sum over even j of C(k, j) x0^{k-j} (j-1)!! a^j
        let mut term = 0.0;
        let mut binom = 1.0;
        let mut moment = 1.0;
        let mut j = 0;
        while j <= k {
            term += binom * x0.powi((k - j) as i32) * moment;
            if j + 2 > k {
                break;
            }
            binom *= ((k - j) * (k - j - 1)) as f64 / ((j + 1) * (j + 2)) as f64;
            moment *= (j + 1) as f64 * a_sq;
            j += 2;
        }
        total += c * term;
    }
    total
}

fn trial_energy(p: &Polynomial, x0: f64, omega: f64) -> f64 {
    omega / 4.0 + smeared_potential(p, 1.0 / (2.0 * omega), x0)
}

/// `dW/dOmega = 1/4 - E[p''(x0 + xi)] / (4 Omega^2)`, using `d<p>/d(a^2) = <p''>/2`.
fn trial_gradient(p2: &Polynomial, x0: f64, omega: f64) -> f64 {
    0.25 - smeared_potential(p2, 1.0 / (2.0 * omega), x0) / (4.0 * omega * omega)
}

pub fn trial_energy_gradient(p: &Polynomial, x0: f64, omega: f64) -> f64 {
    trial_gradient(&p.derivative(2), x0, omega)
}

const LOG_OMEGA_RANGE: (f64, f64) = (-18.0, 18.0);
const LOG_OMEGA_SAMPLES: usize = 361;

/// Optimal trial frequency at fixed background `x0`.
pub fn optimize_omega(p: &Polynomial, x0: f64) -> Result<VariationalResult> {
    let p2 = p.derivative(2);
    let w = |log_omega: f64| trial_energy(p, x0, log_omega.exp());
    let (lo, hi) = LOG_OMEGA_RANGE;
    let step = (hi - lo) / (LOG_OMEGA_SAMPLES - 1) as f64;
    let samples: Vec<f64> = (0..LOG_OMEGA_SAMPLES)
        .map(|i| w(lo + i as f64 * step))
        .collect();
    let best = samples
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v < samples[b] { i } else { b });
    if best == 0 || best == LOG_OMEGA_SAMPLES - 1 || !samples[best].is_finite() {
        return Err(Error::NoMinimum);
    }
    let a = lo + (best - 1) as f64 * step;
    let b = lo + (best + 1) as f64 * step;
    let mut log_omega = golden_section(w, a, b);

    // polish on the stationarity condition
    let g = |lw: f64| trial_gradient(&p2, x0, lw.exp());
    let (ga, gb) = (g(a), g(b));
    if ga < 0.0 && gb > 0.0 {
        let (mut l, mut r) = (a, b);
        for _ in 0..200 {
            let mid = 0.5 * (l + r);
            if mid <= l || mid >= r {
                break;
            }
            if g(mid) > 0.0 {
                r = mid;
            } else {
                l = mid;
            }
        }
        log_omega = if g(l).abs() < g(r).abs() { l } else { r };
    }
    let omega = log_omega.exp();
    Ok(VariationalResult {
        x0bar: x0,
        omega,
        w_min: trial_energy(p, x0, omega),
        a_sq_var: 1.0 / (2.0 * omega),
        gap_var: None,
    })
}

/// Optimized `W(x0)`.
pub fn effective_classical_potential(p: &Polynomial, x0: f64) -> Result<f64> {
    optimize_omega(p, x0).map(|r| r.w_min)
}

/// Background window and sampling used by [`variational_summary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundSearch {
    pub half_width: f64,
    pub samples: usize,
}

impl Default for BackgroundSearch {
    fn default() -> Self {
        BackgroundSearch {
            half_width: 4.0,
            samples: 401,
        }
    }
}

pub fn variational_summary(p: &Polynomial) -> Result<VariationalResult> {
    variational_summary_with(p, &BackgroundSearch::default())
}

/// Minimizes `W(x0)` over the background, then reads the gap off the
/// curvature of `W` by Richardson-extrapolated central differences.
pub fn variational_summary_with(
    p: &Polynomial,
    search: &BackgroundSearch,
) -> Result<VariationalResult> {
    match p.degree() {
        Some(d) if d >= 2 && d % 2 == 0 && p.coeff(d) > 0.0 => {}
        Some(d) => {
            return Err(Error::Unbounded {
                leading: p.coeff(d),
                degree: d,
            })
        }
        None => {
            return Err(Error::Unbounded {
                leading: 0.0,
                degree: 0,
            })
        }
    }
    let w = |x0: f64| effective_classical_potential(p, x0);
    let n = search.samples.max(3);
    let step = 2.0 * search.half_width / (n - 1) as f64;
    let xs: Vec<f64> = (0..n)
        .map(|i| -search.half_width + i as f64 * step)
        .collect();
    let ws = xs.iter().map(|&x| w(x)).collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for i in 1..n {
        // ties go to the smaller |x0|
        if ws[i] < ws[best] || (ws[i] == ws[best] && xs[i].abs() < xs[best].abs()) {
            best = i;
        }
    }
    if best == 0 || best == n - 1 {
        return Err(Error::NoMinimum);
    }
    let mut x0bar = if p.is_even() && ws[best] >= w(0.0)? {
        0.0
    } else {
        golden_section(
            |x| w(x).unwrap_or(f64::INFINITY),
            xs[best - 1],
            xs[best + 1],
        )
    };
    if p.is_even() && w(0.0)? <= w(x0bar)? {
        x0bar = 0.0;
    }

    let centre = w(x0bar)?;
    let second =
        |h: f64| -> Result<f64> { Ok((w(x0bar + h)? - 2.0 * centre + w(x0bar - h)?) / (h * h)) };
    let h = 1e-3;
    let curvature = (4.0 * second(h / 2.0)? - second(h)?) / 3.0;
    if !(curvature > 0.0) {
        return Err(Error::NonConvex { curvature });
    }
    let mut result = optimize_omega(p, x0bar)?;
    result.gap_var = Some(curvature.sqrt());
    Ok(result)
}
