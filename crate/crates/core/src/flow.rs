//! Wegner-Houghton flow of the running potential in the local potential
//! approximation.
//!
//! Starting from the bare potential `V_{N/2}`, each `+-m` mode pair is
//! integrated out in turn, from the stiffest mode down to `m = 1`:
//!
//! ```text
//! V_{m-1}(x) = V_m(x) + (1/beta) log(1 + V_m''(x) / (M w_m^2))
//! ```
//!
//! with the logarithm projected onto the polynomial truncation by a Taylor
//! expansion about `x = 0`. Terms of order `1/beta^2` are dropped.

use crate::error::{Error, Result};
use crate::lattice::{LatticeConfig, ModeSpectrum};
use crate::polyjet::{self, Polynomial, MAX_ORDER, MIN_ORDER};

/// One mode step with unit mass.
pub fn wh_step(v: &Polynomial, omega_sq: f64, beta: f64, order: usize) -> Result<Polynomial> {
    let v = v.with_order(order);
    let u = v.derivative(2).scaled(1.0 / omega_sq);
    let log = polyjet::log1p_series(&u, order)?;
    Ok(v.add(&log.scaled(1.0 / beta)))
}

/// Every running potential of a flow, `V_{N/2}` down to `V_0`.
///
/// Coefficients are stored flat in flow order: row 0 is the bare potential
/// `V_{N/2}`, the last row is the lowest potential reached.
#[derive(Debug, Clone)]
pub struct FlowHistory {
    lattice: LatticeConfig,
    spectrum: ModeSpectrum,
    order: usize,
    coeffs: Vec<f64>,
    breakdown_at: Option<usize>,
}

impl FlowHistory {
    pub fn lattice(&self) -> &LatticeConfig {
        &self.lattice
    }

    pub fn spectrum(&self) -> &ModeSpectrum {
        &self.spectrum
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Mode whose integration failed, if the flow stopped early.
    pub fn breakdown_at(&self) -> Option<usize> {
        self.breakdown_at
    }

    pub fn is_complete(&self) -> bool {
        self.breakdown_at.is_none()
    }

    /// Number of stored potentials; `N/2 + 1` for a complete flow.
    pub fn len(&self) -> usize {
        self.coeffs.len() / (self.order + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest mode index whose potential is stored.
    pub fn lowest_mode(&self) -> usize {
        self.lattice.n_modes() + 1 - self.len()
    }

    fn row(&self, m: usize) -> Option<&[f64]> {
        let n_modes = self.lattice.n_modes();
        if m > n_modes || m < self.lowest_mode() {
            return None;
        }
        let width = self.order + 1;
        let i = n_modes - m;
        Some(&self.coeffs[i * width..(i + 1) * width])
    }

    /// Coefficients of `V_m`, if the flow reached it.
    pub fn coeffs_at(&self, m: usize) -> Option<&[f64]> {
        self.row(m)
    }

    pub fn potential(&self, m: usize) -> Option<Polynomial> {
        self.row(m).map(|c| Polynomial::new(c.to_vec()))
    }

    /// The effective potential `V_0`.
    pub fn effective_potential(&self) -> Result<Polynomial> {
        self.ensure_complete()?;
        Ok(self.potential(0).expect("complete flow stores V_0"))
    }

    pub fn ensure_complete(&self) -> Result<()> {
        match self.breakdown_at {
            None => Ok(()),
            Some(mode) => {
                let m = self.lowest_mode();
                let row = self.row(m).expect("lowest row exists");
                let omega_sq = self.lattice.mass * self.spectrum.omega_sq(mode);
                Err(Error::FlowBreakdown {
                    mode,
                    log_argument: 1.0 + 2.0 * row[2] / omega_sq,
                })
            }
        }
    }

    /// `V_m''(x)` for `m = 1..=N/2`, returned at index `m - 1`.
    pub fn curvatures_at(&self, x: f64) -> Result<Vec<f64>> {
        self.ensure_complete()?;
        let n_modes = self.lattice.n_modes();
        Ok((1..=n_modes)
            .map(|m| second_derivative(self.row(m).unwrap(), x))
            .collect())
    }

    /// `V_m''(0)` along the flow in visiting order `m = N/2, ..., 0`.
    pub fn curvature_trajectory(&self) -> Vec<(usize, f64)> {
        let n_modes = self.lattice.n_modes();
        (self.lowest_mode()..=n_modes)
            .rev()
            .map(|m| (m, 2.0 * self.row(m).unwrap()[2]))
            .collect()
    }
}

fn second_derivative(c: &[f64], x: f64) -> f64 {
    (2..c.len())
        .rev()
        .fold(0.0, |acc, k| acc * x + c[k] * (k * (k - 1)) as f64)
}

fn check_inputs(v_init: &Polynomial, spectrum: &ModeSpectrum, order: usize) -> Result<()> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::InvalidInput(format!(
            "truncation order must lie in {MIN_ORDER}..={MAX_ORDER}, got {order}"
        )));
    }
    if !v_init.is_finite() {
        return Err(Error::InvalidInput(
            "initial potential has non-finite coefficients".into(),
        ));
    }
    if let Some(d) = v_init.degree() {
        if d > order {
            return Err(Error::InvalidInput(format!(
                "initial potential has degree {d} above truncation order {order}"
            )));
        }
    }
    if spectrum.is_empty() {
        return Err(Error::InvalidLattice("no modes to integrate".into()));
    }
    Ok(())
}

/// Integrates every mode `m = N/2, ..., 1`. Fails with `FlowBreakdown` if the
/// truncation cannot keep the logarithm's argument positive.
pub fn run_flow(
    v_init: &Polynomial,
    lattice: &LatticeConfig,
    spectrum: &ModeSpectrum,
    order: usize,
) -> Result<FlowHistory> {
    let history = run_flow_partial(v_init, lattice, spectrum, order)?;
    history.ensure_complete()?;
    Ok(history)
}

/// Like [`run_flow`], but a breakdown is recorded in the returned history
/// (with all potentials computed so far) instead of being returned as an error.
pub fn run_flow_partial(
    v_init: &Polynomial,
    lattice: &LatticeConfig,
    spectrum: &ModeSpectrum,
    order: usize,
) -> Result<FlowHistory> {
    run_flow_from(v_init, lattice, spectrum, order, lattice.n_modes())
}

/// Integrates modes `top, top-1, ..., 1` only, treating the modes above `top`
/// as absent. `top = N/2` is the full flow.
pub fn run_flow_from(
    v_init: &Polynomial,
    lattice: &LatticeConfig,
    spectrum: &ModeSpectrum,
    order: usize,
    top: usize,
) -> Result<FlowHistory> {
    check_inputs(v_init, spectrum, order)?;
    let n_modes = lattice.n_modes();
    if top > n_modes {
        return Err(Error::InvalidInput(format!(
            "top mode {top} above N/2 = {n_modes}"
        )));
    }
    let width = order + 1;
    let mut v = v_init.with_order(order);
    let mut coeffs = Vec::with_capacity((n_modes + 1) * width);
    // modes above `top` leave the potential untouched
    for _ in top..n_modes {
        coeffs.extend_from_slice(v.coeffs());
    }
    coeffs.extend_from_slice(v.coeffs());
    let mut breakdown_at = None;
    for m in (1..=top).rev() {
        let stiffness = lattice.mass * spectrum.omega_sq(m);
        match wh_step(&v, stiffness, lattice.beta, order) {
            Ok(next) => {
                v = next;
                coeffs.extend_from_slice(v.coeffs());
            }
            Err(Error::FlowBreakdown { .. }) => {
                breakdown_at = Some(m);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(FlowHistory {
        lattice: *lattice,
        spectrum: spectrum.clone(),
        order,
        coeffs,
        breakdown_at,
    })
}

/// Window and resolution of the global minimum search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimumSearch {
    pub half_width: f64,
    pub samples: usize,
    /// Return exactly 0 for an even potential whose global minimum is at the origin.
    pub parity_shortcut: bool,
}

impl Default for MinimumSearch {
    fn default() -> Self {
        MinimumSearch {
            half_width: 10.0,
            samples: 4001,
            parity_shortcut: true,
        }
    }
}

pub fn find_minimum(v: &Polynomial) -> Result<f64> {
    find_minimum_with(v, &MinimumSearch::default())
}

/// Global minimizer of a polynomial that is bounded below.
///
/// Local minima of a uniform sample over `[-half_width, half_width]` are
/// refined by bisection on `V'`; the lowest wins, with near-ties going to the
/// smallest `|x|` and then to the positive side.
pub fn find_minimum_with(v: &Polynomial, search: &MinimumSearch) -> Result<f64> {
    let degree = match v.degree() {
        None | Some(0) => return Ok(0.0),
        Some(d) => d,
    };
    let leading = v.coeff(degree);
    if degree % 2 == 1 || leading <= 0.0 {
        return Err(Error::Unbounded { leading, degree });
    }
    if search.samples < 3 || !(search.half_width > 0.0) {
        return Err(Error::InvalidInput(
            "minimum search needs >= 3 samples and a positive window".into(),
        ));
    }

    let n = search.samples;
    let step = 2.0 * search.half_width / (n - 1) as f64;
    let xs: Vec<f64> = (0..n)
        .map(|i| -search.half_width + i as f64 * step)
        .collect();
    let values: Vec<f64> = xs.iter().map(|&x| v.eval(x)).collect();
    let sampled_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tie = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));

    if search.parity_shortcut && v.is_even() {
        let at_origin = v.eval(0.0);
        if v.derivative_at(2, 0.0) >= 0.0
            && (at_origin <= sampled_min || tie(at_origin, sampled_min))
        {
            return Ok(0.0);
        }
    }

    if values[0] <= sampled_min || values[n - 1] <= sampled_min {
        return Err(Error::InvalidInput(format!(
            "minimum lies on the edge of the search window +-{}",
            search.half_width
        )));
    }

    let dv = v.derivative(1);
    let mut best: Option<(f64, f64)> = None;
    for i in 1..n - 1 {
        if !(values[i] <= values[i - 1] && values[i] <= values[i + 1]) {
            continue;
        }
        let x = refine_critical_point(&dv, xs[i - 1], xs[i + 1], v);
        let val = v.eval(x);
        best = match best {
            None => Some((x, val)),
            Some((bx, bv)) => {
                if tie(val, bv) {
                    let closer = x.abs() < bx.abs() || (x.abs() == bx.abs() && x > bx);
                    Some(if closer { (x, val) } else { (bx, bv) })
                } else if val < bv {
                    Some((x, val))
                } else {
                    Some((bx, bv))
                }
            }
        };
    }
    best.map(|(x, _)| x).ok_or(Error::NoMinimum)
}

fn refine_critical_point(dv: &Polynomial, lo: f64, hi: f64, v: &Polynomial) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (dv.eval(a), dv.eval(b));
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    if fa.signum() == fb.signum() {
        return golden_section(|x| v.eval(x), lo, hi);
    }
    let rising = fb > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = dv.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == rising {
            b = mid;
        } else {
            a = mid;
        }
    }
    if dv.eval(a).abs() <= dv.eval(b).abs() {
        a
    } else {
        b
    }
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_section(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..300 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
