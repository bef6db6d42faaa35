//! End-to-end computations behind each CLI subcommand, driven by a
//! [`RunConfig`]. Nothing here touches the filesystem.

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::flow::{run_flow_partial, FlowHistory, MinimumSearch};
use crate::lattice::build_lattice_with;
use crate::observables::{
    background_with, correlator_series, effective_potential_minimum, energy_gap, fit_log_slope,
    ground_energy, particle_density, smearing_width_sq, thermal_correlator_series,
    CorrelatorSeries,
};
use crate::oracle::{self, SpectrumResult};
use crate::variational::{variational_summary, VariationalResult};

/// Runs the flow for `cfg`. A truncation breakdown is recorded in the
/// history rather than returned as an error.
pub fn flow_history(cfg: &RunConfig) -> Result<FlowHistory> {
    let (lattice, spectrum) = build_lattice_with(cfg.beta, cfg.n_slices, cfg.mass, cfg.omega)?;
    run_flow_partial(&cfg.polynomial()?, &lattice, &spectrum, cfg.order)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSummary {
    pub x0bar: f64,
    pub ground_energy: f64,
    pub v0_min: f64,
    pub gap: f64,
    pub a_sq: f64,
}

impl FlowSummary {
    pub fn first_excited(&self) -> f64 {
        self.ground_energy + self.gap
    }
}

pub fn summarize_flow(h: &FlowHistory, cfg: &RunConfig) -> Result<FlowSummary> {
    h.ensure_complete()?;
    let search = MinimumSearch {
        half_width: cfg.min_window,
        ..MinimumSearch::default()
    };
    let x0bar = background_with(h, &search)?;
    Ok(FlowSummary {
        x0bar,
        ground_energy: ground_energy(h)?,
        v0_min: effective_potential_minimum(h)?,
        gap: energy_gap(h)?,
        a_sq: smearing_width_sq(h, x0bar)?,
    })
}

pub fn variational(cfg: &RunConfig) -> Result<VariationalResult> {
    variational_summary(&cfg.polynomial()?)
}

/// Lowest `k` eigenpairs of the finite-difference Hamiltonian.
pub fn exact(cfg: &RunConfig, k: usize) -> Result<SpectrumResult> {
    oracle::solve(&cfg.polynomial()?, cfg.oracle_x_max, cfg.oracle_points, k)
}

/// One density column per method. A method that fails leaves its column
/// empty and adds a warning instead of aborting the others.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub xs: Vec<f64>,
    pub rg: Option<Vec<f64>>,
    pub variational: Option<Vec<f64>>,
    pub exact: Option<Vec<f64>>,
    pub warnings: Vec<String>,
}

pub fn density_table(cfg: &RunConfig) -> DensityTable {
    let xs = cfg.density_grid.points();
    let mut warnings = Vec::new();
    let mut keep = |label: &str, r: Result<Vec<f64>>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            warnings.push(format!("{label} density unavailable: {e}"));
            None
        }
    };
    let rg = keep(
        "rg",
        flow_history(cfg)
            .and_then(|h| summarize_flow(&h, cfg))
            .and_then(|s| particle_density(s.x0bar, s.a_sq, &xs))
            .map(|d| d.rho),
    );
    let var = keep(
        "variational",
        variational(cfg)
            .and_then(|v| particle_density(v.x0bar, v.a_sq_var, &xs))
            .map(|d| d.rho),
    );
    let exact = keep(
        "exact",
        exact(cfg, 1).map(|s| {
            let d = oracle::exact_density(&s);
            xs.iter().map(|&x| d.value_at(x)).collect()
        }),
    );
    DensityTable {
        xs,
        rg,
        variational: var,
        exact,
        warnings,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorReport {
    /// Zero-mode-cancelled correlator.
    pub two_point: CorrelatorSeries,
    /// Same plus the zero-mode fluctuation `1/(beta V_0'')`.
    pub thermal: CorrelatorSeries,
    pub x0bar: f64,
    /// Minus the slope of `log(thermal - x0bar^2)` over the fit window. The
    /// fit fails if the connected correlator is not positive there.
    pub decay_rate: Result<f64>,
}

pub fn correlate(cfg: &RunConfig) -> Result<CorrelatorReport> {
    let h = flow_history(cfg)?;
    let s = summarize_flow(&h, cfg)?;
    let dts = cfg.dt_grid.points();
    let two_point = correlator_series(&h, &dts)?;
    let thermal = thermal_correlator_series(&h, &dts)?;
    let decay_rate = fit_log_slope(
        &thermal,
        s.x0bar * s.x0bar,
        cfg.fit_window.0,
        cfg.fit_window.1,
    )
    .map(|k| -k);
    Ok(CorrelatorReport {
        two_point,
        thermal,
        x0bar: s.x0bar,
        decay_rate,
    })
}

/// One row of the comparison table; RG entries are `None` when the flow
/// breaks down.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub lambda: f64,
    pub e0_rg: Option<f64>,
    pub e0_var: Option<f64>,
    pub e0_exact: Option<f64>,
    pub e1_rg: Option<f64>,
    pub e1_var: Option<f64>,
    pub e1_exact: Option<f64>,
    pub a_sq_rg: Option<f64>,
    pub a_sq_var: Option<f64>,
}

impl TableRow {
    pub const HEADER: [&'static str; 9] = [
        "lambda", "E0_rg", "E0_var", "E0_exact", "E1_rg", "E1_var", "E1_exact", "a2_rg", "a2_var",
    ];

    pub fn values(&self) -> [Option<f64>; 9] {
        [
            Some(self.lambda),
            self.e0_rg,
            self.e0_var,
            self.e0_exact,
            self.e1_rg,
            self.e1_var,
            self.e1_exact,
            self.a_sq_rg,
            self.a_sq_var,
        ]
    }
}

pub fn table_row(cfg: &RunConfig) -> (TableRow, Vec<String>) {
    let mut warnings = Vec::new();
    let mut note =
        |label: &str, e: Error| warnings.push(format!("{}: {label}: {e}", cfg.potential.label()));
    let rg = match flow_history(cfg).and_then(|h| summarize_flow(&h, cfg)) {
        Ok(s) => Some(s),
        Err(e) => {
            note("rg", e);
            None
        }
    };
    let var = match variational(cfg) {
        Ok(v) => Some(v),
        Err(e) => {
            note("variational", e);
            None
        }
    };
    let ex = match exact(cfg, 2) {
        Ok(s) => Some(s),
        Err(e) => {
            note("exact", e);
            None
        }
    };
    let row = TableRow {
        label: cfg.potential.label(),
        lambda: cfg.potential.lambda(),
        e0_rg: rg.as_ref().map(|s| s.ground_energy),
        e0_var: var.map(|v| v.w_min),
        e0_exact: ex.as_ref().map(|s| s.energies[0]),
        e1_rg: rg.as_ref().map(FlowSummary::first_excited),
        e1_var: var.and_then(|v| v.gap_var.map(|g| v.w_min + g)),
        e1_exact: ex.as_ref().map(|s| s.energies[1]),
        a_sq_rg: rg.as_ref().map(|s| s.a_sq),
        a_sq_var: var.map(|v| v.a_sq_var),
    };
    (row, warnings)
}
