use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use whlpa::config::{ConfigLayer, GridSpec, PotentialSpec, Preset, RunConfig};
use whlpa::pipeline;
use whlpa::report::{columns_to_rows, format_table, write_csv, write_manifest};
use whlpa::{Error, OmegaConvention};

#[derive(Parser)]
#[command(
    name = "whlpa",
    version,
    about = "Wegner-Houghton LPA flow for 1D quantum mechanics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the flow and report the effective potential at its minimum
    Flow(RunArgs),
    /// Particle density from RG, variational and exact methods
    Density(RunArgs),
    /// Two-point function over the dt grid, plus its fitted decay rate
    Correlate(RunArgs),
    /// Feynman-Kleinert variational estimate
    Variational(RunArgs),
    /// Finite-difference spectrum and ground-state density
    Exact(RunArgs),
    /// Comparison table over all presets (or the given potential)
    Table(RunArgs),
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// key=value config file; command-line flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// harmonic | anharmonic240 | doublewell2.4
    #[arg(long, conflicts_with = "potential")]
    preset: Option<String>,
    /// Couplings such as `g2=1,g4=240` (g_k x^k/k!) or `c4=10` (plain coefficients)
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    /// Number of time slices N (even)
    #[arg(long)]
    slices: Option<usize>,
    /// Taylor truncation order K
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    mass: Option<f64>,
    /// Density grid `lo:hi:count`
    #[arg(long)]
    grid: Option<String>,
    /// Time-separation grid `lo:hi:count`
    #[arg(long)]
    dt_grid: Option<String>,
    /// Decay-rate fit window `lo:hi`
    #[arg(long)]
    fit_window: Option<String>,
    #[arg(long)]
    oracle_xmax: Option<f64>,
    #[arg(long)]
    oracle_points: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the (2 - cos)/eps^2 mode spectrum instead of 4 sin^2/eps^2
    #[arg(long)]
    compat_omega: bool,
}

impl RunArgs {
    fn layer(&self) -> whlpa::Result<ConfigLayer> {
        let mut layer = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                ConfigLayer::from_kv(&text)?
            }
            None => ConfigLayer::default(),
        };
        let mut cli = ConfigLayer::default();
        if let Some(p) = &self.preset {
            cli.potential = Some(PotentialSpec::Preset(Preset::parse(p)?));
        }
        if let Some(p) = &self.potential {
            cli.potential = Some(PotentialSpec::parse_couplings(p)?);
        }
        cli.beta = self.beta;
        cli.n_slices = self.slices;
        cli.order = self.order;
        cli.mass = self.mass;
        cli.density_grid = self.grid.as_deref().map(GridSpec::parse).transpose()?;
        cli.dt_grid = self.dt_grid.as_deref().map(GridSpec::parse).transpose()?;
        if let Some(w) = &self.fit_window {
            cli.set("fit_window", w)?;
        }
        cli.oracle_x_max = self.oracle_xmax;
        cli.oracle_points = self.oracle_points;
        cli.out_dir = self.out.clone();
        if self.compat_omega {
            cli.omega = Some(OmegaConvention::Printed);
        }
        layer = layer.overlay(cli);
        Ok(layer)
    }

    fn resolve(&self) -> whlpa::Result<RunConfig> {
        self.layer()?.resolve()
    }
}

/// Failure exit code; 2 is reserved for a flow breakdown.
enum Failure {
    Breakdown(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::FlowBreakdown { .. } => Failure::Breakdown(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Flow(a) => cmd_flow(a),
        Command::Density(a) => cmd_density(a),
        Command::Correlate(a) => cmd_correlate(a),
        Command::Variational(a) => cmd_variational(a),
        Command::Exact(a) => cmd_exact(a),
        Command::Table(a) => cmd_table(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Breakdown(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_flow(args: &RunArgs) -> Result<(), Failure> {
    let cfg = args.resolve()?;
    write_manifest("flow", &cfg)?;
    let h = pipeline::flow_history(&cfg)?;
    let traj: Vec<Vec<Option<f64>>> = h
        .curvature_trajectory()
        .into_iter()
        .map(|(m, c)| {
            let w2 = if m == 0 {
                0.0
            } else {
                h.spectrum().omega_sq(m)
            };
            vec![Some(m as f64), Some(w2), Some(c)]
        })
        .collect();
    write_csv(
        &cfg.out_dir.join("flow_trajectory.csv"),
        &["mode", "omega_sq", "curvature_at_0"],
        &traj,
    )?;
    let s = pipeline::summarize_flow(&h, &cfg)?;
    let v0 = h.effective_potential()?;
    let coeffs: Vec<Vec<Option<f64>>> = (0..=v0.order())
        .map(|k| vec![Some(k as f64), Some(v0.coeff(k)), Some(v0.coupling(k))])
        .collect();
    write_csv(
        &cfg.out_dir.join("effective_potential.csv"),
        &["k", "coefficient", "coupling"],
        &coeffs,
    )?;
    println!("potential      {}", cfg.potential.label());
    println!("x0bar          {:.10}", s.x0bar);
    println!("ground_energy  {:.10}", s.ground_energy);
    println!("v0_min         {:.10}", s.v0_min);
    println!("gap            {:.10}", s.gap);
    println!("first_excited  {:.10}", s.first_excited());
    println!("a_sq           {:.10}", s.a_sq);
    Ok(())
}

fn cmd_density(args: &RunArgs) -> Result<(), Failure> {
    let cfg = args.resolve()?;
    write_manifest("density", &cfg)?;
    let t = pipeline::density_table(&cfg);
    for w in &t.warnings {
        eprintln!("warning: {w}");
    }
    let rows = columns_to_rows(&[
        Some(&t.xs),
        t.rg.as_deref(),
        t.variational.as_deref(),
        t.exact.as_deref(),
    ]);
    let path = cfg.out_dir.join("density.csv");
    write_csv(&path, &["x", "rho_rg", "rho_var", "rho_exact"], &rows)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_correlate(args: &RunArgs) -> Result<(), Failure> {
    let cfg = args.resolve()?;
    write_manifest("correlate", &cfg)?;
    let r = pipeline::correlate(&cfg)?;
    let rows = columns_to_rows(&[
        Some(&r.two_point.dts),
        Some(&r.two_point.values),
        Some(&r.thermal.values),
    ]);
    let path = cfg.out_dir.join("correlator.csv");
    write_csv(&path, &["dt", "two_point", "thermal_two_point"], &rows)?;
    println!("wrote {}", path.display());
    match r.decay_rate {
        Ok(rate) => {
            println!("decay_rate     {rate:.10}");
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_variational(args: &RunArgs) -> Result<(), Failure> {
    let cfg = args.resolve()?;
    write_manifest("variational", &cfg)?;
    let v = pipeline::variational(&cfg)?;
    let rows = vec![vec![
        Some(v.x0bar),
        Some(v.omega),
        Some(v.w_min),
        Some(v.a_sq_var),
        v.gap_var,
    ]];
    write_csv(
        &cfg.out_dir.join("variational.csv"),
        &["x0bar", "omega", "w_min", "a2_var", "gap_var"],
        &rows,
    )?;
    println!("x0bar          {:.10}", v.x0bar);
    println!("omega          {:.10}", v.omega);
    println!("w_min          {:.10}", v.w_min);
    println!("a_sq_var       {:.10}", v.a_sq_var);
    if let Some(g) = v.gap_var {
        println!("gap_var        {g:.10}");
    }
    Ok(())
}

fn cmd_exact(args: &RunArgs) -> Result<(), Failure> {
    let cfg = args.resolve()?;
    write_manifest("exact", &cfg)?;
    let s = pipeline::exact(&cfg, 2)?;
    let d = whlpa::oracle::exact_density(&s);
    let rows = columns_to_rows(&[Some(&d.xs), Some(&d.rho)]);
    write_csv(
        &cfg.out_dir.join("exact_density.csv"),
        &["x", "rho_exact"],
        &rows,
    )?;
    println!("E0             {:.10}", s.energies[0]);
    println!("E1             {:.10}", s.energies[1]);
    println!("gap            {:.10}", s.energies[1] - s.energies[0]);
    Ok(())
}

fn cmd_table(args: &RunArgs) -> Result<(), Failure> {
    let base = args.layer()?;
    let configs: Vec<RunConfig> = if base.potential.is_some() {
        vec![base.resolve()?]
    } else {
        Preset::ALL
            .into_iter()
            .map(|p| {
                ConfigLayer {
                    potential: Some(PotentialSpec::Preset(p)),
                    ..Default::default()
                }
                .overlay(base.clone())
                .resolve()
            })
            .collect::<whlpa::Result<_>>()?
    };
    let mut rows = Vec::new();
    for cfg in &configs {
        let (row, warnings) = pipeline::table_row(cfg);
        for w in warnings {
            eprintln!("warning: {w}");
        }
        rows.push(row);
    }
    let out_dir = &configs[0].out_dir;
    let csv_rows: Vec<Vec<Option<f64>>> = rows.iter().map(|r| r.values().to_vec()).collect();
    write_csv(
        &out_dir.join("table.csv"),
        &whlpa::pipeline::TableRow::HEADER,
        &csv_rows,
    )?;
    print!("{}", format_table(&rows));
    Ok(())
}
