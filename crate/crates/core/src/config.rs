//! Run configuration: presets, flat `key=value` files, and the resolved
//! [`RunConfig`] every subcommand works from.
//!
//! Keys left unset fall back to the preset's defaults (or to the generic
//! defaults for an explicit potential). A resolved config written with
//! [`RunConfig::to_kv`] parses back to the same value.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::lattice::OmegaConvention;
use crate::polyjet::{Polynomial, MAX_ORDER, MIN_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `x^2/2`
    Harmonic,
    /// `x^2/2 + (240/4!) x^4`
    Anharmonic240,
    /// `-x^2/2 + (2.4/4!) x^4 + 1/(4g)` with `g = 0.4`, so the wells sit at zero energy.
    DoubleWell2_4,
}

impl Preset {
    pub const ALL: [Preset; 3] = [
        Preset::Harmonic,
        Preset::Anharmonic240,
        Preset::DoubleWell2_4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Harmonic => "harmonic",
            Preset::Anharmonic240 => "anharmonic240",
            Preset::DoubleWell2_4 => "doublewell2.4",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown preset `{s}` (known: harmonic, anharmonic240, doublewell2.4)"
                ))
            })
    }

    /// Quartic coupling `lambda` in `V = +-x^2/2 + lambda x^4 / 4!`.
    pub fn lambda(self) -> f64 {
        match self {
            Preset::Harmonic => 0.0,
            Preset::Anharmonic240 => 240.0,
            Preset::DoubleWell2_4 => 2.4,
        }
    }

    pub fn couplings(self) -> Vec<(usize, f64)> {
        match self {
            Preset::Harmonic => vec![(2, 1.0)],
            Preset::Anharmonic240 => vec![(2, 1.0), (4, 240.0)],
            // 1/(4g) with g/4 = 2.4/4!
            Preset::DoubleWell2_4 => vec![(0, 0.625), (2, -1.0), (4, 2.4)],
        }
    }

    fn defaults(self) -> Defaults {
        match self {
            Preset::Harmonic => Defaults {
                order: 2,
                density: GridSpec::new(-4.0, 4.0, 801),
                ..Defaults::GENERIC
            },
            Preset::Anharmonic240 => Defaults::GENERIC,
            // the tenth-order truncation only survives the last few modes when
            // they are finely spaced, i.e. deep in the zero-temperature regime
            Preset::DoubleWell2_4 => Defaults {
                beta: 4096.0,
                n_slices: 1 << 19,
                order: 10,
                density: GridSpec::new(-5.0, 5.0, 1001),
                oracle_x_max: 12.0,
            },
        }
    }
}

struct Defaults {
    beta: f64,
    n_slices: usize,
    order: usize,
    density: GridSpec,
    oracle_x_max: f64,
}

impl Defaults {
    const GENERIC: Defaults = Defaults {
        beta: 40.0,
        n_slices: 1 << 14,
        order: 6,
        density: GridSpec {
            lo: -1.5,
            hi: 1.5,
            count: 601,
        },
        oracle_x_max: 10.0,
    };
}

/// `count` uniformly spaced points on `[lo, hi]`, written `lo:hi:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridSpec {
    pub const fn new(lo: f64, hi: f64, count: usize) -> Self {
        GridSpec { lo, hi, count }
    }

    pub fn points(&self) -> Vec<f64> {
        crate::observables::uniform_grid(self.lo, self.hi, self.count)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "grid `{s}` is not of the form lo:hi:count"
            )));
        }
        Ok(GridSpec {
            lo: parse_f64("grid", parts[0])?,
            hi: parse_f64("grid", parts[1])?,
            count: parse_usize("grid", parts[2])?,
        })
    }
}

impl std::fmt::Display for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}:{:?}:{}", self.lo, self.hi, self.count)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Preset(Preset),
    /// `(k, g_k)` with `V = sum_k g_k x^k / k!`.
    Couplings(Vec<(usize, f64)>),
}

impl PotentialSpec {
    /// Parses `g2=1,g4=240` (factorial-normalized couplings) or `c4=10`
    /// (plain monomial coefficients); the two forms can be mixed.
    pub fn parse_couplings(s: &str) -> Result<Self> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = item.split_once('=').ok_or_else(|| {
                Error::Config(format!("potential term `{item}` is not key=value"))
            })?;
            let key = key.trim();
            let (kind, power) = key.split_at(1);
            let k = parse_usize("potential", power)?;
            let v = parse_f64("potential", value.trim())?;
            let g = match kind {
                "g" => v,
                "c" => v * crate::polyjet::factorial(k),
                _ => {
                    return Err(Error::Config(format!(
                        "potential key `{key}` must start with g or c"
                    )))
                }
            };
            match out.iter_mut().find(|(p, _)| *p == k) {
                Some(entry) => entry.1 += g,
                None => out.push((k, g)),
            }
        }
        if out.is_empty() {
            return Err(Error::Config("empty potential".into()));
        }
        out.sort_by_key(|&(k, _)| k);
        Ok(PotentialSpec::Couplings(out))
    }

    pub fn couplings(&self) -> Vec<(usize, f64)> {
        match self {
            PotentialSpec::Preset(p) => p.couplings(),
            PotentialSpec::Couplings(c) => c.clone(),
        }
    }

    pub fn degree(&self) -> usize {
        self.couplings()
            .iter()
            .filter(|c| c.1 != 0.0)
            .map(|c| c.0)
            .max()
            .unwrap_or(0)
    }

    pub fn polynomial(&self, order: usize) -> Result<Polynomial> {
        Polynomial::from_couplings(&self.couplings(), order)
    }

    /// Quartic coupling for table output.
    pub fn lambda(&self) -> f64 {
        match self {
            PotentialSpec::Preset(p) => p.lambda(),
            PotentialSpec::Couplings(c) => c.iter().filter(|t| t.0 == 4).map(|t| t.1).sum(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            PotentialSpec::Preset(p) => p.name().to_string(),
            PotentialSpec::Couplings(c) => c
                .iter()
                .map(|(k, g)| format!("g{k}={g:?}"))
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

/// Fully resolved and validated run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub beta: f64,
    pub n_slices: usize,
    pub order: usize,
    pub mass: f64,
    pub omega: OmegaConvention,
    pub density_grid: GridSpec,
    pub dt_grid: GridSpec,
    pub fit_window: (f64, f64),
    pub min_window: f64,
    pub oracle_x_max: f64,
    pub oracle_points: usize,
    pub out_dir: PathBuf,
}

/// Partially specified configuration; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigLayer {
    pub potential: Option<PotentialSpec>,
    pub beta: Option<f64>,
    pub n_slices: Option<usize>,
    pub order: Option<usize>,
    pub mass: Option<f64>,
    pub omega: Option<OmegaConvention>,
    pub density_grid: Option<GridSpec>,
    pub dt_grid: Option<GridSpec>,
    pub fit_window: Option<(f64, f64)>,
    pub min_window: Option<f64>,
    pub oracle_x_max: Option<f64>,
    pub oracle_points: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::Config(format!("{key}: `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("{key}: `{v}` is not finite")));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: `{v}` is not a non-negative integer")))
}

fn parse_window(key: &str, v: &str) -> Result<(f64, f64)> {
    let (a, b) = v
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("{key}: `{v}` is not of the form lo:hi")))?;
    Ok((parse_f64(key, a.trim())?, parse_f64(key, b.trim())?))
}

impl ConfigLayer {
    /// Parses a flat `key=value` file. Blank lines and `#` comments are skipped.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut layer = ConfigLayer::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            layer.set(key.trim(), value.trim())?;
        }
        Ok(layer)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "preset" => self.potential = Some(PotentialSpec::Preset(Preset::parse(value)?)),
            "potential" => self.potential = Some(PotentialSpec::parse_couplings(value)?),
            "beta" => self.beta = Some(parse_f64(key, value)?),
            "slices" => self.n_slices = Some(parse_usize(key, value)?),
            "order" => self.order = Some(parse_usize(key, value)?),
            "mass" => self.mass = Some(parse_f64(key, value)?),
            "omega" => self.omega = Some(OmegaConvention::parse(value)?),
            "grid" => self.density_grid = Some(GridSpec::parse(value)?),
            "dt_grid" => self.dt_grid = Some(GridSpec::parse(value)?),
            "fit_window" => self.fit_window = Some(parse_window(key, value)?),
            "min_window" => self.min_window = Some(parse_f64(key, value)?),
            "oracle_xmax" => self.oracle_x_max = Some(parse_f64(key, value)?),
            "oracle_points" => self.oracle_points = Some(parse_usize(key, value)?),
            "out" => self.out_dir = Some(PathBuf::from(value)),
            // written by manifests, informational only
            "version" | "command" => {}
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// `other` wins wherever it is set.
    pub fn overlay(mut self, other: ConfigLayer) -> ConfigLayer {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            potential,
            beta,
            n_slices,
            order,
            mass,
            omega,
            density_grid,
            dt_grid,
            fit_window,
            min_window,
            oracle_x_max,
            oracle_points,
            out_dir
        );
        self
    }

    pub fn resolve(self) -> Result<RunConfig> {
        let potential = self.potential.ok_or_else(|| {
            Error::Config("no potential: give a preset or an explicit potential".into())
        })?;
        let defaults = match &potential {
            PotentialSpec::Preset(p) => p.defaults(),
            PotentialSpec::Couplings(_) => Defaults::GENERIC,
        };
        let order = self
            .order
            .unwrap_or_else(|| defaults.order.max(potential.degree()));
        let config = RunConfig {
            potential,
            beta: self.beta.unwrap_or(defaults.beta),
            n_slices: self.n_slices.unwrap_or(defaults.n_slices),
            order,
            mass: self.mass.unwrap_or(1.0),
            omega: self.omega.unwrap_or_default(),
            density_grid: self.density_grid.unwrap_or(defaults.density),
            dt_grid: self.dt_grid.unwrap_or(GridSpec::new(0.0, 4.0, 81)),
            fit_window: self.fit_window.unwrap_or((0.5, 2.0)),
            min_window: self.min_window.unwrap_or(10.0),
            oracle_x_max: self.oracle_x_max.unwrap_or(defaults.oracle_x_max),
            oracle_points: self.oracle_points.unwrap_or(4001),
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("out")),
        };
        config.validate()?;
        Ok(config)
    }
}

impl RunConfig {
    pub fn preset(preset: Preset) -> Self {
        ConfigLayer {
            potential: Some(PotentialSpec::Preset(preset)),
            ..Default::default()
        }
        .resolve()
        .expect("presets are valid")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.beta > 0.0) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if self.n_slices < 2 || !self.n_slices.is_multiple_of(2) {
            return bad(format!(
                "slices must be even and >= 2, got {}",
                self.n_slices
            ));
        }
        if !(MIN_ORDER..=MAX_ORDER).contains(&self.order) {
            return bad(format!(
                "order must lie in {MIN_ORDER}..={MAX_ORDER}, got {}",
                self.order
            ));
        }
        if self.potential.degree() > self.order {
            return bad(format!(
                "potential degree {} exceeds truncation order {}",
                self.potential.degree(),
                self.order
            ));
        }
        if !(self.mass > 0.0) {
            return bad(format!("mass must be positive, got {}", self.mass));
        }
        for (name, g) in [("grid", &self.density_grid), ("dt_grid", &self.dt_grid)] {
            if g.count < 2 || !(g.hi > g.lo) {
                return bad(format!("{name} needs hi > lo and at least 2 points"));
            }
        }
        if self.dt_grid.lo < 0.0 || self.dt_grid.hi > self.beta {
            return bad(format!("dt_grid must lie inside [0, beta = {}]", self.beta));
        }
        if !(self.fit_window.1 > self.fit_window.0) {
            return bad("fit_window needs hi > lo".into());
        }
        if !(self.min_window > 0.0) {
            return bad("min_window must be positive".into());
        }
        if !(self.oracle_x_max > 0.0) || self.oracle_points < 3 {
            return bad("oracle grid needs a positive half-width and at least 3 points".into());
        }
        Ok(())
    }

    pub fn polynomial(&self) -> Result<Polynomial> {
        self.potential.polynomial(self.order)
    }

    /// The resolved config as `key=value` lines; parses back to `self`.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        match &self.potential {
            PotentialSpec::Preset(p) => writeln!(s, "preset={}", p.name()),
            PotentialSpec::Couplings(_) => writeln!(s, "potential={}", self.potential.label()),
        }
        .unwrap();
        let lines = [
            ("beta", format!("{:?}", self.beta)),
            ("slices", self.n_slices.to_string()),
            ("order", self.order.to_string()),
            ("mass", format!("{:?}", self.mass)),
            ("omega", self.omega.as_str().to_string()),
            ("grid", self.density_grid.to_string()),
            ("dt_grid", self.dt_grid.to_string()),
            (
                "fit_window",
                format!("{:?}:{:?}", self.fit_window.0, self.fit_window.1),
            ),
            ("min_window", format!("{:?}", self.min_window)),
            ("oracle_xmax", format!("{:?}", self.oracle_x_max)),
            ("oracle_points", self.oracle_points.to_string()),
            ("out", self.out_dir.display().to_string()),
        ];
        for (k, v) in lines {
            writeln!(s, "{k}={v}").unwrap();
        }
        s
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        ConfigLayer::from_kv(text)?.resolve()
    }
}
