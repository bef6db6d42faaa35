//! Zero-temperature effective potentials, energy levels, correlators and
//! particle densities of one-dimensional quantum systems from the
//! Wegner-Houghton renormalization-group flow in the local potential
//! approximation.
//!
//! The pipeline is: build a [`lattice`], run the mode-by-mode [`flow`] on a
//! truncated [`polyjet::Polynomial`], and read [`observables`] off the
//! recorded history. [`variational`] provides the Feynman-Kleinert baseline
//! and [`oracle`] an exact finite-difference Schrodinger solver.
//!
//! [`config`], [`pipeline`] and [`report`] wire these together for the
//! `whlpa` command-line tool.

// `!(x > 0.0)` is used on purpose throughout: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod flow;
pub mod lattice;
pub mod observables;
pub mod oracle;
pub mod pipeline;
pub mod polyjet;
pub mod report;
pub mod variational;

pub use error::{Error, Result};
pub use flow::{find_minimum, run_flow, wh_step, FlowHistory, MinimumSearch};
pub use lattice::{build_lattice, LatticeConfig, ModeSpectrum, OmegaConvention};
pub use polyjet::Polynomial;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
