//! Discrete imaginary-time lattice and the Fourier-mode spectrum of the
//! periodic discrete Laplacian.
//!
//! Units: hbar = 1. A path on the lattice has `N + 1` slices of width
//! `epsilon = beta / (N + 1)`; the non-zero Fourier modes come in `+-m`
//! pairs for `m = 1..=N/2`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Which eigenvalue formula is used for the mode stiffnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmegaConvention {
    /// `2 (1 - cos(2 pi m / (N+1))) / eps^2`, the periodic discrete Laplacian.
    #[default]
    Laplacian,
    /// `(2 - cos(2 pi m / (N+1))) / eps^2`. Kept only for A/B comparison; it
    /// does not vanish as `m -> 0` and has no continuum limit.
    Printed,
}

impl OmegaConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            OmegaConvention::Laplacian => "laplacian",
            OmegaConvention::Printed => "printed",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "laplacian" => Ok(OmegaConvention::Laplacian),
            "printed" => Ok(OmegaConvention::Printed),
            other => Err(Error::Config(format!("unknown omega convention `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConfig {
    pub beta: f64,
    pub n_slices: usize,
    pub epsilon: f64,
    pub mass: f64,
    pub convention: OmegaConvention,
}

impl LatticeConfig {
    /// Number of `+-m` mode pairs, `N/2`.
    pub fn n_modes(&self) -> usize {
        self.n_slices / 2
    }

    /// Slice times `t_n = n * epsilon`, `n = 1..=N+1`.
    pub fn slice_times(&self) -> Vec<f64> {
        (1..=self.n_slices + 1)
            .map(|n| n as f64 * self.epsilon)
            .collect()
    }
}

/// Mode eigenvalues, stored for `m = 1..=N/2` at index `m - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    omega_sq: Vec<f64>,
    nu: Vec<f64>,
}

impl ModeSpectrum {
    pub fn len(&self) -> usize {
        self.omega_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_sq.is_empty()
    }

    /// Lattice eigenvalue of mode `m` (1-based).
    pub fn omega_sq(&self, m: usize) -> f64 {
        self.omega_sq[m - 1]
    }

    /// Continuum Matsubara frequency `2 pi m / beta` of mode `m` (1-based).
    pub fn nu(&self, m: usize) -> f64 {
        self.nu[m - 1]
    }

    pub fn omega_sq_all(&self) -> &[f64] {
        &self.omega_sq
    }

    pub fn nu_all(&self) -> &[f64] {
        &self.nu
    }
}

pub fn build_lattice(
    beta: f64,
    n_slices: usize,
    mass: f64,
) -> Result<(LatticeConfig, ModeSpectrum)> {
    build_lattice_with(beta, n_slices, mass, OmegaConvention::Laplacian)
}

pub fn build_lattice_with(
    beta: f64,
    n_slices: usize,
    mass: f64,
    convention: OmegaConvention,
) -> Result<(LatticeConfig, ModeSpectrum)> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidLattice(format!(
            "beta must be positive, got {beta}"
        )));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::InvalidLattice(format!(
            "mass must be positive, got {mass}"
        )));
    }
    if n_slices < 2 || !n_slices.is_multiple_of(2) {
        return Err(Error::InvalidLattice(format!(
            "number of slices must be even and >= 2, got {n_slices}"
        )));
    }
    let slices = (n_slices + 1) as f64;
    let epsilon = beta / slices;
    let eps_sq = epsilon * epsilon;
    let n_modes = n_slices / 2;
    let mut omega_sq = Vec::with_capacity(n_modes);
    let mut nu = Vec::with_capacity(n_modes);
    for m in 1..=n_modes {
        let theta = 2.0 * PI * m as f64 / slices;
        let w2 = match convention {
            // 2(1 - cos t) = 4 sin^2(t/2), which avoids cancellation at small t
            OmegaConvention::Laplacian => 4.0 * (0.5 * theta).sin().powi(2) / eps_sq,
            OmegaConvention::Printed => (2.0 - theta.cos()) / eps_sq,
        };
        omega_sq.push(w2);
        nu.push(2.0 * PI * m as f64 / beta);
    }
    let lattice = LatticeConfig {
        beta,
        n_slices,
        epsilon,
        mass,
        convention,
    };
    Ok((lattice, ModeSpectrum { omega_sq, nu }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn small_lattice_first_mode() {
        let (lat, spec) = build_lattice(20.0, 4, 1.0).unwrap();
        assert_eq!(lat.epsilon, 4.0);
        // 2(1 - cos(2 pi / 5)) / 16
        let expected = 2.0 * (1.0 - (2.0 * PI / 5.0).cos()) / 16.0;
        assert_relative_eq!(spec.omega_sq(1), expected, max_relative = 1e-14);
        assert_relative_eq!(spec.omega_sq(1), 0.086373, epsilon = 1e-6);
        assert_eq!(spec.len(), 2);
    }

    #[test]
    fn continuum_limit_of_first_mode() {
        let beta = 2.0 * PI;
        let mut prev_err = f64::INFINITY;
        for &n in &[64usize, 128, 256, 512] {
            let (_, spec) = build_lattice(beta, n, 1.0).unwrap();
            let err = (spec.omega_sq(1) - 1.0).abs();
            // O(1/N^2): halving the spacing quarters the error
            assert!(err < 4.0 / (n as f64).powi(2), "n={n} err={err}");
            if prev_err.is_finite() {
                assert_relative_eq!(prev_err / err, 4.0, max_relative = 0.05);
            }
            prev_err = err;
        }
    }

    #[test]
    fn spectrum_is_increasing_and_bounded() {
        for &(beta, n) in &[(1.0, 2usize), (20.0, 4), (40.0, 1000), (7.3, 4096)] {
            let (lat, spec) = build_lattice(beta, n, 1.0).unwrap();
            assert_eq!(lat.epsilon * (n + 1) as f64, beta);
            let bound = 4.0 / (lat.epsilon * lat.epsilon);
            for w in spec.omega_sq_all().windows(2) {
                assert!(w[1] > w[0]);
            }
            assert!(spec.omega_sq_all().iter().all(|&w| w > 0.0 && w <= bound));
        }
    }

    #[test]
    fn doubling_slices_converges() {
        let beta = 10.0;
        let (_, a) = build_lattice(beta, 1024, 1.0).unwrap();
        let (_, b) = build_lattice(beta, 2048, 1.0).unwrap();
        for m in 1..=5 {
            let diff = (a.omega_sq(m) - b.omega_sq(m)).abs();
            let nu2 = a.nu(m).powi(2);
            // leading correction is -nu^4 eps^2 / 12
            let c = nu2 * nu2 * beta * beta / 12.0;
            assert!(diff < c / (1024.0f64).powi(2), "m={m}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            build_lattice(1.0, 3, 1.0),
            Err(Error::InvalidLattice(_))
        ));
        assert!(matches!(
            build_lattice(1.0, 0, 1.0),
            Err(Error::InvalidLattice(_))
        ));
        assert!(matches!(
            build_lattice(0.0, 4, 1.0),
            Err(Error::InvalidLattice(_))
        ));
        assert!(matches!(
            build_lattice(-1.0, 4, 1.0),
            Err(Error::InvalidLattice(_))
        ));
        assert!(matches!(
            build_lattice(1.0, 4, 0.0),
            Err(Error::InvalidLattice(_))
        ));
    }

    #[test]
    fn printed_variant_does_not_vanish() {
        let (lat, spec) = build_lattice_with(10.0, 100, 1.0, OmegaConvention::Printed).unwrap();
        assert!(spec.omega_sq(1) > 1.0 / (lat.epsilon * lat.epsilon));
    }
}
