//! Finite-difference diagonalization of `H = -1/2 d^2/dx^2 + V(x)` (unit mass)
//! on a uniform grid with Dirichlet walls.
//!
//! Eigenvalues come from bisection on the Sturm count of the symmetric
//! tridiagonal matrix, eigenvectors from inverse iteration. Nothing here
//! touches the flow code, so it serves as an independent reference.

use crate::error::{Error, Result};
use crate::observables::DensityProfile;
use crate::polyjet::Polynomial;

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
    /// Grid the matrix was built on, if any.
    pub grid: Vec<f64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `lambda`.
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let coupling = if i == 0 {
                0.0
            } else {
                self.off[i - 1] * self.off[i - 1]
            };
            q = self.diag[i] - lambda - if i == 0 { 0.0 } else { coupling / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + lambda.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// `index`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, index: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale {
                break;
            }
            if self.sturm_count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }
}

/// LU factorization with partial pivoting of `T - shift`, as in LAPACK's
/// `gttrf`: `dl`, `d`, `du`, `du2` hold the factors, `swapped[i]` records an
/// interchange of rows `i` and `i + 1`.
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(t: &Tridiagonal, shift: f64) -> Self {
        let n = t.dim();
        let mut d: Vec<f64> = t.diag.iter().map(|v| v - shift).collect();
        let mut dl = t.off.clone();
        let mut du = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = f64::EPSILON * t.gershgorin().1.abs().max(1.0);
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        ShiftedLu {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.dl[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                v -= self.du2[i] * b[i + 2];
            }
            b[i] = v / self.d[i];
        }
    }
}

/// `-1/2 d^2/dx^2 + p(x)` with the 3-point stencil on `n_points` points
/// spanning `[-x_max, x_max]`.
pub fn build_hamiltonian(p: &Polynomial, x_max: f64, n_points: usize) -> Result<Tridiagonal> {
    if n_points < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 grid points, got {n_points}"
        )));
    }
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "grid half-width must be positive, got {x_max}"
        )));
    }
    let h = 2.0 * x_max / (n_points - 1) as f64;
    let grid: Vec<f64> = (0..n_points).map(|i| -x_max + i as f64 * h).collect();
    let kinetic = 1.0 / (h * h);
    let diag = grid.iter().map(|&x| kinetic + p.eval(x)).collect();
    let off = vec![-0.5 * kinetic; n_points - 1];
    Ok(Tridiagonal { diag, off, grid })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Lowest eigenvalues, ascending.
    pub energies: Vec<f64>,
    /// Eigenvectors matching `energies`, normalized so `h sum psi^2 = 1`.
    pub wavefunctions: Vec<Vec<f64>>,
    pub grid: Vec<f64>,
}

impl SpectrumResult {
    pub fn ground_wavefunction(&self) -> &[f64] {
        &self.wavefunctions[0]
    }

    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// `h sum psi_a psi_b`.
    pub fn overlap(&self, a: usize, b: usize) -> f64 {
        let h = self.spacing();
        h * self.wavefunctions[a]
            .iter()
            .zip(&self.wavefunctions[b])
            .map(|(x, y)| x * y)
            .sum::<f64>()
    }
}

const INVERSE_ITERATIONS: usize = 8;

pub fn lowest_eigenpairs(hamiltonian: &Tridiagonal, k: usize) -> Result<SpectrumResult> {
    let n = hamiltonian.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "cannot extract {k} eigenpairs from dimension {n}"
        )));
    }
    if hamiltonian.grid.len() != n {
        return Err(Error::InvalidInput(
            "hamiltonian carries no matching grid".into(),
        ));
    }
    let h = hamiltonian.grid[1] - hamiltonian.grid[0];
    let scale = {
        let (lo, hi) = hamiltonian.gershgorin();
        lo.abs().max(hi.abs())
    };
    let mut energies = Vec::with_capacity(k);
    let mut wavefunctions: Vec<Vec<f64>> = Vec::with_capacity(k);
    for index in 0..k {
        let lambda = hamiltonian.eigenvalue(index);
        let lu = ShiftedLu::new(hamiltonian, lambda);
        // deterministic start vector without any spatial symmetry
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * (1.7 * i as f64 + 0.3).sin())
            .collect();
        let mut residual = f64::INFINITY;
        for _ in 0..INVERSE_ITERATIONS {
            for prev in &wavefunctions {
                let dot: f64 = h * prev.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
                x.iter_mut().zip(prev).for_each(|(xi, pi)| *xi -= dot * pi);
            }
            lu.solve(&mut x);
            let norm = (h * x.iter().map(|v| v * v).sum::<f64>()).sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(Error::Convergence(format!(
                    "inverse iteration collapsed for state {index}"
                )));
            }
            x.iter_mut().for_each(|v| *v /= norm);
            let hx = hamiltonian.mat_vec(&x);
            residual = (h * hx
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>())
            .sqrt();
            if residual <= 1e-10 * scale {
                break;
            }
        }
        if residual > 1e-6 * scale {
            return Err(Error::Convergence(format!(
                "state {index}: residual {residual:e} after {INVERSE_ITERATIONS} iterations"
            )));
        }
        // sign convention: largest component positive
        let peak = x
            .iter()
            .copied()
            .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if peak < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        energies.push(lambda);
        wavefunctions.push(x);
    }
    Ok(SpectrumResult {
        energies,
        wavefunctions,
        grid: hamiltonian.grid.clone(),
    })
}

/// Lowest `k` levels of `p` on `n_points` spanning `[-x_max, x_max]`.
pub fn solve(p: &Polynomial, x_max: f64, n_points: usize, k: usize) -> Result<SpectrumResult> {
    lowest_eigenpairs(&build_hamiltonian(p, x_max, n_points)?, k)
}

/// Ground-state density `psi_0^2`.
pub fn exact_density(s: &SpectrumResult) -> DensityProfile {
    let rho = s.ground_wavefunction().iter().map(|v| v * v).collect();
    DensityProfile::new(s.grid.clone(), rho)
}
