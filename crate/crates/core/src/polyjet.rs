//! Truncated polynomials in one variable.
//!
//! The running potential is stored as plain monomial coefficients,
//! `coeffs[k]` multiplying `x^k`. Every operation that can raise the degree
//! truncates back to the polynomial's order `K`.

use std::fmt;

use crate::error::{Error, Result};

/// Smallest and largest admissible truncation order.
pub const MIN_ORDER: usize = 2;
pub const MAX_ORDER: usize = 16;

/// Arguments of the logarithm closer to zero than this are treated as a
/// breakdown of the truncation.
pub const LOG_ARGUMENT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial of order `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "polynomial needs at least one coefficient"
        );
        Polynomial { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Polynomial {
            coeffs: vec![0.0; order + 1],
        }
    }

    pub fn constant(c: f64, order: usize) -> Self {
        let mut p = Polynomial::zero(order);
        p.coeffs[0] = c;
        p
    }

    /// `V(x) = sum_k g_k x^k / k!` from `(k, g_k)` pairs, the normalization in
    /// which quartic couplings are usually quoted.
    pub fn from_couplings(couplings: &[(usize, f64)], order: usize) -> Result<Self> {
        let mut p = Polynomial::zero(order);
        for &(k, g) in couplings {
            if k > order {
                return Err(Error::InvalidInput(format!(
                    "coupling g{k} exceeds truncation order {order}"
                )));
            }
            p.coeffs[k] += g / factorial(k);
        }
        Ok(p)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// `k!`-normalized coupling `g_k = k! c_k`.
    pub fn coupling(&self, k: usize) -> f64 {
        self.coeff(k) * factorial(k)
    }

    /// Highest power with a non-zero coefficient, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Re-expresses the polynomial with a different order, zero-padding or
    /// dropping high powers.
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, 0.0);
        Polynomial { coeffs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Exact `n`-th derivative. The result has order `max(K - n, 0)`.
    pub fn derivative(&self, n: usize) -> Polynomial {
        let k_max = self.order();
        if n > k_max {
            return Polynomial::zero(0);
        }
        let coeffs = (n..=k_max)
            .map(|k| self.coeffs[k] * falling_factorial(k, n))
            .collect();
        Polynomial { coeffs }
    }

    /// `n`-th derivative evaluated at `x` without building the intermediate polynomial.
    pub fn derivative_at(&self, n: usize, x: f64) -> f64 {
        let k_max = self.order();
        if n > k_max {
            return 0.0;
        }
        (n..=k_max).rev().fold(0.0, |acc, k| {
            acc * x + self.coeffs[k] * falling_factorial(k, n)
        })
    }

    /// Adds a constant to the zeroth coefficient.
    pub fn shifted(&self, c: f64) -> Polynomial {
        let mut p = self.clone();
        p.coeffs[0] += c;
        p
    }

    pub fn scaled(&self, s: f64) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// Coefficient-wise sum; the order is the larger of the two.
    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let order = self.order().max(other.order());
        let coeffs = (0..=order)
            .map(|k| self.coeff(k) + other.coeff(k))
            .collect();
        Polynomial { coeffs }
    }

    /// Product truncated at degree `order`.
    pub fn mul_truncated(&self, other: &Polynomial, order: usize) -> Polynomial {
        let mut out = vec![0.0; order + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Polynomial { coeffs: out }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Taylor coefficients about `x = 0` of `log(1 + u(x))`, truncated at degree `order`.
///
/// The constant is split off first, `log(1+u) = log(1+u0) + log(1+w)` with
/// `w = (u - u0)/(1 + u0)`, and `log(1+w)` is expanded through the jet
/// recurrence `k g_k = k w_k - sum_{i=1}^{k-1} (k-i) w_i g_{k-i}` that follows
/// from `(1+w) g' = w'`. Odd coefficients of an even `u` come out as exact zeros.
pub fn log1p_series(u: &Polynomial, order: usize) -> Result<Polynomial> {
    let arg = 1.0 + u.coeff(0);
    if !(arg > LOG_ARGUMENT_FLOOR) {
        return Err(Error::FlowBreakdown {
            mode: 0,
            log_argument: arg,
        });
    }
    let w: Vec<f64> = (0..=order)
        .map(|k| if k == 0 { 0.0 } else { u.coeff(k) / arg })
        .collect();
    let mut g = vec![0.0; order + 1];
    for k in 1..=order {
        let mut acc = k as f64 * w[k];
        for i in 1..k {
            if w[i] != 0.0 {
                acc -= (k - i) as f64 * w[i] * g[k - i];
            }
        }
        g[k] = acc / k as f64;
    }
    g[0] = u.coeff(0).ln_1p();
    Ok(Polynomial { coeffs: g })
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// `k (k-1) ... (k-n+1)`.
fn falling_factorial(k: usize, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (k - i) as f64)
}
