//! C ABI over the `whlpa` library.
//!
//! Every function returns a [`WhlpaStatus`]; results are written through out
//! pointers. On failure a description is available from
//! [`whlpa_last_error_message`] on the same thread. Potentials are passed as
//! plain monomial coefficients `c_0, c_1, ...` with `V(x) = sum_k c_k x^k`.
//!
//! Flow handles are created by [`whlpa_flow_run`] and released with
//! [`whlpa_flow_free`]. A handle is not thread-safe but may be moved
//! between threads.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use whlpa::lattice::build_lattice_with;
use whlpa::observables;
use whlpa::{flow, oracle, variational, Error, FlowHistory, OmegaConvention, Polynomial};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhlpaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    FlowBreakdown = 3,
    Unbounded = 4,
    NonConvex = 5,
    NegativeModeMass = 6,
    NoMinimum = 7,
    Convergence = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Opaque flow result.
pub struct WhlpaFlow {
    history: FlowHistory,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhlpaVariational {
    pub x0bar: f64,
    pub omega: f64,
    pub w_min: f64,
    pub a_sq_var: f64,
    /// NaN when unavailable.
    pub gap_var: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> WhlpaStatus {
    match e {
        Error::FlowBreakdown { .. } => WhlpaStatus::FlowBreakdown,
        Error::Unbounded { .. } => WhlpaStatus::Unbounded,
        Error::NonConvex { .. } => WhlpaStatus::NonConvex,
        Error::NegativeModeMass { .. } => WhlpaStatus::NegativeModeMass,
        Error::NoMinimum => WhlpaStatus::NoMinimum,
        Error::Convergence(_) => WhlpaStatus::Convergence,
        Error::InvalidLattice(_) | Error::InvalidInput(_) | Error::Config(_) => {
            WhlpaStatus::InvalidArgument
        }
    }
}

enum Fail {
    Status(WhlpaStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status plus last-error text.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> WhlpaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WhlpaStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_last_error(msg);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            WhlpaStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(WhlpaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_poly(coeffs: *const f64, n_coeffs: usize, order: usize) -> Result<Polynomial, Fail> {
    if coeffs.is_null() {
        return Err(null("coeffs"));
    }
    if n_coeffs == 0 {
        return Err(Fail::Status(
            WhlpaStatus::InvalidArgument,
            "no coefficients".into(),
        ));
    }
    let c = std::slice::from_raw_parts(coeffs, n_coeffs).to_vec();
    Ok(Polynomial::new(c).with_order(order.max(n_coeffs - 1)))
}

unsafe fn handle<'a>(h: *const WhlpaFlow) -> Result<&'a WhlpaFlow, Fail> {
    h.as_ref().ok_or_else(|| null("flow handle"))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn whlpa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn whlpa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Integrates the flow for `V(x) = sum_k coeffs[k] x^k`.
///
/// On success and on `FLOW_BREAKDOWN` a handle is stored in `*out`; after a
/// breakdown only the coefficient and breakdown accessors are meaningful.
/// `compat_omega != 0` selects the `(2 - cos)/eps^2` mode spectrum.
///
/// # Safety
/// `coeffs` must point to `n_coeffs` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn whlpa_flow_run(
    coeffs: *const f64,
    n_coeffs: usize,
    beta: f64,
    n_slices: usize,
    mass: f64,
    order: usize,
    compat_omega: i32,
    out: *mut *mut WhlpaFlow,
) -> WhlpaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let v = read_poly(coeffs, n_coeffs, order)?;
        let conv = if compat_omega != 0 {
            OmegaConvention::Printed
        } else {
            OmegaConvention::Laplacian
        };
        let (lat, spec) = build_lattice_with(beta, n_slices, mass, conv)?;
        let history = flow::run_flow_partial(&v, &lat, &spec, order)?;
        let breakdown = history.ensure_complete();
        *out = Box::into_raw(Box::new(WhlpaFlow { history }));
        breakdown.map_err(Fail::from)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must come from [`whlpa_flow_run`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn whlpa_flow_free(h: *mut WhlpaFlow) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Mode index at which the truncation broke down, or 0 if the flow completed.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn whlpa_flow_breakdown_mode(
    h: *const WhlpaFlow,
    out: *mut usize,
) -> WhlpaStatus {
    guard(|| write(out, handle(h)?.history.breakdown_at().unwrap_or(0)))
}

/// Monomial coefficients of the lowest potential computed (the effective
/// potential if the flow completed). `*len` receives `order + 1`; returns
/// `BUFFER_TOO_SMALL` without writing `buf` if `cap` is less than that.
///
/// # Safety
/// `buf` must have room for `cap` doubles; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn whlpa_flow_coefficients(
    h: *const WhlpaFlow,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> WhlpaStatus {
    guard(|| {
        let hist = &handle(h)?.history;
        let c = hist.coeffs_at(hist.lowest_mode()).unwrap_or(&[]);
        write(len, c.len())?;
        if cap < c.len() {
            return Err(Fail::Status(
                WhlpaStatus::BufferTooSmall,
                format!("need {} doubles, got {cap}", c.len()),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(c.as_ptr(), buf, c.len());
        Ok(())
    })
}

unsafe fn scalar(
    h: *const WhlpaFlow,
    out: *mut f64,
    f: impl FnOnce(&FlowHistory) -> whlpa::Result<f64>,
) -> WhlpaStatus {
    guard(|| {
        let v = f(&handle(h)?.history)?;
        write(out, v)
    })
}

/// Location of the effective-potential minimum.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn whlpa_flow_minimum(h: *const WhlpaFlow, out: *mut f64) -> WhlpaStatus {
    scalar(h, out, observables::background)
}

/// Ground-state energy with the Gaussian zero-mode correction.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn whlpa_flow_ground_energy(
    h: *const WhlpaFlow,
    out: *mut f64,
) -> WhlpaStatus {
    scalar(h, out, observables::ground_energy)
}

/// `E_1 - E_0`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn whlpa_flow_energy_gap(h: *const WhlpaFlow, out: *mut f64) -> WhlpaStatus {
    scalar(h, out, observables::energy_gap)
}

/// Density width `a^2` at the minimum.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn whlpa_flow_smearing_width_sq(
    h: *const WhlpaFlow,
    out: *mut f64,
) -> WhlpaStatus {
    scalar(h, out, |hist| {
        observables::smearing_width_sq(hist, observables::background(hist)?)
    })
}

/// `<x(dt) x(0)>` with the zero mode cancelled; `thermal != 0` adds the
/// zero-mode fluctuation.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn whlpa_flow_two_point(
    h: *const WhlpaFlow,
    dt: f64,
    thermal: i32,
    out: *mut f64,
) -> WhlpaStatus {
    guard(|| {
        let hist = &handle(h)?.history;
        let v = if thermal != 0 {
            observables::thermal_two_point(hist, dt)?
        } else {
            observables::two_point(hist, dt)?
        };
        write(out, v)
    })
}

/// Feynman-Kleinert variational estimate for `V(x) = sum_k coeffs[k] x^k`.
///
/// # Safety
/// `coeffs` must point to `n_coeffs` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn whlpa_variational(
    coeffs: *const f64,
    n_coeffs: usize,
    out: *mut WhlpaVariational,
) -> WhlpaStatus {
    guard(|| {
        let p = read_poly(coeffs, n_coeffs, 0)?;
        let r = variational::variational_summary(&p)?;
        write(
            out,
            WhlpaVariational {
                x0bar: r.x0bar,
                omega: r.omega,
                w_min: r.w_min,
                a_sq_var: r.a_sq_var,
                gap_var: r.gap_var.unwrap_or(f64::NAN),
            },
        )
    })
}

/// Lowest `k` energies of the finite-difference Hamiltonian on
/// `[-x_max, x_max]` with `n_points` grid points, written to `energies`.
///
/// # Safety
/// `coeffs` must point to `n_coeffs` doubles and `energies` to room for `k`.
#[no_mangle]
pub unsafe extern "C" fn whlpa_exact_levels(
    coeffs: *const f64,
    n_coeffs: usize,
    x_max: f64,
    n_points: usize,
    k: usize,
    energies: *mut f64,
) -> WhlpaStatus {
    guard(|| {
        let p = read_poly(coeffs, n_coeffs, 0)?;
        if energies.is_null() {
            return Err(null("energies"));
        }
        let s = oracle::solve(&p, x_max, n_points, k)?;
        ptr::copy_nonoverlapping(s.energies.as_ptr(), energies, k);
        Ok(())
    })
}
