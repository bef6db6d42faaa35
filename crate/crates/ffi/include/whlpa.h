#ifndef WHLPA_H
#define WHLPA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WhlpaStatus {
  WHLPA_STATUS_OK = 0,
  WHLPA_STATUS_NULL_POINTER = 1,
  WHLPA_STATUS_INVALID_ARGUMENT = 2,
  WHLPA_STATUS_FLOW_BREAKDOWN = 3,
  WHLPA_STATUS_UNBOUNDED = 4,
  WHLPA_STATUS_NON_CONVEX = 5,
  WHLPA_STATUS_NEGATIVE_MODE_MASS = 6,
  WHLPA_STATUS_NO_MINIMUM = 7,
  WHLPA_STATUS_CONVERGENCE = 8,
  WHLPA_STATUS_BUFFER_TOO_SMALL = 9,
  WHLPA_STATUS_PANIC = 10,
} WhlpaStatus;

// Opaque flow result.
typedef struct WhlpaFlow WhlpaFlow;

typedef struct WhlpaVariational {
  double x0bar;
  double omega;
  double w_min;
  double a_sq_var;
  // NaN when unavailable.
  double gap_var;
} WhlpaVariational;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *whlpa_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *whlpa_version(void);

// Integrates the flow for `V(x) = sum_k coeffs[k] x^k`.
//
// On success and on `FLOW_BREAKDOWN` a handle is stored in `*out`; after a
// breakdown only the coefficient and breakdown accessors are meaningful.
// `compat_omega != 0` selects the `(2 - cos)/eps^2` mode spectrum.
//
// # Safety
// `coeffs` must point to `n_coeffs` doubles and `out` must be writable.
enum WhlpaStatus whlpa_flow_run(const double *coeffs,
                                size_t n_coeffs,
                                double beta,
                                size_t n_slices,
                                double mass,
                                size_t order,
                                int32_t compat_omega,
                                struct WhlpaFlow **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `h` must come from [`whlpa_flow_run`] and not have been freed.
void whlpa_flow_free(struct WhlpaFlow *h);

// Mode index at which the truncation broke down, or 0 if the flow completed.
//
// # Safety
// `h` must be a live handle and `out` writable.
enum WhlpaStatus whlpa_flow_breakdown_mode(const struct WhlpaFlow *h, size_t *out);

// Monomial coefficients of the lowest potential computed (the effective
// potential if the flow completed). `*len` receives `order + 1`; returns
// `BUFFER_TOO_SMALL` without writing `buf` if `cap` is less than that.
//
// # Safety
// `buf` must have room for `cap` doubles; `len` must be writable.
enum WhlpaStatus whlpa_flow_coefficients(const struct WhlpaFlow *h,
                                         double *buf,
                                         size_t cap,
                                         size_t *len);

// Location of the effective-potential minimum.
//
// # Safety
// `h` must be a live handle and `out` writable.
enum WhlpaStatus whlpa_flow_minimum(const struct WhlpaFlow *h, double *out);

// Ground-state energy with the Gaussian zero-mode correction.
//
// # Safety
// `h` must be a live handle and `out` writable.
enum WhlpaStatus whlpa_flow_ground_energy(const struct WhlpaFlow *h, double *out);

// `E_1 - E_0`.
//
// # Safety
// `h` must be a live handle and `out` writable.
enum WhlpaStatus whlpa_flow_energy_gap(const struct WhlpaFlow *h, double *out);

// Density width `a^2` at the minimum.
//
// # Safety
// `h` must be a live handle and `out` writable.
enum WhlpaStatus whlpa_flow_smearing_width_sq(const struct WhlpaFlow *h, double *out);

// `<x(dt) x(0)>` with the zero mode cancelled; `thermal != 0` adds the
// zero-mode fluctuation.
//
// # Safety
// `h` must be a live handle and `out` writable.
enum WhlpaStatus whlpa_flow_two_point(const struct WhlpaFlow *h,
                                      double dt,
                                      int32_t thermal,
                                      double *out);

// Feynman-Kleinert variational estimate for `V(x) = sum_k coeffs[k] x^k`.
//
// # Safety
// `coeffs` must point to `n_coeffs` doubles and `out` must be writable.
enum WhlpaStatus whlpa_variational(const double *coeffs,
                                   size_t n_coeffs,
                                   struct WhlpaVariational *out);

// Lowest `k` energies of the finite-difference Hamiltonian on
// `[-x_max, x_max]` with `n_points` grid points, written to `energies`.
//
// # Safety
// `coeffs` must point to `n_coeffs` doubles and `energies` to room for `k`.
enum WhlpaStatus whlpa_exact_levels(const double *coeffs,
                                    size_t n_coeffs,
                                    double x_max,
                                    size_t n_points,
                                    size_t k,
                                    double *energies);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* WHLPA_H */
