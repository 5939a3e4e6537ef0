#ifndef UPCONV_H
#define UPCONV_H

/* Generated by cbindgen from the upconv-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of an `upconv_*` call.
typedef enum UpconvStatus {
  UPCONV_STATUS_OK = 0,
  UPCONV_STATUS_NULL_POINTER = 1,
  UPCONV_STATUS_INVALID_ARGUMENT = 2,
  UPCONV_STATUS_DEGENERATE_DISPERSION = 3,
  UPCONV_STATUS_NO_CONVERGENCE = 4,
  UPCONV_STATUS_INTERNAL_ERROR = 5,
} UpconvStatus;

// Opaque handle around a validated dispersion profile.
typedef struct UpconvProfile UpconvProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *upconv_status_message(enum UpconvStatus status);

// Width-matching constant of the Gaussian stand-in for the sinc envelope.
//
// # Safety
// `out` must be null or valid for writing one f64.
enum UpconvStatus upconv_gamma_fwhm(double *out);

// New profile from the three inverse group velocities (s/m). The handle
// must be released with `upconv_profile_free`.
//
// # Safety
// `out` must be null or valid for writing one pointer.
enum UpconvStatus upconv_profile_new(double kp_s,
                                     double kp_i,
                                     double kp_p,
                                     struct UpconvProfile **out);

// New profile with the pump inverse group velocity at the signal/idler
// midpoint (group-velocity-matched pumping).
//
// # Safety
// `out` must be null or valid for writing one pointer.
enum UpconvStatus upconv_profile_matched(double kp_s, double kp_i, struct UpconvProfile **out);

// Release a profile handle. Null is accepted and ignored.
//
// # Safety
// `profile` must be a pointer previously returned through
// `upconv_profile_new`/`upconv_profile_matched` and not yet freed.
void upconv_profile_free(struct UpconvProfile *profile);

// Slice length satisfying the optimality condition at bandwidth `sigma`
// (rad/s), plus the dimensionless dispersion pair it induces.
//
// # Safety
// `profile` must be a live handle from `upconv_profile_new`/`_matched` (or
// null); each out pointer must be null or valid for writing one f64.
enum UpconvStatus upconv_optimal_length(const struct UpconvProfile *profile,
                                        double sigma,
                                        double *out_length,
                                        double *out_d_s,
                                        double *out_d_i);

// Conversion probability at the half-π Rabi angle as a function of the
// dimensionless dispersion pair.
//
// # Safety
// `out` must be null or valid for writing one f64.
enum UpconvStatus upconv_p_odd_surface(double d_s, double d_i, double *out);

// Conversion probability for a crystal of the given length and Rabi angle.
//
// # Safety
// `profile` must be a live handle or null; `out` null or writable.
enum UpconvStatus upconv_p_odd(const struct UpconvProfile *profile,
                               double sigma,
                               double length,
                               double rabi_angle,
                               double *out);

// Conversion probability when the matching conditions carry relative
// errors (eps1 on the pump velocity, eps2 on the slice length), at the
// half-π Rabi angle. Uses the profile's signal/idler velocities.
//
// # Safety
// `profile` must be a live handle or null; `out` null or writable.
enum UpconvStatus upconv_condition_error(const struct UpconvProfile *profile,
                                         double sigma,
                                         double eps1,
                                         double eps2,
                                         double *out);

// Fidelity between the ordered and unordered second-order components for a
// single medium at the optimal length. `rel_tol <= 0` selects the default
// 1e-6.
//
// # Safety
// `profile` must be a live handle or null; `out` null or writable.
enum UpconvStatus upconv_f2_baseline(const struct UpconvProfile *profile,
                                     double sigma,
                                     double rel_tol,
                                     double *out);

// Fidelity between the ordered and unordered second-order components of a
// matched segmented medium with `segments` slices. The ordered side is
// evaluated by explicit double time quadrature; `rel_tol <= 0` selects the
// default 2e-4.
//
// # Safety
// `profile` must be a live handle or null; `out` null or writable.
enum UpconvStatus upconv_f2_segmented(const struct UpconvProfile *profile,
                                      double sigma,
                                      uint32_t segments,
                                      double rel_tol,
                                      double *out);

// Probability that one analyzer run identifies a uniformly drawn Bell
// state: (1 + p_odd)/2.
//
// # Safety
// `out` must be null or valid for writing one f64.
enum UpconvStatus upconv_bell_success(double p_odd, double *out);

// Analytic teleportation-gate success rate (1 + p_odd)²/4.
//
// # Safety
// `out` must be null or valid for writing one f64.
enum UpconvStatus upconv_gate_success(double p_odd, double *out);

// Monte Carlo of the teleportation CNOT on a diagonal-basis control and
// |H⟩ target: empirical success rate and the minimum conditional output
// fidelity over successful trials (NaN when nothing succeeded).
//
// # Safety
// Out pointers must be null or valid for writing one f64 each.
enum UpconvStatus upconv_gate_simulate(double p_odd,
                                       uint64_t seed,
                                       uint64_t trials,
                                       double *out_success_rate,
                                       double *out_min_fidelity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UPCONV_H */
