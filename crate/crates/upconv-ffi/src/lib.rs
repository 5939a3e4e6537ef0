//! C ABI over the `upconv` numerics: opaque dispersion-profile handles,
//! integer status codes, out-parameters for every result. All functions are
//! panic-safe; passing null where a pointer is expected returns
//! `UPCONV_STATUS_NULL_POINTER` instead of crashing.

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use upconv::bell;
use upconv::conversion;
use upconv::quad::QuadratureSpec;
use upconv::series::fidelity_f2;
use upconv::spectral::{CrystalConfig, DispersionProfile, DEGENERACY_FLOOR};

/// Outcome of an `upconv_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpconvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DegenerateDispersion = 3,
    NoConvergence = 4,
    InternalError = 5,
}

fn status_of(err: &upconv::Error) -> UpconvStatus {
    match err {
        upconv::Error::DegenerateDispersion { .. } => UpconvStatus::DegenerateDispersion,
        upconv::Error::NonConvergence { .. } => UpconvStatus::NoConvergence,
        upconv::Error::InvalidInput(_) | upconv::Error::Config(_) | upconv::Error::NoRealLength(_) => {
            UpconvStatus::InvalidArgument
        }
        _ => UpconvStatus::InternalError,
    }
}

/// Opaque handle around a validated dispersion profile.
pub struct UpconvProfile {
    inner: DispersionProfile,
}

fn guarded(f: impl FnOnce() -> UpconvStatus) -> UpconvStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(UpconvStatus::InternalError)
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn upconv_status_message(status: UpconvStatus) -> *const c_char {
    let text: &'static [u8] = match status {
        UpconvStatus::Ok => b"ok\0",
        UpconvStatus::NullPointer => b"null pointer argument\0",
        UpconvStatus::InvalidArgument => b"invalid argument\0",
        UpconvStatus::DegenerateDispersion => b"degenerate dispersion (k'_s too close to k'_i)\0",
        UpconvStatus::NoConvergence => b"quadrature did not converge\0",
        UpconvStatus::InternalError => b"internal error\0",
    };
    text.as_ptr().cast()
}

/// Width-matching constant of the Gaussian stand-in for the sinc envelope.
///
/// # Safety
/// `out` must be null or valid for writing one f64.
#[no_mangle]
pub unsafe extern "C" fn upconv_gamma_fwhm(out: *mut f64) -> UpconvStatus {
    guarded(|| {
        if out.is_null() {
            return UpconvStatus::NullPointer;
        }
        unsafe { *out = upconv::spectral::gamma_fwhm() };
        UpconvStatus::Ok
    })
}

/// New profile from the three inverse group velocities (s/m). The handle
/// must be released with `upconv_profile_free`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn upconv_profile_new(
    kp_s: f64,
    kp_i: f64,
    kp_p: f64,
    out: *mut *mut UpconvProfile,
) -> UpconvStatus {
    guarded(|| {
        if out.is_null() {
            return UpconvStatus::NullPointer;
        }
        match DispersionProfile::new(kp_s, kp_i, kp_p) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(UpconvProfile { inner })) };
                UpconvStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// New profile with the pump inverse group velocity at the signal/idler
/// midpoint (group-velocity-matched pumping).
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn upconv_profile_matched(
    kp_s: f64,
    kp_i: f64,
    out: *mut *mut UpconvProfile,
) -> UpconvStatus {
    upconv_profile_new(kp_s, kp_i, 0.5 * (kp_s + kp_i), out)
}

/// Release a profile handle. Null is accepted and ignored.
///
/// # Safety
/// `profile` must be a pointer previously returned through
/// `upconv_profile_new`/`upconv_profile_matched` and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn upconv_profile_free(profile: *mut UpconvProfile) {
    if !profile.is_null() {
        drop(unsafe { Box::from_raw(profile) });
    }
}

unsafe fn profile_ref<'a>(p: *const UpconvProfile) -> Option<&'a DispersionProfile> {
    unsafe { p.as_ref() }.map(|h| &h.inner)
}

/// Slice length satisfying the optimality condition at bandwidth `sigma`
/// (rad/s), plus the dimensionless dispersion pair it induces.
///
/// # Safety
/// `profile` must be a live handle from `upconv_profile_new`/`_matched` (or
/// null); each out pointer must be null or valid for writing one f64.
#[no_mangle]
pub unsafe extern "C" fn upconv_optimal_length(
    profile: *const UpconvProfile,
    sigma: f64,
    out_length: *mut f64,
    out_d_s: *mut f64,
    out_d_i: *mut f64,
) -> UpconvStatus {
    guarded(|| {
        let Some(p) = (unsafe { profile_ref(profile) }) else {
            return UpconvStatus::NullPointer;
        };
        if out_length.is_null() || out_d_s.is_null() || out_d_i.is_null() {
            return UpconvStatus::NullPointer;
        }
        match conversion::optimal_conditions(p, sigma) {
            Ok((l, ds, di)) => {
                unsafe {
                    *out_length = l;
                    *out_d_s = ds;
                    *out_d_i = di;
                }
                UpconvStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Conversion probability at the half-π Rabi angle as a function of the
/// dimensionless dispersion pair.
///
/// # Safety
/// `out` must be null or valid for writing one f64.
#[no_mangle]
pub unsafe extern "C" fn upconv_p_odd_surface(d_s: f64, d_i: f64, out: *mut f64) -> UpconvStatus {
    guarded(|| {
        if out.is_null() {
            return UpconvStatus::NullPointer;
        }
        if !(d_s.is_finite() && d_i.is_finite()) {
            return UpconvStatus::InvalidArgument;
        }
        unsafe { *out = conversion::p_odd_surface(d_s, d_i) };
        UpconvStatus::Ok
    })
}

/// Conversion probability for a crystal of the given length and Rabi angle.
///
/// # Safety
/// `profile` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn upconv_p_odd(
    profile: *const UpconvProfile,
    sigma: f64,
    length: f64,
    rabi_angle: f64,
    out: *mut f64,
) -> UpconvStatus {
    guarded(|| {
        let Some(p) = (unsafe { profile_ref(profile) }) else {
            return UpconvStatus::NullPointer;
        };
        if out.is_null() {
            return UpconvStatus::NullPointer;
        }
        let result = (|| {
            let r = conversion::r_constant(length, p, DEGENERACY_FLOOR)?;
            let cfg = CrystalConfig::with_rabi_angle(length, 1, rabi_angle, 0.0, sigma, r)?;
            conversion::p_odd(&cfg, p)
        })();
        match result {
            Ok(rep) => {
                unsafe { *out = rep.p_odd };
                UpconvStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Conversion probability when the matching conditions carry relative
/// errors (eps1 on the pump velocity, eps2 on the slice length), at the
/// half-π Rabi angle. Uses the profile's signal/idler velocities.
///
/// # Safety
/// `profile` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn upconv_condition_error(
    profile: *const UpconvProfile,
    sigma: f64,
    eps1: f64,
    eps2: f64,
    out: *mut f64,
) -> UpconvStatus {
    guarded(|| {
        let Some(p) = (unsafe { profile_ref(profile) }) else {
            return UpconvStatus::NullPointer;
        };
        if out.is_null() {
            return UpconvStatus::NullPointer;
        }
        match conversion::condition_error_sensitivity(eps1, eps2, p.kp_s, p.kp_i, sigma) {
            Ok(v) => {
                unsafe { *out = v };
                UpconvStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Fidelity between the ordered and unordered second-order components for a
/// single medium at the optimal length. `rel_tol <= 0` selects the default
/// 1e-6.
///
/// # Safety
/// `profile` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn upconv_f2_baseline(
    profile: *const UpconvProfile,
    sigma: f64,
    rel_tol: f64,
    out: *mut f64,
) -> UpconvStatus {
    guarded(|| {
        let Some(p) = (unsafe { profile_ref(profile) }) else {
            return UpconvStatus::NullPointer;
        };
        if out.is_null() {
            return UpconvStatus::NullPointer;
        }
        let tol = if rel_tol > 0.0 { rel_tol } else { 1e-6 };
        let result = (|| {
            let (length, _, _) = conversion::optimal_conditions(p, sigma)?;
            let crystal = CrystalConfig::new(length, 1, 1.0, 0.0, sigma)?;
            let spec = QuadratureSpec::default().with_rel_tol(tol);
            fidelity_f2(p, &crystal, 6.0, &spec)
        })();
        match result {
            Ok(fid) => {
                unsafe { *out = fid.f2 };
                UpconvStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Fidelity between the ordered and unordered second-order components of a
/// matched segmented medium with `segments` slices. The ordered side is
/// evaluated by explicit double time quadrature; `rel_tol <= 0` selects the
/// default 2e-4.
///
/// # Safety
/// `profile` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn upconv_f2_segmented(
    profile: *const UpconvProfile,
    sigma: f64,
    segments: u32,
    rel_tol: f64,
    out: *mut f64,
) -> UpconvStatus {
    guarded(|| {
        let Some(p) = (unsafe { profile_ref(profile) }) else {
            return UpconvStatus::NullPointer;
        };
        if out.is_null() {
            return UpconvStatus::NullPointer;
        }
        if segments == 0 || segments > upconv::config::MAX_SEGMENTS {
            return UpconvStatus::InvalidArgument;
        }
        let tol = if rel_tol > 0.0 { rel_tol } else { 2e-4 };
        let spec = QuadratureSpec::default().with_rel_tol(tol);
        match upconv::poling::f2_of_n(segments, p, sigma, 6.0, &spec) {
            Ok(fid) => {
                unsafe { *out = fid.f2 };
                UpconvStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Probability that one analyzer run identifies a uniformly drawn Bell
/// state: (1 + p_odd)/2.
///
/// # Safety
/// `out` must be null or valid for writing one f64.
#[no_mangle]
pub unsafe extern "C" fn upconv_bell_success(p_odd: f64, out: *mut f64) -> UpconvStatus {
    guarded(|| {
        if out.is_null() {
            return UpconvStatus::NullPointer;
        }
        match bell::bell_success_probability(p_odd) {
            Ok(v) => {
                unsafe { *out = v };
                UpconvStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Analytic teleportation-gate success rate (1 + p_odd)²/4.
///
/// # Safety
/// `out` must be null or valid for writing one f64.
#[no_mangle]
pub unsafe extern "C" fn upconv_gate_success(p_odd: f64, out: *mut f64) -> UpconvStatus {
    guarded(|| {
        if out.is_null() {
            return UpconvStatus::NullPointer;
        }
        match bell::gate_success_probability(p_odd) {
            Ok(v) => {
                unsafe { *out = v };
                UpconvStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Monte Carlo of the teleportation CNOT on a diagonal-basis control and
/// |H⟩ target: empirical success rate and the minimum conditional output
/// fidelity over successful trials (NaN when nothing succeeded).
///
/// # Safety
/// Out pointers must be null or valid for writing one f64 each.
#[no_mangle]
pub unsafe extern "C" fn upconv_gate_simulate(
    p_odd: f64,
    seed: u64,
    trials: u64,
    out_success_rate: *mut f64,
    out_min_fidelity: *mut f64,
) -> UpconvStatus {
    guarded(|| {
        if out_success_rate.is_null() || out_min_fidelity.is_null() {
            return UpconvStatus::NullPointer;
        }
        if trials == 0 || trials > 100_000_000 {
            return UpconvStatus::InvalidArgument;
        }
        let half = num_sqrt_half();
        match bell::teleport_cnot((half, half), (one(), zero()), p_odd, seed, trials) {
            Ok(rep) => {
                unsafe {
                    *out_success_rate = rep.success_rate;
                    *out_min_fidelity = rep.conditional_output_fidelity;
                }
                UpconvStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

fn num_sqrt_half() -> num_complex::Complex64 {
    num_complex::Complex64::from(std::f64::consts::FRAC_1_SQRT_2)
}
fn one() -> num_complex::Complex64 {
    num_complex::Complex64::from(1.0)
}
fn zero() -> num_complex::Complex64 {
    num_complex::Complex64::default()
}
