//! Second-order state components of the time-ordered and unordered unitary
//! expansions, and the fidelity between them.
//!
//! Both amplitudes share the single-time Gaussian form produced by
//! [`crate::kernel`]: the unordered one integrates exp(−(at²+bt+c)) in closed
//! form, the ordered one carries the additional (1+erf(dt+ig))/2 weight from
//! restricting the inner interaction time to the past. The closed coefficient
//! set for group-velocity-matched operation at the separability condition is
//! implemented directly in [`display_coefficients`] and cross-checked against
//! the kernel reduction.
//!
//! Amplitude normalization: the overall (coupling·L/iℏ)² factor and the 1/2!
//! of the unordered term are dropped — both cancel in the fidelity — so the
//! unordered and ordered amplitudes here are the plain plane- and
//! wedge-integrals of the reduced kernel. In the commuting limit the ordered
//! amplitude is exactly half the unordered one.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{SecondOrderCoefficients, SecondOrderKernel, TimeGaussian};
use crate::quad::{integrate_vec, QuadratureSpec};
use crate::spectral::{CrystalConfig, DispersionProfile, DEGENERACY_FLOOR};

/// Fidelity between the ordered and unordered second-order components, with
/// the quadrature diagnostics the number was computed under.
#[derive(Debug, Clone, Copy)]
pub struct FidelityReport {
    pub f2: f64,
    pub taylor_norm: f64,
    pub dyson_norm: f64,
    pub overlap_phase: f64,
    pub quadrature_error_estimate: f64,
    pub evaluations: usize,
}

/// Closed coefficient display for group-velocity-matched pumping at the
/// separability condition: functions of (k'_s, k'_i, σ) and the detunings
/// only, with the slice length already eliminated through
/// L√γ·σ·|k'_s − k'_i| = √2.
pub fn display_coefficients(
    kp_s: f64,
    kp_i: f64,
    sigma: f64,
    nu_s: f64,
    nu_i: f64,
) -> SecondOrderCoefficients {
    let (ks, ki, s) = (kp_s, kp_i, sigma);
    let sum_sq = ki * ki + ks * ks;
    let diff = ki - ks;
    let a = s * s * diff * diff / sum_sq;
    let b = Complex64::new(0.0, diff * (ki * nu_s - ks * nu_i) / sum_sq);
    let c = Complex64::from((ks * nu_s + ki * nu_i).powi(2) / (4.0 * s * s * sum_sq));
    let quartic = ki.powi(4) + ki.powi(3) * ks + ki * ks.powi(3) + ks.powi(4);
    let root = (quartic / (s * s * diff * diff * sum_sq)).sqrt();
    let d = s * s * diff * diff / (2.0_f64.sqrt() * (ki * ki - ki * ks + ks * ks)) * root;
    let g = Complex64::from(
        diff * diff * (ks * nu_s + ki * nu_i) / (2.0 * 2.0_f64.sqrt() * (ki.powi(3) + ks.powi(3)))
            * root,
    );
    let amp = Complex64::from(
        (std::f64::consts::PI * crate::spectral::gamma_fwhm().powi(2) * s * s
            * (ki + ks).powi(2)
            / (2.0 * sum_sq))
            .sqrt(),
    );
    SecondOrderCoefficients { a, b, c, d, g, amp }
}

fn kernel_for(profile: &DispersionProfile, config: &CrystalConfig) -> Result<SecondOrderKernel> {
    profile.require_type_ii(DEGENERACY_FLOOR * 1e-3)?;
    Ok(SecondOrderKernel::new(*profile, config.length, config.sigma))
}

/// Unordered second-order amplitude at one detuning pair, in closed form.
pub fn taylor2_amplitude(
    profile: &DispersionProfile,
    config: &CrystalConfig,
    nu_s: f64,
    nu_i: f64,
) -> Result<Complex64> {
    kernel_for(profile, config)?.reduce(nu_s, nu_i)?.plane_integral()
}

/// Ordered second-order amplitude at one detuning pair, via the
/// single-integral error-function form.
pub fn dyson2_amplitude(
    profile: &DispersionProfile,
    config: &CrystalConfig,
    nu_s: f64,
    nu_i: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    kernel_for(profile, config)?.reduce(nu_s, nu_i)?.ordered_erf_form(spec)
}

/// How the ordered amplitude is evaluated inside a fidelity integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderedRoute {
    /// Single-integral error-function form (fast; valid for the reduced
    /// single-kernel structure).
    #[default]
    ErfForm,
    /// Explicit double time quadrature over the ordered wedge (slower; the
    /// route that stays valid for segmented-medium kernels).
    WedgeQuadrature,
}

/// Fidelity between the ordered and unordered second-order components for an
/// arbitrary reduced kernel, by adaptive detuning quadrature over
/// [−half_width·σ, half_width·σ]² with a shared subdivision tree for the
/// overlap and both norms.
pub fn fidelity_of_kernel(
    kernel: &SecondOrderKernel,
    half_width_sigmas: f64,
    spec: &QuadratureSpec,
    route: OrderedRoute,
) -> Result<FidelityReport> {
    use std::cell::{Cell, RefCell};
    let half = half_width_sigmas * kernel.sigma;
    // per-amplitude quadrature kept well under the detuning-integral tolerance
    let amp_spec = QuadratureSpec { rel_tol: (spec.rel_tol * 1e-2).max(1e-12), ..*spec };
    let inner_spec = QuadratureSpec { rel_tol: spec.rel_tol * 0.5, ..*spec };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let evals = Cell::new(0usize);

    let outer = integrate_vec(
        |nu_s| {
            if failure.borrow().is_some() {
                return [0.0; 4];
            }
            let inner = integrate_vec(
                |nu_i| {
                    if failure.borrow().is_some() {
                        return [0.0; 4];
                    }
                    match amplitudes_at(kernel, nu_s, nu_i, &amp_spec, route) {
                        Ok((t, d)) => {
                            let ov = t.conj() * d;
                            [ov.re, ov.im, t.norm_sqr(), d.norm_sqr()]
                        }
                        Err(e) => {
                            *failure.borrow_mut() = Some(e);
                            [0.0; 4]
                        }
                    }
                },
                -half,
                half,
                &inner_spec,
            );
            match inner {
                Ok(r) => {
                    evals.set(evals.get() + r.evaluations);
                    r.value
                }
                Err(e) => {
                    let mut slot = failure.borrow_mut();
                    if slot.is_none() {
                        *slot = Some(e);
                    }
                    [0.0; 4]
                }
            }
        },
        -half,
        half,
        spec,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let [ov_re, ov_im, norm_t, norm_d] = outer.value;
    let overlap = Complex64::new(ov_re, ov_im);
    let f2 = overlap.norm_sqr() / (norm_t * norm_d);
    Ok(FidelityReport {
        f2,
        taylor_norm: norm_t,
        dyson_norm: norm_d,
        overlap_phase: overlap.arg(),
        quadrature_error_estimate: outer.error / norm_t.max(norm_d),
        evaluations: evals.get() + outer.evaluations,
    })
}

fn amplitudes_at(
    kernel: &SecondOrderKernel,
    nu_s: f64,
    nu_i: f64,
    spec: &QuadratureSpec,
    route: OrderedRoute,
) -> Result<(Complex64, Complex64)> {
    let tg: TimeGaussian = kernel.reduce(nu_s, nu_i)?;
    let taylor = tg.plane_integral()?;
    let dyson = match route {
        OrderedRoute::ErfForm => tg.ordered_erf_form(spec)?,
        OrderedRoute::WedgeQuadrature => tg.ordered_wedge(spec)?,
    };
    Ok((taylor, dyson))
}

/// Fidelity between the second-order ordered and unordered components for a
/// single medium of the configured length.
pub fn fidelity_f2(
    profile: &DispersionProfile,
    config: &CrystalConfig,
    half_width_sigmas: f64,
    spec: &QuadratureSpec,
) -> Result<FidelityReport> {
    let kernel = kernel_for(profile, config)?;
    fidelity_of_kernel(&kernel, half_width_sigmas, spec, OrderedRoute::ErfForm)
}
