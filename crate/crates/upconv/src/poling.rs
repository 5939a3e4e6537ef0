//! Periodically segmented medium: N nonlinear slices with N−1 birefringent
//! spacers. The spacers add a per-period phase φ = LΔk + hΔκ, turning the
//! single-slice envelope into sinc(LΔk/2)e^{iLΔk/2}·sin(Nφ/2)/sin(φ/2)·
//! e^{i(N−1)φ/2}. With matched spacers and group-velocity-matched pumping,
//! φ collapses to η·Δω with η = L(k'_s+k'_i), the envelope depends on the
//! total detuning alone, and the interaction commutes with itself at
//! different times as N grows — which is what makes the unordered expansion
//! accurate and is quantified here by the fidelity as a function of N.

use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::SecondOrderKernel;
use crate::quad::QuadratureSpec;
use crate::series::{fidelity_of_kernel, FidelityReport, OrderedRoute};
use crate::spectral::{gamma_fwhm, sinc, sinc_gauss, DispersionProfile};

/// Matching tolerance for the spacer conditions (relative).
const MATCH_TOL: f64 = 1e-12;

/// Geometry of the segmented medium: N slices of length L with N−1 spacers
/// of length h whose inverse group velocities are κ_j.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolingConfig {
    pub segments: u32,
    pub length: f64,
    pub spacer: f64,
    pub kappa_p: f64,
    pub kappa_s: f64,
    pub kappa_i: f64,
}

impl PolingConfig {
    pub fn new(
        segments: u32,
        length: f64,
        spacer: f64,
        kappa_p: f64,
        kappa_s: f64,
        kappa_i: f64,
    ) -> Result<Self> {
        if segments == 0 {
            return Err(Error::InvalidInput("segment count must be at least 1".into()));
        }
        if !(length > 0.0) {
            return Err(Error::InvalidInput(format!("slice length must be positive, got {length:e}")));
        }
        if segments > 1 && !(spacer > 0.0) {
            return Err(Error::InvalidInput(format!(
                "spacer length must be positive for {segments} segments, got {spacer:e}"
            )));
        }
        Ok(Self { segments, length, spacer, kappa_p, kappa_s, kappa_i })
    }

    /// Spacers satisfying hκ_p = Lk'_p, hκ_s = Lk'_i, hκ_i = Lk'_s exactly.
    /// Note the signal/idler swap: each spacer advances one photon by the
    /// group delay the other accumulated inside a slice.
    pub fn matched_for(
        segments: u32,
        length: f64,
        spacer: f64,
        profile: &DispersionProfile,
    ) -> Result<Self> {
        Self::new(
            segments,
            length,
            spacer,
            length * profile.kp_p / spacer,
            length * profile.kp_i / spacer,
            length * profile.kp_s / spacer,
        )
    }

    pub fn is_matched(&self, profile: &DispersionProfile) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= MATCH_TOL * a.abs().max(b.abs());
        close(self.spacer * self.kappa_p, self.length * profile.kp_p)
            && close(self.spacer * self.kappa_s, self.length * profile.kp_i)
            && close(self.spacer * self.kappa_i, self.length * profile.kp_s)
    }

    /// Phase scale η = L(k'_s + k'_i) of the matched reduction.
    pub fn eta(&self, profile: &DispersionProfile) -> f64 {
        self.length * (profile.kp_s + profile.kp_i)
    }

    /// Spacer phase mismatch Δκ = κ_p ν_p − κ_s ν_s − κ_i ν_i (1/m).
    pub fn spacer_mismatch(&self, nu_p: f64, nu_s: f64, nu_i: f64) -> f64 {
        self.kappa_p * nu_p - self.kappa_s * nu_s - self.kappa_i * nu_i
    }

    /// Per-period phase φ = LΔk + hΔκ (rad).
    pub fn phi_general(
        &self,
        profile: &DispersionProfile,
        nu_p: f64,
        nu_s: f64,
        nu_i: f64,
    ) -> f64 {
        self.length * profile.mismatch(nu_p, nu_s, nu_i)
            + self.spacer * self.spacer_mismatch(nu_p, nu_s, nu_i)
    }
}

/// Which form of the N-segment interference ratio to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RatioBranch {
    /// sin(Nφ/2)/(N·sin(φ/2)), with the removable singularities handled.
    #[default]
    Exact,
    /// The Gaussian approximation exp(−γ(N²−1)φ²/4).
    Gaussian,
}

/// Normalized N-segment interference ratio sin(Nφ/2)/(N·sin(φ/2)); equals 1
/// at φ = 0 and reduces to 1 identically at N = 1.
pub fn segment_ratio(segments: u32, phi: f64, branch: RatioBranch) -> f64 {
    let n = f64::from(segments);
    match branch {
        RatioBranch::Gaussian => (-gamma_fwhm() * (n * n - 1.0) * phi * phi / 4.0).exp(),
        RatioBranch::Exact => {
            let half = 0.5 * phi;
            let s = half.sin();
            if s.abs() < 1e-9 {
                // removable singularity at φ = 2πm; series about the nearest one
                let m = (half / std::f64::consts::PI).round();
                let r = half - m * std::f64::consts::PI;
                let sign = if (m as i64 * (segments as i64 - 1)) % 2 == 0 { 1.0 } else { -1.0 };
                sign * (1.0 - (n * n - 1.0) * r * r / 6.0)
            } else {
                (n * half).sin() / (n * s)
            }
        }
    }
}

/// Full phase-matching amplitude of the segmented medium at arbitrary
/// detunings, normalized so N = 1 reproduces the single-slice amplitude:
/// sinc(LΔk/2)·e^{iLΔk/2}·ratio(φ)·e^{i(N−1)φ/2}.
pub fn poling_envelope(
    pcfg: &PolingConfig,
    profile: &DispersionProfile,
    nu_p: f64,
    nu_s: f64,
    nu_i: f64,
    branch: RatioBranch,
) -> Complex64 {
    let x = 0.5 * pcfg.length * profile.mismatch(nu_p, nu_s, nu_i);
    let phi = pcfg.phi_general(profile, nu_p, nu_s, nu_i);
    let ratio = segment_ratio(pcfg.segments, phi, branch);
    let phase = 0.5 * (f64::from(pcfg.segments) - 1.0) * phi + x;
    sinc_gauss(x) * ratio * Complex64::from_polar(1.0, phase)
}

/// Same amplitude with the true sinc envelope, for approximation studies.
pub fn poling_envelope_true_sinc(
    pcfg: &PolingConfig,
    profile: &DispersionProfile,
    nu_p: f64,
    nu_s: f64,
    nu_i: f64,
    branch: RatioBranch,
) -> Complex64 {
    let x = 0.5 * pcfg.length * profile.mismatch(nu_p, nu_s, nu_i);
    let phi = pcfg.phi_general(profile, nu_p, nu_s, nu_i);
    let ratio = segment_ratio(pcfg.segments, phi, branch);
    let phase = 0.5 * (f64::from(pcfg.segments) - 1.0) * phi + x;
    sinc(x) * ratio * Complex64::from_polar(1.0, phase)
}

/// φ under matched spacers and group-velocity-matched pumping: η·Δω. Errors
/// out when either precondition fails; equal to [`PolingConfig::phi_general`]
/// when they hold.
pub fn phi_reduction(
    pcfg: &PolingConfig,
    profile: &DispersionProfile,
    nu_p: f64,
    nu_s: f64,
    nu_i: f64,
) -> Result<f64> {
    if !pcfg.is_matched(profile) {
        return Err(Error::NotMatched(format!(
            "spacer delays (hκ_p, hκ_s, hκ_i) = ({:.6e}, {:.6e}, {:.6e}) do not equal \
             slice delays (Lk'_p, Lk'_i, Lk'_s) = ({:.6e}, {:.6e}, {:.6e})",
            pcfg.spacer * pcfg.kappa_p,
            pcfg.spacer * pcfg.kappa_s,
            pcfg.spacer * pcfg.kappa_i,
            pcfg.length * profile.kp_p,
            pcfg.length * profile.kp_i,
            pcfg.length * profile.kp_s,
        )));
    }
    let epm = 0.5 * (profile.kp_s + profile.kp_i);
    if (profile.kp_p - epm).abs() > MATCH_TOL * epm.abs() {
        return Err(Error::NotMatched(format!(
            "pump inverse group velocity {:e} is not the signal/idler midpoint {epm:e}",
            profile.kp_p
        )));
    }
    Ok(pcfg.eta(profile) * (nu_p - nu_s - nu_i))
}

/// Reduced second-order kernel of the matched segmented medium at the
/// separability point: slice length from the optimality condition, envelope
/// factors from the matched reduction.
pub fn matched_kernel(segments: u32, profile: &DispersionProfile, sigma: f64) -> Result<SecondOrderKernel> {
    let (length, _, _) = crate::conversion::optimal_conditions(profile, sigma)?;
    let eta = length * (profile.kp_s + profile.kp_i);
    Ok(SecondOrderKernel::new(*profile, length, sigma).with_poling(segments, eta))
}

/// Fidelity between the ordered and unordered second-order components of the
/// N-segment medium. The ordered side is evaluated by explicit double time
/// quadrature: the single-integral error-function shortcut belongs to the
/// single-slice kernel and is not reused here.
pub fn f2_of_n(
    segments: u32,
    profile: &DispersionProfile,
    sigma: f64,
    half_width_sigmas: f64,
    spec: &QuadratureSpec,
) -> Result<FidelityReport> {
    let kernel = matched_kernel(segments, profile, sigma)?;
    fidelity_of_kernel(&kernel, half_width_sigmas, spec, OrderedRoute::WedgeQuadrature)
}

/// Normalized time-noncommutativity measure: the relative deviation between
/// the ordered wedge amplitude and half the unordered plane amplitude at the
/// reference detuning (σ, −σ). Order one for a single slice; decays toward
/// zero as the segment count grows.
pub fn commuting_limit_check(
    segments: u32,
    profile: &DispersionProfile,
    sigma: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let kernel = matched_kernel(segments, profile, sigma)?;
    let tg = kernel.reduce(sigma, -sigma)?;
    let unordered_half = 0.5 * tg.plane_integral()?;
    let ordered = tg.ordered_wedge(spec)?;
    Ok((ordered - unordered_half).norm() / unordered_half.norm())
}
