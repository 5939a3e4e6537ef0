//! Physical types and the phase-matching machinery shared by every other
//! module: inverse-group-velocity profiles, Gaussian single-photon spectra,
//! the linearized phase mismatch, and the sinc→Gaussian envelope.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default floor below which |k'_s - k'_i| is treated as degenerate (s/m).
/// The linearized-mismatch model loses validity there; closed forms that
/// divide by the difference refuse to evaluate.
pub const DEGENERACY_FLOOR: f64 = 1e-15;

/// Inverse group velocities of the three interacting modes (s/m), evaluated
/// at the band centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionProfile {
    /// Signal inverse group velocity k'_s (s/m).
    pub kp_s: f64,
    /// Idler inverse group velocity k'_i (s/m).
    pub kp_i: f64,
    /// Pump inverse group velocity k'_p (s/m).
    pub kp_p: f64,
}

impl DispersionProfile {
    pub fn new(kp_s: f64, kp_i: f64, kp_p: f64) -> Result<Self> {
        for (name, v) in [("kp_s", kp_s), ("kp_i", kp_i), ("kp_p", kp_p)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and positive, got {v:e}"
                )));
            }
        }
        Ok(Self { kp_s, kp_i, kp_p })
    }

    /// Group-velocity-matched pump: k'_p = (k'_s + k'_i)/2.
    pub fn extended_phase_matched(kp_s: f64, kp_i: f64) -> Result<Self> {
        Self::new(kp_s, kp_i, 0.5 * (kp_s + kp_i))
    }

    /// Distinct signal/idler group velocities, the regime the linearized
    /// model is valid in.
    pub fn is_type_ii(&self) -> bool {
        (self.kp_s - self.kp_i).abs() > DEGENERACY_FLOOR
    }

    /// Errors out when |k'_s - k'_i| is below `floor` (closed forms with a
    /// 1/(k'_s - k'_i) pole are meaningless there).
    pub fn require_type_ii(&self, floor: f64) -> Result<()> {
        let gap = (self.kp_s - self.kp_i).abs();
        if gap <= floor {
            return Err(Error::DegenerateDispersion { gap, floor });
        }
        Ok(())
    }

    /// Linearized phase mismatch Δk ≈ k'_p ν_p − k'_s ν_s − k'_i ν_i (1/m).
    /// The zeroth-order term vanishes by momentum conservation at the band
    /// centers, so this is exact to first order in the detunings.
    pub fn mismatch(&self, nu_p: f64, nu_s: f64, nu_i: f64) -> f64 {
        self.kp_p * nu_p - self.kp_s * nu_s - self.kp_i * nu_i
    }

    /// Mismatch on the energy-conservation shell ν_p = ν_s + ν_i.
    pub fn mismatch_on_shell(&self, nu_s: f64, nu_i: f64) -> f64 {
        self.mismatch(nu_s + nu_i, nu_s, nu_i)
    }
}

/// Single-photon spectral amplitude with a Gaussian profile:
/// f(ω) = (σ√(2π))^(−1/2) · exp(−ν²/(4σ²)) · exp(iξν), ν = ω − μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPhoton {
    /// Center angular frequency μ (rad/s).
    pub mu: f64,
    /// Spectral bandwidth σ (rad/s).
    pub sigma: f64,
    /// Linear chirp coefficient ξ (s).
    pub xi: f64,
}

impl GaussianPhoton {
    pub fn new(mu: f64, sigma: f64, xi: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "sigma must be finite and positive, got {sigma:e}"
            )));
        }
        Ok(Self { mu, sigma, xi })
    }

    /// Amplitude at detuning ν = ω − μ. ∫|f|²dω = 1 by construction.
    pub fn amplitude(&self, nu: f64) -> Complex64 {
        let norm = (self.sigma * (2.0 * std::f64::consts::PI).sqrt()).sqrt().recip();
        let gauss = (-nu * nu / (4.0 * self.sigma * self.sigma)).exp();
        norm * gauss * Complex64::new(0.0, self.xi * nu).exp()
    }
}

/// Crystal slice geometry and coupling. `chi_mag` is the coupling scale that
/// combines with N·L·√R/ℏ into the dimensionless Rabi angle; only that
/// product is ever observable, so `rabi_angle` may be supplied directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrystalConfig {
    /// Slice length L (m).
    pub length: f64,
    /// Slice count N.
    pub slices: u32,
    /// Coupling magnitude |χ| in units where |χ|·N·L·√R = Rabi angle.
    pub chi_mag: f64,
    /// Coupling phase θ = arg χ (rad).
    pub theta: f64,
    /// Photon bandwidth σ used in the dimensionless groups (rad/s).
    pub sigma: f64,
}

impl CrystalConfig {
    pub fn new(length: f64, slices: u32, chi_mag: f64, theta: f64, sigma: f64) -> Result<Self> {
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::InvalidInput(format!("length must be positive, got {length:e}")));
        }
        if slices == 0 {
            return Err(Error::InvalidInput("slice count must be at least 1".into()));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma:e}")));
        }
        Ok(Self { length, slices, chi_mag, theta, sigma })
    }

    /// Config with the coupling back-solved from a requested Rabi angle:
    /// |χ| = angle/(N·L·√R).
    pub fn with_rabi_angle(
        length: f64,
        slices: u32,
        rabi_angle: f64,
        theta: f64,
        sigma: f64,
        r_constant: f64,
    ) -> Result<Self> {
        let chi_mag = rabi_angle / (f64::from(slices) * length * r_constant.sqrt());
        Self::new(length, slices, chi_mag, theta, sigma)
    }

    /// Rabi angle |χ|·N·L·√R (rad).
    pub fn rabi_angle(&self, r_constant: f64) -> f64 {
        self.chi_mag * f64::from(self.slices) * self.length * r_constant.sqrt()
    }

    /// Dimensionless dispersion pair (d_s, d_i) = L√γ·σ·(k'_{s,i} − k'_p).
    pub fn dimensionless_pair(&self, profile: &DispersionProfile) -> (f64, f64) {
        let scale = self.length * gamma_fwhm().sqrt() * self.sigma;
        (scale * (profile.kp_s - profile.kp_p), scale * (profile.kp_i - profile.kp_p))
    }
}

/// Unnormalized sinc, sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // 4th-order series; error < 1e-30 at the cutover
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

fn sinc_half_root() -> f64 {
    // positive root of sinc(x) = 1/2 by bisection on [1, 2.5]
    let f = |x: f64| sinc(x) - 0.5;
    let (mut lo, mut hi) = (1.0_f64, 2.5_f64);
    debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Width-matching constant γ of the approximation sinc(x) ≈ √(γπ)·exp(−γx²):
/// γ = ln2/x₀² with sinc(x₀) = 1/2, so the two profiles share their FWHM.
/// Numerically ≈ 0.19292, cached after the first call.
pub fn gamma_fwhm() -> f64 {
    static GAMMA: OnceLock<f64> = OnceLock::new();
    *GAMMA.get_or_init(|| {
        let x0 = sinc_half_root();
        std::f64::consts::LN_2 / (x0 * x0)
    })
}

/// Positive root x₀ of sinc(x₀) = 1/2 (exposed for diagnostics).
pub fn sinc_half_point() -> f64 {
    static X0: OnceLock<f64> = OnceLock::new();
    *X0.get_or_init(sinc_half_root)
}

/// The Gaussian stand-in for sinc: √(γπ)·exp(−γx²). Same FWHM and the same
/// ∫dx = π as the true sinc.
pub fn sinc_gauss(x: f64) -> f64 {
    let g = gamma_fwhm();
    (g * std::f64::consts::PI).sqrt() * (-g * x * x).exp()
}

/// Which envelope the phase-matching amplitude uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Envelope {
    /// The Gaussian approximation every closed form is derived with.
    #[default]
    Gaussian,
    /// The true sinc, for approximation-quality comparisons only.
    TrueSinc,
}

/// Single-slice phase-matching amplitude on the energy shell ν_p = ν_s + ν_i:
/// sinc(LΔk/2)·exp(iLΔk/2), with the envelope selectable.
pub fn pm_function(
    config: &CrystalConfig,
    profile: &DispersionProfile,
    nu_s: f64,
    nu_i: f64,
    envelope: Envelope,
) -> Complex64 {
    let x = 0.5 * config.length * profile.mismatch_on_shell(nu_s, nu_i);
    let env = match envelope {
        Envelope::Gaussian => sinc_gauss(x),
        Envelope::TrueSinc => sinc(x),
    };
    env * Complex64::new(0.0, x).exp()
}

/// A complex two-frequency amplitude over detunings, either in closed form
/// or as grid samples (see [`crate::quad::GridState`] for the sampled side).
pub struct JointAmplitude<'a> {
    eval: Box<dyn Fn(f64, f64) -> Complex64 + Sync + 'a>,
}

impl<'a> JointAmplitude<'a> {
    pub fn new(eval: impl Fn(f64, f64) -> Complex64 + Sync + 'a) -> Self {
        Self { eval: Box::new(eval) }
    }

    pub fn eval(&self, nu_s: f64, nu_i: f64) -> Complex64 {
        (self.eval)(nu_s, nu_i)
    }

    /// Sample onto a uniform grid spanning ±`extent_sigmas`·σ per axis.
    pub fn sample(&self, sigma: f64, extent_sigmas: f64, points: usize) -> crate::quad::GridState {
        crate::quad::GridState::sample(sigma, extent_sigmas, points, |ns, ni| self.eval(ns, ni))
    }
}
