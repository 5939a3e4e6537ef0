//! Up-conversion of a photon pair by a sliced medium: the sinc-overlap
//! constant R, the pump-profile norm B and bandwidth σ_p, the conversion
//! probability surface P(odd), the optimal operating point, and its
//! sensitivity to condition errors.
//!
//! All closed forms below are derived with the Gaussian envelope standing in
//! for the sinc and with spectral phases referenced to the slice center; the
//! oracle checks in the test suite integrate the same quantities directly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{gamma_fwhm, CrystalConfig, DispersionProfile, GaussianPhoton};

/// Everything the conversion closed forms produce at one operating point.
#[derive(Debug, Clone, Copy)]
pub struct ConversionReport {
    /// Sinc-overlap constant R = √(2γπ³/(L²(k'_s−k'_i)²)).
    pub r: f64,
    /// Norm of the up-converted pump profile.
    pub b: f64,
    /// Bandwidth of the up-converted pump photon (rad/s).
    pub sigma_p: f64,
    /// Conversion probability (B²/R)·sin²(rabi_angle).
    pub p_odd: f64,
    /// |χ|·N·L·√R (rad).
    pub rabi_angle: f64,
    /// Dimensionless dispersion parameters L√γ·σ·(k'_{s,i} − k'_p).
    pub d_s: f64,
    pub d_i: f64,
}

/// R = √(2γπ³/(L²(k'_s−k'_i)²)): the modulus-squared overlap of the
/// phase-matching envelope along the energy shell, independent of the pump
/// frequency. Diverges as k'_i → k'_s, which is outside the linearized
/// model's validity; guarded by `floor`.
pub fn r_constant(length: f64, profile: &DispersionProfile, floor: f64) -> Result<f64> {
    r_constant_with_gamma(length, profile, floor, gamma_fwhm())
}

/// R with an explicit envelope constant, used by the validation suite's
/// perturbation self-test.
pub fn r_constant_with_gamma(
    length: f64,
    profile: &DispersionProfile,
    floor: f64,
    gamma: f64,
) -> Result<f64> {
    profile.require_type_ii(floor)?;
    let diff = profile.kp_s - profile.kp_i;
    Ok((2.0 * gamma * std::f64::consts::PI.powi(3) / (length * length * diff * diff)).sqrt())
}

/// Bandwidth σ_p of the up-converted pump photon.
pub fn pump_bandwidth(length: f64, profile: &DispersionProfile, sigma: f64) -> f64 {
    let g = gamma_fwhm();
    let l2g = length * length * g * sigma * sigma;
    let diff = profile.kp_s - profile.kp_i;
    let num = sigma * sigma * (2.0 + l2g * diff * diff);
    let den = 1.0
        + l2g
            * ((profile.kp_s - profile.kp_p).powi(2) + (profile.kp_i - profile.kp_p).powi(2));
    (num / den).sqrt()
}

/// Norm factor B of the up-converted pump profile.
pub fn pump_norm(length: f64, profile: &DispersionProfile, sigma: f64) -> f64 {
    let g = gamma_fwhm();
    let diff = profile.kp_s - profile.kp_i;
    let sp = pump_bandwidth(length, profile, sigma);
    ((2.0 * std::f64::consts::PI).powf(1.5) * g * sp
        / (2.0 + length * length * g * sigma * sigma * diff * diff))
        .sqrt()
}

/// The conversion probability surface at Rabi angle π/2, as a function of
/// the dimensionless dispersion pair alone:
/// √(4(d_s−d_i)²/((1+d_s²+d_i²)(2+(d_s−d_i)²))).
pub fn p_odd_surface(d_s: f64, d_i: f64) -> f64 {
    let diff2 = (d_s - d_i) * (d_s - d_i);
    (4.0 * diff2 / ((1.0 + d_s * d_s + d_i * d_i) * (2.0 + diff2))).sqrt()
}

/// Full conversion report for a configured crystal: both the sin²-form and
/// (at Rabi angle π/2) the dimensionless surface, which must agree.
pub fn p_odd(config: &CrystalConfig, profile: &DispersionProfile) -> Result<ConversionReport> {
    let r = r_constant(config.length, profile, crate::spectral::DEGENERACY_FLOOR)?;
    let b = pump_norm(config.length, profile, config.sigma);
    let sigma_p = pump_bandwidth(config.length, profile, config.sigma);
    let rabi = config.rabi_angle(r);
    let (d_s, d_i) = config.dimensionless_pair(profile);
    let p = (b * b / r) * rabi.sin().powi(2);
    Ok(ConversionReport { r, b, sigma_p, p_odd: p, rabi_angle: rabi, d_s, d_i })
}

/// Optimal operating point: the slice length solving
/// L²γσ²(k'_s−k'_p)(k'_p−k'_i) = 1/2 under group-velocity-matched pumping,
/// where the conversion probability reaches one at Rabi angle π/2. Returns
/// (L, d_s, d_i) with d_i = −d_s = ∓1/√2.
pub fn optimal_conditions(profile: &DispersionProfile, sigma: f64) -> Result<(f64, f64, f64)> {
    profile.require_type_ii(crate::spectral::DEGENERACY_FLOOR)?;
    let product = (profile.kp_s - profile.kp_p) * (profile.kp_p - profile.kp_i);
    if product <= 0.0 {
        return Err(Error::NoRealLength(format!(
            "(k'_s−k'_p)(k'_p−k'_i) = {product:e} must be positive"
        )));
    }
    let g = gamma_fwhm();
    let length = (0.5 / (g * sigma * sigma * product)).sqrt();
    let scale = length * g.sqrt() * sigma;
    Ok((length, scale * (profile.kp_s - profile.kp_p), scale * (profile.kp_i - profile.kp_p)))
}

/// Conversion probability when the group-velocity-matching and length
/// conditions carry small relative errors: the pump inverse group velocity is
/// (1+ε₁)·(k'_s+k'_i)/2 and the slice length is (1+ε₂) times the length that
/// satisfies the exact condition at that perturbed pump velocity, with the
/// Rabi angle held at π/2. Reduces to 1 at ε₁ = ε₂ = 0.
pub fn condition_error_sensitivity(
    eps1: f64,
    eps2: f64,
    kp_s: f64,
    kp_i: f64,
    sigma: f64,
) -> Result<f64> {
    let kp_p = (1.0 + eps1) * 0.5 * (kp_s + kp_i);
    let profile = DispersionProfile::new(kp_s, kp_i, kp_p)?;
    let (l_exact, _, _) = optimal_conditions(&profile, sigma)?;
    let length = (1.0 + eps2) * l_exact;
    if !(length > 0.0) {
        return Err(Error::NoRealLength(format!("perturbed length {length:e}")));
    }
    let scale = length * gamma_fwhm().sqrt() * sigma;
    let d_s = scale * (profile.kp_s - profile.kp_p);
    let d_i = scale * (profile.kp_i - profile.kp_p);
    Ok(p_odd_surface(d_s, d_i))
}

/// Spectral profile and complex scale of the up-converted component: a
/// Gaussian pump photon of bandwidth σ_p scaled by e^{iθ}·(B/√R)·sin(rabi).
/// The squared modulus of the scale is the conversion probability.
pub fn psi_odd_profile(
    config: &CrystalConfig,
    profile: &DispersionProfile,
    pump_center: f64,
) -> Result<(GaussianPhoton, Complex64)> {
    let rep = p_odd(config, profile)?;
    let photon = GaussianPhoton::new(pump_center, rep.sigma_p, 0.0)?;
    let scale = Complex64::from_polar(
        (rep.b / rep.r.sqrt()) * rep.rabi_angle.sin(),
        config.theta,
    );
    Ok((photon, scale))
}
