//! Run configuration: a single TOML file, schema-checked with unknown keys
//! rejected, every default mirroring the reference parameter set
//! (k'_s = 5.6e-9 s/m, k'_i = 5.2e-9 s/m, σ = 1e9 rad/s).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::spectral::DispersionProfile;

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub dispersion: DispersionSection,
    pub photon: PhotonSection,
    pub crystal: CrystalSection,
    pub fidelity: FidelitySection,
    pub surface: SurfaceSection,
    pub poling: PolingSection,
    pub sensitivity: SensitivitySection,
    pub gate: GateSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionSection {
    /// Signal inverse group velocity (s/m).
    pub kp_s: f64,
    /// Idler inverse group velocity (s/m).
    pub kp_i: f64,
    /// Pump inverse group velocity (s/m); the signal/idler midpoint when
    /// omitted.
    pub kp_p: Option<f64>,
}

impl Default for DispersionSection {
    fn default() -> Self {
        Self { kp_s: 5.6e-9, kp_i: 5.2e-9, kp_p: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhotonSection {
    /// Input photon bandwidth σ (rad/s).
    pub sigma: f64,
    /// Linear chirp (s); no reference result uses a nonzero value.
    pub chirp: f64,
}

impl Default for PhotonSection {
    fn default() -> Self {
        Self { sigma: 1e9, chirp: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrystalSection {
    /// Slice length (m); solved from the optimality condition when omitted.
    pub length: Option<f64>,
    /// Rabi angle |χ|NL√R (rad).
    pub rabi_angle: f64,
    /// Coupling phase (rad).
    pub chi_phase: f64,
}

impl Default for CrystalSection {
    fn default() -> Self {
        Self { length: None, rabi_angle: std::f64::consts::FRAC_PI_2, chi_phase: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FidelitySection {
    pub rel_tol: f64,
    pub half_width_sigmas: f64,
}

impl Default for FidelitySection {
    fn default() -> Self {
        Self { rel_tol: 1e-6, half_width_sigmas: 6.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurfaceSection {
    /// Half-extent of the dimensionless grid.
    pub extent: f64,
    /// Points per axis.
    pub points: usize,
}

impl Default for SurfaceSection {
    fn default() -> Self {
        Self { extent: 2.0, points: 201 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolingSection {
    pub n_values: Vec<u32>,
    pub rel_tol: f64,
    pub half_width_sigmas: f64,
}

impl Default for PolingSection {
    fn default() -> Self {
        Self { n_values: vec![1, 2, 3, 5, 8, 13], rel_tol: 2e-4, half_width_sigmas: 6.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensitivitySection {
    /// (ε₁, ε₂) pairs to evaluate.
    pub pairs: Vec<[f64; 2]>,
}

impl Default for SensitivitySection {
    fn default() -> Self {
        Self { pairs: vec![[0.01, 0.01], [0.001, 0.001], [0.0, 0.0]] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateSection {
    pub trials: u64,
    pub p_odd_values: Vec<f64>,
    pub seed: u64,
}

impl Default for GateSection {
    fn default() -> Self {
        Self { trials: 100_000, p_odd_values: vec![0.0, 0.25, 0.5, 0.75, 1.0], seed: 7 }
    }
}

/// Hard cap on the segment count: the interference envelope narrows like
/// 1/N and the ordered quadrature cost grows with it.
pub const MAX_SEGMENTS: u32 = 10_000;

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.dispersion;
        for (name, v) in [("dispersion.kp_s", d.kp_s), ("dispersion.kp_i", d.kp_i)] {
            if !v.is_finite() || v <= 0.0 || v > 1.0 {
                return Err(Error::Config(format!("{name} = {v:e} outside (0, 1] s/m")));
            }
        }
        if let Some(kp_p) = d.kp_p {
            if !kp_p.is_finite() || kp_p <= 0.0 {
                return Err(Error::Config(format!("dispersion.kp_p = {kp_p:e} must be positive")));
            }
        }
        let s = self.photon.sigma;
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::Config(format!("photon.sigma = {s:e} must be positive")));
        }
        if let Some(l) = self.crystal.length {
            if !l.is_finite() || l <= 0.0 {
                return Err(Error::Config(format!("crystal.length = {l:e} must be positive")));
            }
        }
        if !(self.fidelity.rel_tol > 0.0 && self.fidelity.rel_tol < 0.1) {
            return Err(Error::Config(format!(
                "fidelity.rel_tol = {:e} outside (0, 0.1)",
                self.fidelity.rel_tol
            )));
        }
        if !(self.fidelity.half_width_sigmas >= 2.0 && self.fidelity.half_width_sigmas <= 20.0) {
            return Err(Error::Config(format!(
                "fidelity.half_width_sigmas = {} outside [2, 20]",
                self.fidelity.half_width_sigmas
            )));
        }
        if self.surface.points < 2 || self.surface.points > 4001 {
            return Err(Error::Config(format!(
                "surface.points = {} outside [2, 4001]",
                self.surface.points
            )));
        }
        if !(self.surface.extent > 0.0 && self.surface.extent <= 50.0) {
            return Err(Error::Config(format!(
                "surface.extent = {} outside (0, 50]",
                self.surface.extent
            )));
        }
        if self.poling.n_values.is_empty() {
            return Err(Error::Config("poling.n_values must not be empty".into()));
        }
        for &n in &self.poling.n_values {
            if n == 0 || n > MAX_SEGMENTS {
                return Err(Error::Config(format!(
                    "poling.n_values entry {n} outside [1, {MAX_SEGMENTS}]"
                )));
            }
        }
        if !(self.poling.rel_tol > 0.0 && self.poling.rel_tol < 0.1) {
            return Err(Error::Config(format!(
                "poling.rel_tol = {:e} outside (0, 0.1)",
                self.poling.rel_tol
            )));
        }
        for pair in &self.sensitivity.pairs {
            for (idx, eps) in pair.iter().enumerate() {
                if !eps.is_finite() || eps.abs() >= 0.04 {
                    return Err(Error::Config(format!(
                        "sensitivity.pairs eps{} = {eps} outside (−0.04, 0.04); larger \
                         perturbations push the pump velocity past the signal band",
                        idx + 1
                    )));
                }
            }
        }
        if self.gate.trials == 0 || self.gate.trials > 100_000_000 {
            return Err(Error::Config(format!(
                "gate.trials = {} outside [1, 1e8]",
                self.gate.trials
            )));
        }
        for &p in &self.gate.p_odd_values {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("gate.p_odd_values entry {p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// The configured dispersion profile (pump velocity defaulting to the
    /// group-velocity-matched midpoint).
    pub fn profile(&self) -> Result<DispersionProfile> {
        let d = &self.dispersion;
        let kp_p = d.kp_p.unwrap_or(0.5 * (d.kp_s + d.kp_i));
        DispersionProfile::new(d.kp_s, d.kp_i, kp_p)
    }

    /// Slice length: configured, or solved from the optimality condition.
    pub fn crystal_length(&self) -> Result<f64> {
        match self.crystal.length {
            Some(l) => Ok(l),
            None => {
                let (l, _, _) =
                    crate::conversion::optimal_conditions(&self.profile()?, self.photon.sigma)?;
                Ok(l)
            }
        }
    }

    /// Hash of the resolved configuration, for the report headers.
    pub fn sha256(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid_and_matches_reference_parameters() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.dispersion.kp_s, 5.6e-9);
        assert_eq!(cfg.dispersion.kp_i, 5.2e-9);
        assert_eq!(cfg.photon.sigma, 1e9);
        let profile = cfg.profile().unwrap();
        assert_eq!(profile.kp_p, 5.4e-9);
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let err = toml::from_str::<RunConfig>("[dispersion]\nkp_s = 1e-9\nbogus_key = 3\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("bogus_key"), "error was: {err}");
    }

    #[test]
    fn out_of_range_values_name_the_key() {
        let mut cfg = RunConfig::default();
        cfg.photon.sigma = -1.0;
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("photon.sigma"), "{msg}");

        let mut cfg = RunConfig::default();
        cfg.surface.points = 1;
        assert!(cfg.validate().unwrap_err().to_string().contains("surface.points"));

        let mut cfg = RunConfig::default();
        cfg.poling.n_values = vec![0];
        assert!(cfg.validate().unwrap_err().to_string().contains("n_values"));

        let mut cfg = RunConfig::default();
        cfg.gate.p_odd_values = vec![1.5];
        assert!(cfg.validate().unwrap_err().to_string().contains("p_odd_values"));
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = RunConfig::default();
        let mut b = RunConfig::default();
        assert_eq!(a.sha256(), b.sha256());
        b.photon.sigma = 2e9;
        assert_ne!(a.sha256(), b.sha256());
    }

    #[test]
    fn length_defaults_to_the_optimal_solution() {
        let cfg = RunConfig::default();
        let l = cfg.crystal_length().unwrap();
        assert!((l - 8.049_423_016_564_612).abs() < 1e-9);
    }
}
