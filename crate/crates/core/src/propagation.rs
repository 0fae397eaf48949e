//! Per-interaction and per-path power bookkeeping.
//!
//! Reflection and penetration are constant dB losses per interaction, independent of
//! incidence angle. Spreading follows the Friis 1/d² law; single-bounce scattering
//! uses a dual-lobe directive pattern with a 1/(s₁s₂)² composite spreading law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Electrical properties of one material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialProfile {
    pub name: String,
    /// Loss per reflection, dB (≥ 0 for forward simulation).
    pub reflection_loss_db: f64,
    /// Loss per penetration, dB; `None` for opaque materials.
    pub penetration_loss_db: Option<f64>,
    /// Peak-to-peak surface perturbation, m.
    #[serde(default)]
    pub roughness_height_m: f64,
    /// Forces scattering on regardless of the roughness test.
    #[serde(default)]
    pub scattering: bool,
}

impl MaterialProfile {
    pub fn new(name: impl Into<String>, reflection_loss_db: f64, penetration_loss_db: Option<f64>) -> Self {
        MaterialProfile {
            name: name.into(),
            reflection_loss_db,
            penetration_loss_db,
            roughness_height_m: 0.0,
            scattering: false,
        }
    }

    pub fn opaque(name: impl Into<String>, reflection_loss_db: f64) -> Self {
        MaterialProfile::new(name, reflection_loss_db, None)
    }

    pub fn is_opaque(&self) -> bool {
        self.penetration_loss_db.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.reflection_loss_db.is_finite() {
            return Err(Error::invalid(format!("material `{}`: reflection loss not finite", self.name)));
        }
        if let Some(p) = self.penetration_loss_db {
            if !p.is_finite() {
                return Err(Error::invalid(format!("material `{}`: penetration loss not finite", self.name)));
            }
        }
        if !(self.roughness_height_m >= 0.0) {
            return Err(Error::invalid(format!("material `{}`: negative roughness", self.name)));
        }
        Ok(())
    }

    /// Reflection loss clamped to ≥ 0 dB, as used by forward simulation.
    pub fn effective_reflection_loss_db(&self) -> f64 {
        self.reflection_loss_db.max(0.0)
    }

    /// Penetration loss clamped to ≥ 0 dB; `None` when opaque.
    pub fn effective_penetration_loss_db(&self) -> Option<f64> {
        self.penetration_loss_db.map(|l| l.max(0.0))
    }
}

/// Dual-lobe directive scattering parameters shared by every material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringParameters {
    /// Λ: forward-lobe weight in `[0, 1]`.
    pub lambda_mix: f64,
    /// α_i: back-lobe width exponent.
    pub alpha_back: u32,
    /// α_R: forward-lobe width exponent.
    pub alpha_forward: u32,
    /// S: scattering amplitude coefficient in `[0, 1]`.
    pub s_coefficient: f64,
}

impl Default for ScatteringParameters {
    fn default() -> Self {
        ScatteringParameters {
            lambda_mix: 0.8,
            alpha_back: 10,
            alpha_forward: 10,
            s_coefficient: 0.1,
        }
    }
}

impl ScatteringParameters {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda_mix) {
            return Err(Error::invalid(format!("Λ must be in [0,1], got {}", self.lambda_mix)));
        }
        if self.alpha_back < 1 || self.alpha_forward < 1 {
            return Err(Error::invalid("lobe exponents must be ≥ 1"));
        }
        if !(0.0..=1.0).contains(&self.s_coefficient) {
            return Err(Error::invalid(format!("S must be in [0,1], got {}", self.s_coefficient)));
        }
        Ok(())
    }
}

/// Carrier wavelength in meters.
pub fn wavelength_m(frequency_ghz: f64) -> f64 {
    SPEED_OF_LIGHT / (frequency_ghz * 1e9)
}

/// Friis free-space path loss `20·log₁₀(4π·d·f/c)` in dB.
pub fn fspl_db(distance_m: f64, frequency_ghz: f64) -> Result<f64> {
    if !(distance_m > 0.0) || !(frequency_ghz > 0.0) {
        return Err(Error::invalid(format!(
            "FSPL needs positive distance and frequency, got {distance_m} m, {frequency_ghz} GHz"
        )));
    }
    Ok(fspl_db_unchecked(distance_m, frequency_ghz))
}

#[inline]
pub(crate) fn fspl_db_unchecked(distance_m: f64, frequency_ghz: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * distance_m * frequency_ghz * 1e9 / SPEED_OF_LIGHT).log10()
}

/// Power after one specular reflection.
pub fn reflect_power_db(incident_dbm: f64, material: &MaterialProfile) -> f64 {
    incident_dbm - material.reflection_loss_db
}

/// Power after passing through the material; `None` if it is opaque.
pub fn penetrate_power_db(incident_dbm: f64, material: &MaterialProfile) -> Option<f64> {
    material.penetration_loss_db.map(|l| incident_dbm - l)
}

/// Rayleigh critical height `λ / (8 cos θ_i)`; a surface is rough when its
/// perturbations exceed this.
pub fn rayleigh_critical_height(wavelength_m: f64, incidence_angle: f64) -> Result<f64> {
    if !(wavelength_m > 0.0) {
        return Err(Error::invalid("wavelength must be positive"));
    }
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&incidence_angle) {
        return Err(Error::invalid(format!(
            "incidence angle must be in [0, π/2), got {incidence_angle}"
        )));
    }
    Ok(wavelength_m / (8.0 * incidence_angle.cos()))
}

/// Rayleigh roughness test for a material at a given incidence angle.
/// Grazing incidence is always smooth.
pub fn is_rough(material: &MaterialProfile, wavelength_m: f64, incidence_angle: f64) -> bool {
    match rayleigh_critical_height(wavelength_m, incidence_angle) {
        Ok(hc) => material.roughness_height_m > hc,
        Err(_) => false,
    }
}

/// Dual-lobe pattern factor in `[0, 1]`.
///
/// `psi_forward` is the angle between the scattered ray and the specular direction,
/// `psi_back` the angle between the scattered ray and the reversed incident ray.
pub fn scatter_gain(psi_forward: f64, psi_back: f64, params: &ScatteringParameters) -> Result<f64> {
    let pi = std::f64::consts::PI;
    if !(0.0..=pi).contains(&psi_forward) || !(0.0..=pi).contains(&psi_back) {
        return Err(Error::invalid(format!(
            "lobe angles must be in [0, π], got {psi_forward}, {psi_back}"
        )));
    }
    let lobe = |psi: f64, alpha: u32| ((1.0 + psi.cos()) / 2.0).powi(alpha as i32);
    Ok(params.lambda_mix * lobe(psi_forward, params.alpha_forward)
        + (1.0 - params.lambda_mix) * lobe(psi_back, params.alpha_back))
}

/// Power of a scattered ray arriving after `seg2` meters from the scatter point.
///
/// `incident_dbm` is the power reaching the scatterer (spreading over the first
/// segment already applied). The scatter point re-radiates `S²·lobe_gain` of it
/// referenced to 1 m, then Friis spreading applies over `seg2`.
pub fn scattered_power_dbm(
    incident_dbm: f64,
    seg1: f64,
    seg2: f64,
    lobe_gain: f64,
    params: &ScatteringParameters,
    frequency_ghz: f64,
) -> Result<f64> {
    if !(seg1 > 0.0) || !(seg2 > 0.0) {
        return Err(Error::invalid("scattering segments must be positive"));
    }
    if !(lobe_gain >= 0.0) {
        return Err(Error::invalid("lobe gain must be nonnegative"));
    }
    Ok(incident_dbm + 20.0 * params.s_coefficient.log10() + 10.0 * lobe_gain.log10()
        - fspl_db(seg2, frequency_ghz)?
        + fspl_db(1.0, frequency_ghz)?)
}
