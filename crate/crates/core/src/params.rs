//! Physical constants, device configuration and derived scales.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Effective-mass ratio printed for the device (m*/mₑ).
pub const PRINTED_MASS_RATIO: f64 = 0.0067;
/// Textbook GaAs conduction-band effective-mass ratio.
pub const STANDARD_GAAS_MASS_RATIO: f64 = 0.067;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub electron_mass: f64,
    pub elementary_charge: f64,
    pub vacuum_permittivity: f64,
    pub boltzmann: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 values.
    pub const CODATA: Self = Self {
        hbar: 1.054_571_817e-34,
        electron_mass: 9.109_383_7015e-31,
        elementary_charge: 1.602_176_634e-19,
        vacuum_permittivity: 8.854_187_8128e-12,
        boltzmann: 1.380_649e-23,
    };

    /// e²/(4πε₀) in J·m.
    pub fn coulomb_constant_e2(&self) -> f64 {
        self.elementary_charge * self.elementary_charge
            / (4.0 * std::f64::consts::PI * self.vacuum_permittivity)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// Device and model parameters, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceConfig {
    #[serde(rename = "a_m")]
    pub a: f64,
    #[serde(rename = "l0_m")]
    pub l0: f64,
    pub gamma: f64,
    #[serde(rename = "saw_wavelength_m")]
    pub saw_wavelength: f64,
    #[serde(rename = "saw_velocity_mps")]
    pub saw_velocity: f64,
    pub effective_mass_ratio: f64,
    pub drive_ratio: f64,
    #[serde(rename = "channel_separation_m")]
    pub channel_separation: f64,
    #[serde(rename = "temperature_K")]
    pub temperature: f64,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        let a = 0.5e-6;
        Self {
            a,
            l0: 0.04 * a,
            gamma: 0.5,
            saw_wavelength: 1.0e-6,
            saw_velocity: 2981.0,
            effective_mass_ratio: PRINTED_MASS_RATIO,
            drive_ratio: 0.1,
            channel_separation: 1.0e-6,
            temperature: 0.27,
        }
    }
}

/// Configuration file contents before defaults are applied. Every key is
/// optional; unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub a_m: Option<f64>,
    pub l0_m: Option<f64>,
    pub gamma: Option<f64>,
    pub saw_wavelength_m: Option<f64>,
    pub saw_velocity_mps: Option<f64>,
    pub effective_mass_ratio: Option<f64>,
    pub drive_ratio: Option<f64>,
    pub channel_separation_m: Option<f64>,
    #[serde(rename = "temperature_K")]
    pub temperature_k: Option<f64>,
}

impl ConfigFile {
    /// Fill missing keys with defaults and validate. A missing `l0_m`
    /// follows the resolved `a_m` (l0 = 0.04·a).
    pub fn resolve(&self) -> Result<DeviceConfig> {
        let d = DeviceConfig::default();
        let a = self.a_m.unwrap_or(d.a);
        let cfg = DeviceConfig {
            a,
            l0: self.l0_m.unwrap_or(0.04 * a),
            gamma: self.gamma.unwrap_or(d.gamma),
            saw_wavelength: self.saw_wavelength_m.unwrap_or(d.saw_wavelength),
            saw_velocity: self.saw_velocity_mps.unwrap_or(d.saw_velocity),
            effective_mass_ratio: self.effective_mass_ratio.unwrap_or(d.effective_mass_ratio),
            drive_ratio: self.drive_ratio.unwrap_or(d.drive_ratio),
            channel_separation: self.channel_separation_m.unwrap_or(d.channel_separation),
            temperature: self.temperature_k.unwrap_or(d.temperature),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl DeviceConfig {
    pub fn validate(&self) -> Result<()> {
        fn positive(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig {
                    field,
                    reason: format!("must be finite and > 0, got {v}"),
                })
            }
        }
        fn non_negative(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig {
                    field,
                    reason: format!("must be finite and >= 0, got {v}"),
                })
            }
        }
        positive("a_m", self.a)?;
        positive("l0_m", self.l0)?;
        non_negative("gamma", self.gamma)?;
        positive("saw_wavelength_m", self.saw_wavelength)?;
        positive("saw_velocity_mps", self.saw_velocity)?;
        positive("effective_mass_ratio", self.effective_mass_ratio)?;
        non_negative("drive_ratio", self.drive_ratio)?;
        positive("channel_separation_m", self.channel_separation)?;
        non_negative("temperature_K", self.temperature)?;
        Ok(())
    }

    pub fn with_mass_ratio(mut self, ratio: f64) -> Self {
        self.effective_mass_ratio = ratio;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }
}

/// Dimensionless unit system: ħ = 1, length `a`, energy ħ²/(2m*a²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NaturalUnits {
    pub length: f64,
    pub energy: f64,
    pub time: f64,
}

impl NaturalUnits {
    pub fn length_to_si(&self, x: f64) -> f64 {
        x * self.length
    }
    pub fn length_from_si(&self, x: f64) -> f64 {
        x / self.length
    }
    pub fn energy_to_si(&self, e: f64) -> f64 {
        e * self.energy
    }
    pub fn energy_from_si(&self, e: f64) -> f64 {
        e / self.energy
    }
    pub fn time_to_si(&self, t: f64) -> f64 {
        t * self.time
    }
    pub fn time_from_si(&self, t: f64) -> f64 {
        t / self.time
    }
    /// Angular frequency (rad/s) from a natural-unit rate.
    pub fn rate_to_si(&self, w: f64) -> f64 {
        w / self.time
    }
}

/// Quantities derived from a validated [`DeviceConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedScales {
    /// Gate barrier height ħ²/(2m*l0²), J.
    pub v0: f64,
    /// SAW amplitude γ·V0, J.
    pub v_s: f64,
    /// SAW wavenumber 2π/λ, 1/m.
    pub k: f64,
    /// SAW angular frequency v·k, rad/s.
    pub omega_saw: f64,
    /// SAW period λ/v, s.
    pub period: f64,
    pub m_star: f64,
    pub natural_length: f64,
    pub natural_energy: f64,
    pub natural_time: f64,
}

impl DerivedScales {
    pub fn units(&self) -> NaturalUnits {
        NaturalUnits {
            length: self.natural_length,
            energy: self.natural_energy,
            time: self.natural_time,
        }
    }

    /// Microwave drive amplitude V_e = drive_ratio·V_S, J.
    pub fn drive_amplitude(&self, config: &DeviceConfig) -> f64 {
        config.drive_ratio * self.v_s
    }
}

pub fn derive_scales(config: &DeviceConfig, constants: &PhysicalConstants) -> Result<DerivedScales> {
    config.validate()?;
    let hbar = constants.hbar;
    let m_star = config.effective_mass_ratio * constants.electron_mass;
    let v0 = hbar * hbar / (2.0 * m_star * config.l0 * config.l0);
    let k = 2.0 * std::f64::consts::PI / config.saw_wavelength;
    let natural_energy = hbar * hbar / (2.0 * m_star * config.a * config.a);
    Ok(DerivedScales {
        v0,
        v_s: config.gamma * v0,
        k,
        omega_saw: config.saw_velocity * k,
        period: config.saw_wavelength / config.saw_velocity,
        m_star,
        natural_length: config.a,
        natural_energy,
        natural_time: hbar / natural_energy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalCheck {
    /// k_B·T, J.
    pub thermal_energy: f64,
    /// k_B·T divided by the qubit splitting.
    pub ratio: f64,
}

pub fn thermal_ratio(
    config: &DeviceConfig,
    constants: &PhysicalConstants,
    qubit_splitting: f64,
) -> Result<ThermalCheck> {
    if !(qubit_splitting > 0.0) {
        return Err(Error::NonPositive("qubit splitting"));
    }
    let thermal_energy = constants.boltzmann * config.temperature;
    Ok(ThermalCheck {
        thermal_energy,
        ratio: thermal_energy / qubit_splitting,
    })
}
