//! Unit conventions.
//!
//! Energies cross the API in wavenumbers (cm⁻¹). Internally ħ = 1 and every
//! energy is an angular frequency in radians per unit of the chosen time
//! base: femtoseconds for physical aggregates, or the dimensionless chain
//! time τ = 2Vt/ħ for nearest-neighbour chains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in cm/fs.
pub const SPEED_OF_LIGHT_CM_PER_FS: f64 = 2.997_924_58e-5;

/// 2πc in rad·cm/fs: multiply a wavenumber to get rad/fs.
pub const WAVENUMBER_TO_RAD_PER_FS: f64 = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_CM_PER_FS;

pub fn energy_to_angular_frequency(wavenumber: f64) -> Result<f64> {
    if !(wavenumber >= 0.0) {
        return Err(Error::NegativeEnergy(wavenumber));
    }
    Ok(wavenumber * WAVENUMBER_TO_RAD_PER_FS)
}

pub fn angular_frequency_to_energy(omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::NegativeEnergy(omega));
    }
    Ok(omega / WAVENUMBER_TO_RAD_PER_FS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    Femtoseconds,
    /// τ = 2Vt/ħ for a chain with nearest-neighbour coupling V.
    Tau,
}

impl TimeUnit {
    pub fn column_name(self) -> &'static str {
        match self {
            TimeUnit::Femtoseconds => "t_fs",
            TimeUnit::Tau => "tau",
        }
    }
}

/// How wavenumbers are turned into angular frequencies for propagation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeBase {
    Femtoseconds,
    /// Time measured in units of ħ/(2V) for the given reference coupling (cm⁻¹).
    Tau {
        coupling: f64,
    },
}

impl TimeBase {
    /// Factor converting cm⁻¹ into rad per time unit.
    pub fn energy_scale(self) -> f64 {
        match self {
            TimeBase::Femtoseconds => WAVENUMBER_TO_RAD_PER_FS,
            TimeBase::Tau { coupling } => 1.0 / (2.0 * coupling),
        }
    }

    pub fn unit(self) -> TimeUnit {
        match self {
            TimeBase::Femtoseconds => TimeUnit::Femtoseconds,
            TimeBase::Tau { .. } => TimeUnit::Tau,
        }
    }
}
