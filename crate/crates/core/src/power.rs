//! Power consumption of the three relaying modes.

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::performance::Mode;
use crate::radio::RadioConfig;

pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Rotorcraft hover model plus fixed circuit consumption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    /// Air density `ρ` in kg/m³.
    pub air_density: f64,
    /// Rotor disc area `A` in m².
    pub disc_area: f64,
    /// Blade angular velocity `ξ` in rad/s.
    pub blade_speed: f64,
    /// Rotor radius `r` in m.
    pub rotor_radius: f64,
    /// Rotor solidity `s`.
    pub solidity: f64,
    /// Profile drag coefficient `δ`.
    pub profile_drag: f64,
    /// Incremental correction factor of induced power `κ`.
    pub induced_correction: f64,
    /// Airframe mass in kg.
    pub mass: f64,
    pub gravity: f64,
    /// UAV circuit power `p_c` in W.
    pub circuit_power: f64,
    /// Circuit power of each ground node `p_bs` in W.
    pub node_power: f64,
    /// Battery energy `E_B` in J.
    pub battery_energy: f64,
}

impl PowerModel {
    pub fn validate(&self) -> Result<()> {
        require_positive("air_density", self.air_density)?;
        require_positive("disc_area", self.disc_area)?;
        require_positive("blade_speed", self.blade_speed)?;
        require_positive("rotor_radius", self.rotor_radius)?;
        require_positive("solidity", self.solidity)?;
        require_positive("mass", self.mass)?;
        require_positive("gravity", self.gravity)?;
        require_non_negative("profile_drag", self.profile_drag)?;
        if !(self.induced_correction >= -1.0) {
            return Err(Error::invalid("induced_correction", "must be >= -1"));
        }
        require_non_negative("circuit_power", self.circuit_power)?;
        require_non_negative("node_power", self.node_power)?;
        require_non_negative("battery_energy", self.battery_energy)?;
        Ok(())
    }

    /// Hover power: blade-profile term plus induced term.
    pub fn hover_power(&self) -> Result<f64> {
        self.validate()?;
        let profile = self.profile_drag / 8.0
            * self.air_density
            * self.solidity
            * self.disc_area
            * self.blade_speed.powi(3)
            * self.rotor_radius.powi(3);
        let weight = self.mass * self.gravity;
        let induced =
            (1.0 + self.induced_correction) * (weight.powi(3) / (2.0 * self.air_density * self.disc_area)).sqrt();
        Ok(profile + induced)
    }

    /// Fixed consumption `C = p_c + p_h + 2 p_bs` common to every mode.
    pub fn fixed_power(&self) -> Result<f64> {
        Ok(self.circuit_power + self.hover_power()? + 2.0 * self.node_power)
    }

    /// Airborne consumption `p_c + N·P_r(b) + p_h` drawn from the battery.
    pub fn airborne_power(&self, elements: u32, element_power: f64) -> Result<f64> {
        Ok(self.circuit_power + f64::from(elements) * element_power + self.hover_power()?)
    }

    /// Hover endurance `E_B / (p_c + N·P_r(b) + p_h)` in seconds.
    pub fn hover_endurance(&self, elements: u32, element_power: f64) -> Result<f64> {
        let p = self.airborne_power(elements, element_power)?;
        if !(p > 0.0) {
            return Err(Error::invalid("airborne power", "must be > 0"));
        }
        Ok(self.battery_energy / p)
    }
}

/// Total consumption of a mode.
pub fn mode_power(
    mode: Mode,
    radio: &RadioConfig,
    model: &PowerModel,
    elements: u32,
    element_power: f64,
) -> Result<f64> {
    require_non_negative("element_power", element_power)?;
    let fixed = model.fixed_power()?;
    let irs = f64::from(elements) * element_power;
    Ok(match mode {
        Mode::Uav => radio.p_u + radio.p_d + fixed,
        Mode::Irs => radio.p_u + irs + fixed,
        Mode::Integrated => radio.p_u + radio.p_d + irs + fixed,
    })
}
