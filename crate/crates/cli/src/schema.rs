//! Scenario file layout and its conversion to a core [`Scenario`].

use aeris_core::cascade::IrsConvention;
use aeris_core::environment::{LinkEnvironment, LinkParams};
use aeris_core::fading::MomentConvention;
use aeris_core::geometry::{Point2, ScenarioGeometry};
use aeris_core::power::{PowerModel, STANDARD_GRAVITY};
use aeris_core::radio::RadioConfig;
use aeris_core::scenario::{Conventions, IrsConfig, CLT_FLOOR};
use aeris_core::units::{ebn0_db_to_system_gain, rate_to_snr_threshold, AngleUnit};
use aeris_core::Scenario;
use serde::Deserialize;

use crate::error::CliError;
use crate::quantity::{
    Acceleration, AngularSpeed, Area, Decibel, Energy, Frequency, Length, Mass, MassDensity, Power, PowerDensity, Rate,
    Ratio, Q,
};
use crate::sweep::SweepAxis;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub geometry: GeometrySection,
    pub environment: EnvironmentSection,
    pub radio: RadioSection,
    pub irs: IrsSection,
    pub power: PowerSection,
    #[serde(default)]
    pub conventions: ConventionsSection,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub sweep: Vec<SweepAxis>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub source: [Q<Length>; 2],
    pub destination: [Q<Length>; 2],
    pub uav: [Q<Length>; 2],
    pub height: Q<Length>,
    pub height_min: Q<Length>,
    pub height_max: Q<Length>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    pub angle_unit: AngleUnit,
    pub uplink: LinkSection,
    pub downlink: LinkSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub e: f64,
    pub g: f64,
    pub q: f64,
    pub v: f64,
    pub eta: Q<Ratio>,
    pub k_factor: Q<Ratio>,
    pub omega: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioSection {
    pub bandwidth: Q<Frequency>,
    pub p_u: Q<Power>,
    pub p_d: Q<Power>,
    pub noise_psd: Q<PowerDensity>,
    /// Either `system_gain` or `ebn0`.
    pub system_gain: Option<Q<Ratio>>,
    pub ebn0: Option<Q<Decibel>>,
    /// Residual self-interference relative to the noise power.
    pub residual_si: Q<Ratio>,
    /// Either `snr_threshold` or `target_rate`.
    pub snr_threshold: Option<Q<Ratio>>,
    pub target_rate: Option<Q<Rate>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrsSection {
    pub elements: u32,
    pub n_min: u32,
    pub n_max: u32,
    pub element_power: Q<Power>,
    pub spacing: Q<Length>,
    pub clt_floor: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSection {
    pub air_density: Q<MassDensity>,
    pub disc_area: Q<Area>,
    pub blade_speed: Q<AngularSpeed>,
    pub rotor_radius: Q<Length>,
    pub solidity: f64,
    pub profile_drag: f64,
    pub induced_correction: f64,
    pub mass: Q<Mass>,
    pub gravity: Option<Q<Acceleration>>,
    pub circuit_power: Q<Power>,
    pub node_power: Q<Power>,
    pub battery_energy: Q<Energy>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConventionsSection {
    pub moments: Option<MomentConvention>,
    pub irs: Option<IrsConvention>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub antithetic: bool,
}

fn default_trials() -> u64 {
    100_000
}

fn default_seed() -> u64 {
    1
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            seed: default_seed(),
            antithetic: false,
        }
    }
}

/// Parses a scenario document and checks its schema version.
pub fn parse_file(text: &str) -> Result<ScenarioFile, CliError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(CliError::Schema(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    Ok(file)
}

fn point(p: &[Q<Length>; 2]) -> Point2 {
    Point2::new(p[0].si, p[1].si)
}

impl LinkSection {
    fn params(&self) -> LinkParams {
        LinkParams {
            e: self.e,
            g: self.g,
            q: self.q,
            v: self.v,
            eta: self.eta.si,
            k_factor: self.k_factor.si,
            omega: self.omega,
        }
    }
}

impl RadioSection {
    fn config(&self) -> Result<RadioConfig, CliError> {
        let bandwidth = self.bandwidth.si;
        let noise_psd = self.noise_psd.si;
        let system_gain = match (self.system_gain, self.ebn0) {
            (Some(g), None) => g.si,
            (None, Some(e)) => ebn0_db_to_system_gain(e.si, noise_psd),
            _ => {
                return Err(CliError::Schema(
                    "radio needs exactly one of `system_gain`, `ebn0`".into(),
                ))
            }
        };
        let snr_threshold = match (self.snr_threshold, self.target_rate) {
            (Some(t), None) => t.si,
            (None, Some(r)) => rate_to_snr_threshold(r.si, bandwidth),
            _ => {
                return Err(CliError::Schema(
                    "radio needs exactly one of `snr_threshold`, `target_rate`".into(),
                ))
            }
        };
        Ok(RadioConfig {
            bandwidth,
            p_u: self.p_u.si,
            p_d: self.p_d.si,
            noise_psd,
            system_gain,
            residual_si: self.residual_si.si * noise_psd * bandwidth,
            snr_threshold,
        })
    }
}

impl ScenarioFile {
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let g = &self.geometry;
        let geometry = ScenarioGeometry::new(
            point(&g.source),
            point(&g.destination),
            point(&g.uav),
            g.height.si,
            g.height_min.si,
            g.height_max.si,
        )
        .map_err(CliError::from_load)?;
        let env = &self.environment;
        let environment = LinkEnvironment::new(env.uplink.params(), env.downlink.params(), env.angle_unit)
            .map_err(CliError::from_load)?;
        let irs = IrsConfig {
            elements: self.irs.elements,
            n_min: self.irs.n_min,
            n_max: self.irs.n_max,
            element_power: self.irs.element_power.si,
            spacing: self.irs.spacing.si,
            clt_floor: self.irs.clt_floor.unwrap_or(CLT_FLOOR),
        };
        let p = &self.power;
        let power = PowerModel {
            air_density: p.air_density.si,
            disc_area: p.disc_area.si,
            blade_speed: p.blade_speed.si,
            rotor_radius: p.rotor_radius.si,
            solidity: p.solidity,
            profile_drag: p.profile_drag,
            induced_correction: p.induced_correction,
            mass: p.mass.si,
            gravity: p.gravity.map_or(STANDARD_GRAVITY, |a| a.si),
            circuit_power: p.circuit_power.si,
            node_power: p.node_power.si,
            battery_energy: p.battery_energy.si,
        };
        let defaults = Conventions::default();
        let conventions = Conventions {
            moments: self.conventions.moments.unwrap_or(defaults.moments),
            irs: self.conventions.irs.unwrap_or(defaults.irs),
        };
        Scenario::new(geometry, environment, self.radio.config()?, irs, power, conventions).map_err(CliError::from_load)
    }
}
