#![allow(dead_code)]

use aeris_core::environment::{LinkEnvironment, LinkParams};
use aeris_core::geometry::{Point2, ScenarioGeometry};
use aeris_core::power::{PowerModel, STANDARD_GRAVITY};
use aeris_core::radio::RadioConfig;
use aeris_core::scenario::{Conventions, IrsConfig, CLT_FLOOR};
use aeris_core::units::{db_to_linear, dbm_to_watts, inr_db_to_watts, AngleUnit};
use aeris_core::Scenario;

pub const URBAN: (f64, f64) = LinkParams::URBAN;
pub const SUBURBAN: (f64, f64) = LinkParams::SUBURBAN;

pub fn link(env: (f64, f64), eta: f64, k: f64) -> LinkParams {
    LinkParams {
        e: env.0,
        g: env.1,
        q: -1.5,
        v: 3.5,
        eta,
        k_factor: k,
        omega: 1.0,
    }
}

pub fn environment(env: (f64, f64), k: f64) -> LinkEnvironment {
    LinkEnvironment::new(link(env, 0.009, k), link(env, 0.01, k), AngleUnit::Degrees).unwrap()
}

pub fn rotor() -> PowerModel {
    PowerModel {
        air_density: 1.225,
        disc_area: 0.503,
        blade_speed: 300.0,
        rotor_radius: 0.4,
        solidity: 0.05,
        profile_drag: 0.012,
        induced_correction: 0.1,
        mass: 2.0,
        gravity: STANDARD_GRAVITY,
        circuit_power: 10.0,
        node_power: 10.0,
        battery_energy: 3.6e5,
    }
}

pub fn radio(p_dbm: f64, inr_db: f64, threshold_db: f64, gain: f64) -> RadioConfig {
    let bandwidth = 5e6;
    let noise_psd = 1e-17;
    RadioConfig {
        bandwidth,
        p_u: dbm_to_watts(p_dbm),
        p_d: dbm_to_watts(p_dbm),
        noise_psd,
        system_gain: gain,
        residual_si: inr_db_to_watts(inr_db, noise_psd * bandwidth),
        snr_threshold: db_to_linear(threshold_db),
    }
}

/// The reference scenario: D = 2000 m, UAV at 1050 m, h = 350 m, N = 270.
pub fn default_scenario() -> Scenario {
    let geometry = ScenarioGeometry::new(
        Point2::new(0.0, 0.0),
        Point2::new(2000.0, 0.0),
        Point2::new(1050.0, 0.0),
        350.0,
        50.0,
        1000.0,
    )
    .unwrap();
    let irs = IrsConfig {
        elements: 270,
        n_min: 20,
        n_max: 400,
        element_power: 0.108,
        spacing: 0.5,
        clt_floor: CLT_FLOOR,
    };
    Scenario::new(
        geometry,
        environment(URBAN, db_to_linear(15.0)),
        radio(55.0, 45.0, 8.0, 1e-3),
        irs,
        rotor(),
        Conventions::default(),
    )
    .unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
