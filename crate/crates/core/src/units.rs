//! The single conversion layer between the logarithmic units used in
//! scenario descriptions and the linear quantities used everywhere else.

use serde::{Deserialize, Serialize};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm) * 1e-3
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    linear_to_db(watts * 1e3)
}

/// SNR threshold for a target rate: `2^(R0/B) - 1`.
pub fn rate_to_snr_threshold(rate: f64, bandwidth: f64) -> f64 {
    (rate / bandwidth).exp2() - 1.0
}

pub fn snr_threshold_to_rate(threshold: f64, bandwidth: f64) -> f64 {
    bandwidth * threshold.ln_1p() / std::f64::consts::LN_2
}

/// Maps an `E_b/N_0` figure in dB to the linear system gain `Â`.
///
/// `Â = 10^(EbN0/10) · N_0`, i.e. the gain that makes `Â/N_0` equal to the
/// quoted ratio. With a noise density of 1e-17 W/Hz, 135 dB gives
/// `Â ≈ 3.2e-4`.
pub fn ebn0_db_to_system_gain(ebn0_db: f64, noise_psd: f64) -> f64 {
    db_to_linear(ebn0_db) * noise_psd
}

/// Residual self-interference power from an interference-to-noise ratio.
pub fn inr_db_to_watts(inr_db: f64, noise_power: f64) -> f64 {
    db_to_linear(inr_db) * noise_power
}

/// Unit in which the LoS S-curve constants `(e, g)` were fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[serde(alias = "rad")]
    Radians,
    #[serde(alias = "deg")]
    Degrees,
}

impl AngleUnit {
    /// Multiplier taking radians into this unit.
    pub fn per_radian(self) -> f64 {
        match self {
            AngleUnit::Radians => 1.0,
            AngleUnit::Degrees => 180.0 / std::f64::consts::PI,
        }
    }

    pub fn from_radians(self, theta: f64) -> f64 {
        theta * self.per_radian()
    }

    pub fn to_radians(self, theta: f64) -> f64 {
        theta / self.per_radian()
    }
}
