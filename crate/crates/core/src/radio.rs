//! Transmit, noise and threshold parameters shared by all modes.

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Result};
use crate::units::{rate_to_snr_threshold, snr_threshold_to_rate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioConfig {
    /// Bandwidth `B` in Hz.
    pub bandwidth: f64,
    /// Source transmit power `p_u` in W.
    pub p_u: f64,
    /// UAV transmit power `p_d` in W.
    pub p_d: f64,
    /// Noise density `N₀` in W/Hz.
    pub noise_psd: f64,
    /// System gain `Â` (linear).
    pub system_gain: f64,
    /// Residual self-interference power at the full-duplex UAV, in W.
    pub residual_si: f64,
    /// Outage SNR threshold `Γ₀` (linear).
    pub snr_threshold: f64,
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        require_positive("bandwidth", self.bandwidth)?;
        require_non_negative("p_u", self.p_u)?;
        require_non_negative("p_d", self.p_d)?;
        require_positive("noise_psd", self.noise_psd)?;
        require_positive("system_gain", self.system_gain)?;
        require_non_negative("residual_si", self.residual_si)?;
        require_non_negative("snr_threshold", self.snr_threshold)?;
        Ok(())
    }

    /// Noise power `N₀·B` in W.
    pub fn noise_power(&self) -> f64 {
        self.noise_psd * self.bandwidth
    }

    /// Rate `R₀ = B log₂(1 + Γ₀)` matching the threshold.
    pub fn target_rate(&self) -> f64 {
        snr_threshold_to_rate(self.snr_threshold, self.bandwidth)
    }

    pub fn with_target_rate(&self, rate: f64) -> Self {
        Self {
            snr_threshold: rate_to_snr_threshold(rate, self.bandwidth),
            ..*self
        }
    }
}
