//! Closed-form outage, ergodic capacity, Jensen bounds and energy efficiency.

use serde::{Deserialize, Serialize};

use crate::cascade::CltParams;
use crate::error::{require_non_negative, Error, Result};
use crate::fading::RicianFading;
use crate::geometry::Link;
use crate::power::mode_power;
use crate::quadrature::{integrate_half_line, QuadSettings};
use crate::scenario::{LinkBudget, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "uav")]
    Uav,
    #[serde(rename = "irs")]
    Irs,
    #[serde(rename = "int")]
    Integrated,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Uav, Mode::Irs, Mode::Integrated];

    pub fn label(self) -> &'static str {
        match self {
            Mode::Uav => "uav",
            Mode::Irs => "irs",
            Mode::Integrated => "int",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Mode::Uav => 0,
            Mode::Irs => 1,
            Mode::Integrated => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Exact closed form (outage) with the numerically integrated capacity.
    ClosedForm,
    /// Jensen-type capacity bound.
    Bound,
    /// Monte-Carlo estimate.
    Simulated,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::Bound => "bound",
            Provenance::Simulated => "simulated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeMetrics {
    pub mode: Mode,
    pub outage: f64,
    pub capacity: f64,
    pub power: f64,
    pub ee: f64,
    pub provenance: Provenance,
}

/// Everything the closed forms need at one scenario point.
#[derive(Debug, Clone)]
pub struct Performance<'a> {
    scenario: &'a Scenario,
    budget: LinkBudget,
    fading: [RicianFading; 2],
    clt: CltParams,
}

impl<'a> Performance<'a> {
    pub fn new(scenario: &'a Scenario) -> Result<Self> {
        Ok(Self {
            scenario,
            budget: scenario.budget()?,
            fading: [scenario.fading(Link::Up)?, scenario.fading(Link::Down)?],
            clt: scenario.clt()?,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        self.scenario
    }

    pub fn budget(&self) -> &LinkBudget {
        &self.budget
    }

    pub fn clt(&self) -> &CltParams {
        &self.clt
    }

    /// `Some` when the element count is below the CLT floor.
    pub fn clt_warning(&self) -> Option<Error> {
        let irs = &self.scenario.irs;
        (irs.elements < irs.clt_floor).then_some(Error::BelowCltFloor {
            n: irs.elements,
            floor: irs.clt_floor,
        })
    }

    /// Per-hop CDF of the SNR `γ_i = p_i κ_i d_i^{−α_i} X_i`.
    pub fn hop_snr_cdf(&self, link: Link, gamma: f64) -> Result<f64> {
        let unit = self.budget.snr_unit(link);
        if unit <= 0.0 {
            return Ok(1.0);
        }
        self.fading[link.index()].power_cdf(gamma / unit)
    }

    pub fn hop_snr_pdf(&self, link: Link, gamma: f64) -> Result<f64> {
        let unit = self.budget.snr_unit(link);
        if unit <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.fading[link.index()].power_pdf(gamma / unit)? / unit)
    }

    pub fn outage_uav_at(&self, gamma: f64) -> Result<f64> {
        require_non_negative("threshold", gamma)?;
        let fu = self.hop_snr_cdf(Link::Up, gamma)?;
        let fd = self.hop_snr_cdf(Link::Down, gamma)?;
        Ok((fu + fd - fu * fd).clamp(0.0, 1.0))
    }

    pub fn outage_irs_at(&self, gamma: f64) -> Result<f64> {
        require_non_negative("threshold", gamma)?;
        self.clt.outage(self.budget.t * gamma, self.scenario.conventions.irs)
    }

    pub fn outage_at(&self, mode: Mode, gamma: f64) -> Result<f64> {
        match mode {
            Mode::Uav => self.outage_uav_at(gamma),
            Mode::Irs => self.outage_irs_at(gamma),
            Mode::Integrated => Ok(outage_integrated(
                self.outage_uav_at(gamma)?,
                self.outage_irs_at(gamma)?,
            )),
        }
    }

    pub fn outage(&self, mode: Mode) -> Result<f64> {
        self.outage_at(mode, self.scenario.radio.snr_threshold)
    }

    pub fn ergodic_capacity(&self, mode: Mode) -> Result<f64> {
        ergodic_capacity_exact(|g| self.outage_at(mode, g), self.scenario.radio.bandwidth)
    }

    /// Mean SNR argument of the mode's Jensen bound.
    pub fn bound_snr(&self, mode: Mode) -> f64 {
        let p = &self.scenario.environment;
        let uav = self
            .budget
            .uav_mean_snr(p.params(Link::Up).omega, p.params(Link::Down).omega);
        let irs = self.budget.v * self.budget.cascade_path * self.clt.mean_power(self.scenario.conventions.irs);
        match mode {
            Mode::Uav => uav,
            Mode::Irs => irs,
            Mode::Integrated => uav.max(irs),
        }
    }

    pub fn capacity_bound(&self, mode: Mode) -> f64 {
        shannon(self.scenario.radio.bandwidth, self.bound_snr(mode))
    }

    pub fn power(&self, mode: Mode) -> Result<f64> {
        let s = self.scenario;
        mode_power(mode, &s.radio, &s.power, s.irs.elements, s.irs.element_power)
    }

    pub fn metrics(&self, mode: Mode, provenance: Provenance) -> Result<ModeMetrics> {
        let capacity = match provenance {
            Provenance::Bound => self.capacity_bound(mode),
            _ => self.ergodic_capacity(mode)?,
        };
        let power = self.power(mode)?;
        Ok(ModeMetrics {
            mode,
            outage: self.outage(mode)?,
            capacity,
            power,
            ee: energy_efficiency(capacity, power)?,
            provenance,
        })
    }
}

pub fn shannon(bandwidth: f64, snr: f64) -> f64 {
    bandwidth * snr.ln_1p() / std::f64::consts::LN_2
}

pub fn outage_uav(scenario: &Scenario) -> Result<f64> {
    Performance::new(scenario)?.outage(Mode::Uav)
}

pub fn outage_irs(scenario: &Scenario) -> Result<f64> {
    Performance::new(scenario)?.outage(Mode::Irs)
}

/// Selection-combining outage of independent branches.
pub fn outage_integrated(o_uav: f64, o_irs: f64) -> f64 {
    o_uav * o_irs
}

/// `(B/ln 2) ∫₀^∞ (1 − O(γ))/(1 + γ) dγ` after `γ = s/(1−s)`.
pub fn ergodic_capacity_exact<F>(mut outage: F, bandwidth: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut failure = None;
    let settings = QuadSettings {
        abs_tol: 1e-6 * std::f64::consts::LN_2,
        rel_tol: 1e-9,
        max_intervals: 20_000,
        initial_segments: 32,
    };
    let integral = integrate_half_line(
        |g| match outage(g) {
            Ok(o) => (1.0 - o) / (1.0 + g),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        1.0,
        settings,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(bandwidth * integral.value / std::f64::consts::LN_2)
}

pub fn capacity_bound_uav(scenario: &Scenario) -> Result<f64> {
    Ok(Performance::new(scenario)?.capacity_bound(Mode::Uav))
}

pub fn capacity_bound_irs(scenario: &Scenario) -> Result<f64> {
    Ok(Performance::new(scenario)?.capacity_bound(Mode::Irs))
}

pub fn capacity_bound_integrated(scenario: &Scenario) -> Result<f64> {
    Ok(Performance::new(scenario)?.capacity_bound(Mode::Integrated))
}

pub fn energy_efficiency(capacity: f64, power: f64) -> Result<f64> {
    if !(power > 0.0) {
        return Err(Error::invalid("power", format!("must be > 0, got {power}")));
    }
    Ok(capacity / power)
}
