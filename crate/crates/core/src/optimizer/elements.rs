//! Element-count problems of the IRS-only mode.

use serde::{Deserialize, Serialize};

use super::qt::{solve, OptReport, QtKind, QtProblem};
use crate::cascade::IrsConvention;
use crate::error::{Error, Result};
use crate::performance::{energy_efficiency, shannon, Mode, Performance};
use crate::scenario::Scenario;
use crate::units::rate_to_snr_threshold;

/// Per-element non-centrality step of the convention's `λ`.
pub fn lambda_step(scenario: &Scenario) -> Result<f64> {
    let m = scenario.product_moments()?;
    let ratio = m.mean * m.mean / m.variance;
    Ok(match scenario.conventions.irs {
        IrsConvention::Printed => 0.5 * ratio,
        IrsConvention::Standardized => ratio,
    })
}

/// Bound-based IRS energy efficiency at `n` elements.
pub fn irs_energy_efficiency(scenario: &Scenario, n: u32) -> Result<f64> {
    let s = scenario.with_elements(n);
    let p = Performance::new(&s)?;
    energy_efficiency(p.capacity_bound(Mode::Irs), p.power(Mode::Irs)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementsReport {
    pub qt: OptReport,
    pub lambda_step: f64,
    /// Real-valued `N = λ★/λ′ − 1`.
    pub n_real: f64,
    pub n_star: u32,
    pub ee: f64,
    pub n_exhaustive: u32,
    pub ee_exhaustive: f64,
    /// `|N★ − N_exhaustive|`.
    pub gap: u32,
}

/// Maximizes the bound-based IRS energy efficiency over `N` through the
/// quadratic transform in `λ = (N + 1)λ′`.
pub fn optimize_irs_elements(scenario: &Scenario) -> Result<ElementsReport> {
    let irs = scenario.irs;
    if irs.n_min < irs.clt_floor {
        return Err(Error::BelowCltFloor {
            n: irs.n_min,
            floor: irs.clt_floor,
        });
    }
    let step = lambda_step(scenario)?;
    if !(step > 0.0) {
        return Err(Error::invalid("lambda_step", "must be positive"));
    }
    let perf = Performance::new(scenario)?;
    let budget = *perf.budget();
    let w = budget.v * budget.cascade_path;
    let shape = scenario.mean_power_shape()?;
    let bandwidth = scenario.radio.bandwidth;
    let base_power = perf.power(Mode::Irs)? - f64::from(irs.elements) * irs.element_power;
    let pr = irs.element_power;

    let lo = (f64::from(irs.n_min) + 1.0) * step;
    let hi = (f64::from(irs.n_max) + 1.0) * step;
    let problem = QtProblem::new(QtKind::SingleRatioMax, lo, hi).ratio(
        move |lambda| shannon(bandwidth, w * shape.eval(lambda / step)),
        move |lambda| base_power + (lambda / step - 1.0) * pr,
    );
    let qt = solve(&problem)?;
    let n_real = qt.x / step - 1.0;

    let clamp = |n: f64| (n.max(f64::from(irs.n_min)).min(f64::from(irs.n_max))) as u32;
    let (lo_n, hi_n) = (clamp(n_real.floor()), clamp(n_real.ceil()));
    let ee_lo = irs_energy_efficiency(scenario, lo_n)?;
    let ee_hi = irs_energy_efficiency(scenario, hi_n)?;
    let (n_star, ee) = if ee_hi > ee_lo { (hi_n, ee_hi) } else { (lo_n, ee_lo) };

    let (n_ex, ee_ex) = exhaustive_elements(scenario)?;
    Ok(ElementsReport {
        qt,
        lambda_step: step,
        n_real,
        n_star,
        ee,
        n_exhaustive: n_ex,
        ee_exhaustive: ee_ex,
        gap: n_star.abs_diff(n_ex),
    })
}

/// Integer sweep of the bound-based EE over `[N_min, N_max]`.
pub fn exhaustive_elements(scenario: &Scenario) -> Result<(u32, f64)> {
    let mut best = (scenario.irs.n_min, f64::NEG_INFINITY);
    for n in scenario.irs.n_min..=scenario.irs.n_max {
        let ee = irs_energy_efficiency(scenario, n)?;
        if ee > best.1 {
            best = (n, ee);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementBranch {
    Minimum,
    Maximum,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinPowerElements {
    pub n_star: u32,
    /// Real element count solving the rate constraint with equality.
    pub n_real: f64,
    pub branch: ElementBranch,
}

/// Smallest `N` in `[N_min, N_max]` whose IRS capacity bound meets `rate`.
pub fn min_power_elements(scenario: &Scenario, rate: f64) -> Result<MinPowerElements> {
    if !(rate >= 0.0) {
        return Err(Error::invalid("rate", format!("must be >= 0, got {rate}")));
    }
    let irs = scenario.irs;
    let budget = scenario.budget()?;
    let w = budget.v * budget.cascade_path;
    let shape = scenario.mean_power_shape()?;
    let target = rate_to_snr_threshold(rate, scenario.radio.bandwidth) / w;
    let n_real = shape.invert(target) - 1.0;
    let meets = |n: u32| -> Result<bool> {
        let s = scenario.with_elements(n);
        Ok(Performance::new(&s)?.capacity_bound(Mode::Irs) >= rate)
    };
    let n = n_real.ceil().max(0.0);
    if n <= f64::from(irs.n_min) {
        return Ok(MinPowerElements {
            n_star: irs.n_min,
            n_real,
            branch: ElementBranch::Minimum,
        });
    }
    if n >= f64::from(irs.n_max) {
        if !meets(irs.n_max)? {
            return Err(Error::Infeasible(format!(
                "rate {rate} bps needs N ≈ {n_real:.1} > N_max = {}",
                irs.n_max
            )));
        }
        return Ok(MinPowerElements {
            n_star: irs.n_max,
            n_real,
            branch: ElementBranch::Maximum,
        });
    }
    // Settle rounding at the ceiling so the bracketing holds exactly.
    let mut k = n as u32;
    while k < irs.n_max && !meets(k)? {
        k += 1;
    }
    while k > irs.n_min && meets(k - 1)? {
        k -= 1;
    }
    Ok(MinPowerElements {
        n_star: k,
        n_real,
        branch: ElementBranch::Interior,
    })
}

/// Source power that meets `rate` with equality at the scenario's `N`.
pub fn min_power_uplink(scenario: &Scenario, rate: f64) -> Result<f64> {
    if !(rate >= 0.0) {
        return Err(Error::invalid("rate", format!("must be >= 0, got {rate}")));
    }
    let budget = scenario.budget()?;
    let g = scenario.clt()?.mean_power(scenario.conventions.irs);
    let per_watt = scenario.cascade_gain_per_watt() * budget.cascade_path * g;
    Ok(rate_to_snr_threshold(rate, scenario.radio.bandwidth) / per_watt)
}
