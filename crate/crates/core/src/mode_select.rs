//! Choosing between the UAV-only and IRS-only modes for energy efficiency.

use serde::{Deserialize, Serialize};

use crate::cascade::IrsConvention;
use crate::error::{Error, Result};
use crate::geometry::Link;
use crate::optimizer::height::{optimize_irs_height, optimize_uav_height};
use crate::performance::{Mode, Performance};
use crate::quadrature::{integrate_half_line, QuadSettings};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionProbability {
    pub p_irs: f64,
    pub p_uav: f64,
    /// `P_IRS/P_UAV` of the two mode powers.
    pub power_ratio: f64,
}

/// `P(Γ_IRS ≥ Γ_UAV · P_IRS/P_UAV) = ∫ (1 − F_IRS(z·r)) f_UAV(z) dz`.
pub fn selection_probability_irs(scenario: &Scenario) -> Result<SelectionProbability> {
    let irs = &scenario.irs;
    if irs.elements < irs.clt_floor {
        return Err(Error::BelowCltFloor {
            n: irs.elements,
            floor: irs.clt_floor,
        });
    }
    let perf = Performance::new(scenario)?;
    let ratio = perf.power(Mode::Irs)? / perf.power(Mode::Uav)?;
    let scale = perf.bound_snr(Mode::Uav);
    if !(scale > 0.0) {
        return Ok(SelectionProbability {
            p_irs: 1.0,
            p_uav: 0.0,
            power_ratio: ratio,
        });
    }
    let mut failure = None;
    let density = |z: f64| -> Result<f64> {
        let fu = perf.hop_snr_cdf(Link::Up, z)?;
        let fd = perf.hop_snr_cdf(Link::Down, z)?;
        let pu = perf.hop_snr_pdf(Link::Up, z)?;
        let pd = perf.hop_snr_pdf(Link::Down, z)?;
        let f_uav = (1.0 - fu) * pd + (1.0 - fd) * pu;
        Ok((1.0 - perf.outage_irs_at(z * ratio)?) * f_uav)
    };
    let settings = QuadSettings {
        abs_tol: 1e-10,
        rel_tol: 1e-9,
        max_intervals: 20_000,
        initial_segments: 64,
    };
    let integral = integrate_half_line(
        |z| match density(z) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        scale,
        settings,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let p_irs = integral.value.clamp(0.0, 1.0);
    Ok(SelectionProbability {
        p_irs,
        p_uav: 1.0 - p_irs,
        power_ratio: ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementThreshold {
    /// IRS-only wins in mean SNR per watt for `N > n_th`, or for `N < n_th`
    /// when `inverted`.
    pub n_th: f64,
    /// Denominator of the linear-in-`N` closed form.
    pub denominator: f64,
    pub inverted: bool,
    pub convention: IrsConvention,
}

impl ElementThreshold {
    pub fn prefers_irs(&self, n: u32) -> bool {
        let n = f64::from(n);
        if self.inverted {
            n < self.n_th
        } else {
            n > self.n_th
        }
    }
}

/// Element count where `E[Γ_IRS]/P_IRS` overtakes `E[Γ_UAV]/P_UAV`.
///
/// With the printed statistics `E[Γ_IRS]` is affine in `N` and the threshold
/// is a ratio whose denominator may change sign. With the standardized
/// statistics it is quadratic in `N + 1` and the threshold is its positive
/// root.
pub fn element_threshold(scenario: &Scenario) -> Result<ElementThreshold> {
    let perf = Performance::new(scenario)?;
    let budget = perf.budget();
    let w = budget.v * budget.cascade_path;
    let u = perf.bound_snr(Mode::Uav);
    let pr = scenario.irs.element_power;
    let fixed = scenario.power.fixed_power()?;
    let p_u = scenario.radio.p_u;
    let p_uav = perf.power(Mode::Uav)?;
    let m = scenario.product_moments()?;
    let convention = scenario.conventions.irs;
    match convention {
        IrsConvention::Printed => {
            let lambda_prime = 0.5 * m.mean * m.mean / m.variance;
            let nu = 1.0;
            let num = (p_u - pr + fixed) * u - nu * p_uav * w;
            let den = lambda_prime * p_uav * w - pr * u;
            if den == 0.0 || !den.is_finite() {
                return Err(Error::Numerical(format!("threshold denominator is {den}")));
            }
            Ok(ElementThreshold {
                n_th: num / den - 1.0,
                denominator: den,
                inverted: den < 0.0,
                convention,
            })
        }
        IrsConvention::Standardized => {
            // a n² + b n + c ≥ 0 with n = N + 1.
            let a = w * m.mean * m.mean * p_uav;
            let b = w * m.variance * p_uav - u * pr;
            let c = -u * (p_u - pr + fixed);
            if !(a > 0.0) {
                return Err(Error::Numerical(format!("threshold leading coefficient is {a}")));
            }
            let disc = b * b - 4.0 * a * c;
            let root = if disc < 0.0 {
                // Never below the curve: IRS wins at every N.
                f64::NEG_INFINITY
            } else if b >= 0.0 {
                2.0 * -c / (b + disc.sqrt()).max(f64::MIN_POSITIVE)
            } else {
                (-b + disc.sqrt()) / (2.0 * a)
            };
            Ok(ElementThreshold {
                n_th: root - 1.0,
                denominator: b,
                inverted: false,
                convention,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeightSelection {
    pub winner: Mode,
    pub h_irs: f64,
    pub ee_irs: f64,
    pub h_uav: f64,
    pub ee_uav: f64,
}

/// Runs both altitude programs and keeps the mode with the larger
/// bound-based energy efficiency. Ties go to the lower-power mode, and to
/// IRS-only when the powers are equal as well.
pub fn select_mode_by_optimal_heights(scenario: &Scenario) -> Result<HeightSelection> {
    let irs = optimize_irs_height(scenario)?;
    let uav = optimize_uav_height(scenario)?;
    let perf = Performance::new(scenario)?;
    let winner = if irs.ee > uav.ee {
        Mode::Irs
    } else if uav.ee > irs.ee || perf.power(Mode::Uav)? < perf.power(Mode::Irs)? {
        Mode::Uav
    } else {
        Mode::Irs
    };
    Ok(HeightSelection {
        winner,
        h_irs: irs.h_star,
        ee_irs: irs.ee,
        h_uav: uav.h_star,
        ee_uav: uav.ee,
    })
}

/// Power-only rule: IRS-only while `N ≤ p_d/P_r(b)`.
pub fn select_by_power(scenario: &Scenario) -> Mode {
    let pr = scenario.irs.element_power;
    if f64::from(scenario.irs.elements) * pr <= scenario.radio.p_d {
        Mode::Irs
    } else {
        Mode::Uav
    }
}

/// SNR-only rule: selection combining never loses SNR.
pub fn select_by_snr(_scenario: &Scenario) -> Mode {
    Mode::Integrated
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub elements: u32,
    pub probability: Option<SelectionProbability>,
    pub threshold: ElementThreshold,
    /// Mode preferred by the mean-SNR-per-watt threshold at `elements`.
    pub chosen: Mode,
    pub by_power: Mode,
    pub by_snr: Mode,
    pub heights: Option<HeightSelection>,
}

/// Every selection rule at the scenario point. The probability is omitted
/// below the CLT floor; the altitude comparison runs when `with_heights`.
pub fn selection_report(scenario: &Scenario, with_heights: bool) -> Result<SelectionReport> {
    let probability = match selection_probability_irs(scenario) {
        Ok(p) => Some(p),
        Err(Error::BelowCltFloor { .. }) => None,
        Err(e) => return Err(e),
    };
    let threshold = element_threshold(scenario)?;
    let n = scenario.irs.elements;
    Ok(SelectionReport {
        elements: n,
        probability,
        chosen: if threshold.prefers_irs(n) { Mode::Irs } else { Mode::Uav },
        threshold,
        by_power: select_by_power(scenario),
        by_snr: select_by_snr(scenario),
        heights: if with_heights {
            Some(select_mode_by_optimal_heights(scenario)?)
        } else {
            None
        },
    })
}
