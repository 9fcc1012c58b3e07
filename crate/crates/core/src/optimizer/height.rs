//! Altitude programs for the IRS-only and UAV-only modes.
//!
//! Both replace the exact exponent `α(h)` by its rational approximation,
//! which turns the log-gain into ratios of polynomials in `h` and
//! `S = ẑ + 2√(ẑ² + h²)`.

use serde::{Deserialize, Serialize};

use super::concavity::{check_concavity_irs, check_concavity_uav, ConcavityVerdict, CONCAVITY_POINTS};
use super::golden::grid_maximize;
use super::qt::{solve, OptReport, QtKind, QtProblem};
use crate::error::{Error, Result};
use crate::geometry::Link;
use crate::performance::{energy_efficiency, Mode, Performance};
use crate::scenario::Scenario;

/// Step of the exhaustive reference searches, in m.
pub const GRID_STEP: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridReference {
    pub h: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightReport {
    pub mode: Mode,
    pub qt: OptReport,
    pub h_star: f64,
    /// Bound-based energy efficiency at `h_star`.
    pub ee: f64,
    /// Optimum of the exact log-gain on the reference grid.
    pub exact: GridReference,
    /// Optimum of the approximate log-gain on the reference grid.
    pub approx: GridReference,
    /// `|h★ − h_exact| / h_exact`.
    pub relative_gap_exact: f64,
    /// `|h★ − h_approx|` in m.
    pub gap_approx: f64,
    pub guards: Vec<ConcavityVerdict>,
}

struct LinkShape {
    z: f64,
    coeffs: crate::environment::AlphaCoefficients,
}

fn shapes(scenario: &Scenario) -> Result<[LinkShape; 2]> {
    let make = |link: Link| -> Result<LinkShape> {
        let z = scenario.geometry.offset(link);
        if !(z > 0.0) {
            return Err(Error::ApproximationDomain(format!(
                "{} horizontal offset is zero; the approximate exponent is undefined",
                link.label()
            )));
        }
        Ok(LinkShape {
            z,
            coeffs: *scenario.environment.coefficients(link),
        })
    };
    Ok([make(Link::Up)?, make(Link::Down)?])
}

fn log_sq(h: f64, z: f64) -> f64 {
    (h * h + z * z).ln()
}

/// `−Σ_i α_i(h) ln d_i` with the exact exponent.
pub fn irs_log_gain_exact(scenario: &Scenario, h: f64) -> Result<f64> {
    let mut total = 0.0;
    for link in Link::BOTH {
        let z = scenario.geometry.offset(link);
        total -= 0.5 * scenario.environment.exponent_at(h, z, link)? * log_sq(h, z);
    }
    Ok(total)
}

/// `−Σ_i ½ α̃_i(h) log(h² + ẑ_i²)` with the approximate exponent.
pub fn irs_log_gain_approx(scenario: &Scenario, h: f64) -> Result<f64> {
    let mut total = 0.0;
    for link in Link::BOTH {
        let z = scenario.geometry.offset(link);
        total -= 0.5 * scenario.environment.path_loss_exponent_approx(h, z, link)? * log_sq(h, z);
    }
    Ok(total)
}

/// `min_i (ln I_i − α_i(h) ln d_i)` with the exact exponent.
pub fn uav_log_gain_exact(scenario: &Scenario, h: f64) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for link in Link::BOTH {
        let z = scenario.geometry.offset(link);
        let a = scenario.environment.exponent_at(h, z, link)?;
        worst = worst.min(scenario.link_intensity(link).ln() - 0.5 * a * log_sq(h, z));
    }
    Ok(worst)
}

/// `min_i (ln I_i − ½ α̃_i(h) log(h² + ẑ_i²))`.
pub fn uav_log_gain_approx(scenario: &Scenario, h: f64) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for link in Link::BOTH {
        let z = scenario.geometry.offset(link);
        let a = scenario.environment.path_loss_exponent_approx(h, z, link)?;
        worst = worst.min(scenario.link_intensity(link).ln() - 0.5 * a * log_sq(h, z));
    }
    Ok(worst)
}

/// Energy efficiency of `mode` at `h` from the capacity bound.
pub fn energy_efficiency_at(scenario: &Scenario, mode: Mode, h: f64) -> Result<f64> {
    let s = scenario.with_height(h)?;
    let p = Performance::new(&s)?;
    energy_efficiency(p.capacity_bound(mode), p.power(mode)?)
}

/// Best grid point of a fallible objective.
pub fn grid_search<F>(scenario: &Scenario, step: f64, f: F) -> Result<GridReference>
where
    F: Fn(&Scenario, f64) -> Result<f64>,
{
    let mut err = None;
    let (h, objective) = grid_maximize(
        |h| match f(scenario, h) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        scenario.geometry.h_min(),
        scenario.geometry.h_max(),
        step,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(GridReference { h, objective }),
    }
}

fn start(scenario: &Scenario) -> f64 {
    (scenario.geometry.h_min() * scenario.geometry.h_max()).sqrt()
}

/// Minimizes `Σ_i O_i/R_i` with `O_i = ½ log(h² + ẑ_i²)·Num_i(h)` and
/// `R_i = Den_i(h)` (the approximate exponent's numerator and denominator).
pub fn optimize_irs_height(scenario: &Scenario) -> Result<HeightReport> {
    let [u, d] = shapes(scenario)?;
    let geom = &scenario.geometry;
    let mut problem = QtProblem::new(QtKind::SumRatioMin, geom.h_min(), geom.h_max()).start(start(scenario));
    for l in [u, d] {
        let LinkShape { z, coeffs } = l;
        problem = problem.ratio(
            move |h| 0.5 * log_sq(h, z) * coeffs.numerator(h, z),
            move |h| coeffs.denominator(h, z),
        );
    }
    let qt = solve(&problem)?;
    let guards = Link::BOTH
        .iter()
        .map(|&l| check_concavity_irs(scenario, l, CONCAVITY_POINTS))
        .collect();
    finish(scenario, Mode::Irs, qt, guards, irs_log_gain_exact, irs_log_gain_approx)
}

/// Maximizes `min_i O_i/R_i` with `O_i = 2 ln I_i·Den_i − log(h² + ẑ_i²)·Num_i`
/// and `R_i = Den_i`, i.e. `min_i 2 ln(I_i d_i^{−α̃_i})`.
pub fn optimize_uav_height(scenario: &Scenario) -> Result<HeightReport> {
    let [u, d] = shapes(scenario)?;
    let geom = &scenario.geometry;
    let mut problem = QtProblem::new(QtKind::MaxMinRatio, geom.h_min(), geom.h_max()).start(start(scenario));
    for (link, l) in Link::BOTH.into_iter().zip([u, d]) {
        let LinkShape { z, coeffs } = l;
        let li = scenario.link_intensity(link).ln();
        if !li.is_finite() {
            return Err(Error::Infeasible(format!("{} link carries no power", link.label())));
        }
        problem = problem.ratio(
            move |h| 2.0 * li * coeffs.denominator(h, z) - log_sq(h, z) * coeffs.numerator(h, z),
            move |h| coeffs.denominator(h, z),
        );
    }
    let qt = solve(&problem)?;
    let guards = Link::BOTH
        .iter()
        .map(|&l| check_concavity_uav(scenario, l, CONCAVITY_POINTS))
        .collect();
    finish(scenario, Mode::Uav, qt, guards, uav_log_gain_exact, uav_log_gain_approx)
}

fn finish(
    scenario: &Scenario,
    mode: Mode,
    qt: OptReport,
    guards: Vec<ConcavityVerdict>,
    exact: fn(&Scenario, f64) -> Result<f64>,
    approx: fn(&Scenario, f64) -> Result<f64>,
) -> Result<HeightReport> {
    let h_star = qt.x;
    let exact = grid_search(scenario, GRID_STEP, exact)?;
    let approx = grid_search(scenario, GRID_STEP, approx)?;
    Ok(HeightReport {
        mode,
        ee: energy_efficiency_at(scenario, mode, h_star)?,
        relative_gap_exact: (h_star - exact.h).abs() / exact.h,
        gap_approx: (h_star - approx.h).abs(),
        h_star,
        exact,
        approx,
        qt,
        guards,
    })
}
