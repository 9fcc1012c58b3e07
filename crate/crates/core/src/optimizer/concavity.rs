//! Sufficient conditions for the concave-over-convex structure that the
//! height programs rely on, evaluated on a guard grid.

use serde::{Deserialize, Serialize};

use crate::environment::AlphaCoefficients;
use crate::geometry::Link;
use crate::scenario::Scenario;

pub const CONCAVITY_POINTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuardPoint {
    pub h: f64,
    pub holds: bool,
    /// Signed slack of the condition; non-negative when it holds.
    pub margin: f64,
    /// Exact second-derivative test where one is available.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityVerdict {
    pub link: Link,
    pub offset: f64,
    pub satisfied: bool,
    pub points: Vec<GuardPoint>,
}

impl ConcavityVerdict {
    pub fn failing(&self) -> Vec<f64> {
        self.points.iter().filter(|p| !p.holds).map(|p| p.h).collect()
    }

    pub fn fraction_holding(&self) -> f64 {
        self.points.iter().filter(|p| p.holds).count() as f64 / self.points.len().max(1) as f64
    }
}

pub fn guard_heights(scenario: &Scenario, points: usize) -> Vec<f64> {
    let (lo, hi) = (scenario.geometry.h_min(), scenario.geometry.h_max());
    let n = points.max(2);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Closed-form condition for `−½ α(h) log(ẑ² + h²)` numerator concavity:
/// `ẑ > 10` and the case split on `ẑ` versus `h`.
pub fn irs_condition(c: &AlphaCoefficients, h: f64, z: f64) -> (bool, f64) {
    if z <= 10.0 {
        return (false, z - 10.0);
    }
    let (a, b, cc) = (c.a, c.b, c.c);
    if z >= h {
        let rhs = h.powf(1.25) * ((78.0 * a + 14.0 * cc) / (11.0 * b)).powf(0.25);
        (z >= rhs, z - rhs)
    } else {
        let rhs = z * ((78.0 * a * z + b + 14.0 * cc * z) / (12.0 * b)).powf(0.25);
        (h >= rhs, h - rhs)
    }
}

/// Unbounded second-derivative bracket of the numerator; concavity of `−O`
/// holds when it is non-negative.
pub fn irs_bracket(c: &AlphaCoefficients, h: f64, z: f64) -> f64 {
    let (a, b, cc) = (c.a, c.b, c.c);
    let r = z.hypot(h);
    let l = (z * z + h * h).ln();
    let (h2, h4) = (h * h, h.powi(4));
    4.0 * a * z.powi(5)
        + z.powi(4) * (-2.0 * b + 5.0 * a * r)
        + z.powi(3) * (8.0 * a * h2 - b * r)
        + h2 * z * z * (-4.0 * b + 5.0 * (3.0 * a + cc) * r)
        + h4 * (-2.0 * b + 3.0 * (4.0 * a + cc) * r)
        + z * (4.0 * a * h4 + b * h2 * r)
        + (z * z + h2) * l * (2.0 * a * z.powi(3) + (4.0 * a + cc) * h2 * r + z * z * (-b + (4.0 * a + cc) * r))
}

pub fn check_concavity_irs(scenario: &Scenario, link: Link, points: usize) -> ConcavityVerdict {
    let c = scenario.environment.coefficients(link);
    let z = scenario.geometry.offset(link);
    let pts: Vec<GuardPoint> = guard_heights(scenario, points)
        .into_iter()
        .map(|h| {
            let (holds, margin) = irs_condition(c, h, z);
            GuardPoint {
                h,
                holds,
                margin,
                exact: Some(irs_bracket(c, h, z) >= 0.0),
            }
        })
        .collect();
    ConcavityVerdict {
        link,
        offset: z,
        satisfied: pts.iter().all(|p| p.holds),
        points: pts,
    }
}

/// Coefficient ratio of the UAV-mode condition.
pub fn uav_ratio(c: &AlphaCoefficients) -> f64 {
    (18.0 * c.a - 5.0 * c.b + 4.0 * c.c) / (36.0 * (1.0 + c.varsigma) - 10.0 * c.b_prime + 8.0 * c.c_prime)
}

/// `log I ≤ ratio · log(h² + ẑ²)`.
pub fn uav_condition(c: &AlphaCoefficients, log_intensity: f64, h: f64, z: f64) -> (bool, f64) {
    let margin = uav_ratio(c) * (h * h + z * z).ln() - log_intensity;
    (margin >= 0.0, margin)
}

pub fn check_concavity_uav(scenario: &Scenario, link: Link, points: usize) -> ConcavityVerdict {
    let c = scenario.environment.coefficients(link);
    let z = scenario.geometry.offset(link);
    let li = scenario.link_intensity(link).ln();
    let pts: Vec<GuardPoint> = guard_heights(scenario, points)
        .into_iter()
        .map(|h| {
            let (holds, margin) = uav_condition(c, li, h, z);
            GuardPoint {
                h,
                holds,
                margin,
                exact: None,
            }
        })
        .collect();
    ConcavityVerdict {
        link,
        offset: z,
        satisfied: pts.iter().all(|p| p.holds),
        points: pts,
    }
}
