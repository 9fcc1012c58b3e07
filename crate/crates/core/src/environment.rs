//! Elevation-dependent air-to-ground channel parameterisation.
//!
//! The LoS probability follows the S-curve `1/(1 + e·exp(-g(θ - e)))` and the
//! path-loss exponent is `α = p_L·q + v`. The optimizers work with a rational
//! approximation of `α(h)` obtained from `arctan x ≈ 3x/(1 + 2√(1+x²))` and a
//! second-order expansion of the exponential; its coefficients are cached here.

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::geometry::{elevation_angle, Link};
use crate::units::AngleUnit;

/// Environment constants of one hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// S-curve offset `e`, in the declared angle unit.
    pub e: f64,
    /// S-curve steepness `g`, per declared angle unit.
    pub g: f64,
    pub q: f64,
    pub v: f64,
    /// Excess aerial path loss `η` (linear).
    pub eta: f64,
    /// Rician factor `K` (linear).
    pub k_factor: f64,
    /// Mean local fading power `Ω`.
    pub omega: f64,
}

impl LinkParams {
    /// Al-Hourani suburban fit, degree convention.
    pub const SUBURBAN: (f64, f64) = (4.88, 0.43);
    /// Al-Hourani urban fit, degree convention.
    pub const URBAN: (f64, f64) = (9.61, 0.16);

    fn validate(&self) -> Result<()> {
        require_positive("g", self.g)?;
        require_positive("eta", self.eta)?;
        require_positive("omega", self.omega)?;
        require_non_negative("k_factor", self.k_factor)?;
        for (name, x) in [("e", self.e), ("q", self.q), ("v", self.v)] {
            if !x.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        Ok(())
    }
}

/// Coefficients of the rational `α(h)` approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaCoefficients {
    pub varsigma: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub b_prime: f64,
    pub c_prime: f64,
}

impl AlphaCoefficients {
    /// `g` must be expressed per radian: the `arctan` surrogate yields radians.
    fn new(p: &LinkParams, g_per_radian: f64) -> Self {
        let varsigma = p.e * (p.g * p.e).exp();
        let g = g_per_radian;
        Self {
            varsigma,
            a: p.q + p.v * (1.0 + varsigma),
            b: 3.0 * varsigma * p.v * g,
            c: 4.5 * p.v * varsigma * g * g,
            b_prime: 3.0 * varsigma * g,
            c_prime: 4.5 * varsigma * g * g,
        }
    }

    /// `S = ẑ + 2√(ẑ² + h²)`.
    pub fn s_term(h: f64, offset: f64) -> f64 {
        offset + 2.0 * offset.hypot(h)
    }

    pub fn numerator(&self, h: f64, offset: f64) -> f64 {
        let s = Self::s_term(h, offset);
        self.a * s * s - self.b * h * s + self.c * h * h
    }

    pub fn denominator(&self, h: f64, offset: f64) -> f64 {
        let s = Self::s_term(h, offset);
        (1.0 + self.varsigma) * s * s - self.b_prime * h * s + self.c_prime * h * h
    }

    /// Limit of the approximation as `h → ∞` at fixed offset.
    pub fn high_altitude_limit(&self) -> f64 {
        (4.0 * self.a - 2.0 * self.b + self.c) / (4.0 * (1.0 + self.varsigma) - 2.0 * self.b_prime + self.c_prime)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkEnvironment {
    links: [LinkParams; 2],
    angle_unit: AngleUnit,
    coefficients: [AlphaCoefficients; 2],
}

impl LinkEnvironment {
    pub fn new(up: LinkParams, down: LinkParams, angle_unit: AngleUnit) -> Result<Self> {
        up.validate()?;
        down.validate()?;
        let per_rad = angle_unit.per_radian();
        Ok(Self {
            links: [up, down],
            angle_unit,
            coefficients: [
                AlphaCoefficients::new(&up, up.g * per_rad),
                AlphaCoefficients::new(&down, down.g * per_rad),
            ],
        })
    }

    pub fn params(&self, link: Link) -> &LinkParams {
        &self.links[link.index()]
    }

    pub fn coefficients(&self, link: Link) -> &AlphaCoefficients {
        &self.coefficients[link.index()]
    }

    pub fn angle_unit(&self) -> AngleUnit {
        self.angle_unit
    }

    /// LoS probability at elevation `theta` (radians).
    pub fn los_probability(&self, theta: f64, link: Link) -> f64 {
        let p = self.params(link);
        let t = self.angle_unit.from_radians(theta);
        1.0 / (1.0 + p.e * (-p.g * (t - p.e)).exp())
    }

    /// Exact path-loss exponent at elevation `theta` (radians).
    pub fn path_loss_exponent_exact(&self, theta: f64, link: Link) -> f64 {
        let p = self.params(link);
        self.los_probability(theta, link) * p.q + p.v
    }

    /// Exact exponent at a geometry.
    pub fn exponent_at(&self, h: f64, offset: f64, link: Link) -> Result<f64> {
        Ok(self.path_loss_exponent_exact(elevation_angle(h, offset)?, link))
    }

    /// Rational approximation of `α(h)`.
    pub fn path_loss_exponent_approx(&self, h: f64, offset: f64, link: Link) -> Result<f64> {
        if !(h >= 0.0 && h.is_finite()) {
            return Err(Error::Geometry(format!("height must be finite and >= 0, got {h}")));
        }
        if !(offset > 0.0 && offset.is_finite()) {
            return Err(Error::Geometry(format!(
                "approximate exponent needs a positive horizontal offset, got {offset}"
            )));
        }
        let c = self.coefficients(link);
        let den = c.denominator(h, offset);
        if den <= 0.0 || !den.is_finite() {
            return Err(Error::ApproximationDomain(format!(
                "denominator {den} at h = {h}, offset = {offset}"
            )));
        }
        Ok(c.numerator(h, offset) / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(unit: AngleUnit) -> LinkEnvironment {
        let p = LinkParams {
            e: 9.61,
            g: 0.16,
            q: -1.5,
            v: 3.5,
            eta: 0.009,
            k_factor: 10.0,
            omega: 1.0,
        };
        LinkEnvironment::new(p, LinkParams { eta: 0.01, ..p }, unit).unwrap()
    }

    #[test]
    fn los_at_offset_constant() {
        let e = env(AngleUnit::Degrees);
        let theta = AngleUnit::Degrees.to_radians(9.61);
        assert!((e.los_probability(theta, Link::Up) - 1.0 / 10.61).abs() < 1e-14);
    }

    #[test]
    fn exponent_endpoints() {
        let e = env(AngleUnit::Degrees);
        let alpha = e.path_loss_exponent_exact(std::f64::consts::FRAC_PI_2, Link::Up);
        assert!(alpha > 2.0 && alpha < 2.01);
        let flat = e.path_loss_exponent_exact(0.0, Link::Up);
        assert!(flat > 3.35 && flat < 3.5);
    }

    #[test]
    fn approx_at_ground_level() {
        let e = env(AngleUnit::Degrees);
        let c = e.coefficients(Link::Up);
        let at0 = e.path_loss_exponent_approx(0.0, 700.0, Link::Up).unwrap();
        assert!((at0 - c.a / (1.0 + c.varsigma)).abs() < 1e-14);
        assert!(e.path_loss_exponent_approx(10.0, 0.0, Link::Up).is_err());
    }
}
