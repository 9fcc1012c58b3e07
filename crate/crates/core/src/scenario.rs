//! A complete, validated scenario and the link budget it implies.

use serde::{Deserialize, Serialize};

use crate::cascade::{clt_params, CltParams, IrsConvention, MeanPowerShape};
use crate::environment::LinkEnvironment;
use crate::error::{require_non_negative, Error, Result};
use crate::fading::{double_rician_moments, MomentConvention, ProductMoments, RicianFading};
use crate::geometry::{Link, Point2, ScenarioGeometry};
use crate::power::PowerModel;
use crate::radio::RadioConfig;

/// Default lower limit on `N` for which the CLT description is trusted.
pub const CLT_FLOOR: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrsConfig {
    pub elements: u32,
    pub n_min: u32,
    pub n_max: u32,
    /// Per-element phase-resolution power `P_r(b)` in W.
    pub element_power: f64,
    /// Element spacing in m (recorded, not used by the model).
    pub spacing: f64,
    pub clt_floor: u32,
}

impl IrsConfig {
    pub fn validate(&self) -> Result<()> {
        require_non_negative("element_power", self.element_power)?;
        if self.n_min > self.n_max {
            return Err(Error::invalid(
                "n_min",
                format!("{} > n_max {}", self.n_min, self.n_max),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conventions {
    pub moments: MomentConvention,
    pub irs: IrsConvention,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            moments: MomentConvention::Classical,
            irs: IrsConvention::Standardized,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub geometry: ScenarioGeometry,
    pub environment: LinkEnvironment,
    pub radio: RadioConfig,
    pub irs: IrsConfig,
    pub power: PowerModel,
    pub conventions: Conventions,
}

impl Scenario {
    pub fn new(
        geometry: ScenarioGeometry,
        environment: LinkEnvironment,
        radio: RadioConfig,
        irs: IrsConfig,
        power: PowerModel,
        conventions: Conventions,
    ) -> Result<Self> {
        radio.validate()?;
        irs.validate()?;
        power.validate()?;
        Ok(Self {
            geometry,
            environment,
            radio,
            irs,
            power,
            conventions,
        })
    }

    pub fn with_height(&self, h: f64) -> Result<Self> {
        Ok(Self {
            geometry: self.geometry.with_height(h)?,
            ..self.clone()
        })
    }

    pub fn with_uav(&self, uav: Point2) -> Self {
        Self {
            geometry: self.geometry.with_uav(uav),
            ..self.clone()
        }
    }

    pub fn with_elements(&self, n: u32) -> Self {
        Self {
            irs: IrsConfig {
                elements: n,
                ..self.irs
            },
            ..self.clone()
        }
    }

    pub fn with_element_power(&self, p: f64) -> Self {
        Self {
            irs: IrsConfig {
                element_power: p,
                ..self.irs
            },
            ..self.clone()
        }
    }

    pub fn with_radio(&self, radio: RadioConfig) -> Self {
        Self { radio, ..self.clone() }
    }

    pub fn with_environment(&self, environment: LinkEnvironment) -> Self {
        Self {
            environment,
            ..self.clone()
        }
    }

    pub fn with_conventions(&self, conventions: Conventions) -> Self {
        Self {
            conventions,
            ..self.clone()
        }
    }

    pub fn fading(&self, link: Link) -> Result<RicianFading> {
        let p = self.environment.params(link);
        RicianFading::new(p.k_factor, p.omega)
    }

    pub fn product_moments(&self) -> Result<ProductMoments> {
        double_rician_moments(
            &self.fading(Link::Up)?,
            &self.fading(Link::Down)?,
            self.conventions.moments,
        )
    }

    pub fn clt(&self) -> Result<CltParams> {
        Ok(clt_params(self.irs.elements, self.product_moments()?))
    }

    pub fn mean_power_shape(&self) -> Result<MeanPowerShape> {
        Ok(MeanPowerShape::new(self.product_moments()?, self.conventions.irs))
    }

    /// `κ_u = Â/(η_u(R_SI + N₀B))`, `κ_d = Â/(η_d N₀B)`.
    pub fn kappa(&self, link: Link) -> f64 {
        let eta = self.environment.params(link).eta;
        let noise = self.radio.noise_power();
        match link {
            Link::Up => self.radio.system_gain / (eta * (self.radio.residual_si + noise)),
            Link::Down => self.radio.system_gain / (eta * noise),
        }
    }

    /// `I_i = p_i κ_i Ω_i`.
    pub fn link_intensity(&self, link: Link) -> f64 {
        let p = match link {
            Link::Up => self.radio.p_u,
            Link::Down => self.radio.p_d,
        };
        p * self.kappa(link) * self.environment.params(link).omega
    }

    /// `V` per watt of source power: `Â² η_u⁻¹ η_d⁻¹ / (N₀B)`.
    pub fn cascade_gain_per_watt(&self) -> f64 {
        let eu = self.environment.params(Link::Up).eta;
        let ed = self.environment.params(Link::Down).eta;
        self.radio.system_gain.powi(2) / (eu * ed * self.radio.noise_power())
    }

    pub fn budget(&self) -> Result<LinkBudget> {
        let g = &self.geometry;
        let h = g.height();
        let mut distance = [0.0; 2];
        let mut alpha = [0.0; 2];
        for link in Link::BOTH {
            distance[link.index()] = g.slant_distance(link);
            alpha[link.index()] = self.environment.exponent_at(h, g.offset(link), link)?;
        }
        let path = |l: Link| distance[l.index()].powf(-alpha[l.index()]);
        let snr_unit = [
            self.radio.p_u * self.kappa(Link::Up) * path(Link::Up),
            self.radio.p_d * self.kappa(Link::Down) * path(Link::Down),
        ];
        let v = self.radio.p_u * self.cascade_gain_per_watt();
        let cascade_path = path(Link::Up) * path(Link::Down);
        Ok(LinkBudget {
            distance,
            alpha,
            snr_unit,
            v,
            cascade_path,
            t: 1.0 / (v * cascade_path),
        })
    }
}

/// Geometry-dependent gains at the scenario's current UAV position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub distance: [f64; 2],
    pub alpha: [f64; 2],
    /// `p_i κ_i d_i^{−α_i}`: per-hop SNR per unit fading power.
    pub snr_unit: [f64; 2],
    /// Cascade gain `V = Â² p_u η_u⁻¹ η_d⁻¹/(N₀B)`.
    pub v: f64,
    /// `d_u^{−α_u} d_d^{−α_d}`.
    pub cascade_path: f64,
    /// `t = d_u^{α_u} d_d^{α_d}/V`.
    pub t: f64,
}

impl LinkBudget {
    pub fn snr_unit(&self, link: Link) -> f64 {
        self.snr_unit[link.index()]
    }

    /// Mean-SNR argument of the UAV-mode bound.
    pub fn uav_mean_snr(&self, omega_u: f64, omega_d: f64) -> f64 {
        (self.snr_unit[0] * omega_u).min(self.snr_unit[1] * omega_d)
    }
}
