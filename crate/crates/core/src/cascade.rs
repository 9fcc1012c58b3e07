//! Central-limit description of the IRS cascade `Z = Σ |h_u,k||h_d,k|`.
//!
//! With `n = N + 1` terms the cascade is approximated as Gaussian with mean
//! `μ_Z = n·E[|h_u||h_d|]` and variance `σ_Z² = n·var(|h_u||h_d|)`, so `Z²`
//! is a scaled non-central chi-square with one degree of freedom.

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, Result};
use crate::fading::ProductMoments;
use crate::special::erf;

/// How the non-central chi-square statistics of `Z²` are parameterised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IrsConvention {
    /// `λ = μ_Z²/(2σ_Z²)` compared directly against `tΓ₀`, `E[X] = ν + λ`.
    Printed,
    /// `X = (Z/σ_Z)²` with non-centrality `μ_Z²/σ_Z²`, threshold `tΓ₀/σ_Z²`
    /// and `E[Z²] = σ_Z² + μ_Z²`.
    Standardized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltParams {
    /// Number of summed element terms, `N + 1`.
    pub terms: f64,
    pub mu_z: f64,
    pub var_z: f64,
    /// `μ_Z²/(2σ_Z²)`.
    pub lambda: f64,
    /// `λ/(N+1)`.
    pub lambda_prime: f64,
    /// Degrees of freedom of the squared Gaussian.
    pub nu: f64,
}

pub fn clt_params(n: u32, moments: ProductMoments) -> CltParams {
    let terms = f64::from(n) + 1.0;
    let mu_z = terms * moments.mean;
    let var_z = terms * moments.variance;
    let lambda_prime = moments.mean * moments.mean / (2.0 * moments.variance);
    CltParams {
        terms,
        mu_z,
        var_z,
        lambda: terms * lambda_prime,
        lambda_prime,
        nu: 1.0,
    }
}

/// CDF of `(G + m)²` with `G` standard normal, evaluated at `w²`.
pub fn noncentral_chi2_1_cdf(w_sq: f64, noncentrality: f64) -> f64 {
    if w_sq <= 0.0 {
        return 0.0;
    }
    let w = w_sq.sqrt();
    let m = noncentrality.max(0.0).sqrt();
    let s2 = std::f64::consts::SQRT_2;
    (0.5 * (erf((w - m) / s2) + erf((w + m) / s2))).clamp(0.0, 1.0)
}

/// Density of `(G + m)²`.
pub fn noncentral_chi2_1_pdf(x: f64, noncentrality: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let w = x.sqrt();
    let m = noncentrality.max(0.0).sqrt();
    let phi = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
    (phi(w - m) + phi(w + m)) / (2.0 * w)
}

impl CltParams {
    /// Non-centrality used by the chosen convention.
    pub fn noncentrality(&self, convention: IrsConvention) -> f64 {
        match convention {
            IrsConvention::Printed => self.lambda,
            IrsConvention::Standardized => 2.0 * self.lambda,
        }
    }

    /// `P(Z² ≤ x)` where `x = tΓ₀`.
    pub fn outage(&self, x: f64, convention: IrsConvention) -> Result<f64> {
        require_non_negative("threshold", x)?;
        let arg = match convention {
            IrsConvention::Printed => x,
            IrsConvention::Standardized => x / self.var_z,
        };
        Ok(noncentral_chi2_1_cdf(arg, self.noncentrality(convention)))
    }

    /// Density of `Z²` at `x` under the convention.
    pub fn density(&self, x: f64, convention: IrsConvention) -> f64 {
        match convention {
            IrsConvention::Printed => noncentral_chi2_1_pdf(x, self.lambda),
            IrsConvention::Standardized => noncentral_chi2_1_pdf(x / self.var_z, 2.0 * self.lambda) / self.var_z,
        }
    }

    /// Mean cascade power `G(N)` multiplying `V d_u^{−α_u} d_d^{−α_d}`.
    pub fn mean_power(&self, convention: IrsConvention) -> f64 {
        match convention {
            IrsConvention::Printed => self.nu + self.lambda,
            IrsConvention::Standardized => self.var_z + self.mu_z * self.mu_z,
        }
    }
}

/// Per-element pieces of `G(N)`: `G = linear·n + quadratic·n²` plus a
/// constant, with `n = N + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanPowerShape {
    pub constant: f64,
    pub linear: f64,
    pub quadratic: f64,
}

impl MeanPowerShape {
    pub fn new(moments: ProductMoments, convention: IrsConvention) -> Self {
        match convention {
            IrsConvention::Printed => Self {
                constant: 1.0,
                linear: moments.mean * moments.mean / (2.0 * moments.variance),
                quadratic: 0.0,
            },
            IrsConvention::Standardized => Self {
                constant: 0.0,
                linear: moments.variance,
                quadratic: moments.mean * moments.mean,
            },
        }
    }

    pub fn eval(&self, terms: f64) -> f64 {
        self.constant + self.linear * terms + self.quadratic * terms * terms
    }

    /// Smallest real `n ≥ 0` with `eval(n) ≥ target`; zero if already met.
    pub fn invert(&self, target: f64) -> f64 {
        let c = self.constant - target;
        if c >= 0.0 {
            return 0.0;
        }
        if self.quadratic == 0.0 {
            return -c / self.linear;
        }
        let (a, b) = (self.quadratic, self.linear);
        // Stable root of a n² + b n + c = 0 with c < 0.
        2.0 * (-c) / (b + (b * b - 4.0 * a * c).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noncentrality() {
        let x: f64 = 1.7;
        let v = noncentral_chi2_1_cdf(x, 0.0);
        assert!((v - erf((x / 2.0).sqrt())).abs() < 1e-15);
        assert_eq!(noncentral_chi2_1_cdf(0.0, 3.0), 0.0);
    }

    #[test]
    fn lambda_affine_in_n() {
        let m = ProductMoments {
            mean: 0.8,
            variance: 0.3,
        };
        let a = clt_params(10, m);
        let b = clt_params(25, m);
        assert!((b.lambda - a.lambda - 15.0 * a.lambda_prime).abs() < 1e-12);
        let base = clt_params(0, m);
        assert!((base.lambda - base.lambda_prime).abs() < 1e-15);
    }

    #[test]
    fn shape_inverts() {
        let m = ProductMoments {
            mean: 0.8,
            variance: 0.3,
        };
        for conv in [IrsConvention::Printed, IrsConvention::Standardized] {
            let s = MeanPowerShape::new(m, conv);
            let n = s.invert(500.0);
            assert!((s.eval(n) - 500.0).abs() < 1e-9);
            let p = clt_params(40, m);
            assert!((s.eval(41.0) - p.mean_power(conv)).abs() < 1e-9);
        }
    }
}
