//! Rician small-scale fading and the double-Rician product moments.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::special::{bessel_i0_scaled, kummer_1f1};

/// Poisson weights below this mass are dropped from the CDF series.
pub const SERIES_TAIL_TOL: f64 = 1e-14;
/// Largest number of Poisson terms the CDF series may use.
pub const SERIES_TERM_CAP: usize = 120;

/// Above this `K b x` the density switches from the series to the Bessel form.
const PDF_SERIES_LIMIT: f64 = 400.0;
/// Truncation residual above which a CDF evaluation is rejected.
pub const SERIES_RESIDUAL_MAX: f64 = 1e-10;

/// Which reading of the double-Rician moment formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentConvention {
    /// `Ω` enters the formula directly as the per-component scale.
    Printed,
    /// The formula is fed the scatter variance `Ω/(2(K+1))`, which matches
    /// fading sampled with `E|h|² = Ω`.
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicianFading {
    k: f64,
    omega: f64,
}

/// A truncated series value together with its tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub residual_bound: f64,
    pub terms: usize,
}

impl RicianFading {
    pub fn new(k: f64, omega: f64) -> Result<Self> {
        require_non_negative("k_factor", k)?;
        require_positive("omega", omega)?;
        Ok(Self { k, omega })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `b = (K+1)/Ω`.
    pub fn b(&self) -> f64 {
        (self.k + 1.0) / self.omega
    }

    /// LoS amplitude `μ` with `μ² = KΩ/(K+1)`.
    pub fn los_amplitude(&self) -> f64 {
        (self.k * self.omega / (self.k + 1.0)).sqrt()
    }

    /// Per-component variance of the scattered part, `Ω/(2(K+1))`.
    pub fn scatter_variance(&self) -> f64 {
        self.omega / (2.0 * (self.k + 1.0))
    }

    /// Number of Poisson terms needed for the requested tail mass, and the
    /// resulting geometric tail bound.
    fn poisson_terms(&self, tail_tol: f64) -> (usize, f64) {
        let mut log_w = -self.k;
        for l in 0..SERIES_TERM_CAP {
            let lf = l as f64;
            let next_log_w = log_w + self.k.ln() - (lf + 1.0).ln();
            let ratio = self.k / (lf + 2.0);
            let bound = if self.k == 0.0 {
                0.0
            } else if ratio < 1.0 {
                next_log_w.exp() / (1.0 - ratio)
            } else {
                f64::INFINITY
            };
            if bound < tail_tol {
                return (l + 1, bound);
            }
            log_w = next_log_w;
        }
        let lf = SERIES_TERM_CAP as f64;
        let ratio = self.k / (lf + 1.0);
        let bound = if ratio < 1.0 {
            (log_w + self.k.ln() - lf.ln()).exp() / (1.0 - ratio)
        } else {
            f64::INFINITY
        };
        (SERIES_TERM_CAP, bound)
    }

    /// Power CDF from the Poisson-mixture series with exactly `terms` terms.
    ///
    /// Evaluates `1 − Σ_{ℓ<terms} Σ_{m≤ℓ} f(m,ℓ) xᵐ e^{−bx}` in the
    /// cancellation-free form `(1 − Σ w_ℓ) + Σ w_ℓ P(M > ℓ)` where `M` is
    /// Poisson with mean `bx`.
    pub fn power_cdf_truncated(&self, x: f64, terms: usize) -> Result<SeriesValue> {
        require_non_negative("x", x)?;
        let y = self.b() * x;
        let mut weight = (-self.k).exp();
        let mut weight_sum = 0.0;
        let mut acc = 0.0;
        let mut upper = PoissonUpperTail::new(y);
        for l in 0..terms.max(1) {
            acc += weight * upper.next();
            weight_sum += weight;
            weight *= self.k / (l as f64 + 1.0);
        }
        let residual = (1.0 - weight_sum).max(0.0);
        let value = (residual + acc).clamp(0.0, 1.0);
        Ok(SeriesValue {
            value,
            residual_bound: residual,
            terms: terms.max(1),
        })
    }

    /// Power CDF with an adaptive number of terms. Errors when the
    /// truncation residual cannot be pushed below `SERIES_RESIDUAL_MAX`.
    pub fn power_cdf(&self, x: f64) -> Result<f64> {
        let (terms, bound) = self.poisson_terms(SERIES_TAIL_TOL);
        if bound > SERIES_RESIDUAL_MAX {
            return Err(Error::SeriesNonConvergence(format!(
                "Rician CDF tail bound {bound:.3e} with K = {} after {terms} terms",
                self.k
            )));
        }
        let mut v = self.power_cdf_truncated(x, terms)?;
        v.residual_bound = v.residual_bound.max(bound);
        if v.residual_bound > SERIES_RESIDUAL_MAX {
            return Err(Error::SeriesNonConvergence(format!(
                "Rician CDF residual {:.3e}",
                v.residual_bound
            )));
        }
        Ok(v.value)
    }

    /// Power density `Σ e^{−K−bx} (K b x)^ℓ/(ℓ!)² · b`.
    pub fn power_pdf(&self, x: f64) -> Result<f64> {
        require_non_negative("x", x)?;
        let b = self.b();
        let ky = self.k * b * x;
        if ky > PDF_SERIES_LIMIT {
            return Ok(self.power_pdf_bessel(x));
        }
        let mut term = (-self.k - b * x).exp();
        let mut sum = 0.0;
        // Terms decrease once (ℓ+1)² > K b x; stop when they no longer register.
        for l in 0..4 * SERIES_TERM_CAP {
            sum += term;
            let next = (l + 1) as f64;
            if next * next > ky && term <= 1e-17 * sum {
                return Ok(b * sum);
            }
            term *= ky / (next * next);
        }
        Err(Error::SeriesNonConvergence(format!("Rician pdf at x = {x}")))
    }

    /// Power density in the Bessel form
    /// `b e^{−K−bx} I₀(2√(K b x))`.
    pub fn power_pdf_bessel(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let b = self.b();
        let arg = 2.0 * (self.k * b * x).sqrt();
        b * (-self.k - b * x + arg).exp() * bessel_i0_scaled(arg)
    }

    /// Amplitude `|h|` from two Gaussian components with means `(μ, 0)`.
    pub fn sample_amplitude<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let s = self.scatter_variance().sqrt();
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        (self.los_amplitude() + s * re).hypot(s * im)
    }

    pub fn sample_power<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let a = self.sample_amplitude(rng);
        a * a
    }
}

/// Upper tails `P(M > ℓ)` of a Poisson variable, produced for ℓ = 0, 1, ….
struct PoissonUpperTail {
    y: f64,
    l: usize,
    pmf: f64,
    cdf: f64,
    direct: bool,
    upper: f64,
}

impl PoissonUpperTail {
    fn new(y: f64) -> Self {
        // Below the mean the upper tail is close to one and is best obtained
        // from the lower sum; above it the lower sum is close to one and the
        // tail is summed directly.
        Self {
            y,
            l: 0,
            pmf: (-y).exp(),
            cdf: 0.0,
            direct: false,
            upper: 0.0,
        }
    }

    fn next(&mut self) -> f64 {
        let l = self.l;
        self.l += 1;
        if self.y == 0.0 {
            return 0.0;
        }
        if !self.direct {
            self.cdf += self.pmf;
            let lf = l as f64;
            if lf + 1.0 > self.y {
                self.direct = true;
                self.upper = upper_tail_sum(self.y, l);
                self.pmf *= self.y / (lf + 1.0);
                return self.upper;
            }
            self.pmf *= self.y / (lf + 1.0);
            return (1.0 - self.cdf).max(0.0);
        }
        // upper(ℓ) = upper(ℓ−1) − pmf(ℓ)
        self.upper = (self.upper - self.pmf).max(0.0);
        self.pmf *= self.y / (l as f64 + 1.0);
        self.upper
    }
}

/// `P(M > l)` for Poisson mean `y`, summed term by term from `l + 1`.
fn upper_tail_sum(y: f64, l: usize) -> f64 {
    let lf = (l + 1) as f64;
    let mut term = (-y + lf * y.ln() - ln_factorial(l + 1)).exp();
    let mut sum = 0.0;
    let mut m = lf;
    while term > 1e-18 * sum || sum == 0.0 {
        sum += term;
        m += 1.0;
        term *= y / m;
        if term == 0.0 {
            break;
        }
    }
    sum
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Mean and variance of `|h_u||h_d|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductMoments {
    pub mean: f64,
    pub variance: f64,
}

impl ProductMoments {
    pub fn second_moment(&self) -> f64 {
        self.variance + self.mean * self.mean
    }
}

/// Double-Rician mean and variance through `₁F₁(−½; 1; ·)`.
///
/// Both conventions share the formula
/// `mean = σ(π/2) F_u F_d`,
/// `var = 4σ²(1 + μ_u²/(2s_u²))(1 + μ_d²/(2s_d²)) − mean²`, with
/// `σ² = s_u² s_d²` and `F_i = ₁F₁(−½; 1; −μ_i²/(2s_i²))`. The printed
/// convention uses `s_i² = Ω_i`, the classical one the scatter variance.
pub fn double_rician_moments(
    up: &RicianFading,
    down: &RicianFading,
    convention: MomentConvention,
) -> Result<ProductMoments> {
    let scale = |f: &RicianFading| match convention {
        MomentConvention::Printed => f.omega(),
        MomentConvention::Classical => f.scatter_variance(),
    };
    let (su, sd) = (scale(up), scale(down));
    let (mu_u, mu_d) = (up.los_amplitude().powi(2), down.los_amplitude().powi(2));
    let sigma = (su * sd).sqrt();
    let fu = kummer_1f1(-0.5, 1.0, -mu_u / (2.0 * su))?;
    let fd = kummer_1f1(-0.5, 1.0, -mu_d / (2.0 * sd))?;
    let mean = sigma * std::f64::consts::FRAC_PI_2 * fu * fd;
    let second = 4.0 * sigma * sigma * (1.0 + mu_u / (2.0 * su)) * (1.0 + mu_d / (2.0 * sd));
    let variance = second - mean * mean;
    if !(variance > 0.0) {
        return Err(Error::Numerical(format!(
            "double-Rician variance {variance} is not positive"
        )));
    }
    Ok(ProductMoments { mean, variance })
}
