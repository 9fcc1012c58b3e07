//! The few special functions the model needs.

use crate::error::{Error, Result};

const SERIES_CAP: usize = 20_000;
const SERIES_TOL: f64 = 1e-14;

/// Error function, delegated to `libm`.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Confluent hypergeometric function `₁F₁(a; b; z)`.
///
/// Direct Taylor series with a term-ratio stop. Negative arguments go
/// through Kummer's transformation `e^z ₁F₁(b−a; b; −z)` so the summed
/// series has no alternating cancellation.
pub fn kummer_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(Error::invalid("kummer_1f1", "arguments must be finite"));
    }
    if b <= 0.0 && b.fract() == 0.0 {
        return Err(Error::invalid("b", format!("non-positive integer {b}")));
    }
    if z < 0.0 {
        return Ok(z.exp() * taylor_1f1(b - a, b, -z)?);
    }
    taylor_1f1(a, b, z)
}

fn taylor_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..SERIES_CAP {
        let nf = n as f64;
        term *= (a + nf) / (b + nf) * z / (nf + 1.0);
        sum += term;
        if term == 0.0 || (term / sum).abs() < SERIES_TOL {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNonConvergence(format!(
        "1F1({a}; {b}; {z}) after {SERIES_CAP} terms"
    )))
}

/// Exponentially scaled modified Bessel function `e^{-x} I₀(x)` for `x ≥ 0`.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x <= 30.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        // Hankel expansion; terms shrink until k ≈ 2x, far beyond what is needed.
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            let kf = k as f64;
            term *= (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypergeometric_at_origin() {
        assert_eq!(kummer_1f1(-0.5, 1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn hypergeometric_polynomial_case() {
        // 1F1(-1; b; z) = 1 - z/b
        let v = kummer_1f1(-1.0, 2.0, 3.0).unwrap();
        assert!((v - (1.0 - 1.5)).abs() < 1e-14);
    }

    #[test]
    fn bessel_branches_meet() {
        let lo = bessel_i0_scaled(30.0);
        let hi = bessel_i0_scaled(30.0 + 1e-9);
        assert!(((lo - hi) / lo).abs() < 1e-9);
        assert!((bessel_i0_scaled(0.0) - 1.0).abs() < 1e-16);
    }

    #[test]
    fn rejects_pole() {
        assert!(kummer_1f1(1.0, -2.0, 1.0).is_err());
    }
}
