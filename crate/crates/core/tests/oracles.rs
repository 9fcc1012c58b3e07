//! Closed forms against independent references: tabulated special-function
//! values, direct quadrature of densities and sample moments.

mod common;

use aeris_core::cascade::{clt_params, noncentral_chi2_1_cdf, noncentral_chi2_1_pdf};
use aeris_core::fading::{double_rician_moments, MomentConvention, RicianFading, SERIES_TERM_CAP};
use aeris_core::performance::ergodic_capacity_exact;
use aeris_core::quadrature::{integrate, integrate_half_line, QuadSettings};
use aeris_core::special::kummer_1f1;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn settings() -> QuadSettings {
    QuadSettings {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_intervals: 20_000,
        initial_segments: 32,
    }
}

#[test]
fn kummer_matches_reference_values() {
    let table = [
        (0.1, 1.04938525615673),
        (1.0, 1.44649134408317),
        (5.0, 2.65320189732955),
        (20.0, 5.10975370812111),
        (100.0, 11.3120366806824),
    ];
    for (z, want) in table {
        let got = kummer_1f1(-0.5, 1.0, -z).unwrap();
        assert!(common::rel(got, want) < 1e-12, "1F1(-1/2;1;-{z}) = {got}, want {want}");
    }
}

#[test]
fn rician_cdf_is_integral_of_density() {
    for k in [0.0, 1.0, 10.0, 31.6] {
        let f = RicianFading::new(k, 1.0).unwrap();
        for x in [0.05, 0.5, 1.0, 1.7, 3.0] {
            let area = integrate(|t| f.power_pdf(t).unwrap(), 0.0, x, settings())
                .unwrap()
                .value;
            let cdf = f.power_cdf(x).unwrap();
            assert!((area - cdf).abs() < 1e-9, "K={k} x={x}: {area} vs {cdf}");
        }
    }
}

#[test]
fn rician_series_residual_is_small() {
    for k in [0.5, 5.0, 31.6, 50.0] {
        let f = RicianFading::new(k, 1.0).unwrap();
        for x in [0.01, 0.3, 1.0, 2.0, 6.0] {
            let s = f.power_cdf_truncated(x, SERIES_TERM_CAP).unwrap();
            assert!((s.value - f.power_cdf(x).unwrap()).abs() < 1e-12);
            assert!(s.residual_bound < 1e-10, "K={k} x={x}: {}", s.residual_bound);
        }
    }
}

#[test]
fn density_integrates_to_one() {
    for k in [0.0, 3.0, 31.6] {
        let f = RicianFading::new(k, 2.0).unwrap();
        let total = integrate_half_line(|t| f.power_pdf(t).unwrap(), 2.0, settings())
            .unwrap()
            .value;
        assert!((total - 1.0).abs() < 1e-9, "K={k}: {total}");
    }
}

#[test]
fn noncentral_chi2_cdf_is_integral_of_density() {
    for lambda in [0.0, 0.5, 4.0, 40.0] {
        for x in [0.2, 1.0, 5.0, 60.0] {
            let area = integrate(|t| noncentral_chi2_1_pdf(t, lambda), 0.0, x, settings())
                .unwrap()
                .value;
            let cdf = noncentral_chi2_1_cdf(x, lambda);
            assert!((area - cdf).abs() < 1e-8, "λ={lambda} x={x}: {area} vs {cdf}");
        }
    }
}

#[test]
fn classical_moments_match_samples() {
    let up = RicianFading::new(31.6, 1.0).unwrap();
    let down = RicianFading::new(2.0, 0.5).unwrap();
    let m = double_rician_moments(&up, &down, MomentConvention::Classical).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 200_000;
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let p = up.sample_amplitude(&mut rng) * down.sample_amplitude(&mut rng);
        s1 += p;
        s2 += p * p;
    }
    let mean = s1 / n as f64;
    let second = s2 / n as f64;
    let se = ((second - mean * mean) / n as f64).sqrt();
    assert!((mean - m.mean).abs() < 4.0 * se, "{mean} vs {}", m.mean);
    // E|h_u|²E|h_d|² is exact for the second moment.
    assert!(common::rel(m.second_moment(), 0.5) < 1e-12);
    assert!(common::rel(second, 0.5) < 0.01);
}

#[test]
fn printed_moments_at_rayleigh() {
    let f = RicianFading::new(0.0, 2.0).unwrap();
    let g = RicianFading::new(0.0, 0.5).unwrap();
    let m = double_rician_moments(&f, &g, MomentConvention::Printed).unwrap();
    assert!(common::rel(m.mean, std::f64::consts::FRAC_PI_2) < 1e-14);
}

#[test]
fn clt_terms_scale_with_elements() {
    let up = RicianFading::new(10.0, 1.0).unwrap();
    let m = double_rician_moments(&up, &up, MomentConvention::Classical).unwrap();
    let a = clt_params(20, m);
    let b = clt_params(41, m);
    assert_eq!(a.terms, 21.0);
    assert!(common::rel(b.mu_z, 2.0 * a.mu_z) < 1e-14);
    assert!(common::rel(b.var_z, 2.0 * a.var_z) < 1e-14);
}

#[test]
fn ergodic_capacity_of_rayleigh_link() {
    // B/ln2 · e^{1/γ̄} E₁(1/γ̄) for an exponential SNR with mean γ̄.
    for (mean, want) in [(1.0, 0.860347382270886), (10.0, 2.90651480841481)] {
        let c = ergodic_capacity_exact(|g| Ok(1.0 - (-g / mean).exp()), 1.0).unwrap();
        assert!(common::rel(c, want) < 1e-7, "γ̄={mean}: {c} vs {want}");
    }
}

#[test]
fn half_line_quadrature_of_lorentzian() {
    let v = integrate_half_line(|x| 1.0 / (1.0 + x * x), 1.0, settings())
        .unwrap()
        .value;
    assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
}
