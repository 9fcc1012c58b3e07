//! Monte-Carlo oracle: reproducibility and agreement with the closed forms.

mod common;

use aeris_core::fading::RicianFading;
use aeris_core::geometry::Point2;
use aeris_core::montecarlo::{simulate, simulate_grid, simulate_mode, SimPlan};
use aeris_core::performance::Performance;
use aeris_core::radio::RadioConfig;
use aeris_core::{Mode, Scenario};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default scenario with the threshold raised until the UAV outage is about
/// one in five.
fn contested() -> Scenario {
    let s = common::default_scenario();
    let mean = Performance::new(&s).unwrap().bound_snr(Mode::Uav);
    let mut factor = 0.3;
    loop {
        let t = s.with_radio(RadioConfig {
            snr_threshold: factor * mean,
            ..s.radio
        });
        if Performance::new(&t).unwrap().outage(Mode::Uav).unwrap() > 0.2 {
            return t;
        }
        factor *= 1.05;
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn estimates_do_not_depend_on_worker_count() {
    let s = contested();
    let plan = SimPlan::new(50_000, 11).with_selection(true);
    let one = in_pool(1, || simulate(&s, plan).unwrap());
    let three = in_pool(3, || simulate(&s, plan).unwrap());
    assert_eq!(one, three);
    assert_eq!(one, simulate(&s, plan).unwrap());
}

#[test]
fn seed_changes_the_draws() {
    let s = contested();
    let a = simulate_mode(&s, SimPlan::new(20_000, 1), Mode::Uav).unwrap();
    let b = simulate_mode(&s, SimPlan::new(20_000, 2), Mode::Uav).unwrap();
    assert_ne!(a.mean_snr.mean, b.mean_snr.mean);
}

#[test]
fn grid_matches_single_points() {
    let base = contested();
    let points: Vec<Scenario> = [(300.0, 700.0, 40), (350.0, 1050.0, 270), (600.0, 1500.0, 100)]
        .into_iter()
        .map(|(h, x, n)| {
            base.with_height(h)
                .unwrap()
                .with_uav(Point2::new(x, 0.0))
                .with_elements(n)
        })
        .collect();
    let plan = SimPlan::new(30_000, 5);
    let grid = simulate_grid(&points, plan).unwrap();
    for (s, g) in points.iter().zip(&grid) {
        assert_eq!(&simulate(s, plan).unwrap(), g);
    }
}

#[test]
fn uav_outage_agrees_with_closed_form() {
    let s = contested();
    let analytic = Performance::new(&s).unwrap().outage(Mode::Uav).unwrap();
    assert!(analytic > 0.05 && analytic < 0.95, "{analytic}");
    for antithetic in [false, true] {
        let est = simulate_mode(&s, SimPlan::new(200_000, 3).with_antithetic(antithetic), Mode::Uav).unwrap();
        let dev = (est.outage.mean - analytic).abs();
        assert!(
            dev <= 3.0 * est.outage.se,
            "{} vs {analytic} (se {})",
            est.outage.mean,
            est.outage.se
        );
    }
}

#[test]
fn standard_error_shrinks_with_square_root_of_trials() {
    let s = contested();
    let small = simulate_mode(&s, SimPlan::new(10_000, 9), Mode::Uav).unwrap();
    let large = simulate_mode(&s, SimPlan::new(1_000_000, 9), Mode::Uav).unwrap();
    let ratio = small.outage.se / large.outage.se;
    assert!((ratio / 10.0 - 1.0).abs() < 0.2, "se ratio {ratio}");
}

#[test]
fn sampled_power_has_mean_omega() {
    let f = RicianFading::new(31.6, 1.7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 100_000;
    let xs: Vec<f64> = (0..n).map(|_| f.sample_power(&mut rng)).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((mean - 1.7).abs() <= 3.0 * (var / n as f64).sqrt(), "{mean}");
}

#[test]
fn too_few_trials_is_rejected() {
    assert!(simulate(&contested(), SimPlan::new(9_999, 1)).is_err());
}
