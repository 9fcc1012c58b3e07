//! Quadratic-transform solvers against grid search and finite differences.

mod common;

use aeris_core::environment::AlphaCoefficients;
use aeris_core::geometry::Point2;
use aeris_core::optimizer::concavity::irs_bracket;
use aeris_core::optimizer::elements::exhaustive_elements;
use aeris_core::optimizer::golden::grid_maximize;
use aeris_core::optimizer::{
    optimize_irs_elements, optimize_irs_height, optimize_uav_height, solve, QtKind, QtProblem,
};
use aeris_core::Link;

#[test]
fn single_ratio_matches_grid() {
    let p = QtProblem::new(QtKind::SingleRatioMax, 0.0, 100.0).ratio(|x| (1.0 + 3.0 * x).ln(), |x| 2.0 + 0.1 * x);
    let r = solve(&p).unwrap();
    let (x, _) = grid_maximize(|x| p.objective(x), 0.0, 100.0, 1e-3);
    assert!(r.converged && !r.fallback);
    assert!((r.x - x).abs() < 1e-2, "{} vs {x}", r.x);
    let y = r.y_trajectory.last().unwrap()[0];
    let want = (1.0 + 3.0 * r.x).ln().sqrt() / (2.0 + 0.1 * r.x);
    assert!((y - want).abs() < 1e-5 * want);
}

#[test]
fn sum_of_ratios_minimum_matches_grid() {
    let p = QtProblem::new(QtKind::SumRatioMin, 1.0, 10.0)
        .ratio(|x| x * x, |x| 1.0 + x)
        .ratio(|x| 20.0 / x, |_| 1.0);
    let r = solve(&p).unwrap();
    let (x, _) = grid_maximize(|x| -p.objective(x), 1.0, 10.0, 1e-4);
    assert!((r.x - x).abs() < 1e-2, "{} vs {x}", r.x);
    for w in r.objective_trajectory.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12));
    }
}

#[test]
fn max_min_equalizes_crossing_ratios() {
    let p = QtProblem::new(QtKind::MaxMinRatio, 0.0, 10.0)
        .ratio(|x| 1.0 + x, |_| 1.0)
        .ratio(|x| 12.0 - x, |_| 1.0);
    let r = solve(&p).unwrap();
    assert!((r.x - 5.5).abs() < 1e-2, "{}", r.x);
}

#[test]
fn element_count_matches_exhaustive_search() {
    let base = common::default_scenario();
    for x in [500.0, 1000.0, 1500.0, 1900.0] {
        for pr in [0.108, 1.08] {
            let s = base.with_uav(Point2::new(x, 0.0)).with_element_power(pr);
            let r = optimize_irs_elements(&s).unwrap();
            let (n, _) = exhaustive_elements(&s).unwrap();
            assert!(r.n_star.abs_diff(n) <= 1, "x={x} pr={pr}: {} vs {n}", r.n_star);
        }
    }
}

#[test]
fn height_optimizers_land_on_their_approximate_grid_optimum() {
    let s = common::default_scenario();
    for r in [optimize_irs_height(&s).unwrap(), optimize_uav_height(&s).unwrap()] {
        assert!(
            r.gap_approx <= 1.0 + 1e-9,
            "{:?}: {} vs {}",
            r.mode,
            r.h_star,
            r.approx.h
        );
        assert!(r.h_star >= s.geometry.h_min() && r.h_star <= s.geometry.h_max());
    }
}

#[test]
fn irs_bracket_sign_matches_finite_differences() {
    let s = common::default_scenario();
    let mut agree = 0;
    let mut total = 0;
    for link in Link::BOTH {
        let c: AlphaCoefficients = *s.environment.coefficients(link);
        for z in [50.0, 300.0, 950.0, 1500.0] {
            let o = |h: f64| 0.5 * (h * h + z * z).ln() * c.numerator(h, z);
            for i in 0..50 {
                let h = 50.0 + 950.0 * i as f64 / 49.0;
                let d = 1e-3 * h;
                let second = (o(h + d) - 2.0 * o(h) + o(h - d)) / (d * d);
                let scale = (o(h) / (h * h)).abs();
                if second.abs() < 1e-6 * scale {
                    continue;
                }
                total += 1;
                if (second >= 0.0) == (irs_bracket(&c, h, z) >= 0.0) {
                    agree += 1;
                }
            }
        }
    }
    assert!(total > 300);
    assert_eq!(agree, total);
}
