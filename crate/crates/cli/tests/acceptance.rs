//! Acceptance suite: one PASS/FAIL line per criterion, then a single
//! assertion over all of them.

use std::path::{Path, PathBuf};
use std::process::Command as Process;
use std::time::{Duration, Instant};

use aeris::commands::{checks, simulate_points, Check, CheckKind, Context, Overrides};
use aeris_core::environment::{LinkEnvironment, LinkParams};
use aeris_core::geometry::Point2;
use aeris_core::mode_select::select_mode_by_optimal_heights;
use aeris_core::montecarlo::{empirical_pdf_of_cascade_power, SimPlan};
use aeris_core::optimizer::concavity::{check_concavity_irs, check_concavity_uav, CONCAVITY_POINTS};
use aeris_core::optimizer::elements::{min_power_elements, min_power_uplink, optimize_irs_elements, ElementBranch};
use aeris_core::optimizer::height::GRID_STEP;
use aeris_core::optimizer::{optimize_irs_height, optimize_uav_height, OptReport, QtKind};
use aeris_core::performance::{Performance, Provenance};
use aeris_core::radio::RadioConfig;
use aeris_core::units::db_to_linear;
use aeris_core::{Link, Mode, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRIALS: u64 = 1_000_000;
const SE_BOUND: f64 = 3.0;
const CLT_SUP_DISTANCE: f64 = 0.02;
const CAPACITY_REL: f64 = 0.01;
const ROUND_TRIP_REL: f64 = 1e-9;
const HEIGHT_REL: f64 = 0.05;
const GUARD_AGREEMENT: f64 = 0.95;

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn context(name: &str, grid: &[&str]) -> Context {
    let text = std::fs::read_to_string(scenario_path(name)).unwrap();
    let overrides = Overrides {
        grid: grid.iter().map(|s| s.to_string()).collect(),
        ..Overrides::default()
    };
    Context::from_text(&text, &overrides).unwrap()
}

struct Verdict {
    id: u32,
    pass: bool,
}

fn report(id: u32, name: &str, start: Instant, pass: bool, detail: String) -> Verdict {
    let secs = start.elapsed().as_secs_f64();
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} {tag}: {name}: {detail} [{secs:.1} s]");
    Verdict { id, pass }
}

fn within(start: Instant, limit: Duration) -> bool {
    start.elapsed() <= limit
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Checks, failures, checks away from 0 and 1, and the worst deviation in SE
/// for the outage checks of one mode.
fn outage_summary(all: &[Vec<Check>], mode: Mode) -> (usize, usize, usize, f64) {
    let mut n = 0;
    let mut bad = 0;
    let mut informative = 0;
    let mut worst: f64 = 0.0;
    for c in all
        .iter()
        .flatten()
        .filter(|c| c.kind == CheckKind::Outage && c.mode == Some(mode))
    {
        n += 1;
        bad += usize::from(!c.pass);
        if c.analytic > 1e-6 && c.analytic < 1.0 - 1e-6 {
            informative += 1;
        }
        if c.se.unwrap() > 0.0 {
            worst = worst.max(c.deviation.abs() / c.se.unwrap());
        }
    }
    (n, bad, informative, worst)
}

fn monotone(r: &OptReport) -> bool {
    r.objective_trajectory.windows(2).all(|w| match r.kind {
        QtKind::SumRatioMin => w[1] <= w[0] + 1e-12 * w[0].abs(),
        _ => w[1] >= w[0] - 1e-12 * w[0].abs(),
    })
}

fn second_difference(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d = 1e-3 * h;
    (f(h + d) - 2.0 * f(h) + f(h - d)) / (d * d)
}

#[test]
fn acceptance() {
    let mut verdicts = Vec::new();

    // Shared oracle grid: 2 LoS regimes × 5 heights × 5 element counts.
    let grid = context(
        "default.toml",
        &["environment=urban,suburban", "height=100:900:200", "elements=20:400:95"],
    );
    assert_eq!(grid.points.len(), 50);
    let start = Instant::now();
    let plan = SimPlan::new(TRIALS, grid.seed).with_selection(true);
    let estimates = simulate_points(&grid.points, plan).unwrap();
    let all_checks: Vec<Vec<Check>> = grid
        .points
        .iter()
        .zip(&estimates)
        .map(|(p, e)| checks(&p.scenario, e).unwrap())
        .collect();
    let mut pass = within(start, Duration::from_secs(300));
    let mut detail = Vec::new();
    for mode in Mode::ALL {
        let (n, bad, informative, worst) = outage_summary(&all_checks, mode);
        pass &= bad == 0 && n == 50;
        detail.push(format!(
            "{} {}/{n} within {SE_BOUND} SE ({informative} strictly inside (0, 1), worst {worst:.1} SE)",
            mode.label(),
            n - bad
        ));
    }
    verdicts.push(report(1, "outage vs oracle", start, pass, detail.join(", ")));

    let start = Instant::now();
    let base = &grid.base;
    let h20 = empirical_pdf_of_cascade_power(base, SimPlan::new(TRIALS, grid.seed), 20).unwrap();
    let h2 = empirical_pdf_of_cascade_power(base, SimPlan::new(TRIALS, grid.seed), 2).unwrap();
    let (d20, d2) = (h20.sup_mass_distance, h2.sup_mass_distance);
    verdicts.push(report(
        2,
        "CLT convergence",
        start,
        d20 <= CLT_SUP_DISTANCE && d2 > d20,
        format!("sup distance {d20:.4} at N = 20, {d2:.4} at N = 2"),
    ));

    // Five heights in the urban regime at N = 20.
    let start = Instant::now();
    let cap: Vec<&Check> = all_checks[..25]
        .iter()
        .step_by(5)
        .flatten()
        .filter(|c| c.kind == CheckKind::Capacity)
        .collect();
    let worst = cap
        .iter()
        .map(|c| (c.deviation / c.simulated).abs())
        .fold(0.0, f64::max);
    verdicts.push(report(
        3,
        "capacity duality",
        start,
        cap.len() == 5 && worst <= CAPACITY_REL,
        format!("{} points, worst relative gap {worst:.2e}", cap.len()),
    ));

    let start = Instant::now();
    let jensen: Vec<&Check> = all_checks
        .iter()
        .flatten()
        .filter(|c| c.kind == CheckKind::Jensen)
        .collect();
    let bad = jensen.iter().filter(|c| !c.pass).count();
    let tightest = jensen
        .iter()
        .map(|c| c.deviation / c.simulated)
        .fold(f64::INFINITY, f64::min);
    verdicts.push(report(
        4,
        "Jensen bound direction",
        start,
        jensen.len() == 150 && bad == 0,
        format!(
            "{} checks, {bad} violations, smallest relative margin {tightest:.3e}",
            jensen.len()
        ),
    ));

    let start = Instant::now();
    let sweep = context("element-sweep.toml", &[]);
    let mut pass = true;
    let mut series: Vec<(String, Vec<u32>)> = Vec::new();
    let mut worst_gap = 0;
    for p in &sweep.points {
        let r = optimize_irs_elements(&p.scenario).unwrap();
        worst_gap = worst_gap.max(r.gap);
        pass &= r.gap <= 1;
        let key = p.coordinates[0].1.to_string();
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r.n_star),
            None => series.push((key, vec![r.n_star])),
        }
    }
    let mut detail = vec![format!("{} points, largest gap {worst_gap}", sweep.points.len())];
    for (k, v) in &series {
        let rising = v.windows(2).all(|w| w[1] >= w[0]);
        pass &= rising;
        detail.push(format!(
            "P_r {k}: N* {}..{} non-decreasing {rising}",
            v[0],
            v[v.len() - 1]
        ));
    }
    pass &= within(start, Duration::from_secs(60));
    verdicts.push(report(5, "element count vs exhaustive", start, pass, detail.join(", ")));

    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut bracketed, mut worst_trip) = (0, 0.0f64);
    for _ in 0..20 {
        let fit = if rng.random_bool(0.5) {
            LinkParams::URBAN
        } else {
            LinkParams::SUBURBAN
        };
        let k = db_to_linear(rng.random_range(0.0..15.0));
        let s = point(
            base,
            rng.random_range(50.0..1000.0),
            rng.random_range(100.0..1900.0),
            fit,
            k,
        );
        let s = s.with_elements(rng.random_range(20..=400));
        let c = |n: u32| Performance::new(&s.with_elements(n)).unwrap().capacity_bound(Mode::Irs);
        let (lo, hi) = (c(s.irs.n_min), c(s.irs.n_max));
        let rate = lo + rng.random_range(0.0..1.0) * (hi - lo);
        let r = min_power_elements(&s, rate).unwrap();
        if c(r.n_star) >= rate && (r.branch != ElementBranch::Interior || c(r.n_star - 1) < rate) {
            bracketed += 1;
        }
        let p = min_power_uplink(&s, rate).unwrap();
        let t = s.with_radio(RadioConfig { p_u: p, ..s.radio });
        worst_trip = worst_trip.max(rel(Performance::new(&t).unwrap().capacity_bound(Mode::Irs), rate));
    }
    verdicts.push(report(
        6,
        "element and power closed forms",
        start,
        bracketed == 20 && worst_trip <= ROUND_TRIP_REL,
        format!("bracketing {bracketed}/20, worst round trip {worst_trip:.1e}"),
    ));

    let start = Instant::now();
    let irs_case = context("irs-altitude.toml", &[]).base;
    let uav_case = context("uav-altitude.toml", &[]).base;
    let irs = optimize_irs_height(&irs_case).unwrap();
    let irs_time = start.elapsed();
    let uav = optimize_uav_height(&uav_case).unwrap();
    let uav_time = start.elapsed() - irs_time;
    let mut pass = irs_time.as_secs() <= 120 && uav_time.as_secs() <= 120;
    let mut detail = Vec::new();
    for r in [&irs, &uav] {
        pass &= r.relative_gap_exact <= HEIGHT_REL && r.gap_approx <= GRID_STEP;
        detail.push(format!(
            "{} h* {:.1} m, exact grid {:.0} m ({:.1}%), approx grid {:.0} m",
            r.mode.label(),
            r.h_star,
            r.exact.h,
            100.0 * r.relative_gap_exact,
            r.approx.h
        ));
    }
    verdicts.push(report(
        7,
        "height optimizers vs exhaustive",
        start,
        pass,
        detail.join("; "),
    ));

    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for link in Link::BOTH {
        let v = check_concavity_irs(&irs_case, link, CONCAVITY_POINTS);
        let (c, z) = (*irs_case.environment.coefficients(link), v.offset);
        let o = |h: f64| 0.5 * (h * h + z * z).ln() * c.numerator(h, z);
        let agree = v
            .points
            .iter()
            .filter(|p| p.holds == (second_difference(o, p.h) >= 0.0))
            .count();
        let frac = agree as f64 / v.points.len() as f64;
        pass &= frac >= GUARD_AGREEMENT;
        detail.push(format!("irs {} {agree}/{}", link.label(), v.points.len()));
    }
    for link in Link::BOTH {
        let v = check_concavity_uav(&uav_case, link, CONCAVITY_POINTS);
        let (c, z) = (*uav_case.environment.coefficients(link), v.offset);
        let li = uav_case.link_intensity(link).ln();
        let o = |h: f64| 2.0 * li * c.denominator(h, z) - (h * h + z * z).ln() * c.numerator(h, z);
        let agree = v
            .points
            .iter()
            .filter(|p| p.holds == (second_difference(o, p.h) <= 0.0))
            .count();
        let frac = agree as f64 / v.points.len() as f64;
        pass &= frac >= GUARD_AGREEMENT;
        detail.push(format!("uav {} {agree}/{}", link.label(), v.points.len()));
    }
    verdicts.push(report(
        8,
        "concavity guards vs finite differences",
        start,
        pass,
        detail.join(", "),
    ));

    // Urban regime at h = 300 m over the five element counts.
    let start = Instant::now();
    let sel: Vec<&Check> = all_checks[5..10]
        .iter()
        .flatten()
        .filter(|c| c.kind == CheckKind::Selection)
        .collect();
    let sel_bad = sel.iter().filter(|c| !c.pass).count();
    let crossing = context("mode-crossover.toml", &[]);
    let winners: Vec<Mode> = crossing
        .points
        .iter()
        .map(|p| select_mode_by_optimal_heights(&p.scenario).unwrap().winner)
        .collect();
    let switches = winners.windows(2).filter(|w| w[0] != w[1]).count();
    let crossover = winners
        .iter()
        .position(|&m| m == Mode::Irs)
        .map(|i| crossing.points[i].coordinates[0].1.to_string());
    let shape = winners[0] == Mode::Uav && winners[winners.len() - 1] == Mode::Irs && switches == 1;
    verdicts.push(report(
        9,
        "mode selection",
        start,
        sel.len() == 5 && sel_bad == 0 && shape,
        format!(
            "P_IRS {}/{} within {SE_BOUND} SE; sweep winners switch {switches} time(s), IRS from {}",
            sel.len() - sel_bad,
            sel.len(),
            crossover.unwrap_or_else(|| "never".into())
        ),
    ));

    let start = Instant::now();
    let mut violations = 0;
    for p in &grid.points {
        let s = &p.scenario;
        let perf = Performance::new(s).unwrap();
        let o = |m| perf.outage(m).unwrap();
        violations += usize::from((o(Mode::Integrated) - o(Mode::Uav) * o(Mode::Irs)).abs() > 1e-15);
        let ee = |m| perf.metrics(m, Provenance::Bound).unwrap().ee;
        violations += usize::from(ee(Mode::Integrated) > ee(Mode::Uav).max(ee(Mode::Irs)) * (1.0 + 1e-12));
        let same_n = base.with_elements(s.irs.elements);
        let reference = Performance::new(&same_n).unwrap();
        for m in Mode::ALL {
            violations += usize::from(perf.power(m).unwrap() != reference.power(m).unwrap());
        }
        let extra = perf.power(Mode::Integrated).unwrap() - perf.power(Mode::Uav).unwrap();
        let want = f64::from(s.irs.elements) * s.irs.element_power;
        violations += usize::from((extra - want).abs() > 1e-9 * want);
    }
    let mut reports = vec![irs.qt.clone(), uav.qt.clone()];
    for p in grid.points.iter().step_by(5) {
        reports.push(optimize_irs_elements(&p.scenario).unwrap().qt);
        reports.push(optimize_irs_height(&p.scenario).unwrap().qt);
        reports.push(optimize_uav_height(&p.scenario).unwrap().qt);
    }
    let qt_bad = reports.iter().filter(|r| !monotone(r)).count();
    verdicts.push(report(
        10,
        "structural invariants",
        start,
        violations + qt_bad == 0,
        format!(
            "{violations} identity violations over {} points, {qt_bad}/{} non-monotone solver runs",
            grid.points.len(),
            reports.len()
        ),
    ));

    let start = Instant::now();
    let runs: Vec<(tempfile::TempDir, i32)> = (0..2)
        .map(|_| {
            let out = tempfile::tempdir().unwrap();
            let status = Process::new(env!("CARGO_BIN_EXE_aeris"))
                .arg("validate")
                .arg("--scenario")
                .arg(scenario_path("default.toml"))
                .arg("--out")
                .arg(out.path())
                .status()
                .unwrap();
            (out, status.code().unwrap())
        })
        .collect();
    let same = ["validate.csv", "validate.json"].iter().all(|f| {
        let read = |d: &tempfile::TempDir| std::fs::read(d.path().join(f)).unwrap();
        read(&runs[0].0) == read(&runs[1].0)
    });
    verdicts.push(report(
        11,
        "deterministic validate",
        start,
        same,
        format!("byte-identical {same}, exit codes {} and {}", runs[0].1, runs[1].1),
    ));

    let failed: Vec<u32> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}

/// `base` moved to `(x, h)` with the given LoS fit and Rician factor on both links.
fn point(base: &Scenario, h: f64, x: f64, fit: (f64, f64), k: f64) -> Scenario {
    let env = &base.environment;
    let adjust = |link| LinkParams {
        e: fit.0,
        g: fit.1,
        k_factor: k,
        ..*env.params(link)
    };
    let environment = LinkEnvironment::new(adjust(Link::Up), adjust(Link::Down), env.angle_unit()).unwrap();
    base.with_height(h)
        .unwrap()
        .with_uav(Point2::new(x, 0.0))
        .with_environment(environment)
}
