//! The five commands. Each evaluates every grid point and returns a table and
//! a list of structured records; nothing is written here.

use aeris_core::mode_select::{selection_probability_irs, selection_report, SelectionReport};
use aeris_core::montecarlo::{simulate_grid, ScenarioEstimate, SimPlan, MIN_TRIALS};
use aeris_core::optimizer::{
    optimize_irs_elements, optimize_irs_height, optimize_uav_height, ElementsReport, HeightReport,
};
use aeris_core::performance::{shannon, ModeMetrics, Performance, Provenance};
use aeris_core::{Link, Mode, Scenario};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::output::{num, opt, Table, VERSION};
use crate::schema::ScenarioFile;
use crate::sweep::{expand, parse_grid_arg, Axis, GridPoint, Level, Variable};

/// Outage and selection checks pass within this many standard errors.
pub const SE_MULTIPLIER: f64 = 3.0;
/// Relative tolerance of the exact ergodic capacity against the oracle.
pub const CAPACITY_REL_TOL: f64 = 0.01;
/// Slack allowed on the Jensen inequality, relative to the capacity.
pub const JENSEN_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Metrics,
    Simulate,
    Optimize,
    Select,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Metrics => "metrics",
            Command::Simulate => "simulate",
            Command::Optimize => "optimize",
            Command::Select => "select",
            Command::Validate => "validate",
        }
    }
}

/// A loaded scenario file with its grid expanded.
#[derive(Debug, Clone)]
pub struct Context {
    pub file: ScenarioFile,
    pub base: Scenario,
    pub axes: Vec<Axis>,
    pub points: Vec<GridPoint>,
    pub trials: u64,
    pub seed: u64,
    pub antithetic: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    /// Replaces the file's sweep when non-empty.
    pub grid: Vec<String>,
}

impl Context {
    pub fn from_text(text: &str, overrides: &Overrides) -> Result<Self, CliError> {
        let file = crate::schema::parse_file(text)?;
        let base = file.scenario()?;
        let axes = if overrides.grid.is_empty() {
            file.sweep.iter().map(|a| a.resolve()).collect::<Result<Vec<_>, _>>()?
        } else {
            overrides
                .grid
                .iter()
                .map(|g| parse_grid_arg(g))
                .collect::<Result<Vec<_>, _>>()?
        };
        let points = expand(&base, &axes)?;
        let trials = overrides.trials.unwrap_or(file.sim.trials);
        if trials < MIN_TRIALS {
            return Err(CliError::Schema(format!(
                "trials must be at least {MIN_TRIALS}, got {trials}"
            )));
        }
        Ok(Self {
            seed: overrides.seed.unwrap_or(file.sim.seed),
            antithetic: file.sim.antithetic,
            trials,
            file,
            base,
            axes,
            points,
        })
    }

    pub fn plan(&self) -> SimPlan {
        SimPlan::new(self.trials, self.seed)
            .with_antithetic(self.antithetic)
            .with_selection(true)
    }

    fn header(&self, tail: &[&str]) -> Vec<String> {
        let mut h = vec!["point".to_string()];
        h.extend(self.axes.iter().map(|a| a.variable.column().to_string()));
        h.extend(tail.iter().map(|s| s.to_string()));
        h.push("provenance".into());
        h.push("version".into());
        h
    }
}

fn row(p: &GridPoint, cells: Vec<String>, provenance: Provenance) -> Vec<String> {
    let mut r = vec![p.index.to_string()];
    r.extend(p.coordinates.iter().map(|(_, l)| l.to_string()));
    r.extend(cells);
    r.push(provenance.label().into());
    r.push(VERSION.into());
    r
}

#[derive(Debug, Clone, Serialize)]
pub struct Coordinate {
    pub variable: Variable,
    pub value: Level,
}

fn coordinates(p: &GridPoint) -> Vec<Coordinate> {
    p.coordinates
        .iter()
        .map(|&(variable, value)| Coordinate { variable, value })
        .collect()
}

/// Evaluates `f` on every point in parallel; the first failure in grid order wins.
fn per_point<T, F>(points: &[GridPoint], f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(&GridPoint) -> Result<T, CliError> + Sync,
{
    let results: Vec<Result<T, CliError>> = points.par_iter().map(&f).collect();
    results.into_iter().collect()
}

/// Runs the oracle over the grid, sharing draws between points with equal fading.
pub fn simulate_points(points: &[GridPoint], plan: SimPlan) -> Result<Vec<ScenarioEstimate>, CliError> {
    let key = |s: &Scenario| -> Result<_, CliError> { Ok((s.fading(Link::Up)?, s.fading(Link::Down)?)) };
    let mut groups: Vec<(_, Vec<usize>)> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let k = key(&p.scenario)?;
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, members)) => members.push(i),
            None => groups.push((k, vec![i])),
        }
    }
    let mut out: Vec<Option<ScenarioEstimate>> = vec![None; points.len()];
    for (_, members) in groups {
        let scenarios: Vec<Scenario> = members.iter().map(|&i| points[i].scenario.clone()).collect();
        for (i, est) in members.into_iter().zip(simulate_grid(&scenarios, plan)?) {
            out[i] = Some(est);
        }
    }
    Ok(out
        .into_iter()
        .map(|e| e.expect("every point belongs to a group"))
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsRecord {
    pub point: usize,
    pub coordinates: Vec<Coordinate>,
    pub clt_valid: bool,
    pub metrics: Vec<ModeMetrics>,
}

pub fn metrics(ctx: &Context) -> Result<(Table, Vec<MetricsRecord>), CliError> {
    let records = per_point(&ctx.points, |p| {
        let perf = Performance::new(&p.scenario)?;
        let mut metrics = Vec::new();
        for prov in [Provenance::ClosedForm, Provenance::Bound] {
            for mode in Mode::ALL {
                metrics.push(perf.metrics(mode, prov)?);
            }
        }
        Ok(MetricsRecord {
            point: p.index,
            coordinates: coordinates(p),
            clt_valid: perf.clt_warning().is_none(),
            metrics,
        })
    })?;
    let mut table = Table::new(ctx.header(&[
        "mode",
        "outage",
        "capacity_bps",
        "power_w",
        "ee_bit_per_joule",
        "clt_valid",
    ]));
    for (p, r) in ctx.points.iter().zip(&records) {
        for m in &r.metrics {
            let outage = (m.provenance == Provenance::ClosedForm).then_some(m.outage);
            table.push(row(
                p,
                vec![
                    m.mode.label().into(),
                    opt(outage),
                    num(m.capacity),
                    num(m.power),
                    num(m.ee),
                    (m.mode == Mode::Uav || r.clt_valid).to_string(),
                ],
                m.provenance,
            ));
        }
    }
    Ok((table, records))
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateRecord {
    pub point: usize,
    pub coordinates: Vec<Coordinate>,
    pub estimate: ScenarioEstimate,
}

pub fn simulate(ctx: &Context) -> Result<(Table, Vec<SimulateRecord>), CliError> {
    let estimates = simulate_points(&ctx.points, ctx.plan())?;
    let mut table = Table::new(ctx.header(&[
        "mode",
        "trials",
        "seed",
        "outage",
        "outage_se",
        "outage_ci_low",
        "outage_ci_high",
        "capacity_bps",
        "capacity_se",
        "capacity_ci_low",
        "capacity_ci_high",
        "mean_snr",
        "mean_snr_se",
    ]));
    let mut records = Vec::new();
    for (p, est) in ctx.points.iter().zip(estimates) {
        for m in &est.modes {
            let (o, c) = (m.outage, m.capacity);
            table.push(row(
                p,
                vec![
                    m.mode.label().into(),
                    est.trials.to_string(),
                    est.seed.to_string(),
                    num(o.mean),
                    num(o.se),
                    num((o.mean - o.ci_half_width()).max(0.0)),
                    num((o.mean + o.ci_half_width()).min(1.0)),
                    num(c.mean),
                    num(c.se),
                    num(c.mean - c.ci_half_width()),
                    num(c.mean + c.ci_half_width()),
                    num(m.mean_snr.mean),
                    num(m.mean_snr.se),
                ],
                Provenance::Simulated,
            ));
        }
        records.push(SimulateRecord {
            point: p.index,
            coordinates: coordinates(p),
            estimate: est,
        });
    }
    Ok((table, records))
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeRecord {
    pub point: usize,
    pub coordinates: Vec<Coordinate>,
    pub elements: ElementsReport,
    pub irs_height: HeightReport,
    pub uav_height: HeightReport,
}

pub fn optimize(ctx: &Context) -> Result<(Table, Vec<OptimizeRecord>), CliError> {
    let records = per_point(&ctx.points, |p| {
        Ok(OptimizeRecord {
            point: p.index,
            coordinates: coordinates(p),
            elements: optimize_irs_elements(&p.scenario)?,
            irs_height: optimize_irs_height(&p.scenario)?,
            uav_height: optimize_uav_height(&p.scenario)?,
        })
    })?;
    let mut table = Table::new(ctx.header(&[
        "problem",
        "x_star",
        "objective",
        "ee_bit_per_joule",
        "iterations",
        "converged",
        "fallback",
        "reference_x",
        "exact_reference_x",
        "gap",
        "guards_satisfied",
    ]));
    for (p, r) in ctx.points.iter().zip(&records) {
        let e = &r.elements;
        table.push(row(
            p,
            vec![
                "elements".into(),
                e.n_star.to_string(),
                num(e.qt.objective),
                num(e.ee),
                e.qt.iterations.to_string(),
                e.qt.converged.to_string(),
                e.qt.fallback.to_string(),
                e.n_exhaustive.to_string(),
                e.n_exhaustive.to_string(),
                e.gap.to_string(),
                e.qt.guard.violations.is_empty().to_string(),
            ],
            Provenance::Bound,
        ));
        for (name, h) in [("irs_height", &r.irs_height), ("uav_height", &r.uav_height)] {
            table.push(row(
                p,
                vec![
                    name.into(),
                    num(h.h_star),
                    num(h.qt.objective),
                    num(h.ee),
                    h.qt.iterations.to_string(),
                    h.qt.converged.to_string(),
                    h.qt.fallback.to_string(),
                    num(h.approx.h),
                    num(h.exact.h),
                    num(h.relative_gap_exact),
                    h.guards.iter().all(|g| g.satisfied).to_string(),
                ],
                Provenance::Bound,
            ));
        }
    }
    Ok((table, records))
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectRecord {
    pub point: usize,
    pub coordinates: Vec<Coordinate>,
    pub report: SelectionReport,
}

pub fn select(ctx: &Context) -> Result<(Table, Vec<SelectRecord>), CliError> {
    let records = per_point(&ctx.points, |p| {
        Ok(SelectRecord {
            point: p.index,
            coordinates: coordinates(p),
            report: selection_report(&p.scenario, true)?,
        })
    })?;
    let mut table = Table::new(ctx.header(&[
        "elements",
        "p_irs",
        "p_uav",
        "power_ratio",
        "n_threshold",
        "threshold_inverted",
        "threshold_choice",
        "by_power",
        "by_snr",
        "height_winner",
        "h_irs_m",
        "ee_irs",
        "h_uav_m",
        "ee_uav",
    ]));
    for (p, r) in ctx.points.iter().zip(&records) {
        let s = &r.report;
        let h = s.heights.as_ref();
        table.push(row(
            p,
            vec![
                s.elements.to_string(),
                opt(s.probability.map(|x| x.p_irs)),
                opt(s.probability.map(|x| x.p_uav)),
                opt(s.probability.map(|x| x.power_ratio)),
                num(s.threshold.n_th),
                s.threshold.inverted.to_string(),
                s.chosen.label().into(),
                s.by_power.label().into(),
                s.by_snr.label().into(),
                h.map(|h| h.winner.label().to_string()).unwrap_or_default(),
                opt(h.map(|h| h.h_irs)),
                opt(h.map(|h| h.ee_irs)),
                opt(h.map(|h| h.h_uav)),
                opt(h.map(|h| h.ee_uav)),
            ],
            Provenance::ClosedForm,
        ));
    }
    Ok((table, records))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Outage,
    Capacity,
    Jensen,
    Selection,
}

impl CheckKind {
    pub fn label(self) -> &'static str {
        match self {
            CheckKind::Outage => "outage",
            CheckKind::Capacity => "capacity",
            CheckKind::Jensen => "jensen",
            CheckKind::Selection => "selection",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub kind: CheckKind,
    pub mode: Option<Mode>,
    /// Provenance of `analytic`.
    pub provenance: Provenance,
    pub analytic: f64,
    pub simulated: f64,
    /// Standard error used for the comparison, if the check is statistical.
    pub se: Option<f64>,
    /// Largest admissible `|analytic − simulated|`, or the admissible shortfall
    /// of the bound for the Jensen check.
    pub tolerance: f64,
    /// `analytic − simulated`.
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateRecord {
    pub point: usize,
    pub coordinates: Vec<Coordinate>,
    pub checks: Vec<Check>,
}

/// Standard error of a probability estimate, never below the binomial SE at
/// the analytic value so that saturated estimates are not compared against
/// zero spread.
pub fn effective_se(estimate_se: f64, analytic: f64, units: u64) -> f64 {
    let p = analytic.clamp(0.0, 1.0);
    estimate_se.max((p * (1.0 - p) / units as f64).sqrt())
}

fn probability_check(
    kind: CheckKind,
    mode: Option<Mode>,
    analytic: f64,
    est: aeris_core::montecarlo::Estimate,
) -> Check {
    let se = effective_se(est.se, analytic, est.units);
    let tolerance = SE_MULTIPLIER * se;
    let deviation = analytic - est.mean;
    Check {
        kind,
        mode,
        provenance: Provenance::ClosedForm,
        analytic,
        simulated: est.mean,
        se: Some(se),
        tolerance,
        deviation,
        pass: deviation.abs() <= tolerance,
    }
}

/// Closed forms against the oracle at one point.
pub fn checks(scenario: &Scenario, est: &ScenarioEstimate) -> Result<Vec<Check>, CliError> {
    let perf = Performance::new(scenario)?;
    let clt_valid = perf.clt_warning().is_none();
    let bandwidth = scenario.radio.bandwidth;
    let mut out = Vec::new();
    for mode in Mode::ALL {
        let Some(m) = est.get(mode) else { continue };
        if mode != Mode::Irs || clt_valid {
            out.push(probability_check(
                CheckKind::Outage,
                Some(mode),
                perf.outage(mode)?,
                m.outage,
            ));
        }
        if mode == Mode::Uav {
            let exact = perf.ergodic_capacity(mode)?;
            let tolerance = CAPACITY_REL_TOL * m.capacity.mean.abs();
            let deviation = exact - m.capacity.mean;
            out.push(Check {
                kind: CheckKind::Capacity,
                mode: Some(mode),
                provenance: Provenance::ClosedForm,
                analytic: exact,
                simulated: m.capacity.mean,
                se: Some(m.capacity.se),
                tolerance,
                deviation,
                pass: deviation.abs() <= tolerance,
            });
        }
        let bound = shannon(bandwidth, m.mean_snr.mean);
        let tolerance = JENSEN_REL_TOL * m.capacity.mean.abs();
        let deviation = bound - m.capacity.mean;
        out.push(Check {
            kind: CheckKind::Jensen,
            mode: Some(mode),
            provenance: Provenance::Bound,
            analytic: bound,
            simulated: m.capacity.mean,
            se: None,
            tolerance,
            deviation,
            pass: deviation >= -tolerance,
        });
    }
    if let (true, Some(sel)) = (clt_valid, est.irs_selection) {
        let p = selection_probability_irs(scenario)?;
        out.push(probability_check(CheckKind::Selection, None, p.p_irs, sel));
    }
    Ok(out)
}

pub fn validate(ctx: &Context) -> Result<(Table, Vec<ValidateRecord>), CliError> {
    let estimates = simulate_points(&ctx.points, ctx.plan())?;
    let pairs: Vec<(&GridPoint, &ScenarioEstimate)> = ctx.points.iter().zip(&estimates).collect();
    let results: Vec<Result<ValidateRecord, CliError>> = pairs
        .par_iter()
        .map(|(p, est)| {
            Ok(ValidateRecord {
                point: p.index,
                coordinates: coordinates(p),
                checks: checks(&p.scenario, est)?,
            })
        })
        .collect();
    let records = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(ctx.header(&[
        "check",
        "mode",
        "analytic",
        "simulated",
        "se",
        "tolerance",
        "deviation",
        "pass",
    ]));
    for (p, r) in ctx.points.iter().zip(&records) {
        for c in &r.checks {
            table.push(row(
                p,
                vec![
                    c.kind.label().into(),
                    c.mode.map(|m| m.label().to_string()).unwrap_or_default(),
                    num(c.analytic),
                    num(c.simulated),
                    opt(c.se),
                    num(c.tolerance),
                    num(c.deviation),
                    c.pass.to_string(),
                ],
                c.provenance,
            ));
        }
    }
    Ok((table, records))
}
