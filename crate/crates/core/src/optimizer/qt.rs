//! Quadratic-transform solver for scalar fractional programs.
//!
//! Every problem is brought to the form "maximize `agg_i Õ_i(x)/R_i(x)`"
//! with `Õ_i ≥ 0`, `R_i > 0` and `agg` a sum or a minimum. Each iteration
//! fixes `y_i = √Õ_i/R_i` and maximizes the surrogate
//! `agg_i (2 y_i √Õ_i − y_i² R_i)`, which touches the ratio objective at the
//! current point and lies below it elsewhere, so the ratio objective never
//! gets worse.

use serde::{Deserialize, Serialize};

use super::golden;
use crate::error::{Error, Result};

pub const DEFAULT_EPS: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 100;
pub const GUARD_POINTS: usize = 64;
/// Golden-section tolerance relative to the interval width.
pub const INNER_REL_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QtKind {
    SingleRatioMax,
    SumRatioMin,
    MaxMinRatio,
}

pub type ScalarFn<'a> = Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>;

pub struct QtProblem<'a> {
    pub kind: QtKind,
    pub numerators: Vec<ScalarFn<'a>>,
    pub denominators: Vec<ScalarFn<'a>>,
    pub lo: f64,
    pub hi: f64,
    pub x0: f64,
    pub eps: f64,
    pub max_iter: usize,
}

impl<'a> QtProblem<'a> {
    pub fn new(kind: QtKind, lo: f64, hi: f64) -> Self {
        Self {
            kind,
            numerators: Vec::new(),
            denominators: Vec::new(),
            lo,
            hi,
            x0: 0.5 * (lo + hi),
            eps: DEFAULT_EPS,
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    pub fn ratio(
        mut self,
        o: impl Fn(f64) -> f64 + Send + Sync + 'a,
        r: impl Fn(f64) -> f64 + Send + Sync + 'a,
    ) -> Self {
        self.numerators.push(Box::new(o));
        self.denominators.push(Box::new(r));
        self
    }

    pub fn start(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    /// The objective in the problem's own terms.
    pub fn objective(&self, x: f64) -> f64 {
        let ratios = self.numerators.iter().zip(&self.denominators).map(|(o, r)| o(x) / r(x));
        match self.kind {
            QtKind::SingleRatioMax | QtKind::SumRatioMin => ratios.sum(),
            QtKind::MaxMinRatio => ratios.fold(f64::INFINITY, f64::min),
        }
    }

    fn guard_grid(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.hi - self.lo) / (GUARD_POINTS - 1) as f64;
        (0..GUARD_POINTS).map(move |i| self.lo + step * i as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardReport {
    pub denominators_positive: bool,
    pub numerators_non_negative: bool,
    /// Per-ratio shift `M_i` applied to bring numerators to `Õ_i ≥ 0`.
    pub shifts: Vec<f64>,
    /// Guard-grid points where a transformed numerator was negative.
    pub violations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptReport {
    pub kind: QtKind,
    pub x: f64,
    /// Objective of the original problem at `x`.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// The QT run was replaced by a guard-grid search.
    pub fallback: bool,
    pub x_trajectory: Vec<f64>,
    pub objective_trajectory: Vec<f64>,
    pub y_trajectory: Vec<Vec<f64>>,
    pub guard: GuardReport,
}

/// Sign-adjusted ratio terms shared by all kinds.
struct Transformed<'p, 'a> {
    problem: &'p QtProblem<'a>,
    negate: bool,
    shifts: Vec<f64>,
}

impl Transformed<'_, '_> {
    fn numerator(&self, i: usize, x: f64) -> f64 {
        let o = (self.problem.numerators[i])(x);
        let r = (self.problem.denominators[i])(x);
        let o = if self.negate { -o } else { o };
        o + self.shifts[i] * r
    }

    fn denominator(&self, i: usize, x: f64) -> f64 {
        (self.problem.denominators[i])(x)
    }

    fn terms(&self) -> usize {
        self.problem.numerators.len()
    }

    fn aggregate(&self, vals: impl Iterator<Item = f64>) -> f64 {
        match self.problem.kind {
            QtKind::MaxMinRatio => vals.fold(f64::INFINITY, f64::min),
            _ => vals.sum(),
        }
    }

    fn y(&self, x: f64) -> Vec<f64> {
        (0..self.terms())
            .map(|i| self.numerator(i, x).max(0.0).sqrt() / self.denominator(i, x))
            .collect()
    }

    fn surrogate(&self, y: &[f64], x: f64) -> f64 {
        self.aggregate((0..self.terms()).map(|i| {
            let r = self.denominator(i, x);
            2.0 * y[i] * self.numerator(i, x).max(0.0).sqrt() - y[i] * y[i] * r
        }))
    }
}

/// Runs the alternating y / x updates.
pub fn solve(problem: &QtProblem<'_>) -> Result<OptReport> {
    if problem.numerators.is_empty() || problem.numerators.len() != problem.denominators.len() {
        return Err(Error::invalid("problem", "needs matching numerator/denominator lists"));
    }
    if problem.kind == QtKind::SingleRatioMax && problem.numerators.len() != 1 {
        return Err(Error::invalid("problem", "single-ratio problem with several ratios"));
    }
    if !(problem.hi >= problem.lo) {
        return Err(Error::invalid("interval", format!("[{}, {}]", problem.lo, problem.hi)));
    }
    let n = problem.numerators.len();
    let mut denominators_positive = true;
    let mut numerators_non_negative = true;
    let mut shifts = vec![0.0; n];
    let mut max_ratio = vec![f64::NEG_INFINITY; n];
    let mut min_ratio = f64::INFINITY;
    for x in problem.guard_grid() {
        for i in 0..n {
            let r = (problem.denominators[i])(x);
            let o = (problem.numerators[i])(x);
            if !(r > 0.0) || !r.is_finite() {
                denominators_positive = false;
            }
            if o < 0.0 {
                numerators_non_negative = false;
            }
            max_ratio[i] = max_ratio[i].max(o / r);
            min_ratio = min_ratio.min(o / r);
        }
    }
    if !denominators_positive {
        return Err(Error::Guard("denominator is not positive on the guard grid".into()));
    }
    let negate = problem.kind == QtKind::SumRatioMin;
    match problem.kind {
        QtKind::SingleRatioMax => {
            if !numerators_non_negative {
                return Err(Error::Guard("numerator is negative on the guard grid".into()));
            }
        }
        QtKind::SumRatioMin => {
            // max Σ (M_i R_i − O_i)/R_i with M_i above every sampled ratio.
            for i in 0..n {
                let m = max_ratio[i];
                shifts[i] = m + 1e-3 * m.abs().max(1e-12);
            }
        }
        QtKind::MaxMinRatio => {
            if min_ratio < 0.0 {
                let m = -min_ratio;
                shifts.fill(m + 1e-3 * m.max(1e-12));
            }
        }
    }
    let t = Transformed {
        problem,
        negate,
        shifts: shifts.clone(),
    };
    let mut violations = Vec::new();
    for x in problem.guard_grid() {
        if (0..n).any(|i| t.numerator(i, x) < 0.0) {
            violations.push(x);
        }
    }
    let guard = GuardReport {
        denominators_positive,
        numerators_non_negative,
        shifts,
        violations,
    };
    if !guard.violations.is_empty() {
        let mut report = fallback(problem);
        report.guard = guard;
        return Ok(report);
    }

    let mut x = problem.x0.clamp(problem.lo, problem.hi);
    let mut y = t.y(x);
    let scale: Vec<f64> = y.iter().map(|v| v.abs().max(f64::MIN_POSITIVE)).collect();
    let mut report = OptReport {
        kind: problem.kind,
        x,
        objective: problem.objective(x),
        iterations: 0,
        converged: false,
        fallback: false,
        x_trajectory: vec![x],
        objective_trajectory: vec![problem.objective(x)],
        y_trajectory: vec![y.clone()],
        guard,
    };
    for _ in 0..problem.max_iter {
        let current = t.surrogate(&y, x);
        let (cand, value) = golden::maximize(|h| t.surrogate(&y, h), problem.lo, problem.hi, INNER_REL_TOL);
        if value > current {
            x = cand;
        }
        let y_new = t.y(x);
        let change = y_new
            .iter()
            .zip(&y)
            .zip(&scale)
            .map(|((a, b), s)| (a - b).abs() / s)
            .fold(0.0, f64::max);
        y = y_new;
        report.iterations += 1;
        report.x_trajectory.push(x);
        report.objective_trajectory.push(problem.objective(x));
        report.y_trajectory.push(y.clone());
        if change < problem.eps {
            report.converged = true;
            break;
        }
    }
    report.x = x;
    report.objective = problem.objective(x);
    Ok(report)
}

fn fallback(problem: &QtProblem<'_>) -> OptReport {
    let sign = if problem.kind == QtKind::SumRatioMin { -1.0 } else { 1.0 };
    let (x, _) = golden::maximize(|h| sign * problem.objective(h), problem.lo, problem.hi, INNER_REL_TOL);
    OptReport {
        kind: problem.kind,
        x,
        objective: problem.objective(x),
        iterations: 0,
        converged: false,
        fallback: true,
        x_trajectory: vec![x],
        objective_trajectory: vec![problem.objective(x)],
        y_trajectory: Vec::new(),
        guard: GuardReport {
            denominators_positive: true,
            numerators_non_negative: true,
            shifts: Vec::new(),
            violations: Vec::new(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_ratio() {
        let p = QtProblem::new(QtKind::SingleRatioMax, 0.0, 2.0).ratio(|x| x, |x| 1.0 + x * x);
        let r = solve(&p).unwrap();
        assert!(r.converged);
        assert!((r.x - 1.0).abs() < 1e-3, "{}", r.x);
        assert!((r.objective - 0.5).abs() < 1e-6);
    }

    #[test]
    fn sum_of_ratios_min() {
        // (x−1)² + 1 over 1, plus (x+2) over (x+3): minimum near x = 0.93.
        let p = QtProblem::new(QtKind::SumRatioMin, 0.0, 3.0)
            .ratio(|x| (x - 1.0) * (x - 1.0) + 1.0, |_| 1.0)
            .ratio(|x| x + 2.0, |x| x + 3.0);
        let r = solve(&p).unwrap();
        let (xg, _) = golden::grid_maximize(|x| -p.objective(x), 0.0, 3.0, 1e-5);
        assert!((r.x - xg).abs() < 1e-3, "{} vs {}", r.x, xg);
        for w in r.objective_trajectory.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn max_min_equalizes() {
        let p = QtProblem::new(QtKind::MaxMinRatio, 0.0, 1.0)
            .ratio(|x| x - 0.2, |_| 1.0)
            .ratio(|x| 0.8 - x, |_| 1.0);
        let r = solve(&p).unwrap();
        assert!((r.x - 0.5).abs() < 1e-3, "{}", r.x);
    }
}
