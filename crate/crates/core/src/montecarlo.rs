//! Monte-Carlo oracle for the three relaying modes.
//!
//! Every trial owns a ChaCha8 stream selected by `(seed, trial)`; substreams
//! within a trial are separated by word position. Trials are processed in
//! fixed-size chunks whose partial sums are combined in a fixed pairwise
//! order, so results do not depend on the number of worker threads.
//!
//! Fading does not depend on geometry, so one set of draws can be scored
//! against many scenario points that share the fading parameters
//! ([`simulate_grid`]).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::noncentral_chi2_1_cdf;
use crate::error::{Error, Result};
use crate::fading::RicianFading;
use crate::geometry::Link;
use crate::performance::{Mode, Performance};
use crate::scenario::Scenario;

pub const MIN_TRIALS: u64 = 10_000;
/// Trials (or antithetic pairs) per deterministic work unit.
const CHUNK: u64 = 4096;
const SUBSTREAM_UAV: u64 = 0;
const SUBSTREAM_CASCADE: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeSet {
    pub uav: bool,
    pub irs: bool,
    pub integrated: bool,
}

impl ModeSet {
    pub const ALL: ModeSet = ModeSet {
        uav: true,
        irs: true,
        integrated: true,
    };

    pub fn only(mode: Mode) -> Self {
        let mut s = ModeSet {
            uav: false,
            irs: false,
            integrated: false,
        };
        match mode {
            Mode::Uav => s.uav = true,
            Mode::Irs => s.irs = true,
            Mode::Integrated => s.integrated = true,
        }
        s
    }

    pub fn contains(&self, mode: Mode) -> bool {
        match mode {
            Mode::Uav => self.uav,
            Mode::Irs => self.irs,
            Mode::Integrated => self.integrated,
        }
    }

    pub fn modes(&self) -> Vec<Mode> {
        Mode::ALL.into_iter().filter(|m| self.contains(*m)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimPlan {
    pub trials: u64,
    pub seed: u64,
    pub modes: ModeSet,
    /// Pair each draw with its sign-flipped Gaussian components.
    pub antithetic: bool,
    /// Keep the per-trial SNRs in the result.
    pub retain_samples: bool,
    /// Also estimate `P(Γ_IRS ≥ Γ_UAV · P_IRS/P_UAV)`.
    pub selection: bool,
}

impl SimPlan {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            modes: ModeSet::ALL,
            antithetic: false,
            retain_samples: false,
            selection: false,
        }
    }

    pub fn with_modes(mut self, modes: ModeSet) -> Self {
        self.modes = modes;
        self
    }

    pub fn with_antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    pub fn with_samples(mut self, on: bool) -> Self {
        self.retain_samples = on;
        self
    }

    pub fn with_selection(mut self, on: bool) -> Self {
        self.selection = on;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::invalid(
                "trials",
                format!("{} is below the floor of {MIN_TRIALS}", self.trials),
            ));
        }
        Ok(())
    }

    /// Independent sampling units: trials, or antithetic pairs.
    fn units(&self) -> u64 {
        if self.antithetic {
            self.trials.div_ceil(2)
        } else {
            self.trials
        }
    }

    fn per_unit(&self) -> usize {
        if self.antithetic {
            2
        } else {
            1
        }
    }

    fn needs_cascade(&self) -> bool {
        self.modes.irs || self.modes.integrated || self.selection
    }

    fn needs_uav(&self) -> bool {
        self.modes.uav || self.modes.integrated || self.selection
    }
}

/// Sample mean with its plug-in standard error over independent units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    /// Number of independent units behind the estimate.
    pub units: u64,
}

impl Estimate {
    /// Half width of the 3σ (99.7%) interval.
    pub fn ci_half_width(&self) -> f64 {
        3.0 * self.se
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeEstimate {
    pub mode: Mode,
    pub outage: Estimate,
    /// Mean of `B log₂(1 + Γ)` in bps.
    pub capacity: Estimate,
    pub mean_snr: Estimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEstimate {
    pub trials: u64,
    pub seed: u64,
    pub modes: Vec<ModeEstimate>,
    pub irs_selection: Option<Estimate>,
}

impl ScenarioEstimate {
    pub fn get(&self, mode: Mode) -> Option<&ModeEstimate> {
        self.modes.iter().find(|m| m.mode == mode)
    }
}

/// Scenario quantities the trial loop needs.
#[derive(Debug, Clone, Copy)]
struct PointPlan {
    snr_unit: [f64; 2],
    irs_gain: f64,
    threshold: f64,
    bandwidth: f64,
    /// Index into the sorted list of distinct cascade lengths.
    terms_slot: usize,
    /// `P_IRS/P_UAV`.
    power_ratio: f64,
}

/// Running sums of one quantity.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: f64,
    sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sq += x * x;
    }

    fn merge(&mut self, o: &Moments) {
        self.sum += o.sum;
        self.sq += o.sq;
    }

    fn estimate(&self, n: u64) -> Estimate {
        let nf = n as f64;
        let mean = self.sum / nf;
        let var = ((self.sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        Estimate {
            mean,
            se: (var / nf).sqrt(),
            units: n,
        }
    }
}

/// outage, rate, snr for each of the three modes, then selection.
const SLOTS: usize = 10;

#[derive(Debug, Clone)]
struct ChunkResult {
    acc: Vec<[Moments; SLOTS]>,
    /// Per-trial SNRs of the first point, `[mode][trial]`.
    samples: Option<[Vec<f64>; 3]>,
}

impl ChunkResult {
    fn merge(mut self, o: ChunkResult) -> ChunkResult {
        for (a, b) in self.acc.iter_mut().zip(&o.acc) {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        }
        if let (Some(s), Some(t)) = (self.samples.as_mut(), o.samples) {
            for (x, y) in s.iter_mut().zip(t) {
                x.extend(y);
            }
        }
        self
    }
}

/// Fixed-order pairwise combination of chunk results.
fn tree_reduce(mut parts: Vec<ChunkResult>) -> ChunkResult {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.merge(b)),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop().expect("at least one chunk")
}

/// Draws a per-trial generator positioned at a substream.
fn stream(base: &ChaCha8Rng, unit: u64, substream: u64) -> ChaCha8Rng {
    let mut r = base.clone();
    r.set_stream(unit);
    r.set_word_pos(u128::from(substream) << 40);
    r
}

#[derive(Debug, Clone, Copy)]
struct FadingShape {
    mu: f64,
    s: f64,
}

impl FadingShape {
    fn new(f: &RicianFading) -> Self {
        Self {
            mu: f.los_amplitude(),
            s: f.scatter_variance().sqrt(),
        }
    }

    fn amplitude(&self, re: f64, im: f64) -> f64 {
        let a = self.mu + self.s * re;
        let b = self.s * im;
        (a * a + b * b).sqrt()
    }
}

/// One draw of `Z = Σ_{k=1}^{terms} |h_u,k||h_d,k|`.
pub fn sample_cascade_amplitude<R: Rng + ?Sized>(
    up: &RicianFading,
    down: &RicianFading,
    terms: u32,
    rng: &mut R,
) -> f64 {
    let (u, d) = (FadingShape::new(up), FadingShape::new(down));
    (0..terms)
        .map(|_| {
            let n: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            u.amplitude(n[0], n[1]) * d.amplitude(n[2], n[3])
        })
        .sum()
}

struct Engine {
    base: ChaCha8Rng,
    up: FadingShape,
    down: FadingShape,
    /// Sorted distinct cascade lengths.
    lengths: Vec<usize>,
    points: Vec<PointPlan>,
    plan: SimPlan,
}

impl Engine {
    fn new(scenarios: &[Scenario], plan: SimPlan) -> Result<Self> {
        plan.validate()?;
        let first = scenarios
            .first()
            .ok_or_else(|| Error::invalid("scenarios", "empty grid"))?;
        let fu = first.fading(Link::Up)?;
        let fd = first.fading(Link::Down)?;
        let mut lengths: Vec<usize> = scenarios.iter().map(|s| s.irs.elements as usize + 1).collect();
        lengths.sort_unstable();
        lengths.dedup();
        let mut points = Vec::with_capacity(scenarios.len());
        for s in scenarios {
            if s.fading(Link::Up)? != fu || s.fading(Link::Down)? != fd {
                return Err(Error::invalid("scenarios", "grid points must share fading parameters"));
            }
            let perf = Performance::new(s)?;
            let budget = perf.budget();
            let power_ratio = if plan.selection {
                perf.power(Mode::Irs)? / perf.power(Mode::Uav)?
            } else {
                1.0
            };
            let len = s.irs.elements as usize + 1;
            points.push(PointPlan {
                snr_unit: budget.snr_unit,
                irs_gain: budget.v * budget.cascade_path,
                threshold: s.radio.snr_threshold,
                bandwidth: s.radio.bandwidth,
                terms_slot: lengths.binary_search(&len).expect("length was inserted"),
                power_ratio,
            });
        }
        Ok(Self {
            base: ChaCha8Rng::seed_from_u64(plan.seed),
            up: FadingShape::new(&fu),
            down: FadingShape::new(&fd),
            lengths,
            points,
            plan,
        })
    }

    fn run(&self) -> ChunkResult {
        let units = self.plan.units();
        let chunks = units.div_ceil(CHUNK);
        let parts: Vec<ChunkResult> = (0..chunks)
            .into_par_iter()
            .map(|c| self.chunk(c * CHUNK, ((c + 1) * CHUNK).min(units)))
            .collect();
        tree_reduce(parts)
    }

    fn chunk(&self, start: u64, end: u64) -> ChunkResult {
        let plan = &self.plan;
        let mut acc = vec![[Moments::default(); SLOTS]; self.points.len()];
        let mut samples = plan
            .retain_samples
            .then(|| std::array::from_fn(|_| Vec::with_capacity(((end - start) as usize) * plan.per_unit())));
        let max_len = self.lengths.last().copied().unwrap_or(0);
        let mut normals = vec![0.0f64; 4 * max_len];
        let mut prefix = vec![[0.0f64; 2]; self.lengths.len()];
        let signs: &[f64] = if plan.antithetic { &[1.0, -1.0] } else { &[1.0] };
        let inv = 1.0 / signs.len() as f64;
        let needs_uav = plan.needs_uav();
        let needs_cascade = plan.needs_cascade();

        for unit in start..end {
            let mut x = [[0.0f64; 2]; 2];
            if needs_uav {
                let mut r = stream(&self.base, unit, SUBSTREAM_UAV);
                let n: [f64; 4] = std::array::from_fn(|_| r.sample(StandardNormal));
                for (j, &sg) in signs.iter().enumerate() {
                    let au = self.up.amplitude(sg * n[0], sg * n[1]);
                    let ad = self.down.amplitude(sg * n[2], sg * n[3]);
                    x[j] = [au * au, ad * ad];
                }
            }
            if needs_cascade {
                let mut r = stream(&self.base, unit, SUBSTREAM_CASCADE);
                for v in normals.iter_mut() {
                    *v = r.sample(StandardNormal);
                }
                for (j, &sg) in signs.iter().enumerate() {
                    let mut z = 0.0;
                    let mut slot = 0;
                    for k in 0..max_len {
                        let n = &normals[4 * k..4 * k + 4];
                        z += self.up.amplitude(sg * n[0], sg * n[1]) * self.down.amplitude(sg * n[2], sg * n[3]);
                        if k + 1 == self.lengths[slot] {
                            prefix[slot][j] = z;
                            slot += 1;
                        }
                    }
                }
            }
            for (p, point) in self.points.iter().enumerate() {
                let mut unit_vals = [0.0f64; SLOTS];
                for j in 0..signs.len() {
                    let g_uav = (point.snr_unit[0] * x[j][0]).min(point.snr_unit[1] * x[j][1]);
                    let z = prefix[point.terms_slot][j];
                    let g_irs = point.irs_gain * z * z;
                    let snr = [g_uav, g_irs, g_uav.max(g_irs)];
                    for m in 0..3 {
                        let g = snr[m];
                        unit_vals[3 * m] += if g <= point.threshold { inv } else { 0.0 };
                        unit_vals[3 * m + 1] += inv * point.bandwidth * g.ln_1p() / std::f64::consts::LN_2;
                        unit_vals[3 * m + 2] += inv * g;
                        if p == 0 {
                            if let Some(s) = samples.as_mut() {
                                s[m].push(g);
                            }
                        }
                    }
                    if g_irs >= g_uav * point.power_ratio {
                        unit_vals[9] += inv;
                    }
                }
                for (a, v) in acc[p].iter_mut().zip(unit_vals) {
                    a.push(v);
                }
            }
        }
        ChunkResult { acc, samples }
    }

    fn finish(&self, total: ChunkResult) -> Vec<ScenarioEstimate> {
        let units = self.plan.units();
        let mut samples = total.samples;
        total
            .acc
            .iter()
            .enumerate()
            .map(|(p, a)| {
                let modes = self
                    .plan
                    .modes
                    .modes()
                    .into_iter()
                    .map(|mode| {
                        let m = mode.index();
                        ModeEstimate {
                            mode,
                            outage: a[3 * m].estimate(units),
                            capacity: a[3 * m + 1].estimate(units),
                            mean_snr: a[3 * m + 2].estimate(units),
                            samples: if p == 0 {
                                samples.as_mut().map(|s| std::mem::take(&mut s[m]))
                            } else {
                                None
                            },
                        }
                    })
                    .collect();
                ScenarioEstimate {
                    trials: units * self.plan.per_unit() as u64,
                    seed: self.plan.seed,
                    modes,
                    irs_selection: self.plan.selection.then(|| a[9].estimate(units)),
                }
            })
            .collect()
    }
}

/// Estimates every requested mode at one scenario point.
pub fn simulate(scenario: &Scenario, plan: SimPlan) -> Result<ScenarioEstimate> {
    let engine = Engine::new(std::slice::from_ref(scenario), plan)?;
    let total = engine.run();
    Ok(engine.finish(total).remove(0))
}

pub fn simulate_mode(scenario: &Scenario, plan: SimPlan, mode: Mode) -> Result<ModeEstimate> {
    let est = simulate(scenario, plan.with_modes(ModeSet::only(mode)))?;
    Ok(est.modes.into_iter().next().expect("one mode requested"))
}

/// Scores one set of fading draws against every scenario in `scenarios`.
///
/// All points must share the per-link Rician parameters; they may differ in
/// geometry, environment constants, radio settings and element count.
/// Retained samples, if requested, belong to the first point.
pub fn simulate_grid(scenarios: &[Scenario], plan: SimPlan) -> Result<Vec<ScenarioEstimate>> {
    let engine = Engine::new(scenarios, plan)?;
    let total = engine.run();
    Ok(engine.finish(total))
}

/// Histogram of the standardized cascade power `X = Z²/σ_Z²` against the
/// non-central chi-square law with non-centrality `μ_Z²/σ_Z²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeHistogram {
    pub elements: u32,
    pub edges: Vec<f64>,
    /// Empirical probability per bin.
    pub mass: Vec<f64>,
    /// Probability per bin under the non-central chi-square law.
    pub reference_mass: Vec<f64>,
    pub underflow: f64,
    pub overflow: f64,
    /// `max_i |mass_i − reference_mass_i|`.
    pub sup_mass_distance: f64,
    /// Largest bin-averaged density difference.
    pub sup_density_distance: f64,
}

impl CascadeHistogram {
    pub fn density(&self) -> Vec<f64> {
        self.mass
            .iter()
            .zip(self.edges.windows(2))
            .map(|(m, w)| m / (w[1] - w[0]))
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum::<f64>() + self.underflow + self.overflow
    }
}

pub const HISTOGRAM_BINS: usize = 50;

fn quantile(p: f64, nc: f64) -> f64 {
    let mut hi = 1.0 + nc;
    while noncentral_chi2_1_cdf(hi, nc) < p {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if noncentral_chi2_1_cdf(mid, nc) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Simulates `plan.trials` cascades with `elements + 1` terms.
pub fn empirical_pdf_of_cascade_power(scenario: &Scenario, plan: SimPlan, elements: u32) -> Result<CascadeHistogram> {
    plan.validate()?;
    let s = scenario.with_elements(elements);
    let clt = s.clt()?;
    let nc = clt.mu_z * clt.mu_z / clt.var_z;
    let (lo, hi) = (quantile(1e-3, nc), quantile(0.999, nc));
    let width = (hi - lo) / HISTOGRAM_BINS as f64;
    let edges: Vec<f64> = (0..=HISTOGRAM_BINS).map(|i| lo + width * i as f64).collect();

    let up = s.fading(Link::Up)?;
    let down = s.fading(Link::Down)?;
    let base = ChaCha8Rng::seed_from_u64(plan.seed);
    let terms = elements + 1;
    let chunks = plan.trials.div_ceil(CHUNK);
    let counts: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut bins = vec![0u64; HISTOGRAM_BINS + 2];
            for t in c * CHUNK..((c + 1) * CHUNK).min(plan.trials) {
                let mut r = stream(&base, t, SUBSTREAM_CASCADE);
                let z = sample_cascade_amplitude(&up, &down, terms, &mut r);
                let x = z * z / clt.var_z;
                let slot = if x < lo {
                    0
                } else if x >= hi {
                    HISTOGRAM_BINS + 1
                } else {
                    1 + (((x - lo) / width) as usize).min(HISTOGRAM_BINS - 1)
                };
                bins[slot] += 1;
            }
            bins
        })
        .collect();
    let mut total = vec![0u64; HISTOGRAM_BINS + 2];
    for c in &counts {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    let n = plan.trials as f64;
    let mass: Vec<f64> = total[1..=HISTOGRAM_BINS].iter().map(|&c| c as f64 / n).collect();
    let reference_mass: Vec<f64> = edges
        .windows(2)
        .map(|w| noncentral_chi2_1_cdf(w[1], nc) - noncentral_chi2_1_cdf(w[0], nc))
        .collect();
    let diffs = mass.iter().zip(&reference_mass).map(|(a, b)| (a - b).abs());
    let sup_mass_distance = diffs.clone().fold(0.0, f64::max);
    let sup_density_distance = diffs.fold(0.0, f64::max) / width;
    Ok(CascadeHistogram {
        elements,
        edges,
        mass,
        reference_mass,
        underflow: total[0] as f64 / n,
        overflow: total[HISTOGRAM_BINS + 1] as f64 / n,
        sup_mass_distance,
        sup_density_distance,
    })
}
