//! Metaheuristic search for the most robust working point.
//!
//! Three population optimizers share one evaluation harness: the dung
//! beetle optimizer ([`dbo_optimize`]), differential evolution
//! ([`de_optimize`]) and particle swarm ([`pso_optimize`]). All of them
//! maximize an [`Objective`] over a [`SearchBox`]; [`Scenario`] is the
//! robustness-radius objective.
//!
//! Candidates are clamped to the box, snapped to a lattice of spacing
//! `snap` and cached, so repeated visits cost nothing. Every agent draws
//! from its own ChaCha stream keyed by `(iteration, agent)`, which makes a
//! run a pure function of its seed.

mod dbo;
mod de;
mod pso;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{trace, BoundaryCurve, Metric, Polyline, SearchBox, WorkingPoint};
use crate::error::{Error, Result};
use crate::fmt::g12;
use crate::radius::{radius_bruteforce, radius_sampled, RadiusResult, RadiusSearchParams};

pub use dbo::dbo_optimize;
pub use de::de_optimize;
pub use pso::pso_optimize;

/// Base of the penalty assigned to infeasible points.
pub const INFEASIBLE_PENALTY: f64 = -1e6;
/// Columns used when tracing curves for the feasibility distance.
pub const TRACE_COLUMNS: usize = 401;

/// Something to maximize over a box.
pub trait Objective {
    fn bounds(&self) -> SearchBox;
    fn evaluate(&self, pt: &WorkingPoint) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Dbo,
    De,
    Pso,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Dbo, Algorithm::De, Algorithm::Pso];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Dbo => "dbo",
            Algorithm::De => "de",
            Algorithm::Pso => "pso",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dbo" => Ok(Algorithm::Dbo),
            "de" => Ok(Algorithm::De),
            "pso" => Ok(Algorithm::Pso),
            other => Err(Error::invalid(format!("unknown algorithm '{other}' (expected dbo, de or pso)"))),
        }
    }
}

/// Dung beetle optimizer coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DboParams {
    pub roll_fraction: f64,
    pub brood_fraction: f64,
    pub forage_fraction: f64,
    pub thief_fraction: f64,
    /// Deflection coefficient `k`.
    pub k: f64,
    /// Light-intensity coefficient `b`.
    pub b_coef: f64,
    /// Probability that the natural coefficient α is −1.
    pub alpha_prob: f64,
    /// Probability that a ball roller rolls instead of dancing.
    pub roll_prob: f64,
    /// Thief step scale `S`.
    pub s_thief: f64,
}

impl Default for DboParams {
    fn default() -> Self {
        Self {
            roll_fraction: 6.0 / 30.0,
            brood_fraction: 6.0 / 30.0,
            forage_fraction: 7.0 / 30.0,
            thief_fraction: 11.0 / 30.0,
            k: 0.1,
            b_coef: 0.3,
            alpha_prob: 0.1,
            roll_prob: 0.9,
            s_thief: 0.5,
        }
    }
}

impl DboParams {
    pub fn validate(&self) -> Result<()> {
        let f = [self.roll_fraction, self.brood_fraction, self.forage_fraction, self.thief_fraction];
        if f.iter().any(|x| x.is_nan() || *x < 0.0) || (f.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("dbo role fractions must be non-negative and sum to 1"));
        }
        if !(self.k > 0.0 && self.k <= 0.2) {
            return Err(Error::invalid(format!("dbo k must lie in (0, 0.2], got {}", self.k)));
        }
        if !(self.b_coef > 0.0 && self.b_coef < 1.0) {
            return Err(Error::invalid(format!("dbo b_coef must lie in (0, 1), got {}", self.b_coef)));
        }
        for (name, p) in [("alpha_prob", self.alpha_prob), ("roll_prob", self.roll_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("dbo {name} must be a probability, got {p}")));
            }
        }
        if self.s_thief.is_nan() || self.s_thief <= 0.0 {
            return Err(Error::invalid("dbo s_thief must be positive"));
        }
        Ok(())
    }

    /// Agent counts per role: rollers, brood balls, small beetles, thieves.
    pub fn role_counts(&self, n: usize) -> [usize; 4] {
        let cum = |x: f64| ((n as f64) * x).round() as usize;
        let a = cum(self.roll_fraction).min(n);
        let b = cum(self.roll_fraction + self.brood_fraction).clamp(a, n);
        let c = cum(self.roll_fraction + self.brood_fraction + self.forage_fraction).clamp(b, n);
        [a, b - a, c - b, n - c]
    }
}

/// Differential evolution, rand/1/bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeParams {
    pub f: f64,
    pub cr: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        Self { f: 0.5, cr: 0.9 }
    }
}

/// Global-best particle swarm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsoParams {
    pub inertia: f64,
    pub c1: f64,
    pub c2: f64,
    /// Velocity cap as a fraction of the box extent per axis.
    pub v_max_frac: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self { inertia: 0.72, c1: 1.49, c2: 1.49, v_max_frac: 0.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    pub population: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Lattice spacing candidates are snapped to before evaluation.
    pub snap: f64,
    pub dbo: DboParams,
    pub de: DeParams,
    pub pso: PsoParams,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Dbo,
            population: 30,
            max_iters: 100,
            seed: 0,
            snap: 1e-4,
            dbo: DboParams::default(),
            de: DeParams::default(),
            pso: PsoParams::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        Self { algorithm, seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::invalid(format!("population must be at least 4, got {}", self.population)));
        }
        if self.max_iters < 1 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if !(self.snap > 0.0 && self.snap.is_finite()) {
            return Err(Error::invalid(format!("snap must be positive, got {}", self.snap)));
        }
        self.dbo.validate()?;
        if !(self.de.f > 0.0 && self.de.f <= 2.0 && (0.0..=1.0).contains(&self.de.cr)) {
            return Err(Error::invalid("de needs 0 < f ≤ 2 and cr in [0, 1]"));
        }
        if !(self.pso.v_max_frac > 0.0 && self.pso.c1 >= 0.0 && self.pso.c2 >= 0.0) {
            return Err(Error::invalid("pso needs v_max_frac > 0 and non-negative c1, c2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub best_fitness: f64,
    pub best: WorkingPoint,
    /// Cumulative objective evaluations, cache hits excluded.
    pub evals: u64,
}

/// Best-so-far history; row 0 is the initial population.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTrace {
    pub rows: Vec<TraceRow>,
}

impl ConvergenceTrace {
    pub const CSV_HEADER: &'static str = "iter,best_fitness,best_m,best_s,evals";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{}\n", r.iter, g12(r.best_fitness), g12(r.best.m), g12(r.best.s), r.evals));
        }
        out
    }

    pub fn final_fitness(&self) -> f64 {
        self.rows.last().map_or(f64::NEG_INFINITY, |r| r.best_fitness)
    }

    /// First iteration whose best fitness is within `frac·|final|` of the
    /// final best.
    pub fn iters_to_within(&self, frac: f64) -> usize {
        let last = self.final_fitness();
        let target = last - frac * last.abs();
        self.rows.iter().find(|r| r.best_fitness >= target).map_or(0, |r| r.iter)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerRun {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub population: usize,
    pub best: WorkingPoint,
    pub best_fitness: f64,
    pub evaluations: u64,
    pub trace: ConvergenceTrace,
}

/// Runs the configured algorithm on any objective.
pub fn optimize(objective: &dyn Objective, cfg: &OptimizerConfig) -> Result<OptimizerRun> {
    cfg.validate()?;
    objective.bounds().validate()?;
    match cfg.algorithm {
        Algorithm::Dbo => dbo::run(objective, cfg),
        Algorithm::De => de::run(objective, cfg),
        Algorithm::Pso => pso::run(objective, cfg),
    }
}

pub(crate) type Vec2 = [f64; 2];

/// Independent random stream for one agent in one iteration.
pub(crate) fn agent_rng(seed: u64, iter: usize, agent: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((iter as u64) << 32) | agent as u64);
    rng
}

pub(crate) fn lower(b: &SearchBox) -> Vec2 {
    [b.m_min, b.s_min]
}

pub(crate) fn upper(b: &SearchBox) -> Vec2 {
    [b.m_max, b.s_max]
}

pub(crate) fn clamp(x: Vec2, lo: Vec2, hi: Vec2) -> Vec2 {
    [x[0].clamp(lo[0], hi[0]), x[1].clamp(lo[1], hi[1])]
}

/// Clamps, snaps and caches evaluations; tracks the elitist best.
pub(crate) struct Evaluator<'a> {
    objective: &'a dyn Objective,
    bounds: SearchBox,
    snap: f64,
    cache: HashMap<(i64, i64), f64>,
    evals: u64,
    best: Option<(Vec2, f64)>,
    trace: ConvergenceTrace,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(objective: &'a dyn Objective, snap: f64) -> Self {
        Self {
            objective,
            bounds: objective.bounds(),
            snap,
            cache: HashMap::new(),
            evals: 0,
            best: None,
            trace: ConvergenceTrace::default(),
        }
    }

    pub(crate) fn bounds(&self) -> SearchBox {
        self.bounds
    }

    fn key(&self, x: Vec2) -> (i64, i64) {
        let b = &self.bounds;
        (((x[0] - b.m_min) / self.snap).round() as i64, ((x[1] - b.s_min) / self.snap).round() as i64)
    }

    /// Evaluates the lattice point nearest to `x` (after clamping) and
    /// returns it with its fitness.
    pub(crate) fn eval(&mut self, x: Vec2) -> Result<(Vec2, f64)> {
        let b = self.bounds;
        let x = clamp(x, lower(&b), upper(&b));
        let key = self.key(x);
        let snapped = clamp(
            [b.m_min + key.0 as f64 * self.snap, b.s_min + key.1 as f64 * self.snap],
            lower(&b),
            upper(&b),
        );
        let f = match self.cache.get(&key) {
            Some(&f) => f,
            None => {
                let f = self.objective.evaluate(&WorkingPoint::new(snapped[0], snapped[1]))?;
                self.evals += 1;
                self.cache.insert(key, f);
                f
            }
        };
        if self.best.is_none_or(|(_, bf)| f > bf) {
            self.best = Some((snapped, f));
        }
        Ok((snapped, f))
    }

    /// Appends a trace row for the end of iteration `iter`.
    pub(crate) fn record(&mut self, iter: usize) {
        let (x, f) = self.best.expect("record after at least one evaluation");
        self.trace.rows.push(TraceRow { iter, best_fitness: f, best: WorkingPoint::new(x[0], x[1]), evals: self.evals });
    }

    pub(crate) fn best(&self) -> (Vec2, f64) {
        self.best.expect("best after at least one evaluation")
    }

    pub(crate) fn finish(self, cfg: &OptimizerConfig) -> OptimizerRun {
        let (x, f) = self.best();
        OptimizerRun {
            algorithm: cfg.algorithm,
            seed: cfg.seed,
            population: cfg.population,
            best: WorkingPoint::new(x[0], x[1]),
            best_fitness: f,
            evaluations: self.evals,
            trace: self.trace,
        }
    }
}

/// Uniform point in the box.
pub(crate) fn uniform_in(b: &SearchBox, rng: &mut ChaCha8Rng) -> Vec2 {
    use rand::Rng;
    [rng.random_range(b.m_min..=b.m_max), rng.random_range(b.s_min..=b.s_max)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    ProfitOnly,
    DeadlineOnly,
    Joint,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::ProfitOnly => "profit_only",
            ScenarioKind::DeadlineOnly => "deadline_only",
            ScenarioKind::Joint => "joint",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "profit_only" | "profit" => Ok(ScenarioKind::ProfitOnly),
            "deadline_only" | "deadline" | "wait" => Ok(ScenarioKind::DeadlineOnly),
            "joint" => Ok(ScenarioKind::Joint),
            other => Err(Error::invalid(format!("unknown scenario '{other}'"))),
        }
    }
}

/// How the two radii of a joint scenario combine into one fitness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointObjective {
    /// The smaller of the two radii.
    #[default]
    MinRadius,
    /// `−|r1 − r2|`: rewards equal margins to both curves.
    BalanceGap,
}

/// Robustness-radius objective over a set of boundary curves.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub curves: Vec<BoundaryCurve>,
    pub radius: RadiusSearchParams,
    pub joint: JointObjective,
    polylines: Vec<Polyline>,
}

impl Scenario {
    /// Curves are ordered profit first for joint scenarios. Each curve is
    /// traced once for the infeasibility penalty.
    pub fn new(kind: ScenarioKind, curves: Vec<BoundaryCurve>, radius: RadiusSearchParams) -> Result<Self> {
        radius.validate()?;
        let metrics: Vec<Metric> = curves.iter().map(|c| c.metric).collect();
        let ok = match kind {
            ScenarioKind::ProfitOnly => metrics == [Metric::Profit],
            ScenarioKind::DeadlineOnly => metrics == [Metric::MeanWait],
            ScenarioKind::Joint => metrics == [Metric::Profit, Metric::MeanWait],
        };
        if !ok {
            return Err(Error::invalid(format!("{} scenario got curves {:?}", kind.name(), metrics)));
        }
        if curves.windows(2).any(|w| w[0].search_box != w[1].search_box) {
            return Err(Error::invalid("scenario curves must share one search box"));
        }
        let mut polylines = Vec::with_capacity(curves.len());
        for c in &curves {
            let poly = trace(c, TRACE_COLUMNS)?;
            if poly.is_empty() {
                return Err(Error::TraceUnavailable);
            }
            polylines.push(poly);
        }
        Ok(Self { kind, curves, radius, joint: JointObjective::default(), polylines })
    }

    pub fn with_joint(mut self, joint: JointObjective) -> Self {
        self.joint = joint;
        self
    }

    pub fn polylines(&self) -> &[Polyline] {
        &self.polylines
    }

    pub fn is_feasible(&self, pt: &WorkingPoint) -> Result<bool> {
        crate::boundary::feasible(pt, &self.curves)
    }

    /// Largest distance from `pt` to the traced curve of any violated
    /// requirement; zero when feasible.
    pub fn distance_to_feasibility(&self, pt: &WorkingPoint) -> Result<f64> {
        let mut d: f64 = 0.0;
        for (c, poly) in self.curves.iter().zip(&self.polylines) {
            if !crate::boundary::feasible(pt, std::slice::from_ref(c))? {
                d = d.max(radius_sampled(pt, poly)?.r);
            }
        }
        Ok(d)
    }

    /// Brute-force radius to every curve.
    pub fn radii(&self, pt: &WorkingPoint) -> Result<Vec<RadiusResult>> {
        self.curves.iter().map(|c| radius_bruteforce(pt, c, &self.radius)).collect()
    }

    /// Robustness fitness: the radius for single-curve scenarios, the joint
    /// combination otherwise, and a large negative penalty off the feasible
    /// region.
    pub fn fitness(&self, pt: &WorkingPoint) -> Result<f64> {
        if !self.is_feasible(pt)? {
            return Ok(INFEASIBLE_PENALTY - self.distance_to_feasibility(pt)?);
        }
        match (self.kind, self.joint) {
            (ScenarioKind::Joint, JointObjective::MinRadius) => {
                // a later curve only matters if it is closer than the best so far
                let mut best = f64::INFINITY;
                for c in &self.curves {
                    let cap = RadiusSearchParams { r_max: self.radius.r_max.min(best + self.radius.r_step), ..self.radius };
                    match radius_or_zero(pt, c, &cap) {
                        Ok(r) => best = best.min(r),
                        Err(Error::NoContactWithinRMax { .. }) if best.is_finite() => {}
                        Err(e) => return Err(e),
                    }
                }
                Ok(best)
            }
            (ScenarioKind::Joint, JointObjective::BalanceGap) => {
                let r1 = radius_or_zero(pt, &self.curves[0], &self.radius)?;
                let r2 = radius_or_zero(pt, &self.curves[1], &self.radius)?;
                Ok(-(r1 - r2).abs())
            }
            _ => radius_or_zero(pt, &self.curves[0], &self.radius),
        }
    }
}

/// A point within the on-curve tolerance but just outside the feasible
/// side is rejected by the radius search; it sits on the curve.
fn radius_or_zero(pt: &WorkingPoint, curve: &BoundaryCurve, params: &RadiusSearchParams) -> Result<f64> {
    match radius_bruteforce(pt, curve, params) {
        Ok(r) => Ok(r.r),
        Err(Error::InfeasibleCenter { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

impl Objective for Scenario {
    fn bounds(&self) -> SearchBox {
        self.curves[0].search_box
    }

    fn evaluate(&self, pt: &WorkingPoint) -> Result<f64> {
        self.fitness(pt)
    }
}

/// Optimizer outcome on a scenario, with the radii at the returned point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub run: OptimizerRun,
    /// Empty when no feasible point was found.
    pub radii: Vec<RadiusResult>,
}

pub(crate) fn scenario_run(scenario: &Scenario, cfg: &OptimizerConfig, algorithm: Algorithm) -> Result<ScenarioRun> {
    let cfg = OptimizerConfig { algorithm, ..*cfg };
    let run = optimize(scenario, &cfg)?;
    let radii = if run.best_fitness > INFEASIBLE_PENALTY / 2.0 { scenario.radii(&run.best)? } else { Vec::new() };
    Ok(ScenarioRun { run, radii })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub final_fitness: f64,
    pub iters_to_1pct: usize,
    pub total_evals: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmStats {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub mean_final: f64,
    pub std_final: f64,
    pub median_iters_to_1pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    /// One trace per row, same order.
    pub traces: Vec<ConvergenceTrace>,
}

impl Comparison {
    pub const CSV_HEADER: &'static str = "algorithm,seed,final_fitness,iters_to_1pct,total_evals";
    pub const STATS_HEADER: &'static str = "algorithm,runs,mean_final,std_final,median_iters_to_1pct";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.algorithm,
                r.seed,
                g12(r.final_fitness),
                r.iters_to_1pct,
                r.total_evals
            ));
        }
        out
    }

    /// Per-algorithm summary, in first-appearance order.
    pub fn stats(&self) -> Vec<AlgorithmStats> {
        let mut order: Vec<Algorithm> = Vec::new();
        for r in &self.rows {
            if !order.contains(&r.algorithm) {
                order.push(r.algorithm);
            }
        }
        order
            .into_iter()
            .map(|a| {
                let rows: Vec<&CompareRow> = self.rows.iter().filter(|r| r.algorithm == a).collect();
                let n = rows.len() as f64;
                let mean = rows.iter().map(|r| r.final_fitness).sum::<f64>() / n;
                let var = if rows.len() > 1 {
                    rows.iter().map(|r| (r.final_fitness - mean).powi(2)).sum::<f64>() / (n - 1.0)
                } else {
                    0.0
                };
                let mut iters: Vec<usize> = rows.iter().map(|r| r.iters_to_1pct).collect();
                iters.sort_unstable();
                let k = iters.len();
                let median = if k % 2 == 1 { iters[k / 2] as f64 } else { 0.5 * (iters[k / 2 - 1] + iters[k / 2]) as f64 };
                AlgorithmStats { algorithm: a, runs: rows.len(), mean_final: mean, std_final: var.sqrt(), median_iters_to_1pct: median }
            })
            .collect()
    }

    pub fn stats_csv(&self) -> String {
        let mut out = format!("{}\n", Self::STATS_HEADER);
        for s in self.stats() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.algorithm,
                s.runs,
                g12(s.mean_final),
                g12(s.std_final),
                g12(s.median_iters_to_1pct)
            ));
        }
        out
    }
}

/// Runs every config `runs` times with seeds `cfg.seed + 0 .. runs`.
pub fn compare(objective: &dyn Objective, cfgs: &[OptimizerConfig], runs: usize) -> Result<Comparison> {
    if cfgs.len() < 2 {
        return Err(Error::invalid("compare needs at least two optimizer configs"));
    }
    if runs == 0 {
        return Err(Error::invalid("compare needs at least one run"));
    }
    let mut rows = Vec::new();
    let mut traces = Vec::new();
    for cfg in cfgs {
        for k in 0..runs as u64 {
            let run = optimize(objective, &OptimizerConfig { seed: cfg.seed.wrapping_add(k), ..*cfg })?;
            rows.push(CompareRow {
                algorithm: run.algorithm,
                seed: run.seed,
                final_fitness: run.best_fitness,
                iters_to_1pct: run.trace.iters_to_within(0.01),
                total_evals: run.evaluations,
            });
            traces.push(run.trace);
        }
    }
    Ok(Comparison { rows, traces })
}
