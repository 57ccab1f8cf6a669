//! Performance boundaries as implicit curves in the `(m, s)` plane.
//!
//! A [`BoundaryCurve`] is the level set `l(m, s) = level` of profit or mean
//! waiting time, restricted to a rectangular [`SearchBox`], together with
//! the side of the curve that counts as acceptable.

use serde::{Deserialize, Serialize};

use crate::economics::{self, EconomicParams};
use crate::error::{Error, Result};
use crate::fmt::g12;
use crate::queueing::{self, QueueParams, MAX_UTILIZATION};

/// Residual tolerance met by every traced vertex and used for on-curve
/// membership in [`feasible`].
pub const TRACE_TOL: f64 = 1e-6;

const BISECT_TOL: f64 = 1e-8;
const COLUMN_SAMPLES: usize = 64;

/// A candidate configuration: `m` servers running at speed `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkingPoint {
    pub m: f64,
    pub s: f64,
}

impl WorkingPoint {
    pub const fn new(m: f64, s: f64) -> Self {
        Self { m, s }
    }

    pub fn dist(&self, other: &WorkingPoint) -> f64 {
        (self.m - other.m).hypot(self.s - other.s)
    }
}

/// Rectangle `[m_min, m_max] × [s_min, s_max]` of admissible configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBox {
    pub m_min: f64,
    pub m_max: f64,
    pub s_min: f64,
    pub s_max: f64,
}

impl Default for SearchBox {
    fn default() -> Self {
        Self { m_min: 3.0, m_max: 4.0, s_min: 2.0, s_max: 3.0 }
    }
}

impl SearchBox {
    pub fn new(m_min: f64, m_max: f64, s_min: f64, s_max: f64) -> Result<Self> {
        let b = Self { m_min, m_max, s_min, s_max };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.m_min, self.m_max, self.s_min, self.s_max].iter().all(|v| v.is_finite());
        if !finite || self.m_min >= self.m_max || self.s_min >= self.s_max {
            return Err(Error::invalid(format!("degenerate search box {self:?}")));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.m_max - self.m_min
    }

    pub fn height(&self) -> f64 {
        self.s_max - self.s_min
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, pt: &WorkingPoint) -> bool {
        (self.m_min..=self.m_max).contains(&pt.m) && (self.s_min..=self.s_max).contains(&pt.s)
    }

    pub fn clamp(&self, pt: WorkingPoint) -> WorkingPoint {
        WorkingPoint::new(pt.m.clamp(self.m_min, self.m_max), pt.s.clamp(self.s_min, self.s_max))
    }

    pub fn corners(&self) -> [WorkingPoint; 4] {
        [
            WorkingPoint::new(self.m_min, self.s_min),
            WorkingPoint::new(self.m_max, self.s_min),
            WorkingPoint::new(self.m_min, self.s_max),
            WorkingPoint::new(self.m_max, self.s_max),
        ]
    }

    /// Distance from `pt` to the farthest corner: beyond it no circle
    /// centred at `pt` meets the box.
    pub fn farthest_corner_dist(&self, pt: &WorkingPoint) -> f64 {
        self.corners().iter().map(|c| c.dist(pt)).fold(0.0, f64::max)
    }

    /// Euclidean distance from `pt` to the box (zero inside).
    pub fn dist_outside(&self, pt: &WorkingPoint) -> f64 {
        pt.dist(&self.clamp(*pt))
    }

    /// `n × n` grid of points covering the box, `m` varying slowest.
    pub fn grid(&self, n: usize) -> Vec<WorkingPoint> {
        let step = |lo: f64, hi: f64, i: usize| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(WorkingPoint::new(step(self.m_min, self.m_max, i), step(self.s_min, self.s_max, j)));
            }
        }
        out
    }
}

/// Arrival rate, mean task size and economics shared by every curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Platform {
    pub lambda: f64,
    pub r_bar: f64,
    pub econ: EconomicParams,
}

impl Default for Platform {
    fn default() -> Self {
        Self { lambda: 4.0, r_bar: 1.0, econ: EconomicParams::default() }
    }
}

impl Platform {
    pub fn queue(&self, pt: &WorkingPoint) -> Result<QueueParams> {
        QueueParams::new(pt.m, pt.s, self.lambda, self.r_bar)
    }

    /// Closed-form profit `G(m, s)`; assumes `r̄ = 1`.
    pub fn profit_closed(&self, pt: &WorkingPoint) -> Result<f64> {
        economics::profit_closed(pt.m, pt.s, self.lambda, &self.econ)
    }

    /// Closed-form mean wait `T(m, s)`; assumes `r̄ = 1`.
    pub fn mean_wait_closed(&self, pt: &WorkingPoint) -> Result<f64> {
        queueing::mean_wait_approx(pt.m, pt.s, self.lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Profit,
    MeanWait,
    /// Synthetic `dm·m + ds·s`, for exercising the geometry on straight lines.
    Linear { dm: f64, ds: f64 },
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Profit => "profit",
            Metric::MeanWait => "wait",
            Metric::Linear { .. } => "linear",
        }
    }

    pub fn default_side(&self) -> FeasibleSide {
        match self {
            Metric::Profit => FeasibleSide::AboveLevel,
            Metric::MeanWait | Metric::Linear { .. } => FeasibleSide::BelowLevel,
        }
    }
}

/// Which side of the level set is acceptable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibleSide {
    /// `l(m, s) ≥ level`.
    AboveLevel,
    /// `l(m, s) ≤ level`.
    BelowLevel,
}

impl FeasibleSide {
    pub fn flipped(self) -> Self {
        match self {
            FeasibleSide::AboveLevel => FeasibleSide::BelowLevel,
            FeasibleSide::BelowLevel => FeasibleSide::AboveLevel,
        }
    }
}

/// Model used to evaluate a curve's metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelForm {
    /// Stirling closed forms, continuous in `m`.
    #[default]
    Closed,
    /// Erlang-C exact formulas with `ln Γ` factorials.
    Exact,
}

/// Level set `{(m, s) : l(m, s) = level}` inside a search box.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub metric: Metric,
    pub level: f64,
    pub search_box: SearchBox,
    pub feasible_side: FeasibleSide,
    pub form: ModelForm,
    pub platform: Platform,
    lipschitz: f64,
}

impl BoundaryCurve {
    pub fn new(metric: Metric, level: f64, search_box: SearchBox, platform: Platform) -> Result<Self> {
        search_box.validate()?;
        if !level.is_finite() {
            return Err(Error::invalid(format!("curve level must be finite, got {level}")));
        }
        if !matches!(metric, Metric::Linear { .. }) {
            let rho = platform.lambda * platform.r_bar / (search_box.m_min * search_box.s_min);
            if rho > MAX_UTILIZATION {
                return Err(Error::NonErgodic { rho });
            }
            platform.econ.validate()?;
        }
        let mut curve = Self {
            metric,
            level,
            search_box,
            feasible_side: metric.default_side(),
            form: ModelForm::Closed,
            platform,
            lipschitz: 0.0,
        };
        curve.lipschitz = curve.estimate_lipschitz()?;
        Ok(curve)
    }

    pub fn with_side(mut self, side: FeasibleSide) -> Self {
        self.feasible_side = side;
        self
    }

    pub fn with_form(mut self, form: ModelForm) -> Result<Self> {
        self.form = form;
        self.lipschitz = self.estimate_lipschitz()?;
        Ok(self)
    }

    pub fn with_level(mut self, level: f64) -> Self {
        self.level = level;
        self
    }

    /// Metric value `l(m, s)`.
    pub fn value(&self, pt: &WorkingPoint) -> Result<f64> {
        match (self.metric, self.form) {
            (Metric::Linear { dm, ds }, _) => Ok(dm * pt.m + ds * pt.s),
            (Metric::Profit, ModelForm::Closed) => self.platform.profit_closed(pt),
            (Metric::MeanWait, ModelForm::Closed) => self.platform.mean_wait_closed(pt),
            (Metric::Profit, ModelForm::Exact) => {
                Ok(economics::profit_exact(&self.platform.queue(pt)?, &self.platform.econ)?.profit)
            }
            (Metric::MeanWait, ModelForm::Exact) => Ok(queueing::mean_wait_exact(&self.platform.queue(pt)?)),
        }
    }

    /// Upper bound on `|∇l|` over the search box.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Signed margin toward the feasible side: non-negative when acceptable.
    pub fn side_margin(&self, pt: &WorkingPoint) -> Result<f64> {
        Ok(self.margin_of(residual(self, pt)?))
    }

    /// Signed margin for an already computed residual.
    pub(crate) fn margin_of(&self, residual: f64) -> f64 {
        match self.feasible_side {
            FeasibleSide::AboveLevel => residual,
            FeasibleSide::BelowLevel => -residual,
        }
    }

    /// Central differences with the stencil shifted inward at box edges.
    pub(crate) fn gradient_inward(&self, pt: &WorkingPoint, h: f64) -> Result<(f64, f64)> {
        let b = &self.search_box;
        let axis = |c: f64, lo: f64, hi: f64| {
            let a = (c - h).max(lo);
            let z = (c + h).min(hi);
            (a, z)
        };
        let (m0, m1) = axis(pt.m, b.m_min, b.m_max);
        let (s0, s1) = axis(pt.s, b.s_min, b.s_max);
        let dm = (self.value(&WorkingPoint::new(m1, pt.s))? - self.value(&WorkingPoint::new(m0, pt.s))?) / (m1 - m0);
        let ds = (self.value(&WorkingPoint::new(pt.m, s1))? - self.value(&WorkingPoint::new(pt.m, s0))?) / (s1 - s0);
        Ok((dm, ds))
    }

    fn estimate_lipschitz(&self) -> Result<f64> {
        if let Metric::Linear { dm, ds } = self.metric {
            return Ok(dm.hypot(ds));
        }
        let h = default_step(&self.search_box);
        let mut worst: f64 = 0.0;
        for pt in self.search_box.grid(33) {
            let (gm, gs) = self.gradient_inward(&pt, h)?;
            worst = worst.max(gm.hypot(gs));
        }
        // headroom for curvature between the sample nodes
        Ok(1.5 * worst + 1e-12)
    }
}

/// `l(m, s) − level`; positive means above the level.
pub fn residual(curve: &BoundaryCurve, pt: &WorkingPoint) -> Result<f64> {
    Ok(curve.value(pt)? - curve.level)
}

/// Default finite-difference step: `1e−6` of the box diagonal.
pub fn default_step(b: &SearchBox) -> f64 {
    1e-6 * b.diagonal()
}

/// Central-difference gradient `(∂l/∂m, ∂l/∂s)` with step `h`.
pub fn gradient(curve: &BoundaryCurve, pt: &WorkingPoint, h: f64) -> Result<(f64, f64)> {
    let a = h.abs();
    if a == 0.0 || !a.is_finite() {
        return Err(Error::invalid(format!("gradient step must be non-zero and finite, got {h}")));
    }
    let b = &curve.search_box;
    for probe in [
        WorkingPoint::new(pt.m - a, pt.s),
        WorkingPoint::new(pt.m + a, pt.s),
        WorkingPoint::new(pt.m, pt.s - a),
        WorkingPoint::new(pt.m, pt.s + a),
    ] {
        if !b.contains(&probe) {
            return Err(Error::StencilOutOfBox { m: probe.m, s: probe.s });
        }
    }
    let f = |m: f64, s: f64| curve.value(&WorkingPoint::new(m, s));
    let dm = (f(pt.m + h, pt.s)? - f(pt.m - h, pt.s)?) / (2.0 * h);
    let ds = (f(pt.m, pt.s + h)? - f(pt.m, pt.s - h)?) / (2.0 * h);
    Ok((dm, ds))
}

/// Vertices of a traced curve, sorted by `m`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polyline {
    pub vertices: Vec<WorkingPoint>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// `m` positions of columns that held more than one root.
    pub multi_root_columns: Vec<f64>,
}

impl Polyline {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// CSV with header `m,s,residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,s,residual\n");
        for (v, r) in self.vertices.iter().zip(&self.residuals) {
            out.push_str(&format!("{},{},{}\n", g12(v.m), g12(v.s), g12(*r)));
        }
        out
    }
}

/// Traces the curve column by column: for each of `n_columns` evenly spaced
/// `m` values, bisection in `s` locates the root of the residual. Columns
/// without a sign change are skipped, so the result may be empty.
pub fn trace(curve: &BoundaryCurve, n_columns: usize) -> Result<Polyline> {
    if n_columns < 2 {
        return Err(Error::invalid("trace needs at least two columns"));
    }
    let b = curve.search_box;
    let mut line = Polyline::default();
    for i in 0..n_columns {
        let m = b.m_min + b.width() * i as f64 / (n_columns - 1) as f64;
        let roots = column_roots(curve, m)?;
        if roots.len() > 1 {
            line.multi_root_columns.push(m);
        }
        let lower_feasible = curve.side_margin(&WorkingPoint::new(m, b.s_min))? >= 0.0;
        let pick = if lower_feasible { roots.first() } else { roots.last() };
        if let Some(&(s, r)) = pick {
            line.vertices.push(WorkingPoint::new(m, s));
            line.residuals.push(r);
            line.max_residual = line.max_residual.max(r.abs());
        }
    }
    Ok(line)
}

fn column_roots(curve: &BoundaryCurve, m: f64) -> Result<Vec<(f64, f64)>> {
    let b = curve.search_box;
    let f = |s: f64| residual(curve, &WorkingPoint::new(m, s));
    let ss: Vec<f64> = (0..=COLUMN_SAMPLES).map(|j| b.s_min + b.height() * j as f64 / COLUMN_SAMPLES as f64).collect();
    let fs = ss.iter().map(|&s| f(s)).collect::<Result<Vec<_>>>()?;
    let mut roots = Vec::new();
    for j in 0..COLUMN_SAMPLES {
        let (lo, hi, flo, fhi) = (ss[j], ss[j + 1], fs[j], fs[j + 1]);
        if flo == 0.0 {
            roots.push((lo, 0.0));
            continue;
        }
        if j + 1 == COLUMN_SAMPLES && fhi == 0.0 {
            roots.push((hi, 0.0));
            continue;
        }
        if flo.signum() != fhi.signum() && fhi != 0.0 {
            if let Some(root) = bisect(&f, lo, hi, flo)? {
                roots.push(root);
            }
        }
    }
    Ok(roots)
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, mut flo: f64) -> Result<Option<(f64, f64)>> {
    let mut best = (lo, flo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.abs() < best.1.abs() {
            best = (mid, fm);
        }
        if fm.abs() <= BISECT_TOL || mid <= lo || mid >= hi {
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((best.1.abs() <= TRACE_TOL).then_some(best))
}

/// True iff `pt` lies on the feasible side of every curve; points within
/// [`TRACE_TOL`] of a curve count as feasible.
pub fn feasible(pt: &WorkingPoint, curves: &[BoundaryCurve]) -> Result<bool> {
    for c in curves {
        if c.side_margin(pt)? < -TRACE_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wait_curve(level: f64) -> BoundaryCurve {
        BoundaryCurve::new(Metric::MeanWait, level, SearchBox::default(), Platform::default()).unwrap()
    }

    fn line(level: f64) -> BoundaryCurve {
        BoundaryCurve::new(Metric::Linear { dm: 2.0, ds: 3.0 }, level, SearchBox::default(), Platform::default())
            .unwrap()
    }

    #[test]
    fn box_validation() {
        assert!(SearchBox::new(3.0, 3.0, 2.0, 3.0).is_err());
        assert!(SearchBox::new(3.0, 4.0, 3.0, 2.0).is_err());
        let non_ergodic = SearchBox::new(1.0, 2.0, 1.0, 3.0).unwrap();
        assert!(matches!(
            BoundaryCurve::new(Metric::Profit, 20.0, non_ergodic, Platform::default()),
            Err(Error::NonErgodic { .. })
        ));
    }

    #[test]
    fn default_sides() {
        let p = BoundaryCurve::new(Metric::Profit, 28.0, SearchBox::default(), Platform::default()).unwrap();
        assert_eq!(p.feasible_side, FeasibleSide::AboveLevel);
        assert_eq!(wait_curve(0.05).feasible_side, FeasibleSide::BelowLevel);
    }

    #[test]
    fn residual_sign() {
        let p = BoundaryCurve::new(Metric::Profit, 10.0, SearchBox::default(), Platform::default()).unwrap();
        assert!(residual(&p, &WorkingPoint::new(3.0, 2.0)).unwrap() > 0.0);
    }

    #[test]
    fn linear_gradient_is_exact() {
        let (gm, gs) = gradient(&line(0.0), &WorkingPoint::new(3.5, 2.5), 1e-6).unwrap();
        assert!((gm - 2.0).abs() < 1e-8 && (gs - 3.0).abs() < 1e-8);
    }

    #[test]
    fn wait_gradient_is_negative() {
        let (gm, gs) = gradient(&wait_curve(0.05), &WorkingPoint::new(3.0 + 1e-3, 2.5), 1e-6).unwrap();
        assert!(gm < 0.0 && gs < 0.0);
    }

    #[test]
    fn gradient_stencil_out_of_box() {
        let r = gradient(&wait_curve(0.05), &WorkingPoint::new(3.0, 2.5), 1e-6);
        assert!(matches!(r, Err(Error::StencilOutOfBox { .. })));
    }

    #[test]
    fn gradient_symmetric_in_step_sign() {
        let c = wait_curve(0.05);
        let pt = WorkingPoint::new(3.4, 2.3);
        assert_eq!(gradient(&c, &pt, 1e-5).unwrap(), gradient(&c, &pt, -1e-5).unwrap());
    }

    #[test]
    fn trace_of_line_is_exact() {
        let poly = trace(&line(14.0), 11).unwrap();
        assert_eq!(poly.len(), 11);
        for v in &poly.vertices {
            assert!((2.0 * v.m + 3.0 * v.s - 14.0).abs() <= 1e-8);
        }
        assert!(poly.multi_root_columns.is_empty());
    }

    #[test]
    fn trace_out_of_range_is_empty() {
        assert!(trace(&wait_curve(10.0), 20).unwrap().is_empty());
        assert!(trace(&wait_curve(1e-6), 20).unwrap().is_empty());
    }

    #[test]
    fn trace_rejects_single_column() {
        assert!(trace(&wait_curve(0.05), 1).is_err());
    }

    #[test]
    fn feasible_basics() {
        assert!(feasible(&WorkingPoint::new(3.5, 2.5), &[]).unwrap());
        let c = line(14.0);
        assert!(feasible(&WorkingPoint::new(3.5, 2.0), std::slice::from_ref(&c)).unwrap());
        assert!(!feasible(&WorkingPoint::new(4.0, 3.0), std::slice::from_ref(&c)).unwrap());
        // on the line: 2·4 + 3·2 = 14
        assert!(feasible(&WorkingPoint::new(4.0, 2.0), &[c]).unwrap());
    }

    #[test]
    fn csv_header_and_rows() {
        let csv = trace(&line(14.0), 3).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "m,s,residual");
        assert_eq!(lines.len(), 4);
        let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first[0], 3.0);
        assert!((first[1] - 8.0 / 3.0).abs() < 1e-7);
    }
}
