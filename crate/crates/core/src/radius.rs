//! Robustness radius: the shortest Euclidean distance from a working point
//! to a boundary curve.
//!
//! [`radius_bruteforce`] grows a circle around the working point in steps of
//! `r_step` and scans a fixed polar grid on every shell until some grid point
//! lands on the curve. A ray is only re-evaluated once the curve's Lipschitz
//! bound says its residual could have reached the on-curve tolerance, so the
//! first contact shell is the same one an exhaustive scan would report.
//!
//! [`radius_sampled`] measures the distance to a traced [`Polyline`] and
//! serves as an independent check.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::boundary::{default_step, residual, BoundaryCurve, Polyline, WorkingPoint};
use crate::error::{Error, Result};
use crate::fmt::g12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadiusSearchParams {
    /// Radius increment between shells.
    pub r_step: f64,
    /// Give up beyond this radius.
    pub r_max: f64,
    /// Polar grid size per shell.
    pub n_theta: usize,
    /// `|residual|` below which a grid point counts as on the curve.
    pub tol_on_curve: f64,
    /// Largest sine of the angle between the curve normal and the radial
    /// direction for a contact to count as tangent.
    pub tol_tangent: f64,
}

impl Default for RadiusSearchParams {
    fn default() -> Self {
        Self { r_step: 1e-4, r_max: 1e4, n_theta: 3600, tol_on_curve: 1e-3, tol_tangent: 1e-2 }
    }
}

impl RadiusSearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_step > 0.0 && self.r_step.is_finite()) {
            return Err(Error::invalid(format!("r_step must be positive, got {}", self.r_step)));
        }
        if self.r_max.is_nan() || self.r_max <= self.r_step {
            return Err(Error::invalid(format!("r_max {} must exceed r_step {}", self.r_max, self.r_step)));
        }
        if self.n_theta < 16 {
            return Err(Error::invalid(format!("n_theta must be at least 16, got {}", self.n_theta)));
        }
        if !(self.tol_on_curve > 0.0 && self.tol_tangent > 0.0) {
            return Err(Error::invalid("tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusMethod {
    BruteForce,
    SampledOracle,
}

impl RadiusMethod {
    pub fn name(&self) -> &'static str {
        match self {
            RadiusMethod::BruteForce => "brute_force",
            RadiusMethod::SampledOracle => "sampled_oracle",
        }
    }
}

/// How the reported contact was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactKind {
    /// On the curve and tangent to the circle.
    Tangent,
    /// On the curve, tangency not confirmed within `tol_tangent`.
    Intersection,
    /// The circle left the search box before meeting the curve; `r` is the
    /// distance to the farthest box corner.
    BoxLimited,
    /// Nearest point of a traced polyline.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusResult {
    pub r: f64,
    pub contact: WorkingPoint,
    /// Polar angle of the contact seen from the centre, in `[0, 2π)`.
    pub theta: f64,
    /// Residual evaluations spent.
    pub evaluations: u64,
    pub method: RadiusMethod,
    pub kind: ContactKind,
}

impl RadiusResult {
    pub const CSV_HEADER: &'static str = "center_m,center_s,metric,level,r,contact_m,contact_s,theta,evals,method";

    pub fn csv_row(&self, center: &WorkingPoint, curve: &BoundaryCurve) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            g12(center.m),
            g12(center.s),
            curve.metric.name(),
            g12(curve.level),
            g12(self.r),
            g12(self.contact.m),
            g12(self.contact.s),
            g12(self.theta),
            self.evaluations,
            self.method.name()
        )
    }
}

/// Polar-grid search for the smallest shell that touches the curve.
///
/// Shell `n` has radius `n·r_step`. Grid points outside the search box are
/// skipped. A grid point counts as on the curve when `|residual|` is within
/// `tol_on_curve` or when its ray crossed the curve since the previous shell;
/// in the latter case the reported contact is the bisected crossing point.
/// Among the on-curve points of the first touching shell, the one
/// with the smallest angle that also passes the tangency test is returned;
/// if none passes, the smallest-angle on-curve point is returned as an
/// intersection.
pub fn radius_bruteforce(
    center: &WorkingPoint,
    curve: &BoundaryCurve,
    params: &RadiusSearchParams,
) -> Result<RadiusResult> {
    params.validate()?;
    let b = curve.search_box;
    if !b.contains(center) {
        return Err(Error::invalid(format!("center ({}, {}) lies outside the search box", center.m, center.s)));
    }
    let margin = curve.side_margin(center)?;
    if margin < -params.tol_on_curve {
        return Err(Error::InfeasibleCenter { m: center.m, s: center.s, residual: residual(curve, center)? });
    }
    let mut evaluations = 1u64;

    let n = params.n_theta;
    let dirs: Vec<(f64, f64)> = (0..n).map(|j| theta_of(j, n)).map(|t| (t.cos(), t.sin())).collect();
    let max_shell = (params.r_max / params.r_step).floor() as u64;
    let lip_step = curve.lipschitz() * params.r_step;
    let h = default_step(&b);

    // min-heap of (next shell at which the ray could touch the curve, ray)
    let mut queue: BinaryHeap<Reverse<(u64, usize)>> = (0..n).map(|j| Reverse((1, j))).collect();
    let mut hits: Vec<(usize, WorkingPoint)> = Vec::new();

    while let Some(&Reverse((shell, _))) = queue.peek() {
        if shell > max_shell {
            return Err(Error::NoContactWithinRMax { r_max: params.r_max });
        }
        let r = shell as f64 * params.r_step;
        hits.clear();
        while let Some(&Reverse((next, j))) = queue.peek() {
            if next != shell {
                break;
            }
            queue.pop();
            let (c, s) = dirs[j];
            let p = WorkingPoint::new(center.m + r * c, center.s + r * s);
            // a ray that leaves the (convex) box never re-enters it
            if !b.contains(&p) {
                continue;
            }
            let res = residual(curve, &p)?;
            evaluations += 1;
            let excess = res.abs() - params.tol_on_curve;
            if excess <= 0.0 {
                hits.push((j, p));
                queue.push(Reverse((shell + 1, j)));
            } else if curve.margin_of(res) < 0.0 {
                // stepped across the curve within the last shell
                let (q, spent) = refine_crossing(curve, center, dirs[j], r - params.r_step, r)?;
                evaluations += spent;
                hits.push((j, q));
                queue.push(Reverse((shell + 1, j)));
            } else {
                let skip = if lip_step > 0.0 { (excess / lip_step).floor().max(1.0) } else { f64::INFINITY };
                let next = if skip >= (max_shell + 1) as f64 { max_shell + 1 } else { shell + skip as u64 };
                queue.push(Reverse((next, j)));
            }
        }
        if hits.is_empty() {
            continue;
        }
        hits.sort_by_key(|&(j, _)| j);
        for &(j, p) in &hits {
            let (gm, gs) = curve.gradient_inward(&p, h)?;
            evaluations += 4;
            let (dx, dy) = (p.m - center.m, p.s - center.s);
            let norm = gm.hypot(gs) * dx.hypot(dy);
            if norm > 0.0 && (gm * dy - gs * dx).abs() / norm <= params.tol_tangent {
                return Ok(contact(r, p, j, n, evaluations, ContactKind::Tangent));
            }
        }
        let (j, p) = hits[0];
        return Ok(contact(r, p, j, n, evaluations, ContactKind::Intersection));
    }

    // every ray has left the box
    let far = b.farthest_corner_dist(center);
    if far > params.r_max {
        return Err(Error::NoContactWithinRMax { r_max: params.r_max });
    }
    let corner = b
        .corners()
        .into_iter()
        .fold(b.corners()[0], |acc, c| if c.dist(center) > acc.dist(center) { c } else { acc });
    Ok(RadiusResult {
        r: far,
        contact: corner,
        theta: angle(center, &corner),
        evaluations,
        method: RadiusMethod::BruteForce,
        kind: ContactKind::BoxLimited,
    })
}

/// Bisects the ray segment `[r_in, r_out]` for the point where the curve is
/// crossed; `r_in` is on the feasible side, `r_out` beyond it.
fn refine_crossing(
    curve: &BoundaryCurve,
    center: &WorkingPoint,
    (c, s): (f64, f64),
    r_in: f64,
    r_out: f64,
) -> Result<(WorkingPoint, u64)> {
    let at = |r: f64| WorkingPoint::new(center.m + r * c, center.s + r * s);
    let (mut lo, mut hi) = (r_in.max(0.0), r_out);
    let mut spent = 0;
    while hi - lo > 1e-12 * (1.0 + hi) && spent < 60 {
        let mid = 0.5 * (lo + hi);
        spent += 1;
        if curve.side_margin(&at(mid))? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((at(lo), spent))
}

fn theta_of(j: usize, n: usize) -> f64 {
    TAU * j as f64 / n as f64
}

fn angle(from: &WorkingPoint, to: &WorkingPoint) -> f64 {
    (to.s - from.s).atan2(to.m - from.m).rem_euclid(TAU)
}

fn contact(r: f64, p: WorkingPoint, j: usize, n: usize, evaluations: u64, kind: ContactKind) -> RadiusResult {
    RadiusResult { r, contact: p, theta: theta_of(j, n), evaluations, method: RadiusMethod::BruteForce, kind }
}

/// Distance from `center` to a traced polyline, projecting onto each segment.
pub fn radius_sampled(center: &WorkingPoint, poly: &Polyline) -> Result<RadiusResult> {
    let first = *poly.vertices.first().ok_or(Error::EmptyPolyline)?;
    let mut best = (center.dist(&first), first);
    for pair in poly.vertices.windows(2) {
        let q = project_onto_segment(center, &pair[0], &pair[1]);
        let d = center.dist(&q);
        if d < best.0 {
            best = (d, q);
        }
    }
    Ok(RadiusResult {
        r: best.0,
        contact: best.1,
        theta: angle(center, &best.1),
        evaluations: poly.len() as u64,
        method: RadiusMethod::SampledOracle,
        kind: ContactKind::Sampled,
    })
}

fn project_onto_segment(p: &WorkingPoint, a: &WorkingPoint, b: &WorkingPoint) -> WorkingPoint {
    let (vx, vy) = (b.m - a.m, b.s - a.s);
    let len2 = vx * vx + vy * vy;
    if len2 == 0.0 {
        return *a;
    }
    let t = (((p.m - a.m) * vx + (p.s - a.s) * vy) / len2).clamp(0.0, 1.0);
    WorkingPoint::new(a.m + t * vx, a.s + t * vy)
}

/// Brute-force radii to a profit curve and a waiting-time curve.
pub fn radius_pair(
    center: &WorkingPoint,
    profit_curve: &BoundaryCurve,
    wait_curve: &BoundaryCurve,
    params: &RadiusSearchParams,
) -> Result<(RadiusResult, RadiusResult)> {
    Ok((radius_bruteforce(center, profit_curve, params)?, radius_bruteforce(center, wait_curve, params)?))
}

/// Finds the curve level in `[lo, hi]` at which the brute-force radius from
/// `center` equals `target`, by bisection. The radius must be monotone in
/// the level over the bracket.
pub fn calibrate_level(
    center: &WorkingPoint,
    curve: &BoundaryCurve,
    target: f64,
    lo: f64,
    hi: f64,
    params: &RadiusSearchParams,
) -> Result<f64> {
    let gap = |level: f64| -> Result<f64> {
        Ok(radius_bruteforce(center, &curve.clone().with_level(level), params)?.r - target)
    };
    let (mut lo, mut hi) = (lo, hi);
    let mut g_lo = gap(lo)?;
    let g_hi = gap(hi)?;
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::invalid(format!("radius {target} is not bracketed by levels [{lo}, {hi}]")));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let g = gap(mid)?;
        if g == 0.0 || (hi - lo).abs() < 1e-9 {
            return Ok(mid);
        }
        if g.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{trace, Metric, Platform, SearchBox};

    fn line(level: f64) -> BoundaryCurve {
        // m + s = level, feasible below
        BoundaryCurve::new(Metric::Linear { dm: 1.0, ds: 1.0 }, level, SearchBox::default(), Platform::default())
            .unwrap()
    }

    fn coarse() -> RadiusSearchParams {
        RadiusSearchParams { r_step: 1e-3, n_theta: 360, ..Default::default() }
    }

    /// Every ray on every shell, no skipping.
    fn exhaustive(center: &WorkingPoint, curve: &BoundaryCurve, p: &RadiusSearchParams) -> Option<(f64, usize)> {
        let b = curve.search_box;
        let max_shell = (p.r_max / p.r_step).floor() as u64;
        for shell in 1..=max_shell {
            let r = shell as f64 * p.r_step;
            if r > b.farthest_corner_dist(center) + p.r_step {
                return None;
            }
            for j in 0..p.n_theta {
                let t = theta_of(j, p.n_theta);
                let pt = WorkingPoint::new(center.m + r * t.cos(), center.s + r * t.sin());
                if b.contains(&pt)
                    && (residual(curve, &pt).unwrap().abs() <= p.tol_on_curve || curve.side_margin(&pt).unwrap() < 0.0)
                {
                    return Some((r, j));
                }
            }
        }
        None
    }

    #[test]
    fn params_validation() {
        assert!(RadiusSearchParams::default().validate().is_ok());
        assert!(RadiusSearchParams { n_theta: 8, ..Default::default() }.validate().is_err());
        assert!(RadiusSearchParams { r_max: 1e-5, ..Default::default() }.validate().is_err());
        assert!(RadiusSearchParams { tol_on_curve: 0.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn point_line_distance() {
        let p = RadiusSearchParams { tol_on_curve: 1e-9, ..Default::default() };
        for (m, s) in [(3.1, 2.1), (3.0, 2.0), (3.4, 2.2), (3.7, 2.3)] {
            let c = WorkingPoint::new(m, s);
            let res = radius_bruteforce(&c, &line(6.2), &p).unwrap();
            let expect = (m + s - 6.2).abs() / 2f64.sqrt();
            assert!((res.r - expect).abs() <= 2.0 * p.r_step, "{} vs {}", res.r, expect);
            assert_eq!(res.kind, ContactKind::Tangent);
            assert!(residual(&line(6.2), &res.contact).unwrap().abs() <= p.tol_on_curve);
            assert!((res.contact.dist(&c) - res.r).abs() <= p.r_step);
        }
    }

    #[test]
    fn wide_band_contacts_early() {
        let p = RadiusSearchParams::default();
        let c = WorkingPoint::new(3.1, 2.1);
        let res = radius_bruteforce(&c, &line(6.2), &p).unwrap();
        let expect = 1.0 / 2f64.sqrt();
        let early = p.tol_on_curve / 2f64.sqrt();
        assert!(res.r <= expect + p.r_step && res.r >= expect - early - p.r_step, "{}", res.r);
    }

    #[test]
    fn center_on_curve_touches_first_shell() {
        let c = WorkingPoint::new(3.2, 2.5);
        let res = radius_bruteforce(&c, &line(5.7), &RadiusSearchParams::default()).unwrap();
        assert!(res.r <= 1e-4);
    }

    #[test]
    fn infeasible_center_rejected() {
        let c = WorkingPoint::new(3.9, 2.9);
        assert!(matches!(
            radius_bruteforce(&c, &line(6.2), &RadiusSearchParams::default()),
            Err(Error::InfeasibleCenter { .. })
        ));
    }

    #[test]
    fn r_max_exhausted() {
        let p = RadiusSearchParams { r_max: 0.05, ..coarse() };
        assert!(matches!(
            radius_bruteforce(&WorkingPoint::new(3.0, 2.0), &line(6.5), &p),
            Err(Error::NoContactWithinRMax { .. })
        ));
    }

    #[test]
    fn curve_missing_box_is_box_limited() {
        let res = radius_bruteforce(&WorkingPoint::new(3.0, 2.0), &line(100.0), &coarse()).unwrap();
        assert_eq!(res.kind, ContactKind::BoxLimited);
        assert!((res.r - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(res.contact, WorkingPoint::new(4.0, 3.0));
    }

    #[test]
    fn skipping_matches_exhaustive_scan() {
        let p = coarse();
        let curves = [
            line(6.3),
            BoundaryCurve::new(Metric::MeanWait, 0.05, SearchBox::default(), Platform::default()).unwrap(),
            BoundaryCurve::new(Metric::Profit, 29.5, SearchBox::default(), Platform::default()).unwrap(),
        ];
        let centers = [(3.0, 2.0), (3.05, 2.1), (3.95, 2.95), (3.6, 2.4), (3.2, 2.9)];
        for curve in &curves {
            for &(m, s) in &centers {
                let c = WorkingPoint::new(m, s);
                if curve.side_margin(&c).unwrap() < 0.0 {
                    continue;
                }
                let fast = radius_bruteforce(&c, curve, &p).unwrap();
                match exhaustive(&c, curve, &p) {
                    Some((r, _)) => {
                        assert_eq!(fast.r, r, "{:?} at {:?}", curve.metric, c);
                        assert_ne!(fast.kind, ContactKind::BoxLimited);
                    }
                    None => assert_eq!(fast.kind, ContactKind::BoxLimited),
                }
            }
        }
    }

    #[test]
    fn deterministic_including_counts() {
        let curve = BoundaryCurve::new(Metric::MeanWait, 0.05, SearchBox::default(), Platform::default()).unwrap();
        let c = WorkingPoint::new(3.8, 2.6);
        let a = radius_bruteforce(&c, &curve, &RadiusSearchParams::default()).unwrap();
        let b = radius_bruteforce(&c, &curve, &RadiusSearchParams::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampled_single_vertex() {
        let poly = Polyline { vertices: vec![WorkingPoint::new(3.3, 2.4)], residuals: vec![0.0], ..Default::default() };
        let res = radius_sampled(&WorkingPoint::new(3.0, 2.0), &poly).unwrap();
        assert!((res.r - 0.5).abs() < 1e-12);
        assert_eq!(res.method, RadiusMethod::SampledOracle);
    }

    #[test]
    fn sampled_empty_is_error() {
        assert!(matches!(radius_sampled(&WorkingPoint::new(3.0, 2.0), &Polyline::default()), Err(Error::EmptyPolyline)));
    }

    #[test]
    fn sampled_tie_has_single_radius() {
        let poly = Polyline {
            vertices: vec![WorkingPoint::new(3.0, 2.5), WorkingPoint::new(4.0, 2.5)],
            residuals: vec![0.0, 0.0],
            ..Default::default()
        };
        // centre below the midpoint of a horizontal segment: projection
        let res = radius_sampled(&WorkingPoint::new(3.5, 2.1), &poly).unwrap();
        assert!((res.r - 0.4).abs() < 1e-12);
        let two = Polyline { vertices: vec![WorkingPoint::new(3.0, 2.5)], ..poly.clone() };
        let a = radius_sampled(&WorkingPoint::new(3.0, 2.1), &two).unwrap();
        assert!((a.r - 0.4).abs() < 1e-12);
    }

    #[test]
    fn sampled_agrees_with_bruteforce_on_line() {
        let curve = line(6.4);
        let poly = trace(&curve, 101).unwrap();
        let c = WorkingPoint::new(3.1, 2.2);
        let a = radius_sampled(&c, &poly).unwrap().r;
        let tight = RadiusSearchParams { tol_on_curve: 1e-9, ..Default::default() };
        let b = radius_bruteforce(&c, &curve, &tight).unwrap().r;
        assert!((a - b).abs() <= 3e-4, "{a} vs {b}");
    }

    #[test]
    fn pair_symmetric_between_parallel_lines() {
        // m + s ≤ 6.6 and m + s ≥ 6.0; midline m + s = 6.3
        let upper = line(6.6);
        let lower = line(6.0).with_side(crate::boundary::FeasibleSide::AboveLevel);
        let (r1, r2) = radius_pair(&WorkingPoint::new(3.5, 2.8), &upper, &lower, &RadiusSearchParams::default()).unwrap();
        assert!((r1.r - r2.r).abs() <= 1e-4);
    }

    #[test]
    fn calibrate_line_level() {
        let c = WorkingPoint::new(3.0, 2.0);
        let level = calibrate_level(&c, &line(6.0), 0.5, 5.2, 6.9, &coarse()).unwrap();
        assert!((level - (5.0 + 0.5 * 2f64.sqrt())).abs() < 2e-3);
    }

    #[test]
    fn csv_row_layout() {
        let curve = line(6.2);
        let c = WorkingPoint::new(3.0, 2.0);
        let res = radius_bruteforce(&c, &curve, &coarse()).unwrap();
        let row = res.csv_row(&c, &curve);
        assert_eq!(row.split(',').count(), RadiusResult::CSV_HEADER.split(',').count());
        assert!(row.starts_with("3,2,linear,6.2,"));
        assert!(row.ends_with(",brute_force"));
    }
}
