//! Brute-force radius against the polyline oracle and straight-line geometry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robsched::boundary::*;
use robsched::radius::*;

fn tight() -> RadiusSearchParams {
    RadiusSearchParams { tol_on_curve: 1e-6, ..Default::default() }
}

fn curves() -> Vec<BoundaryCurve> {
    let b = SearchBox::default();
    let pl = Platform::default();
    vec![
        BoundaryCurve::new(Metric::Profit, 28.618, b, pl).unwrap(),
        BoundaryCurve::new(Metric::Profit, 30.4, b, pl).unwrap(),
        BoundaryCurve::new(Metric::MeanWait, 0.0521, b, pl).unwrap(),
        BoundaryCurve::new(Metric::MeanWait, 0.02, b, pl).unwrap(),
    ]
}

fn max_segment(poly: &Polyline) -> f64 {
    poly.vertices.windows(2).map(|w| w[0].dist(&w[1])).fold(0.0, f64::max)
}

#[test]
fn bruteforce_agrees_with_polyline() {
    let p = tight();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for curve in curves() {
        let poly = trace(&curve, 2001).unwrap();
        let tol = (3.0 * p.r_step).max(max_segment(&poly));
        let mut checked = 0;
        while checked < 20 {
            let c = WorkingPoint::new(rng.random_range(3.0..=4.0), rng.random_range(2.0..=3.0));
            if curve.side_margin(&c).unwrap() <= 0.0 {
                continue;
            }
            checked += 1;
            let brute = radius_bruteforce(&c, &curve, &p).unwrap();
            let oracle = radius_sampled(&c, &poly).unwrap();
            if brute.kind == ContactKind::BoxLimited {
                assert!(brute.r <= oracle.r + tol);
                continue;
            }
            assert!((brute.r - oracle.r).abs() <= tol, "{:?} level {} at {:?}: {} vs {}", curve.metric, curve.level, c, brute.r, oracle.r);
            // the radius is a minimum over the curve, up to the polar grid's
            // resolution (matters where the curve meets the box edge)
            let arc = brute.r * std::f64::consts::TAU / p.n_theta as f64;
            for v in &poly.vertices {
                assert!(brute.r <= c.dist(v) + p.r_step + arc + TRACE_TOL, "{:?} {} at {:?}: r {} vertex {:?} d {} kind {:?} oracle {}", curve.metric, curve.level, c, brute.r, v, c.dist(v), brute.kind, oracle.r);
            }
            assert!((brute.contact.dist(&c) - brute.r).abs() <= p.r_step + 1e-12);
            assert!(residual(&curve, &brute.contact).unwrap().abs() <= p.tol_on_curve);
        }
    }
}

#[test]
fn straight_lines_give_point_line_distance() {
    let p = tight();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (dm, ds) = (rng.random_range(0.2..2.0), rng.random_range(0.2..2.0));
        let level = dm * 3.5 + ds * 2.5;
        let curve = BoundaryCurve::new(Metric::Linear { dm, ds }, level, SearchBox::default(), Platform::default()).unwrap();
        let c = WorkingPoint::new(rng.random_range(3.0..3.4), rng.random_range(2.0..2.4));
        let norm = dm.hypot(ds);
        let dist = (level - dm * c.m - ds * c.s) / norm;
        let foot = WorkingPoint::new(c.m + dist * dm / norm, c.s + dist * ds / norm);
        let res = radius_bruteforce(&c, &curve, &p).unwrap();
        if SearchBox::default().contains(&foot) {
            assert!((res.r - dist).abs() <= 2.0 * p.r_step, "{} vs {dist}", res.r);
        } else {
            assert!(res.r >= dist - 2.0 * p.r_step);
        }
    }
}

#[test]
fn radius_grows_as_the_threshold_relaxes() {
    let p = tight();
    let c = WorkingPoint::new(3.0, 2.0);
    let b = SearchBox::default();
    let pl = Platform::default();
    let mut last = 0.0;
    for level in [31.0, 30.0, 29.0, 28.618] {
        let r = radius_bruteforce(&c, &BoundaryCurve::new(Metric::Profit, level, b, pl).unwrap(), &p).unwrap().r;
        assert!(r > last);
        last = r;
    }
    assert!((last - 0.852).abs() < 0.002);
}
