//! Dung beetle optimizer.
//!
//! Agents split into four roles. Ball rollers move away from the worst
//! agent (or "dance" along a random tangent when they stall), brood balls
//! and small beetles sample around the global best inside a region that
//! shrinks as `(1 − t/T)²`, and thieves steal around the iteration best.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{
    agent_rng, clamp, lower, scenario_run, uniform_in, upper, Algorithm, Evaluator, Objective, OptimizerConfig,
    OptimizerRun, Scenario, ScenarioRun, Vec2,
};
use crate::error::Result;

pub fn dbo_optimize(scenario: &Scenario, cfg: &OptimizerConfig) -> Result<ScenarioRun> {
    scenario_run(scenario, cfg, Algorithm::Dbo)
}

pub(super) fn run(objective: &dyn Objective, cfg: &OptimizerConfig) -> Result<OptimizerRun> {
    let p = cfg.dbo;
    let n = cfg.population;
    let [rollers, brood, small, _] = p.role_counts(n);
    let mut ev = Evaluator::new(objective, cfg.snap);
    let b = ev.bounds();
    let (lb, ub) = (lower(&b), upper(&b));

    let mut x = Vec::with_capacity(n);
    let mut fit = Vec::with_capacity(n);
    for i in 0..n {
        let (xi, fi) = ev.eval(uniform_in(&b, &mut agent_rng(cfg.seed, 0, i)))?;
        x.push(xi);
        fit.push(fi);
    }
    // personal bests and their previous-iteration values
    let mut px = x.clone();
    let mut pfit = fit.clone();
    let mut prev = px.clone();
    ev.record(0);

    for t in 1..=cfg.max_iters {
        let worst = x[argmin(&fit)];
        for i in 0..rollers {
            let mut rng = agent_rng(cfg.seed, t, i);
            let cur = px[i];
            let cand = if rng.random::<f64>() < p.roll_prob {
                let alpha = if rng.random::<f64>() < p.alpha_prob { -1.0 } else { 1.0 };
                add(cur, |d| alpha * p.k * prev[i][d] + p.b_coef * (cur[d] - worst[d]).abs())
            } else {
                let deg = rng.random_range(1..=180u32);
                if deg == 90 || deg == 180 {
                    cur
                } else {
                    let tan = (deg as f64).to_radians().tan();
                    add(cur, |d| tan * (cur[d] - prev[i][d]).abs())
                }
            };
            (x[i], fit[i]) = ev.eval(clamp(cand, lb, ub))?;
        }

        let lbest = x[argmax(&fit)];
        let (gbest, _) = ev.best();
        let shrink = (1.0 - t as f64 / cfg.max_iters as f64).powi(2);
        let lb_r = add(gbest, |d| -shrink * (gbest[d] - lb[d]));
        let ub_r = add(gbest, |d| shrink * (ub[d] - gbest[d]));

        for i in rollers..rollers + brood {
            let mut rng = agent_rng(cfg.seed, t, i);
            let cur = px[i];
            let (b1, b2): (Vec2, Vec2) = ([rng.random(), rng.random()], [rng.random(), rng.random()]);
            let cand = add(gbest, |d| b1[d] * (cur[d] - lb_r[d]) + b2[d] * (cur[d] - ub_r[d]));
            (x[i], fit[i]) = ev.eval(clamp(cand, lb_r, ub_r))?;
        }
        for i in rollers + brood..rollers + brood + small {
            let mut rng = agent_rng(cfg.seed, t, i);
            let cur = px[i];
            let c1: f64 = rng.sample(StandardNormal);
            let c2: Vec2 = [rng.random(), rng.random()];
            let cand = add(cur, |d| c1 * (cur[d] - lb_r[d]) + c2[d] * (cur[d] - ub_r[d]));
            (x[i], fit[i]) = ev.eval(clamp(cand, lb, ub))?;
        }
        for i in rollers + brood + small..n {
            let mut rng = agent_rng(cfg.seed, t, i);
            let cur = px[i];
            let g: Vec2 = [rng.sample(StandardNormal), rng.sample(StandardNormal)];
            let cand = add(lbest, |d| p.s_thief * g[d] * ((cur[d] - gbest[d]).abs() + (cur[d] - lbest[d]).abs()));
            (x[i], fit[i]) = ev.eval(clamp(cand, lb, ub))?;
        }

        prev.clone_from(&px);
        for i in 0..n {
            if fit[i] > pfit[i] {
                pfit[i] = fit[i];
                px[i] = x[i];
            }
        }
        ev.record(t);
    }
    Ok(ev.finish(cfg))
}

fn add(x: Vec2, step: impl Fn(usize) -> f64) -> Vec2 {
    [x[0] + step(0), x[1] + step(1)]
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |best, i| if v[i] > v[best] { i } else { best })
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |best, i| if v[i] < v[best] { i } else { best })
}
