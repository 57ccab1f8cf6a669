//! Differential evolution, rand/1/bin with greedy replacement.

use rand::Rng;

use super::{
    agent_rng, clamp, lower, scenario_run, uniform_in, upper, Algorithm, Evaluator, Objective, OptimizerConfig,
    OptimizerRun, Scenario, ScenarioRun,
};
use crate::error::Result;

pub fn de_optimize(scenario: &Scenario, cfg: &OptimizerConfig) -> Result<ScenarioRun> {
    scenario_run(scenario, cfg, Algorithm::De)
}

pub(super) fn run(objective: &dyn Objective, cfg: &OptimizerConfig) -> Result<OptimizerRun> {
    let n = cfg.population;
    let (f, cr) = (cfg.de.f, cfg.de.cr);
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
    ev.record(0);

    for t in 1..=cfg.max_iters {
        let mut next = x.clone();
        let mut next_fit = fit.clone();
        for i in 0..n {
            let mut rng = agent_rng(cfg.seed, t, i);
            let [r1, r2, r3] = distinct_three(&mut rng, n, i);
            let forced = rng.random_range(0..2usize);
            let mut trial = x[i];
            for d in 0..2 {
                if d == forced || rng.random::<f64>() < cr {
                    trial[d] = x[r1][d] + f * (x[r2][d] - x[r3][d]);
                }
            }
            let (tx, tf) = ev.eval(clamp(trial, lb, ub))?;
            if tf >= fit[i] {
                next[i] = tx;
                next_fit[i] = tf;
            }
        }
        x = next;
        fit = next_fit;
        ev.record(t);
    }
    Ok(ev.finish(cfg))
}

/// Three distinct indices, all different from `skip`.
fn distinct_three(rng: &mut impl Rng, n: usize, skip: usize) -> [usize; 3] {
    let mut out = [skip; 3];
    let mut k = 0;
    while k < 3 {
        let c = rng.random_range(0..n);
        if c != skip && !out[..k].contains(&c) {
            out[k] = c;
            k += 1;
        }
    }
    out
}
