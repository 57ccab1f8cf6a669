//! Global-best particle swarm with inertia and a per-axis velocity cap.

use rand::Rng;

use super::{
    agent_rng, clamp, lower, scenario_run, uniform_in, upper, Algorithm, Evaluator, Objective, OptimizerConfig,
    OptimizerRun, Scenario, ScenarioRun, Vec2,
};
use crate::error::Result;

pub fn pso_optimize(scenario: &Scenario, cfg: &OptimizerConfig) -> Result<ScenarioRun> {
    scenario_run(scenario, cfg, Algorithm::Pso)
}

pub(super) fn run(objective: &dyn Objective, cfg: &OptimizerConfig) -> Result<OptimizerRun> {
    let n = cfg.population;
    let p = cfg.pso;
    let mut ev = Evaluator::new(objective, cfg.snap);
    let b = ev.bounds();
    let (lb, ub) = (lower(&b), upper(&b));
    let span = [b.width(), b.height()];
    let vmax = [p.v_max_frac * span[0], p.v_max_frac * span[1]];

    let mut x = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut pbest = Vec::with_capacity(n);
    let mut pfit = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = agent_rng(cfg.seed, 0, i);
        let (xi, fi) = ev.eval(uniform_in(&b, &mut rng))?;
        let vi: Vec2 = [
            rng.random_range(-0.1..=0.1) * span[0],
            rng.random_range(-0.1..=0.1) * span[1],
        ];
        x.push(xi);
        v.push(vi);
        pbest.push(xi);
        pfit.push(fi);
    }
    ev.record(0);

    for t in 1..=cfg.max_iters {
        let (gbest, _) = ev.best();
        for i in 0..n {
            let mut rng = agent_rng(cfg.seed, t, i);
            for d in 0..2 {
                let (r1, r2): (f64, f64) = (rng.random(), rng.random());
                let vd = p.inertia * v[i][d] + p.c1 * r1 * (pbest[i][d] - x[i][d]) + p.c2 * r2 * (gbest[d] - x[i][d]);
                v[i][d] = vd.clamp(-vmax[d], vmax[d]);
            }
            let (xi, fi) = ev.eval(clamp([x[i][0] + v[i][0], x[i][1] + v[i][1]], lb, ub))?;
            x[i] = xi;
            if fi > pfit[i] {
                pfit[i] = fi;
                pbest[i] = xi;
            }
        }
        ev.record(t);
    }
    Ok(ev.finish(cfg))
}
