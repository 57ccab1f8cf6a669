//! Subcommand implementations. Each returns the CSV text for the primary
//! output; side files are written directly.

use std::path::{Path, PathBuf};

use robsched::boundary::{trace, Metric, WorkingPoint};
use robsched::economics::{profit_closed, profit_exact};
use robsched::fmt::g12;
use robsched::optim::{compare, optimize, Algorithm, OptimizerConfig, ScenarioKind};
use robsched::queueing::{self, QueueMetrics};
use robsched::radius::{radius_bruteforce, radius_sampled, RadiusResult};
use robsched::simulate::{run_sim_with_waits, waits_csv, SimConfig, SimResult};
use robsched::Error;

use crate::config::ScenarioFile;
use crate::CliError;

type CmdResult = Result<String, CliError>;

/// Which requirement a command is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MetricArg {
    Profit,
    Wait,
}

impl MetricArg {
    pub fn metric(self) -> Metric {
        match self {
            MetricArg::Profit => Metric::Profit,
            MetricArg::Wait => Metric::MeanWait,
        }
    }

    /// Scenario whose threshold applies when no level is given.
    fn single_kind(self) -> ScenarioKind {
        match self {
            MetricArg::Profit => ScenarioKind::ProfitOnly,
            MetricArg::Wait => ScenarioKind::DeadlineOnly,
        }
    }
}

fn gap(a: f64, b: f64) -> String {
    g12((a - b).abs())
}

pub fn eval(cfg: &ScenarioFile, m: f64, s: f64) -> CmdResult {
    let platform = cfg.platform();
    let econ = &platform.econ;
    let q = platform.queue(&WorkingPoint::new(m, s))?;
    let exact = QueueMetrics::evaluate(&q, econ.deadline)?;
    let money = profit_exact(&q, econ)?;
    let lambda = platform.lambda;
    let pm_closed = queueing::pm_approx(m, exact.rho)?;
    let rows: Vec<(&str, f64, Option<f64>)> = vec![
        ("rho", exact.rho, None),
        ("p0", exact.p0, None),
        ("pm", exact.pm, Some(pm_closed)),
        ("pq", exact.pq, Some(pm_closed / (1.0 - exact.rho))),
        ("t_mean", exact.t_mean, Some(queueing::mean_wait_approx(m, s, lambda)?)),
        ("fw_at_deadline", exact.fw_at_deadline, Some(queueing::fw_approx(m, s, lambda, econ.deadline)?)),
        ("revenue", money.revenue, None),
        ("cost", money.cost, None),
        ("profit", money.profit, Some(profit_closed(m, s, lambda, econ)?)),
    ];
    let mut out = String::from("quantity,exact,closed,abs_gap\n");
    for (name, e, c) in rows {
        match c {
            Some(c) => out.push_str(&format!("{name},{},{},{}\n", g12(e), g12(c), gap(e, c))),
            None => out.push_str(&format!("{name},{},,\n", g12(e))),
        }
    }
    Ok(out)
}

pub fn surface(cfg: &ScenarioFile, metric: MetricArg, grid: usize) -> CmdResult {
    if grid < 2 {
        return Err(CliError::Usage("--grid must be at least 2".into()));
    }
    let platform = cfg.platform();
    let mut out = String::from("m,s,value\n");
    for pt in cfg.search_box.grid(grid) {
        let v = match metric {
            MetricArg::Profit => platform.profit_closed(&pt)?,
            MetricArg::Wait => platform.mean_wait_closed(&pt)?,
        };
        out.push_str(&format!("{},{},{}\n", g12(pt.m), g12(pt.s), g12(v)));
    }
    Ok(out)
}

pub fn trace_cmd(cfg: &ScenarioFile, metric: MetricArg, level: Option<f64>, columns: usize) -> CmdResult {
    let level = level.unwrap_or_else(|| cfg.level(metric.single_kind(), metric.metric()));
    Ok(trace(&cfg.curve(metric.metric(), level)?, columns)?.to_csv())
}

pub fn radius(
    cfg: &ScenarioFile,
    m: f64,
    s: f64,
    metric: MetricArg,
    level: Option<f64>,
    oracle: bool,
) -> CmdResult {
    let level = level.unwrap_or_else(|| cfg.level(metric.single_kind(), metric.metric()));
    let curve = cfg.curve(metric.metric(), level)?;
    let center = WorkingPoint::new(m, s);
    let mut out = format!("{}\n", RadiusResult::CSV_HEADER);
    let brute = radius_bruteforce(&center, &curve, &cfg.radius)?;
    out.push_str(&brute.csv_row(&center, &curve));
    out.push('\n');
    if oracle {
        let poly = trace(&curve, robsched::optim::TRACE_COLUMNS)?;
        out.push_str(&radius_sampled(&center, &poly)?.csv_row(&center, &curve));
        out.push('\n');
    }
    Ok(out)
}

pub const OPTIMIZE_HEADER: &str = "scenario,algorithm,seed,best_m,best_s,fitness,r_profit,r_wait,evals";

pub fn optimize_cmd(
    cfg: &ScenarioFile,
    kind: ScenarioKind,
    algorithm: Algorithm,
    trace_out: Option<&Path>,
) -> CmdResult {
    let scenario = cfg.scenario(kind)?;
    let opt = cfg.optimizer_config(algorithm);
    let run = optimize(&scenario, &opt)?;
    let radii = if scenario.is_feasible(&run.best)? { scenario.radii(&run.best)? } else { Vec::new() };
    let radius_of = |metric: Metric| {
        scenario.curves.iter().zip(&radii).find(|(c, _)| c.metric == metric).map_or(String::new(), |(_, r)| g12(r.r))
    };
    if let Some(path) = trace_out {
        write_file(path, &run.trace.to_csv())?;
    }
    Ok(format!(
        "{OPTIMIZE_HEADER}\n{},{},{},{},{},{},{},{},{}\n",
        kind.name(),
        algorithm,
        opt.seed,
        g12(run.best.m),
        g12(run.best.s),
        g12(run.best_fitness),
        radius_of(Metric::Profit),
        radius_of(Metric::MeanWait),
        run.evaluations
    ))
}

pub fn compare_cmd(
    cfg: &ScenarioFile,
    kind: ScenarioKind,
    algorithms: &[Algorithm],
    runs: usize,
    stats_out: Option<&Path>,
    traces_dir: Option<&Path>,
) -> CmdResult {
    let scenario = cfg.scenario(kind)?;
    let cfgs: Vec<OptimizerConfig> = algorithms.iter().map(|&a| cfg.optimizer_config(a)).collect();
    let cmp = compare(&scenario, &cfgs, runs)?;
    if let Some(path) = stats_out {
        write_file(path, &cmp.stats_csv())?;
    }
    if let Some(dir) = traces_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        for (row, t) in cmp.rows.iter().zip(&cmp.traces) {
            let path: PathBuf = dir.join(format!("{}_seed{}.csv", row.algorithm, row.seed));
            write_file(&path, &t.to_csv())?;
        }
    }
    Ok(cmp.to_csv())
}

pub fn simulate(
    cfg: &ScenarioFile,
    m: f64,
    s: f64,
    arrivals: Option<u64>,
    warmup: Option<u64>,
    waits_out: Option<&Path>,
) -> CmdResult {
    let platform = cfg.platform();
    let q = platform.queue(&WorkingPoint::new(m, s))?;
    let sim = SimConfig {
        params: q,
        n_arrivals: arrivals.unwrap_or(cfg.simulation.n_arrivals),
        warmup: warmup.unwrap_or(cfg.simulation.warmup),
        seed: cfg.seed,
        batches: cfg.simulation.batches,
    };
    let deadline = platform.econ.deadline;
    let (res, waits) = run_sim_with_waits(&sim, deadline)?;
    if let Some(path) = waits_out {
        write_file(path, &waits_csv(&waits))?;
    }
    // analytic columns only where the simulated system is the modelled one
    let exact = if m.fract() == 0.0 {
        let e = QueueMetrics::evaluate(&q, deadline)?;
        format!("{},{},{}", g12(e.t_mean), g12(e.pq), g12(e.fw_at_deadline))
    } else {
        ",,".to_string()
    };
    Ok(format!(
        "{},exact_mean_wait,exact_frac_delayed,exact_frac_within_deadline\n{},{}\n",
        SimResult::CSV_HEADER,
        res.csv_row(&sim, deadline),
        exact
    ))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}
