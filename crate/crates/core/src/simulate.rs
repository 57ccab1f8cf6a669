//! Discrete-event M/M/m simulation.
//!
//! Used as a Monte Carlo oracle for the analytic waiting-time results. A
//! non-integer server count is rounded to the nearest integer; both the
//! requested and the simulated count are reported.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::fmt::g12;
use crate::queueing::QueueParams;

/// Number-in-system levels tracked by the occupancy histogram; the last
/// bucket collects everything at or above it.
pub const OCCUPANCY_LEVELS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: QueueParams,
    pub n_arrivals: u64,
    /// Initial arrivals excluded from every statistic.
    pub warmup: u64,
    pub seed: u64,
    /// Batches for the batch-means confidence intervals.
    pub batches: usize,
}

impl SimConfig {
    pub fn new(params: QueueParams, seed: u64) -> Self {
        Self { params, n_arrivals: 1_000_000, warmup: 10_000, seed, batches: 20 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_arrivals <= self.warmup {
            return Err(Error::invalid(format!(
                "n_arrivals ({}) must exceed warmup ({})",
                self.n_arrivals, self.warmup
            )));
        }
        if self.batches < 2 || ((self.n_arrivals - self.warmup) as usize) < self.batches {
            return Err(Error::invalid("need at least two non-empty batches"));
        }
        Ok(())
    }

    /// Integer server count actually simulated.
    pub fn servers(&self) -> u32 {
        self.params.m().round().max(1.0) as u32
    }
}

/// Point estimate with a 95 % confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
}

impl Estimate {
    pub fn contains(&self, x: f64) -> bool {
        (x - self.mean).abs() <= self.half_width
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub requested_m: f64,
    pub simulated_m: u32,
    pub mean_wait: Estimate,
    pub frac_delayed: Estimate,
    pub frac_within_deadline: Estimate,
    /// Requests counted after warmup; always `n_arrivals − warmup`.
    pub completed: u64,
    /// Time-average fraction of time with `k` requests in the system.
    pub state_fractions: Vec<f64>,
}

impl SimResult {
    pub const CSV_HEADER: &'static str = "requested_m,simulated_m,seed,n_arrivals,warmup,deadline,mean_wait,mean_wait_hw,\
frac_delayed,frac_delayed_hw,frac_within_deadline,frac_within_deadline_hw,completed";

    pub fn csv_row(&self, cfg: &SimConfig, deadline: f64) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            g12(self.requested_m),
            self.simulated_m,
            cfg.seed,
            cfg.n_arrivals,
            cfg.warmup,
            g12(deadline),
            g12(self.mean_wait.mean),
            g12(self.mean_wait.half_width),
            g12(self.frac_delayed.mean),
            g12(self.frac_delayed.half_width),
            g12(self.frac_within_deadline.mean),
            g12(self.frac_within_deadline.half_width),
            self.completed
        )
    }
}

/// One post-warmup request: arrival time and waiting time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaitRecord {
    pub arrival_time: f64,
    pub wait: f64,
}

pub fn waits_csv(records: &[WaitRecord]) -> String {
    let mut out = String::from("arrival_time,wait\n");
    for r in records {
        out.push_str(&format!("{},{}\n", g12(r.arrival_time), g12(r.wait)));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EventKind {
    Arrival,
    Departure,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time.total_cmp(&other.time).then(self.seq.cmp(&other.seq))
    }
}

pub fn run_sim(cfg: &SimConfig, deadline: f64) -> Result<SimResult> {
    run_sim_with_waits(cfg, deadline).map(|(res, _)| res)
}

/// Runs the simulation and also returns the per-request waits after warmup.
pub fn run_sim_with_waits(cfg: &SimConfig, deadline: f64) -> Result<(SimResult, Vec<WaitRecord>)> {
    cfg.validate()?;
    if deadline.is_nan() || deadline < 0.0 {
        return Err(Error::NegativeDeadline(deadline));
    }
    let servers = cfg.servers();
    let p = cfg.params;
    QueueParams::new(servers as f64, p.s(), p.lambda(), p.r_bar())?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let interarrival = Exp::new(p.lambda()).map_err(|e| Error::invalid(e.to_string()))?;
    let service = Exp::new(p.mu()).map_err(|e| Error::invalid(e.to_string()))?;

    let n = cfg.n_arrivals as usize;
    let mut arrival_times = vec![0.0; n];
    let mut waits = vec![f64::NAN; n];
    let mut events = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |events: &mut BinaryHeap<Reverse<Event>>, time: f64, kind: EventKind| {
        events.push(Reverse(Event { time, seq, kind }));
        seq += 1;
    };

    let mut waiting: VecDeque<usize> = VecDeque::new();
    let mut busy = 0u32;
    let mut next_arrival = 0usize;
    push(&mut events, interarrival.sample(&mut rng), EventKind::Arrival);

    let mut occupancy = vec![0.0; OCCUPANCY_LEVELS];
    let mut in_system = 0usize;
    let mut last_time = 0.0;
    let mut observing = false;
    let mut observe_end = f64::INFINITY;

    while let Some(Reverse(ev)) = events.pop() {
        if observing && last_time < observe_end {
            let until = ev.time.min(observe_end);
            occupancy[in_system.min(OCCUPANCY_LEVELS - 1)] += until - last_time;
        }
        last_time = ev.time;
        match ev.kind {
            EventKind::Arrival => {
                let id = next_arrival;
                next_arrival += 1;
                arrival_times[id] = ev.time;
                if id as u64 == cfg.warmup {
                    observing = true;
                }
                in_system += 1;
                if busy < servers {
                    busy += 1;
                    waits[id] = 0.0;
                    push(&mut events, ev.time + service.sample(&mut rng), EventKind::Departure);
                } else {
                    waiting.push_back(id);
                }
                if next_arrival < n {
                    push(&mut events, ev.time + interarrival.sample(&mut rng), EventKind::Arrival);
                } else {
                    observe_end = ev.time;
                }
            }
            EventKind::Departure => {
                in_system -= 1;
                match waiting.pop_front() {
                    Some(id) => {
                        waits[id] = ev.time - arrival_times[id];
                        push(&mut events, ev.time + service.sample(&mut rng), EventKind::Departure);
                    }
                    None => busy -= 1,
                }
            }
        }
    }

    let observed = &waits[cfg.warmup as usize..];
    debug_assert!(observed.iter().all(|w| *w >= 0.0));
    let batch = observed.len() / cfg.batches;
    let t_crit = StudentsT::new(0.0, 1.0, (cfg.batches - 1) as f64)
        .map_err(|e| Error::invalid(e.to_string()))?
        .inverse_cdf(0.975);
    let estimate = |stat: &dyn Fn(f64) -> f64| -> Estimate {
        let means: Vec<f64> = (0..cfg.batches)
            .map(|b| {
                let end = if b + 1 == cfg.batches { observed.len() } else { (b + 1) * batch };
                let chunk = &observed[b * batch..end];
                chunk.iter().map(|&w| stat(w)).sum::<f64>() / chunk.len() as f64
            })
            .collect();
        let overall = observed.iter().map(|&w| stat(w)).sum::<f64>() / observed.len() as f64;
        let bm = means.iter().sum::<f64>() / means.len() as f64;
        let var = means.iter().map(|x| (x - bm).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
        Estimate { mean: overall, half_width: t_crit * (var / means.len() as f64).sqrt() }
    };

    let total_time: f64 = occupancy.iter().sum();
    if total_time > 0.0 {
        occupancy.iter_mut().for_each(|x| *x /= total_time);
    }
    let result = SimResult {
        requested_m: p.m(),
        simulated_m: servers,
        mean_wait: estimate(&|w| w),
        frac_delayed: estimate(&|w| if w > 0.0 { 1.0 } else { 0.0 }),
        frac_within_deadline: estimate(&|w| if w <= deadline { 1.0 } else { 0.0 }),
        completed: observed.len() as u64,
        state_fractions: occupancy,
    };
    let records = observed
        .iter()
        .zip(&arrival_times[cfg.warmup as usize..])
        .map(|(&wait, &arrival_time)| WaitRecord { arrival_time, wait })
        .collect();
    Ok((result, records))
}
