//! M/M/m queueing analytics.
//!
//! Exact quantities follow the Erlang-C state probabilities with the
//! factorials evaluated through `ln Γ`, so a continuous server count `m`
//! is accepted. The closed forms ([`mean_wait_approx`], [`fw_approx`],
//! [`pm_approx`]) replace the partial exponential sum by `e^{mρ}` and `m!`
//! by Stirling's formula; they assume a unit mean task size.

use std::f64::consts::{E, PI};

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest utilization accepted as ergodic.
pub const MAX_UTILIZATION: f64 = 1.0 - 1e-9;

/// Server count, speed, arrival rate and mean task size of one M/M/m system.
///
/// Construction enforces positivity and `ρ = λ·r̄/(m·s) ≤ 1 − 1e−9`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueParams {
    m: f64,
    s: f64,
    lambda: f64,
    r_bar: f64,
}

impl QueueParams {
    pub fn new(m: f64, s: f64, lambda: f64, r_bar: f64) -> Result<Self> {
        for (name, v) in [("m", m), ("s", s), ("lambda", lambda), ("r_bar", r_bar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let rho = lambda * r_bar / (m * s);
        if rho > MAX_UTILIZATION {
            return Err(Error::NonErgodic { rho });
        }
        Ok(Self { m, s, lambda, r_bar })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn r_bar(&self) -> f64 {
        self.r_bar
    }

    /// Per-server service rate `μ = s / r̄`.
    pub fn mu(&self) -> f64 {
        self.s / self.r_bar
    }

    /// Offered load `mρ = λ/μ`.
    fn load(&self) -> f64 {
        self.lambda * self.r_bar / self.s
    }

    /// `ln p₀`, computed with a log-sum-exp over the normalization terms.
    fn ln_p0(&self) -> f64 {
        let rho = utilization(self);
        let ln_a = self.load().ln();
        let n_head = self.m.ceil() as u64;
        let mut terms: Vec<f64> = (0..n_head).map(|k| k as f64 * ln_a - ln_gamma(k as f64 + 1.0)).collect();
        terms.push(self.m * ln_a - ln_gamma(self.m + 1.0) - (1.0 - rho).ln());
        -log_sum_exp(&terms)
    }

    fn ln_pm(&self) -> f64 {
        self.ln_p0() + self.m * self.load().ln() - ln_gamma(self.m + 1.0)
    }

    /// Rate of the exponential tail of the waiting time, `(1 − ρ)·m·μ`.
    fn tail_rate(&self) -> f64 {
        (1.0 - utilization(self)) * self.m * self.mu()
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Derived queue quantities at one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueMetrics {
    pub rho: f64,
    pub p0: f64,
    pub pm: f64,
    pub pq: f64,
    pub t_mean: f64,
    pub fw_at_deadline: f64,
}

impl QueueMetrics {
    pub fn evaluate(p: &QueueParams, deadline: f64) -> Result<Self> {
        Ok(Self {
            rho: utilization(p),
            p0: p0_exact(p),
            pm: pm_exact(p),
            pq: pq_exact(p),
            t_mean: mean_wait_exact(p),
            fw_at_deadline: fw_exact(p, deadline)?,
        })
    }
}

/// Waiting-time law split into its atom at zero and its continuous part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaitDensity {
    /// Probability mass `1 − p_q` of not waiting at all.
    pub atom: f64,
    /// Density `mμ·p_m·e^{−(1−ρ)mμt}` of the continuous part at `t`.
    pub density: f64,
}

/// `ρ = λ·r̄/(m·s)`; always in `(0, 1)` for a constructed [`QueueParams`].
pub fn utilization(p: &QueueParams) -> f64 {
    p.lambda * p.r_bar / (p.m * p.s)
}

/// Empty-system probability.
pub fn p0_exact(p: &QueueParams) -> f64 {
    p.ln_p0().exp()
}

/// Probability of exactly `k` requests in the system.
pub fn pk_exact(p: &QueueParams, k: u64) -> f64 {
    let kf = k as f64;
    let ln = if kf < p.m {
        kf * p.load().ln() - ln_gamma(kf + 1.0)
    } else {
        p.m * p.m.ln() + kf * utilization(p).ln() - ln_gamma(p.m + 1.0)
    };
    (p.ln_p0() + ln).exp()
}

/// `p_m = p₀ (mρ)^m / m!`.
pub fn pm_exact(p: &QueueParams) -> f64 {
    p.ln_pm().exp()
}

/// Erlang-C delay probability `p_q = p_m / (1 − ρ)`.
pub fn pq_exact(p: &QueueParams) -> f64 {
    (p.ln_pm() - (1.0 - utilization(p)).ln()).exp()
}

pub fn waiting_pdf(p: &QueueParams, t: f64) -> Result<WaitDensity> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    let rate = p.tail_rate();
    Ok(WaitDensity {
        atom: 1.0 - pq_exact(p),
        density: p.m * p.mu() * pm_exact(p) * (-rate * t).exp(),
    })
}

/// Mean waiting time `T = p_m / (mμ(1 − ρ)²)`.
pub fn mean_wait_exact(p: &QueueParams) -> f64 {
    let rho = utilization(p);
    pm_exact(p) / (p.m * p.mu() * (1.0 - rho).powi(2))
}

/// `F_W(D) = 1 − p_q·e^{−(1−ρ)mμD}`; `d` may be `+∞`.
pub fn fw_exact(p: &QueueParams, d: f64) -> Result<f64> {
    if d < 0.0 || d.is_nan() {
        return Err(Error::NegativeDeadline(d));
    }
    Ok(1.0 - pq_exact(p) * (-p.tail_rate() * d).exp())
}

fn closed_form_rho(m: f64, s: f64, lambda: f64) -> Result<f64> {
    QueueParams::new(m, s, lambda, 1.0).map(|q| utilization(&q))
}

/// `√(2πm)·(1−ρ)·(e^ρ/(eρ))^m`, the common Stirling denominator term.
fn stirling_term(m: f64, rho: f64) -> f64 {
    (2.0 * PI * m).sqrt() * (1.0 - rho) * (m * (rho - 1.0 - rho.ln())).exp()
}

/// Stirling closed form of `p_m` at server count `m` and utilization `rho`.
pub fn pm_approx(m: f64, rho: f64) -> Result<f64> {
    if m.is_nan() || m <= 0.0 {
        return Err(Error::invalid(format!("m must be positive, got {m}")));
    }
    if !(rho > 0.0 && rho <= MAX_UTILIZATION) {
        return Err(Error::NonErgodic { rho });
    }
    Ok((1.0 - rho) / (stirling_term(m, rho) + 1.0))
}

/// Closed-form mean waiting time with unit task size:
///
/// `T = (λe)^m / [ (sm)^{m−1}(sm−λ)² e^{λ/s} √(2πm) + (sm−λ)(eλ)^m ]`
///
/// evaluated after dividing through by `(λe)^m`.
pub fn mean_wait_approx(m: f64, s: f64, lambda: f64) -> Result<f64> {
    closed_form_rho(m, s, lambda)?;
    let slack = s * m - lambda;
    let ln_ratio = (m - 1.0) * (s * m).ln() + lambda / s - m * (lambda * E).ln();
    Ok(1.0 / (slack * slack * (2.0 * PI * m).sqrt() * ln_ratio.exp() + slack))
}

/// Closed-form deadline-hit probability with unit task size:
///
/// `F_W(D) ≈ 1 − e^{−mμ(1−ρ)D} / (√(2πm)(1−ρ)(e^ρ/(eρ))^m + 1)`.
pub fn fw_approx(m: f64, s: f64, lambda: f64, d: f64) -> Result<f64> {
    let rho = closed_form_rho(m, s, lambda)?;
    if d < 0.0 || d.is_nan() {
        return Err(Error::NegativeDeadline(d));
    }
    let decay = (-(s * m - lambda) * d).exp();
    Ok(1.0 - decay / (stirling_term(m, rho) + 1.0))
}
