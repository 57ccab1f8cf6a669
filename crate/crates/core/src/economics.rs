//! Revenue, energy cost and profit of the service provider.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::queueing::{self, QueueParams};

/// Pricing, power and deadline parameters.
///
/// The switching factor, load capacitance and proportionality constant of
/// the dynamic power model are folded into `xi`, so power is `ξ·s^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomicParams {
    /// Service fee per unit of service.
    pub a: f64,
    /// Rental price of one server per unit time.
    pub beta: f64,
    /// Electricity price per watt.
    pub delta: f64,
    /// Share of power drawn dynamically, in `[0, 1]`.
    pub e_frac: f64,
    /// Static power `P*`.
    pub p_static: f64,
    /// Dynamic power coefficient `ξ`.
    pub xi: f64,
    /// Speed exponent `α = 2ϕ + 1`.
    pub alpha: f64,
    /// Waiting-time deadline `D`; `inf` disables the SLA cut-off.
    pub deadline: f64,
}

impl Default for EconomicParams {
    /// λ = 4 platform parameter block: a = 15, β = 3, δ = 1, e = 0.7, P* = 4,
    /// ξ = 2, ϕ = 0.55 (α = 2.1), D = 1.
    fn default() -> Self {
        Self {
            a: 15.0,
            beta: 3.0,
            delta: 1.0,
            e_frac: 0.7,
            p_static: 4.0,
            xi: 2.0,
            alpha: alpha_from_phi(0.55),
            deadline: 1.0,
        }
    }
}

/// `α = 2ϕ + 1` for a voltage/frequency exponent `ϕ ∈ (0, 1]`.
pub fn alpha_from_phi(phi: f64) -> f64 {
    2.0 * phi + 1.0
}

impl EconomicParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a", self.a),
            ("beta", self.beta),
            ("delta", self.delta),
            ("p_static", self.p_static),
            ("xi", self.xi),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.e_frac) {
            return Err(Error::invalid(format!("e_frac must lie in [0, 1], got {}", self.e_frac)));
        }
        if !(self.alpha.is_finite() && self.alpha > 1.0) {
            return Err(Error::invalid(format!("alpha must exceed 1, got {}", self.alpha)));
        }
        if self.deadline.is_nan() || self.deadline < 0.0 {
            return Err(Error::NegativeDeadline(self.deadline));
        }
        Ok(())
    }

    /// Sets `α` from `ϕ`, rejecting `ϕ ∉ (0, 1]`.
    pub fn with_phi(mut self, phi: f64) -> Result<Self> {
        if !(phi > 0.0 && phi <= 1.0) {
            return Err(Error::invalid(format!("phi must lie in (0, 1], got {phi}")));
        }
        self.alpha = alpha_from_phi(phi);
        Ok(self)
    }

    pub fn with_deadline(mut self, deadline: f64) -> Self {
        self.deadline = deadline;
        self
    }
}

/// Revenue, cost and profit per unit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfitBreakdown {
    pub revenue: f64,
    pub cost: f64,
    pub profit: f64,
}

/// Expected charge of one request, `a·r̄·F_W(D)`.
pub fn charge_expectation(q: &QueueParams, econ: &EconomicParams) -> Result<f64> {
    Ok(econ.a * q.r_bar() * queueing::fw_exact(q, econ.deadline)?)
}

/// Revenue rate `ε = λ·F_W(D)·a·r̄`.
pub fn revenue(q: &QueueParams, econ: &EconomicParams) -> Result<f64> {
    Ok(q.lambda() * charge_expectation(q, econ)?)
}

/// Dynamic power `ξ·s^α` of one server at full utilization.
pub fn dynamic_power(s: f64, econ: &EconomicParams) -> f64 {
    econ.xi * s.powf(econ.alpha)
}

/// Cost rate `C = m(β + δ(e·ρ·ξ·s^α + P*(1 − e)))`.
pub fn cost(q: &QueueParams, econ: &EconomicParams) -> f64 {
    let rho = queueing::utilization(q);
    let power = econ.e_frac * rho * dynamic_power(q.s(), econ) + econ.p_static * (1.0 - econ.e_frac);
    q.m() * (econ.beta + econ.delta * power)
}

pub fn profit_exact(q: &QueueParams, econ: &EconomicParams) -> Result<ProfitBreakdown> {
    let revenue = revenue(q, econ)?;
    let cost = cost(q, econ);
    Ok(ProfitBreakdown { revenue, cost, profit: revenue - cost })
}

/// Fully expanded closed-form profit with unit task size:
///
/// ```text
/// G = λa[1 − e^{(λ−sm)D}(eλ)^m / (√(2πm)(sm−λ)e^{λ/s}(sm)^{m−1} + (eλ)^m)]
///     − m(β + δ(e·λ·s^{α−1}·ξ/m + P*(1 − e)))
/// ```
///
/// The `(eλ)^m` factor is divided out so the expression stays finite for
/// large `m`.
pub fn profit_closed(m: f64, s: f64, lambda: f64, econ: &EconomicParams) -> Result<f64> {
    QueueParams::new(m, s, lambda, 1.0)?;
    if econ.deadline.is_nan() || econ.deadline < 0.0 {
        return Err(Error::NegativeDeadline(econ.deadline));
    }
    let slack = s * m - lambda;
    let ln_ratio = lambda / s + (m - 1.0) * (s * m).ln() - m * (E * lambda).ln();
    let miss = (-slack * econ.deadline).exp() / ((2.0 * PI * m).sqrt() * slack * ln_ratio.exp() + 1.0);
    let revenue = lambda * econ.a * (1.0 - miss);
    let power = econ.e_frac * lambda * s.powf(econ.alpha - 1.0) * econ.xi / m + econ.p_static * (1.0 - econ.e_frac);
    Ok(revenue - m * (econ.beta + econ.delta * power))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(m: f64, s: f64, lambda: f64) -> QueueParams {
        QueueParams::new(m, s, lambda, 1.0).unwrap()
    }

    fn econ() -> EconomicParams {
        EconomicParams::default()
    }

    #[test]
    fn default_alpha_is_two_point_one() {
        assert!((econ().alpha - 2.1).abs() < 1e-15);
        assert!(econ().validate().is_ok());
        assert!(econ().with_phi(0.0).is_err());
        assert!((econ().with_phi(1.0).unwrap().alpha - 3.0).abs() < 1e-15);
    }

    #[test]
    fn validate_rejects_bad_fields() {
        assert!(EconomicParams { e_frac: 1.5, ..econ() }.validate().is_err());
        assert!(EconomicParams { alpha: 1.0, ..econ() }.validate().is_err());
        assert!(EconomicParams { beta: 0.0, ..econ() }.validate().is_err());
        assert!(EconomicParams { deadline: -1.0, ..econ() }.validate().is_err());
        assert!(EconomicParams { deadline: f64::INFINITY, ..econ() }.validate().is_ok());
    }

    #[test]
    fn charge_examples() {
        let inf = econ().with_deadline(f64::INFINITY);
        assert_eq!(charge_expectation(&q(3.0, 2.0, 4.0), &inf).unwrap(), 15.0);
        let zero = econ().with_deadline(0.0);
        assert!((charge_expectation(&q(1.0, 2.0, 1.0), &zero).unwrap() - 7.5).abs() < 1e-13);
        let fw = queueing::fw_exact(&q(3.0, 2.0, 4.0), 1.0).unwrap();
        assert_eq!(charge_expectation(&q(3.0, 2.0, 4.0), &econ()).unwrap(), 15.0 * fw);
    }

    #[test]
    fn revenue_examples() {
        let inf = econ().with_deadline(f64::INFINITY);
        assert_eq!(revenue(&q(3.0, 2.0, 4.0), &inf).unwrap(), 60.0);
        let fw = queueing::fw_exact(&q(3.0, 2.0, 4.0), 1.0).unwrap();
        assert!((revenue(&q(3.0, 2.0, 4.0), &econ()).unwrap() - 60.0 * fw).abs() < 1e-12);
    }

    #[test]
    fn dynamic_power_examples() {
        assert_eq!(dynamic_power(1.0, &econ()), 2.0);
        let v = dynamic_power(2.0, &econ());
        assert!((v - 2.0 * (2.1 * 2f64.ln()).exp()).abs() < 1e-12);
        assert!((v - 8.574187700290345).abs() < 1e-12);
        assert!(dynamic_power(0.5, &econ()) < dynamic_power(1.0, &econ()));
    }

    #[test]
    fn cost_examples() {
        let no_dyn = EconomicParams { e_frac: 0.0, ..econ() };
        assert_eq!(cost(&q(3.0, 2.0, 4.0), &no_dyn), 3.0 * (3.0 + 4.0));
        assert_eq!(cost(&q(3.0, 2.5, 4.0), &no_dyn), 3.0 * (3.0 + 4.0));
        let all_dyn = EconomicParams { e_frac: 1.0, ..econ() };
        let expect = 3.0 * (3.0 + (2.0 / 3.0) * 2.0 * 2f64.powf(2.1));
        assert!((cost(&q(3.0, 2.0, 4.0), &all_dyn) - expect).abs() < 1e-12);
        // independent arithmetic: 3·(3 + 0.7·(2/3)·8.5741877 + 0.3·4)
        let by_hand = 3.0 * (3.0 + 0.7 * (2.0 / 3.0) * 8.574187700290345 + 0.3 * 4.0);
        assert!((cost(&q(3.0, 2.0, 4.0), &econ()) - by_hand).abs() < 1e-12);
        assert!((by_hand - 24.6038627804065).abs() < 1e-9);
    }

    #[test]
    fn profit_recomposes_bit_exactly() {
        let p = q(3.0, 2.0, 4.0);
        let b = profit_exact(&p, &econ()).unwrap();
        assert_eq!(b.profit, revenue(&p, &econ()).unwrap() - cost(&p, &econ()));
        assert_eq!(b.revenue, revenue(&p, &econ()).unwrap());
    }

    #[test]
    fn profit_limits() {
        let e = EconomicParams { e_frac: 0.0, deadline: f64::INFINITY, ..econ() };
        let b = profit_exact(&q(3.5, 2.2, 4.0), &e).unwrap();
        assert!((b.profit - (60.0 - 3.5 * (3.0 + 4.0))).abs() < 1e-12);

        let inf = econ().with_deadline(f64::INFINITY);
        let (m, s) = (3.4_f64, 2.6_f64);
        let expect = 60.0 - m * (3.0 + (0.7 * 4.0 * s.powf(1.1) * 2.0 / m + 4.0 * 0.3));
        assert!((profit_closed(m, s, 4.0, &inf).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn exact_profit_has_interior_maximum_in_speed() {
        // ergodic part of s ∈ [0.5, 6] at m = 3, λ = 4
        let grid: Vec<f64> = (0..=2000).map(|i| 0.5 + 5.5 * i as f64 / 2000.0).filter(|s| 3.0 * s > 4.0 + 1e-6).collect();
        let vals: Vec<f64> = grid.iter().map(|&s| profit_exact(&q(3.0, s, 4.0), &econ()).unwrap().profit).collect();
        let (imax, _) = vals.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        assert!(imax > 0 && imax < vals.len() - 1, "argmax at {}", grid[imax]);
    }

    #[test]
    fn closed_profit_matches_revenue_minus_cost_with_stirling_fw() {
        for (m, s) in [(3.0, 2.0), (3.3, 2.7), (4.0, 3.0)] {
            let fw = queueing::fw_approx(m, s, 4.0, 1.0).unwrap();
            let cost = cost(&q(m, s, 4.0), &econ());
            let g = profit_closed(m, s, 4.0, &econ()).unwrap();
            assert!((g - (60.0 * fw - cost)).abs() < 1e-11);
        }
    }

    #[test]
    fn closed_profit_falls_for_large_speed() {
        let mut last = f64::INFINITY;
        for i in 0..=40 {
            let s = 3.0 + i as f64 * 0.1;
            let g = profit_closed(3.0, s, 4.0, &econ()).unwrap();
            assert!(g < last);
            last = g;
        }
    }

    #[test]
    fn closed_profit_rejects_non_ergodic() {
        assert!(matches!(profit_closed(1.0, 2.0, 4.0, &econ()), Err(Error::NonErgodic { .. })));
    }
}
