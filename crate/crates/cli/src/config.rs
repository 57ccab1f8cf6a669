//! Scenario files: one TOML document holding the platform, the search box,
//! the requirement thresholds and the solver settings.

use std::path::Path;

use robsched::boundary::{BoundaryCurve, Metric, Platform, SearchBox};
use robsched::economics::EconomicParams;
use robsched::optim::{
    Algorithm, DboParams, DeParams, JointObjective, OptimizerConfig, PsoParams, Scenario, ScenarioKind,
};
use robsched::radius::RadiusSearchParams;
use serde::{Deserialize, Serialize};

/// The bundled scenario with the reference parameter block.
pub const PAPER_SCENARIO: &str = include_str!("../scenarios/paper.scenario");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub seed: u64,
    pub platform: PlatformSection,
    pub economics: EconomicParams,
    pub search_box: SearchBox,
    pub thresholds: Thresholds,
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub radius: RadiusSearchParams,
    #[serde(default)]
    pub optimizer: OptimizerSection,
    #[serde(default)]
    pub simulation: SimulationSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformSection {
    pub lambda: f64,
    pub r_bar: f64,
}

/// Requirement levels: minimum profit and maximum mean wait.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub profit_only: f64,
    pub deadline_only: f64,
    pub joint_profit: f64,
    pub joint_wait: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub kind: ScenarioKind,
    #[serde(default)]
    pub joint_objective: JointObjective,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSection {
    pub algorithm: Algorithm,
    pub population: usize,
    pub max_iters: usize,
    pub snap: f64,
    pub dbo: DboParams,
    pub de: DeParams,
    pub pso: PsoParams,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let d = OptimizerConfig::default();
        Self {
            algorithm: d.algorithm,
            population: d.population,
            max_iters: d.max_iters,
            snap: d.snap,
            dbo: d.dbo,
            de: d.de,
            pso: d.pso,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub n_arrivals: u64,
    pub warmup: u64,
    pub batches: usize,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self { n_arrivals: 1_000_000, warmup: 10_000, batches: 20 }
    }
}

impl ScenarioFile {
    pub fn paper() -> Self {
        Self::parse(PAPER_SCENARIO).expect("bundled scenario parses")
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| e.to_string())?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), String> {
        let p = self.platform;
        if !(p.lambda > 0.0 && p.r_bar > 0.0) {
            return Err("platform.lambda and platform.r_bar must be positive".into());
        }
        self.economics.validate().map_err(|e| e.to_string())?;
        self.search_box.validate().map_err(|e| e.to_string())?;
        self.radius.validate().map_err(|e| e.to_string())?;
        self.optimizer_config(Algorithm::Dbo).validate().map_err(|e| e.to_string())?;
        let t = self.thresholds;
        if [t.profit_only, t.deadline_only, t.joint_profit, t.joint_wait].iter().any(|x| !x.is_finite()) {
            return Err("thresholds must be finite".into());
        }
        if !(t.deadline_only > 0.0 && t.joint_wait > 0.0) {
            return Err("wait thresholds must be positive".into());
        }
        let s = self.simulation;
        if s.n_arrivals <= s.warmup || s.batches < 2 {
            return Err("simulation needs n_arrivals > warmup and at least two batches".into());
        }
        Ok(())
    }

    pub fn platform(&self) -> Platform {
        Platform { lambda: self.platform.lambda, r_bar: self.platform.r_bar, econ: self.economics }
    }

    pub fn optimizer_config(&self, algorithm: Algorithm) -> OptimizerConfig {
        let o = &self.optimizer;
        OptimizerConfig {
            algorithm,
            population: o.population,
            max_iters: o.max_iters,
            seed: self.seed,
            snap: o.snap,
            dbo: o.dbo,
            de: o.de,
            pso: o.pso,
        }
    }

    /// Threshold for `metric` under scenario `kind`.
    pub fn level(&self, kind: ScenarioKind, metric: Metric) -> f64 {
        let t = &self.thresholds;
        match (kind, metric) {
            (ScenarioKind::Joint, Metric::Profit) => t.joint_profit,
            (ScenarioKind::Joint, _) => t.joint_wait,
            (_, Metric::Profit) => t.profit_only,
            _ => t.deadline_only,
        }
    }

    pub fn curve(&self, metric: Metric, level: f64) -> robsched::Result<BoundaryCurve> {
        BoundaryCurve::new(metric, level, self.search_box, self.platform())
    }

    pub fn scenario(&self, kind: ScenarioKind) -> robsched::Result<Scenario> {
        let metrics: &[Metric] = match kind {
            ScenarioKind::ProfitOnly => &[Metric::Profit],
            ScenarioKind::DeadlineOnly => &[Metric::MeanWait],
            ScenarioKind::Joint => &[Metric::Profit, Metric::MeanWait],
        };
        let curves = metrics
            .iter()
            .map(|&m| self.curve(m, self.level(kind, m)))
            .collect::<robsched::Result<Vec<_>>>()?;
        Ok(Scenario::new(kind, curves, self.radius)?.with_joint(self.scenario.joint_objective))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenario_round_trips() {
        let a = ScenarioFile::paper();
        let b = ScenarioFile::parse(&a.to_toml()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = PAPER_SCENARIO.replace("[platform]", "[platform]\nmu = 3.0");
        assert!(ScenarioFile::parse(&text).unwrap_err().contains("mu"));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = ScenarioFile::parse("seed = 1\n[platform\n").unwrap_err();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn levels_follow_kind() {
        let f = ScenarioFile::paper();
        assert_eq!(f.level(ScenarioKind::Joint, Metric::Profit), f.thresholds.joint_profit);
        assert_eq!(f.level(ScenarioKind::DeadlineOnly, Metric::MeanWait), f.thresholds.deadline_only);
    }
}
