//! Scenario files: a JSON document describing the matching environment, the
//! expert set, the learning run, the estimator, and reporting options.
//! Unknown keys are rejected; `resolve` fills strategy defaults and validates
//! everything against the environment.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

use mdpmix_core::{
    build_matching_env, EstimationConfig, EstimationMode, ExpertKind, MatchingConfig,
    MatchingEnv, StrategyKind,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub matching: MatchingConfig,
    pub experts: ExpertsSection,
    pub learning: LearningSection,
    pub estimation: EstimationSection,
    pub reporting: ReportingSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpertsSection {
    pub kinds: Vec<ExpertKind>,
    /// Seed for the permutation-priority expert's order (unused otherwise).
    #[serde(default)]
    pub sigma_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningSection {
    pub strategy: StrategyName,
    /// Exponent of the polynomial potential; default `max(2, round(2 ln K))`.
    #[serde(default)]
    pub poly_exponent: Option<f64>,
    /// Fixed learning rate (exp-fixed); default `(1/M) sqrt(2 ln K / T)`.
    #[serde(default)]
    pub eta: Option<f64>,
    /// Rate constant of `eta_t = rate/sqrt(t)` schedules (exp-tv, greedy);
    /// defaults `(1/M) sqrt(ln K)` and `(1/M) sqrt(2/K)` with M = reward_max.
    #[serde(default)]
    pub rate: Option<f64>,
    pub rounds: usize,
    pub repetitions: usize,
    pub root_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyName {
    Poly,
    ExpFixed,
    ExpTv,
    Greedy,
}

impl std::str::FromStr for StrategyName {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "poly" => Self::Poly,
            "exp-fixed" => Self::ExpFixed,
            "exp-tv" => Self::ExpTv,
            "greedy" => Self::Greedy,
            other => bail!("unknown strategy {other:?} (poly, exp-fixed, exp-tv, greedy)"),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimationSection {
    /// Target bias on the normalized scale; exactly one of `epsilon` and
    /// `reward_scale_bias` must be set.
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Target bias on the reward scale (`reward_max * epsilon`).
    #[serde(default)]
    pub reward_scale_bias: Option<f64>,
    pub kappa: f64,
    pub mode: EstimationMode,
    #[serde(default)]
    pub horizon_override: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportingSection {
    pub output_dir: String,
    #[serde(default = "default_delta")]
    pub confidence_delta: f64,
    /// Evaluate at this encoded state instead of the environment's initial
    /// distribution.
    #[serde(default)]
    pub evaluate_state: Option<usize>,
}

fn default_delta() -> f64 {
    0.05
}

/// A scenario resolved against its built environment.
pub struct ResolvedScenario {
    pub scenario: Scenario,
    pub env: MatchingEnv,
    pub experts: Vec<mdpmix_core::StationaryPolicy>,
    pub evaluation_point: Vec<f64>,
    pub strategy: StrategyKind,
    pub estimation: EstimationConfig,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading scenario {}", path.display()))?;
        let scenario: Scenario = serde_json::from_str(&text)
            .with_context(|| format!("parsing scenario {}", path.display()))?;
        Ok(scenario)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")
            .with_context(|| format!("writing scenario {}", path.display()))?;
        Ok(())
    }

    /// Builds the environment and resolves defaults.
    pub fn resolve(&self) -> Result<ResolvedScenario> {
        if self.experts.kinds.is_empty() {
            bail!("experts.kinds must not be empty");
        }
        if self.learning.rounds == 0 {
            bail!("learning.rounds must be at least 1");
        }
        if self.learning.repetitions == 0 {
            bail!("learning.repetitions must be at least 1");
        }
        let mut matching = self.matching.clone();
        if matching.permutation.is_none() {
            matching.policy_seed = self.experts.sigma_seed;
        }
        let env = build_matching_env(&matching).context("building matching environment")?;
        let experts = env.expert_policies(&self.experts.kinds);
        let num_experts = self.experts.kinds.len();
        let reward_max = env.mdp.reward_max();

        let strategy = match self.learning.strategy {
            StrategyName::Poly => StrategyKind::PolyPotential {
                exponent: self.learning.poly_exponent.unwrap_or_else(|| {
                    (2.0 * (num_experts as f64).ln()).round().max(2.0)
                }),
            },
            StrategyName::ExpFixed => StrategyKind::ExpFixed {
                eta: self.learning.eta.unwrap_or_else(|| {
                    (2.0 * (num_experts as f64).ln() / self.learning.rounds as f64).sqrt()
                        / reward_max
                }),
            },
            StrategyName::ExpTv => StrategyKind::ExpTimeVarying {
                rate: Some(self.learning.rate.unwrap_or_else(|| {
                    (num_experts as f64).ln().sqrt() / reward_max
                })),
            },
            StrategyName::Greedy => StrategyKind::GreedyProjection {
                rate: Some(self.learning.rate.unwrap_or_else(|| {
                    (2.0 / num_experts as f64).sqrt() / reward_max
                })),
            },
        };

        let epsilon = match (self.estimation.epsilon, self.estimation.reward_scale_bias) {
            (Some(_), Some(_)) => {
                bail!("set exactly one of estimation.epsilon and estimation.reward_scale_bias")
            }
            (Some(e), None) => e,
            (None, Some(bias)) => bias / reward_max,
            (None, None) => {
                bail!("set one of estimation.epsilon or estimation.reward_scale_bias")
            }
        };
        let estimation = match self.estimation.horizon_override {
            Some(h) => EstimationConfig::new(epsilon, h, self.estimation.kappa, self.estimation.mode)?,
            None => EstimationConfig::for_bias(
                matching.discount,
                epsilon,
                self.estimation.kappa,
                self.estimation.mode,
            )?,
        };
        estimation.validate_for(matching.discount)?;

        let evaluation_point = match self.reporting.evaluate_state {
            None => env.mu0.clone(),
            Some(s) => {
                if s >= env.mdp.num_states() {
                    bail!(
                        "reporting.evaluate_state {s} out of range ({} states)",
                        env.mdp.num_states()
                    );
                }
                let mut point = vec![0.0; env.mdp.num_states()];
                point[s] = 1.0;
                point
            }
        };
        if !(self.reporting.confidence_delta > 0.0 && self.reporting.confidence_delta < 1.0) {
            bail!("reporting.confidence_delta must lie in (0,1)");
        }

        Ok(ResolvedScenario {
            scenario: self.clone(),
            env,
            experts,
            evaluation_point,
            strategy,
            estimation,
        })
    }
}

/// The shipped four-class benchmark scenario with the published learning
/// constants (polynomial potential by default).
pub fn scenario_one_file() -> Scenario {
    Scenario {
        matching: mdpmix_core::scenario_one(),
        experts: ExpertsSection {
            kinds: vec![
                ExpertKind::MatchLongest,
                ExpertKind::MaxPayoff,
                ExpertKind::UniformRandom,
            ],
            sigma_seed: 0,
        },
        learning: LearningSection {
            strategy: StrategyName::Poly,
            poly_exponent: Some(3.0),
            eta: Some(0.00014),
            rate: Some(0.005),
            rounds: 2500,
            repetitions: 20,
            root_seed: 20_240_501,
        },
        estimation: EstimationSection {
            epsilon: None,
            reward_scale_bias: Some(0.005),
            kappa: 0.1,
            mode: EstimationMode::Masked,
            horizon_override: None,
        },
        reporting: ReportingSection {
            output_dir: "out/scenario-1".into(),
            confidence_delta: 0.05,
            evaluate_state: None,
        },
    }
}
