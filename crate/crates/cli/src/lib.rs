//! Experiment harness around the orchestration toolkit: scenario files,
//! exact-value tables, learning-curve runs, an adversarial regret harness,
//! and estimator audits. All artifacts are byte-reproducible for fixed
//! configurations and seeds.

pub mod audit;
pub mod gen;
pub mod learn;
pub mod output;
pub mod regret;
pub mod scenario;
pub mod solve;

use anyhow::Result;

use scenario::{Scenario, StrategyName};

/// Flag overrides applied on top of a loaded scenario.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub strategy: Option<StrategyName>,
    pub poly_exponent: Option<f64>,
    pub eta: Option<f64>,
    pub rate: Option<f64>,
    pub rounds: Option<usize>,
    pub repetitions: Option<usize>,
    pub root_seed: Option<u64>,
    pub kappa: Option<f64>,
    pub epsilon: Option<f64>,
    pub reward_scale_bias: Option<f64>,
    pub horizon: Option<usize>,
    pub est_mode: Option<mdpmix_core::EstimationMode>,
    pub holding_coeff: Option<f64>,
    pub discount: Option<f64>,
    pub max_queue: Option<usize>,
    pub semantics: Option<mdpmix_core::MatchSemantics>,
    pub policy_seed: Option<u64>,
    pub sigma_seed: Option<u64>,
    pub state_cap: Option<usize>,
    pub confidence_delta: Option<f64>,
    pub evaluate_state: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, scenario: &mut Scenario) -> Result<()> {
        if let Some(s) = self.strategy {
            scenario.learning.strategy = s;
        }
        if let Some(p) = self.poly_exponent {
            scenario.learning.poly_exponent = Some(p);
        }
        if let Some(e) = self.eta {
            scenario.learning.eta = Some(e);
        }
        if let Some(r) = self.rate {
            scenario.learning.rate = Some(r);
        }
        if let Some(t) = self.rounds {
            scenario.learning.rounds = t;
        }
        if let Some(n) = self.repetitions {
            scenario.learning.repetitions = n;
        }
        if let Some(s) = self.root_seed {
            scenario.learning.root_seed = s;
        }
        if let Some(k) = self.kappa {
            scenario.estimation.kappa = k;
        }
        if let Some(e) = self.epsilon {
            scenario.estimation.epsilon = Some(e);
            scenario.estimation.reward_scale_bias = None;
        }
        if let Some(b) = self.reward_scale_bias {
            scenario.estimation.reward_scale_bias = Some(b);
            scenario.estimation.epsilon = None;
        }
        if let Some(h) = self.horizon {
            scenario.estimation.horizon_override = Some(h);
        }
        if let Some(m) = self.est_mode {
            scenario.estimation.mode = m;
        }
        if let Some(c) = self.holding_coeff {
            scenario.matching.holding_coeff = c;
        }
        if let Some(g) = self.discount {
            scenario.matching.discount = g;
        }
        if let Some(l) = self.max_queue {
            scenario.matching.max_queue = l;
        }
        if let Some(s) = self.semantics {
            scenario.matching.semantics = s;
        }
        if let Some(s) = self.policy_seed {
            scenario.matching.policy_seed = s;
        }
        if let Some(s) = self.sigma_seed {
            scenario.experts.sigma_seed = s;
        }
        if let Some(c) = self.state_cap {
            scenario.matching.state_cap = c;
        }
        if let Some(d) = self.confidence_delta {
            scenario.reporting.confidence_delta = d;
        }
        if let Some(s) = self.evaluate_state {
            scenario.reporting.evaluate_state = Some(s);
        }
        Ok(())
    }
}
