//! `gen-scenario`: draws a random matching scenario (connected compatibility
//! graph, payoffs uniform on [0, 20], normalized random arrivals) with the
//! lazy-estimation learning setup used for larger systems.

use anyhow::Result;
use rand::Rng;

use mdpmix_core::{
    rng, EstimationMode, ExpertKind, MatchSemantics, MatchingConfig, MatchingEdge,
};

use crate::scenario::{
    EstimationSection, ExpertsSection, LearningSection, ReportingSection, Scenario, StrategyName,
};

pub struct GenParams {
    pub classes: usize,
    pub max_queue: usize,
    pub seed: u64,
    pub state_cap: usize,
}

pub fn generate(params: &GenParams) -> Result<Scenario> {
    anyhow::ensure!(params.classes >= 2, "need at least two classes");
    let mut stream = rng::stream(params.seed, &[rng::purpose::SYNTHETIC, 21]);

    // Random connected graph: a random attachment tree plus extra edges.
    let mut edges = Vec::new();
    let mut connected: Vec<usize> = vec![0];
    for class in 1..params.classes {
        let anchor = connected[stream.random_range(0..connected.len())];
        edges.push((anchor.min(class), anchor.max(class)));
        connected.push(class);
    }
    for a in 0..params.classes {
        for b in a + 1..params.classes {
            if !edges.contains(&(a, b)) && stream.random_range(0.0..1.0) < 0.3 {
                edges.push((a, b));
            }
        }
    }
    edges.sort_unstable();
    let edges: Vec<MatchingEdge> = edges
        .into_iter()
        .map(|(a, b)| MatchingEdge {
            a,
            b,
            payoff: stream.random_range(0.0..20.0),
        })
        .collect();

    let raw: Vec<f64> = (0..params.classes)
        .map(|_| stream.random_range(0.05..1.0))
        .collect();
    let total: f64 = raw.iter().sum();
    let arrival_probs: Vec<f64> = raw.iter().map(|p| p / total).collect();

    let scenario = Scenario {
        matching: MatchingConfig {
            num_classes: params.classes,
            max_queue: params.max_queue,
            holding_coeff: 5.0,
            discount: 0.8,
            arrival_probs,
            edges,
            permutation: None,
            policy_seed: params.seed,
            semantics: MatchSemantics::Removal,
            state_cap: params.state_cap,
        },
        experts: ExpertsSection {
            kinds: vec![
                ExpertKind::MatchLongest,
                ExpertKind::MaxPayoff,
                ExpertKind::UniformRandom,
                ExpertKind::PermutationPriority,
            ],
            sigma_seed: params.seed,
        },
        learning: LearningSection {
            strategy: StrategyName::Poly,
            poly_exponent: Some(5.0),
            eta: None,
            rate: None,
            rounds: 2500,
            repetitions: 5,
            root_seed: params.seed,
        },
        estimation: EstimationSection {
            epsilon: None,
            reward_scale_bias: Some(0.02),
            kappa: 1.0,
            mode: EstimationMode::Lazy,
            horizon_override: None,
        },
        reporting: ReportingSection {
            output_dir: format!("out/generated-{}", params.seed),
            confidence_delta: 0.05,
            evaluate_state: None,
        },
    };
    // Fail fast if the drawn scenario does not build.
    scenario.resolve()?;
    Ok(scenario)
}
