//! `regret-harness`: plays each weight-update strategy against three gain
//! generators and checks realized regret against the stated bounds at
//! checkpoints.

use anyhow::Result;
use rand::Rng;
use std::path::Path;

use mdpmix_core::{rng, GainVector, Learner, StrategyKind};

use crate::output::{sig9, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainGenerator {
    IidUniform,
    AdversarialFlip,
    SingleBest,
}

impl GainGenerator {
    pub const ALL: [GainGenerator; 3] = [
        GainGenerator::IidUniform,
        GainGenerator::AdversarialFlip,
        GainGenerator::SingleBest,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            GainGenerator::IidUniform => "iid-uniform",
            GainGenerator::AdversarialFlip => "adversarial-flip",
            GainGenerator::SingleBest => "single-best",
        }
    }
}

#[derive(Debug, Clone)]
pub struct HarnessParams {
    pub num_experts: usize,
    pub gain_bound: f64,
    pub rounds: u64,
    pub strategies: Vec<StrategyKind>,
    pub seeds: u64,
    pub checkpoints: usize,
}

impl HarnessParams {
    /// The four strategies with their bound-carrying parameterizations.
    pub fn default_strategies(num_experts: usize, gain_bound: f64, rounds: u64) -> Vec<StrategyKind> {
        vec![
            StrategyKind::poly_default(num_experts),
            StrategyKind::ExpFixed {
                eta: (2.0 * (num_experts as f64).ln() / rounds as f64).sqrt() / gain_bound,
            },
            StrategyKind::ExpTimeVarying { rate: None },
            StrategyKind::GreedyProjection { rate: None },
        ]
    }
}

#[derive(Debug, Clone)]
pub struct HarnessRow {
    pub strategy: &'static str,
    pub generator: &'static str,
    pub seed: u64,
    pub round: u64,
    pub realized: f64,
    pub bound: f64,
    pub violation: bool,
}

fn draw_gains(
    generator: GainGenerator,
    weights: &[f64],
    bound: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
    best: usize,
) -> Vec<f64> {
    let k = weights.len();
    match generator {
        GainGenerator::IidUniform => (0..k).map(|_| rng.random_range(-bound..bound)).collect(),
        GainGenerator::AdversarialFlip => {
            // Reward the currently lightest expert, punish the rest.
            let min = weights.iter().copied().fold(f64::INFINITY, f64::min);
            let lightest = weights.iter().position(|&w| w == min).unwrap_or(0);
            (0..k)
                .map(|i| if i == lightest { bound } else { -bound })
                .collect()
        }
        GainGenerator::SingleBest => (0..k)
            .map(|i| {
                if i == best {
                    rng.random_range(0.2 * bound..bound)
                } else {
                    rng.random_range(-bound..0.2 * bound)
                }
            })
            .collect(),
    }
}

/// Plays every strategy against every generator; returns all checkpoint rows
/// and whether any bound was violated.
pub fn run_harness(params: &HarnessParams) -> Result<(Vec<HarnessRow>, bool)> {
    let mut rows = Vec::new();
    let mut any_violation = false;
    let step = (params.rounds / params.checkpoints.max(1) as u64).max(1);

    for &strategy in &params.strategies {
        for generator in GainGenerator::ALL {
            for seed in 0..params.seeds {
                let mut learner =
                    Learner::new(strategy, params.num_experts, params.gain_bound)?;
                let mut stream = rng::stream(
                    seed,
                    &[rng::purpose::GAIN, generator as u64],
                );
                let best = (seed as usize) % params.num_experts;
                let mut cumulative = vec![0.0; params.num_experts];
                let mut earned = 0.0;
                for t in 1..=params.rounds {
                    let gains = draw_gains(
                        generator,
                        learner.weights(),
                        params.gain_bound,
                        &mut stream,
                        best,
                    );
                    earned += learner
                        .weights()
                        .iter()
                        .zip(&gains)
                        .map(|(w, g)| w * g)
                        .sum::<f64>();
                    for (acc, &g) in cumulative.iter_mut().zip(&gains) {
                        *acc += g;
                    }
                    learner.observe_in_place(&GainVector::new(gains, t))?;

                    if t % step == 0 || t == params.rounds {
                        let realized = cumulative
                            .iter()
                            .copied()
                            .fold(f64::NEG_INFINITY, f64::max)
                            - earned;
                        let bound = mdpmix_core::regret_bound(
                            &strategy,
                            t,
                            params.num_experts,
                            params.gain_bound,
                        );
                        let violation = realized > bound + 1e-9;
                        any_violation |= violation;
                        rows.push(HarnessRow {
                            strategy: strategy.label(),
                            generator: generator.label(),
                            seed,
                            round: t,
                            realized,
                            bound,
                            violation,
                        });
                    }
                }
            }
        }
    }
    Ok((rows, any_violation))
}

pub fn write_csv(rows: &[HarnessRow], out_dir: &Path) -> Result<()> {
    let mut csv = String::from("strategy,generator,seed,round,realized_regret,regret_bound,violation\n");
    for r in rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.strategy,
            r.generator,
            r.seed,
            r.round,
            sig9(r.realized),
            sig9(r.bound),
            r.violation
        ));
    }
    write_atomic(&out_dir.join("regret.csv"), &csv)
}
