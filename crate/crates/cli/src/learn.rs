//! `learn`: repeated learning runs with per-round exact values, emitted as
//! per-run curves plus a mean and two-standard-error band, with a metadata
//! document pinning the resolved configuration and seeds.

use anyhow::Result;
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;

use mdpmix_core::{
    rng, run_estimated_loop, run_oracle_loop, run_targets, ExpertSet, LoopOptions,
    StrategyKind,
};

use crate::output::{sig9, write_atomic};
use crate::scenario::{ResolvedScenario, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnMode {
    Oracle,
    Estimated,
}

impl LearnMode {
    pub fn label(&self) -> &'static str {
        match self {
            LearnMode::Oracle => "oracle",
            LearnMode::Estimated => "estimated",
        }
    }
}

impl std::str::FromStr for LearnMode {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Self::Oracle),
            "estimated" => Ok(Self::Estimated),
            other => anyhow::bail!("unknown mode {other:?} (oracle, estimated)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LearnSummary {
    pub repetitions: usize,
    pub rounds: usize,
    pub best_mixture_value: f64,
    pub optimal_value: f64,
    /// Mean over runs of the final-round value.
    pub mean_final_value: f64,
    /// Per-round mean values across runs.
    pub mean_curve: Vec<f64>,
    pub value_decreases: Vec<usize>,
}

#[derive(Serialize)]
struct Metadata<'a> {
    version: &'static str,
    command: &'static str,
    mode: &'static str,
    scenario: &'a Scenario,
    strategy: StrategyKind,
    gain_bound: f64,
    horizon: usize,
    epsilon: f64,
    kappa: f64,
    repetitions: usize,
    rounds: usize,
    root_seed: u64,
    run_seeds: Vec<u64>,
    priority_permutation: Vec<usize>,
    best_mixture_value: f64,
    optimal_value: f64,
    value_decreases: Vec<usize>,
}

pub fn run(resolved: &ResolvedScenario, mode: LearnMode, out_dir: &Path) -> Result<LearnSummary> {
    let env = &resolved.env;
    let experts = ExpertSet::new(resolved.experts.clone())?;
    let at = &resolved.evaluation_point;
    let rounds = resolved.scenario.learning.rounds;
    let root_seed = resolved.scenario.learning.root_seed;

    let targets = run_targets(&env.mdp, &experts, at)?;
    let options = LoopOptions {
        record_weight_history: false,
        targets: Some(targets),
    };

    // The oracle loop is deterministic; repetitions would be identical.
    let repetitions = match mode {
        LearnMode::Oracle => 1,
        LearnMode::Estimated => resolved.scenario.learning.repetitions,
    };

    let gain_bound = match mode {
        LearnMode::Oracle => env.mdp.value_bound(),
        LearnMode::Estimated => resolved.estimation.gain_bound(&env.mdp),
    };

    let run_seeds: Vec<u64> = (0..repetitions)
        .map(|n| rng::derive_seed(root_seed, &[rng::purpose::RUN, n as u64]))
        .collect();

    let (curves, value_decreases): (Vec<Vec<f64>>, Vec<usize>) = match mode {
        LearnMode::Oracle => {
            let record = run_oracle_loop(
                &env.mdp,
                &experts,
                resolved.strategy,
                gain_bound,
                rounds,
                at,
                &options,
            )?;
            (vec![record.values], vec![0])
        }
        LearnMode::Estimated => {
            let results: Vec<_> = run_seeds
                .par_iter()
                .map(|&seed| {
                    run_estimated_loop(
                        &env.mdp,
                        &experts,
                        resolved.strategy,
                        gain_bound,
                        rounds,
                        &resolved.estimation,
                        at,
                        seed,
                        &options,
                    )
                })
                .collect::<Result<Vec<_>, _>>()?;
            results
                .into_iter()
                .map(|r| (r.values, r.value_decreases))
                .unzip()
        }
    };

    // Per-run curve rows.
    let mut curve = String::from("run_index,t,value_at_mu0\n");
    for (n, values) in curves.iter().enumerate() {
        for (i, v) in values.iter().enumerate() {
            curve.push_str(&format!("{n},{},{}\n", i + 1, sig9(*v)));
        }
    }
    write_atomic(&out_dir.join("curve.csv"), &curve)?;

    // Mean and +-2 standard-error band across runs.
    let n_runs = curves.len() as f64;
    let mut mean_curve = Vec::with_capacity(rounds);
    let mut band = String::from("t,mean,stderr,lo,hi\n");
    for t in 0..rounds {
        let mean: f64 = curves.iter().map(|c| c[t]).sum::<f64>() / n_runs;
        let stderr = if curves.len() > 1 {
            let var = curves.iter().map(|c| (c[t] - mean).powi(2)).sum::<f64>()
                / (n_runs - 1.0);
            (var / n_runs).sqrt()
        } else {
            0.0
        };
        band.push_str(&format!(
            "{},{},{},{},{}\n",
            t + 1,
            sig9(mean),
            sig9(stderr),
            sig9(mean - 2.0 * stderr),
            sig9(mean + 2.0 * stderr)
        ));
        mean_curve.push(mean);
    }
    write_atomic(&out_dir.join("curve_mean.csv"), &band)?;

    let metadata = Metadata {
        version: env!("CARGO_PKG_VERSION"),
        command: "learn",
        mode: mode.label(),
        scenario: &resolved.scenario,
        strategy: resolved.strategy,
        gain_bound,
        horizon: resolved.estimation.horizon,
        epsilon: resolved.estimation.epsilon,
        kappa: resolved.estimation.kappa,
        repetitions,
        rounds,
        root_seed,
        run_seeds,
        priority_permutation: env.sigma.clone(),
        best_mixture_value: targets.best_mixture_value,
        optimal_value: targets.optimal_value,
        value_decreases: value_decreases.clone(),
    };
    write_atomic(
        &out_dir.join("metadata.json"),
        &(serde_json::to_string_pretty(&metadata)? + "\n"),
    )?;

    let mean_final_value = *mean_curve.last().expect("at least one round");
    Ok(LearnSummary {
        repetitions,
        rounds,
        best_mixture_value: targets.best_mixture_value,
        optimal_value: targets.optimal_value,
        mean_final_value,
        mean_curve,
        value_decreases,
    })
}
