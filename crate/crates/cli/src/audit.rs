//! `estimator-audit`: empirical verification of the advantage estimator's
//! three guarantees at sampled (state, expert) pairs — almost-sure
//! boundedness, the exact zero-sum identity under the current weights, and
//! bias within the truncation target.

use anyhow::{ensure, Result};
use rand::Rng;
use std::path::Path;

use mdpmix_core::estimation::{estimate_state_advantages, exact_expert_advantages};
use mdpmix_core::{mix_policy, rng, ExpertSet, StateWeights};

use crate::output::{sig9, write_atomic};
use crate::scenario::ResolvedScenario;

#[derive(Debug, Clone)]
pub struct AuditCheck {
    pub check: &'static str,
    pub state: usize,
    pub expert: Option<usize>,
    pub samples: usize,
    pub observed: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn run(
    resolved: &ResolvedScenario,
    samples: usize,
    pairs: usize,
    audit_seed: u64,
    out_dir: &Path,
) -> Result<AuditReport> {
    ensure!(samples >= 1_000, "audit needs at least 1000 samples");
    ensure!(pairs >= 1, "audit needs at least one (state, expert) pair");
    let env = &resolved.env;
    let experts = ExpertSet::new(resolved.experts.clone())?;
    let num_experts = experts.num_experts();
    let weights = StateWeights::uniform(env.mdp.num_states(), num_experts);
    let mixture = mix_policy(&weights, &experts)?;
    let exact = exact_expert_advantages(&env.mdp, &weights, &experts)?;
    let config = &resolved.estimation;
    let bound = config.gain_bound(&env.mdp);
    let epsilon_scale = config.epsilon * env.mdp.reward_max();

    let mut pick = rng::stream(audit_seed, &[rng::purpose::SYNTHETIC, 11]);
    let audited: Vec<(usize, usize)> = (0..pairs)
        .map(|_| {
            (
                pick.random_range(0..env.mdp.num_states()),
                pick.random_range(0..num_experts),
            )
        })
        .collect();

    let mut checks = Vec::new();
    for &(s, k) in &audited {
        let mut bound_violations = 0usize;
        let mut max_abs = 0.0f64;
        let mut max_zero_sum = 0.0f64;
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        for draw in 0..samples {
            let (row, _selected) = estimate_state_advantages(
                &env.mdp,
                &mixture,
                &experts,
                config,
                draw as u64 + 1,
                audit_seed,
                Some(s),
                s,
            );
            let weighted: f64 = weights
                .row(s)
                .iter()
                .zip(&row)
                .map(|(w, a)| w * a)
                .sum();
            max_zero_sum = max_zero_sum.max(weighted.abs());
            for &x in &row {
                max_abs = max_abs.max(x.abs());
                if x.abs() > bound {
                    bound_violations += 1;
                }
            }
            let x = row[k];
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / samples as f64;
        let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
        let stderr = (var / samples as f64).sqrt();
        let bias = (mean - exact[s][k]).abs();
        let bias_threshold = epsilon_scale + 3.0 * stderr;

        checks.push(AuditCheck {
            check: "boundedness",
            state: s,
            expert: None,
            samples,
            observed: max_abs,
            threshold: bound,
            pass: bound_violations == 0,
        });
        checks.push(AuditCheck {
            check: "zero_sum",
            state: s,
            expert: None,
            samples,
            observed: max_zero_sum,
            threshold: 1e-9,
            pass: max_zero_sum <= 1e-9,
        });
        checks.push(AuditCheck {
            check: "bias",
            state: s,
            expert: Some(k),
            samples,
            observed: bias,
            threshold: bias_threshold,
            pass: bias <= bias_threshold,
        });
    }

    let report = AuditReport { checks };
    let mut csv = String::from("check,state,expert,samples,observed,threshold,pass\n");
    for c in &report.checks {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.check,
            c.state,
            c.expert.map_or(String::from("-"), |k| k.to_string()),
            c.samples,
            sig9(c.observed),
            sig9(c.threshold),
            c.pass
        ));
    }
    write_atomic(&out_dir.join("audit.csv"), &csv)?;

    for c in &report.checks {
        println!(
            "{} state={} expert={} observed={:.3e} threshold={:.3e} -> {}",
            c.check,
            c.state,
            c.expert.map_or(String::from("-"), |k| k.to_string()),
            c.observed,
            c.threshold,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(report)
}
