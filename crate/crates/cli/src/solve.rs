//! `solve`: exact values of the scenario — per-expert values, best
//! orchestrated value, unrestricted optimum, approximation error, and the
//! Dirac appearance rates of the optimal weights.

use anyhow::Result;
use std::path::Path;

use mdpmix_core::{optimal_orchestration, policy_evaluation, value_iteration, ExpertSet};

use crate::output::{sig9, write_atomic};
use crate::scenario::ResolvedScenario;

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub expert_values: Vec<f64>,
    pub best_mixture_value: f64,
    pub optimal_value: f64,
    pub approximation_error: f64,
    pub appearance_rates: Vec<f64>,
}

pub fn run(resolved: &ResolvedScenario, out_dir: &Path) -> Result<SolveReport> {
    let env = &resolved.env;
    let experts = ExpertSet::new(resolved.experts.clone())?;
    let at = &resolved.evaluation_point;

    let mut expert_values = Vec::with_capacity(experts.num_experts());
    for k in 0..experts.num_experts() {
        let v = policy_evaluation(&env.mdp, experts.expert(k))?;
        expert_values.push(v.at_distribution(at));
    }
    let (q_star, v_mix) = optimal_orchestration(&env.mdp, &experts)?;
    let best_mixture_value = v_mix.at_distribution(at);
    let optimum = value_iteration(&env.mdp)?;
    let optimal_value = optimum.values.at_distribution(at);

    let mut counts = vec![0usize; experts.num_experts()];
    for s in 0..env.mdp.num_states() {
        let k = q_star
            .row(s)
            .iter()
            .position(|&w| w == 1.0)
            .expect("dirac rows");
        counts[k] += 1;
    }
    let total = env.mdp.num_states() as f64;
    let appearance_rates: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();

    let report = SolveReport {
        approximation_error: optimal_value - best_mixture_value,
        expert_values,
        best_mixture_value,
        optimal_value,
        appearance_rates,
    };

    let mut csv = String::from("quantity,value\n");
    for (k, v) in report.expert_values.iter().enumerate() {
        csv.push_str(&format!("V_expert_{},{}\n", k + 1, sig9(*v)));
    }
    csv.push_str(&format!("V_best_mixture,{}\n", sig9(report.best_mixture_value)));
    csv.push_str(&format!("V_optimal,{}\n", sig9(report.optimal_value)));
    csv.push_str(&format!(
        "approximation_error,{}\n",
        sig9(report.approximation_error)
    ));
    for (k, r) in report.appearance_rates.iter().enumerate() {
        csv.push_str(&format!("appearance_rate_expert_{},{}\n", k + 1, sig9(*r)));
    }
    write_atomic(&out_dir.join("table.csv"), &csv)?;
    Ok(report)
}
