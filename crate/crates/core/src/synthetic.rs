//! Seeded random problem instances for tests, property checks, and the
//! regret batteries: dense random MDPs, random policies, expert sets, and
//! simplex points. Identical seeds produce identical objects.

use rand::Rng;

use crate::mdp::{StationaryPolicy, TabularMdp};
use crate::orchestration::{ExpertSet, StateWeights};
use crate::rng::{self, purpose};

/// Dense random MDP: every action admissible, transition rows drawn uniform
/// and normalized, rewards uniform in `[0, reward_max]`.
pub fn random_mdp(
    num_states: usize,
    num_actions: usize,
    discount: f64,
    reward_max: f64,
    seed: u64,
) -> TabularMdp {
    let mut stream = rng::stream(seed, &[purpose::SYNTHETIC, 0]);
    let mut builder = TabularMdp::builder(num_states, num_actions, discount, reward_max);
    for s in 0..num_states {
        for a in 0..num_actions {
            let raw: Vec<f64> = (0..num_states)
                .map(|_| stream.random_range(1e-3..1.0))
                .collect();
            let total: f64 = raw.iter().sum();
            let row: Vec<(usize, f64)> = raw
                .iter()
                .enumerate()
                .map(|(next, &p)| (next, p / total))
                .collect();
            let reward = stream.random_range(0.0..reward_max);
            builder.set_action(s, a, reward, row);
        }
    }
    builder.build().expect("random rows are valid")
}

/// Random stationary policy supported on the admissible actions.
pub fn random_policy(mdp: &TabularMdp, seed: u64) -> StationaryPolicy {
    let mut stream = rng::stream(seed, &[purpose::SYNTHETIC, 1]);
    let rows: Vec<Vec<f64>> = (0..mdp.num_states())
        .map(|s| {
            let actions = mdp.admissible_actions(s);
            let raw: Vec<f64> = (0..actions.len())
                .map(|_| stream.random_range(1e-3..1.0))
                .collect();
            let total: f64 = raw.iter().sum();
            let mut row = vec![0.0; mdp.num_actions()];
            for (&a, &p) in actions.iter().zip(raw.iter()) {
                row[a] = p / total;
            }
            row
        })
        .collect();
    StationaryPolicy::from_rows(mdp, rows).expect("random rows are valid")
}

/// A set of `k` independent random experts.
pub fn random_experts(mdp: &TabularMdp, k: usize, seed: u64) -> ExpertSet {
    let experts = (0..k)
        .map(|i| random_policy(mdp, rng::derive_seed(seed, &[purpose::SYNTHETIC, 2, i as u64])))
        .collect();
    ExpertSet::new(experts).expect("nonempty expert set")
}

/// Random state weights with rows on the simplex.
pub fn random_state_weights(num_states: usize, num_experts: usize, seed: u64) -> StateWeights {
    let mut stream = rng::stream(seed, &[purpose::SYNTHETIC, 3]);
    let rows: Vec<Vec<f64>> = (0..num_states)
        .map(|_| {
            let raw: Vec<f64> = (0..num_experts)
                .map(|_| stream.random_range(1e-3..1.0))
                .collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|&p| p / total).collect()
        })
        .collect();
    StateWeights::from_rows(rows).expect("random rows are valid")
}

/// Random probability vector of length `n`.
pub fn random_distribution(n: usize, seed: u64) -> Vec<f64> {
    let mut stream = rng::stream(seed, &[purpose::SYNTHETIC, 4]);
    let raw: Vec<f64> = (0..n).map(|_| stream.random_range(1e-3..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|&p| p / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let a = random_mdp(5, 3, 0.8, 1.0, 7);
        let b = random_mdp(5, 3, 0.8, 1.0, 7);
        for s in 0..5 {
            for act in 0..3 {
                assert_eq!(a.reward(s, act), b.reward(s, act));
                assert_eq!(a.transition_row(s, act), b.transition_row(s, act));
            }
        }
        let c = random_mdp(5, 3, 0.8, 1.0, 8);
        assert_ne!(a.reward(0, 0), c.reward(0, 0));
    }
}
