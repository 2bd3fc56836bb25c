//! Mixture policies over an expert set, the lifted MDP whose actions are the
//! experts, optimal orchestration weights, approximation-error certificates,
//! and the oracle learning loop driven by exact expert advantages.

use rayon::prelude::*;
use thiserror::Error;

use crate::adversarial::{AdversarialError, GainVector, Learner, StrategyKind};
use crate::mdp::{
    self, policy_transition_row, solve_policy_values, AdvantageTable, MdpError, StationaryPolicy,
    TabularMdp, ValueFunction, ROW_SUM_TOL,
};
use crate::solver::SparseRow;

#[derive(Debug, Error)]
pub enum OrchestrationError {
    #[error("expert set must contain at least one policy")]
    EmptyExpertSet,
    #[error("experts disagree on state/action dimensions")]
    ExpertShapeMismatch,
    #[error("weights shape ({states} states, {experts} experts) does not match")]
    WeightShapeMismatch { states: usize, experts: usize },
    #[error("weight row at state {state} sums to {sum}, not 1")]
    WeightRowNotSimplex { state: usize, sum: f64 },
    #[error("weight row at state {state} has a negative entry")]
    WeightRowNegative { state: usize },
    #[error("rounds must be at least 1")]
    ZeroRounds,
    #[error(transparent)]
    Mdp(#[from] MdpError),
    #[error(transparent)]
    Adversarial(#[from] AdversarialError),
}

/// A collection of stationary policies over a common MDP.
#[derive(Debug, Clone)]
pub struct ExpertSet {
    experts: Vec<StationaryPolicy>,
}

impl ExpertSet {
    pub fn new(experts: Vec<StationaryPolicy>) -> Result<Self, OrchestrationError> {
        if experts.is_empty() {
            return Err(OrchestrationError::EmptyExpertSet);
        }
        let states = experts[0].num_states();
        let actions = experts[0].rows().first().map_or(0, |r| r.len());
        for e in &experts {
            if e.num_states() != states || e.rows().iter().any(|r| r.len() != actions) {
                return Err(OrchestrationError::ExpertShapeMismatch);
            }
        }
        Ok(Self { experts })
    }

    pub fn num_experts(&self) -> usize {
        self.experts.len()
    }

    pub fn num_states(&self) -> usize {
        self.experts[0].num_states()
    }

    pub fn expert(&self, k: usize) -> &StationaryPolicy {
        &self.experts[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &StationaryPolicy> {
        self.experts.iter()
    }
}

/// Per-state distributions over the experts (the object being learned).
#[derive(Debug, Clone, PartialEq)]
pub struct StateWeights {
    rows: Vec<Vec<f64>>,
}

impl StateWeights {
    pub fn uniform(num_states: usize, num_experts: usize) -> Self {
        Self {
            rows: vec![vec![1.0 / num_experts as f64; num_experts]; num_states],
        }
    }

    /// Dirac mass on one expert per state.
    pub fn dirac(num_experts: usize, picks: &[usize]) -> Self {
        let rows = picks
            .iter()
            .map(|&k| {
                let mut row = vec![0.0; num_experts];
                row[k] = 1.0;
                row
            })
            .collect();
        Self { rows }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, OrchestrationError> {
        for (state, row) in rows.iter().enumerate() {
            let mut sum = 0.0;
            for &p in row {
                if p < 0.0 {
                    return Err(OrchestrationError::WeightRowNegative { state });
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(OrchestrationError::WeightRowNotSimplex { state, sum });
            }
        }
        Ok(Self { rows })
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<f64>>) -> Self {
        Self { rows }
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.rows[state]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn num_states(&self) -> usize {
        self.rows.len()
    }

    pub fn num_experts(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }
}

/// Advantages of the expert rows against a mixture policy:
/// `abar(s,k) = sum_a pi_k(a|s) A(s,a)`.
#[derive(Debug, Clone)]
pub struct ExpertAdvantage {
    rows: Vec<Vec<f64>>,
}

impl ExpertAdvantage {
    pub fn row(&self, state: usize) -> &[f64] {
        &self.rows[state]
    }

    pub fn value(&self, state: usize, expert: usize) -> f64 {
        self.rows[state][expert]
    }

    pub fn num_states(&self) -> usize {
        self.rows.len()
    }
}

fn check_dims(
    mdp: &TabularMdp,
    experts: &ExpertSet,
) -> Result<(), OrchestrationError> {
    if experts.num_states() != mdp.num_states()
        || experts
            .iter()
            .any(|e| e.rows().iter().any(|r| r.len() != mdp.num_actions()))
    {
        return Err(OrchestrationError::ExpertShapeMismatch);
    }
    Ok(())
}

fn check_weights(
    q: &StateWeights,
    experts: &ExpertSet,
) -> Result<(), OrchestrationError> {
    if q.num_states() != experts.num_states() || q.num_experts() != experts.num_experts() {
        return Err(OrchestrationError::WeightShapeMismatch {
            states: q.num_states(),
            experts: q.num_experts(),
        });
    }
    Ok(())
}

fn mix_row(q_row: &[f64], experts: &ExpertSet, state: usize, num_actions: usize) -> Vec<f64> {
    let mut row = vec![0.0; num_actions];
    for (k, &weight) in q_row.iter().enumerate() {
        if weight == 0.0 {
            continue;
        }
        for (a, &p) in experts.expert(k).row(state).iter().enumerate() {
            row[a] += weight * p;
        }
    }
    row
}

/// The mixture policy `qPi(a|s) = sum_k q(k|s) pi_k(a|s)`.
pub fn mix_policy(
    q: &StateWeights,
    experts: &ExpertSet,
) -> Result<StationaryPolicy, OrchestrationError> {
    check_weights(q, experts)?;
    let num_actions = experts.expert(0).rows()[0].len();
    let rows = (0..q.num_states())
        .map(|s| mix_row(q.row(s), experts, s, num_actions))
        .collect();
    Ok(StationaryPolicy::from_rows_unchecked(rows))
}

/// The MDP whose actions are the experts: transition
/// `T'(s'|s,k) = sum_a pi_k(a|s) T(s'|s,a)` and reward
/// `r'(s,k) = sum_a pi_k(a|s) r(s,a)`; discount and reward range carry over,
/// and every expert is admissible everywhere.
pub fn lift_mdp(mdp: &TabularMdp, experts: &ExpertSet) -> Result<TabularMdp, OrchestrationError> {
    check_dims(mdp, experts)?;
    let k = experts.num_experts();
    let mut builder = TabularMdp::builder(
        mdp.num_states(),
        k,
        mdp.discount(),
        mdp.reward_max(),
    );
    for s in 0..mdp.num_states() {
        for (idx, expert) in experts.iter().enumerate() {
            let row = policy_transition_row(mdp, expert.row(s), s);
            let reward: f64 = mdp
                .admissible_actions(s)
                .iter()
                .map(|&a| expert.row(s)[a] * mdp.reward(s, a))
                .sum();
            builder.set_action(s, idx, reward, row);
        }
    }
    Ok(builder.build()?)
}

/// Expert advantages of a mixture's advantage table.
pub fn expert_advantages(advantages: &AdvantageTable, experts: &ExpertSet) -> ExpertAdvantage {
    let rows = (0..advantages.num_states())
        .map(|s| {
            let adv_row = advantages.row(s);
            experts
                .iter()
                .map(|e| {
                    e.row(s)
                        .iter()
                        .zip(adv_row.iter())
                        .map(|(p, a)| p * a)
                        .sum()
                })
                .collect()
        })
        .collect();
    ExpertAdvantage { rows }
}

/// Optimal state weights over the expert class and their value function.
///
/// Runs value iteration on the lifted MDP; the weights are Dirac per state on
/// the greedy expert, ties resolved to the lowest expert index.
pub fn optimal_orchestration(
    mdp: &TabularMdp,
    experts: &ExpertSet,
) -> Result<(StateWeights, ValueFunction), OrchestrationError> {
    let lifted = lift_mdp(mdp, experts)?;
    let solution = mdp::value_iteration(&lifted)?;
    let picks: Vec<usize> = (0..lifted.num_states())
        .map(|s| {
            solution
                .policy
                .row(s)
                .iter()
                .position(|&p| p == 1.0)
                .expect("greedy policy rows are Dirac")
        })
        .collect();
    Ok((
        StateWeights::dirac(experts.num_experts(), &picks),
        solution.values,
    ))
}

/// Per-state certificate that some experts' supports sit inside the argmax of
/// the optimal Q-values, plus the value gap `V* - V_{q*Pi}` at `mu0`.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    /// `V*(mu0) - V_{q*Pi}(mu0)`, nonnegative up to solver tolerance.
    pub error: f64,
    /// For each state, the experts whose support lies inside the optimal
    /// argmax set (absolute tolerance 1e-7), or `None` when there are none.
    pub per_state: Vec<Option<Vec<usize>>>,
}

impl CertificateReport {
    /// True when every state carries a certificate, which happens exactly
    /// when the approximation error vanishes.
    pub fn certified_everywhere(&self) -> bool {
        self.per_state.iter().all(|c| c.is_some())
    }
}

/// Tolerance on optimal-Q argmax sets used by certificates.
const ARGMAX_TOL: f64 = 1e-7;

/// Approximation error of the expert class and its per-state optimality
/// certificate.
pub fn approximation_error(
    mdp: &TabularMdp,
    experts: &ExpertSet,
    mu0: &[f64],
) -> Result<CertificateReport, OrchestrationError> {
    check_dims(mdp, experts)?;
    mdp.validate_state_distribution(mu0)?;
    let base = mdp::value_iteration(mdp)?;
    let (_, v_best_mix) = optimal_orchestration(mdp, experts)?;
    let error = base.values.at_distribution(mu0) - v_best_mix.at_distribution(mu0);

    let per_state = (0..mdp.num_states())
        .map(|s| {
            let q_row = base.q.row(s);
            let best = mdp
                .admissible_actions(s)
                .iter()
                .map(|&a| q_row[a])
                .fold(f64::NEG_INFINITY, f64::max);
            let in_argmax =
                |a: usize| mdp.is_admissible(s, a) && q_row[a] >= best - ARGMAX_TOL;
            let certified: Vec<usize> = (0..experts.num_experts())
                .filter(|&k| {
                    experts
                        .expert(k)
                        .row(s)
                        .iter()
                        .enumerate()
                        .all(|(a, &p)| p == 0.0 || in_argmax(a))
                })
                .collect();
            if certified.is_empty() {
                None
            } else {
                Some(certified)
            }
        })
        .collect();
    Ok(CertificateReport { error, per_state })
}

/// Evaluation targets reported alongside learning runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunTargets {
    /// `V_{q*Pi}(mu0)`: best orchestrated value.
    pub best_mixture_value: f64,
    /// `V*(mu0)`: optimal value over all stationary policies.
    pub optimal_value: f64,
}

/// Computes [`RunTargets`] at `mu0`.
pub fn run_targets(
    mdp: &TabularMdp,
    experts: &ExpertSet,
    mu0: &[f64],
) -> Result<RunTargets, OrchestrationError> {
    let (_, v_best) = optimal_orchestration(mdp, experts)?;
    let base = mdp::value_iteration(mdp)?;
    Ok(RunTargets {
        best_mixture_value: v_best.at_distribution(mu0),
        optimal_value: base.values.at_distribution(mu0),
    })
}

/// Options shared by the learning loops.
#[derive(Debug, Clone, Default)]
pub struct LoopOptions {
    /// Store the full per-round weight trajectory (memory scales with
    /// `rounds * num_states * num_experts`).
    pub record_weight_history: bool,
    /// Precomputed targets, to amortize across repetitions.
    pub targets: Option<RunTargets>,
}

/// Record of an oracle learning run.
#[derive(Debug, Clone)]
pub struct OracleRunRecord {
    /// `V_{q_t Pi}(mu0)` for `t = 1..=rounds`.
    pub values: Vec<f64>,
    pub final_weights: StateWeights,
    pub weight_history: Option<Vec<StateWeights>>,
    pub targets: RunTargets,
    pub strategy: StrategyKind,
    pub gain_bound: f64,
}

impl OracleRunRecord {
    pub fn rounds(&self) -> usize {
        self.values.len()
    }

    /// Average of the recorded values (the Cesaro mean).
    pub fn cesaro_mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Cached mixture data: dense policy rows, induced chain, mean rewards, and a
/// warm-started value solve. Rebuilds only rows whose weights changed.
pub(crate) struct MixtureContext<'a> {
    mdp: &'a TabularMdp,
    experts: &'a ExpertSet,
    pub mix_rows: Vec<Vec<f64>>,
    p_rows: Vec<SparseRow>,
    rewards: Vec<f64>,
    values: Option<ValueFunction>,
}

impl<'a> MixtureContext<'a> {
    pub fn new(mdp: &'a TabularMdp, experts: &'a ExpertSet, q: &StateWeights) -> Self {
        let num_actions = mdp.num_actions();
        let mix_rows: Vec<Vec<f64>> = if mdp.num_states() >= 2048 {
            (0..mdp.num_states())
                .into_par_iter()
                .map(|s| mix_row(q.row(s), experts, s, num_actions))
                .collect()
        } else {
            (0..mdp.num_states())
                .map(|s| mix_row(q.row(s), experts, s, num_actions))
                .collect()
        };
        let p_rows = mix_rows
            .iter()
            .enumerate()
            .map(|(s, row)| policy_transition_row(mdp, row, s))
            .collect();
        let rewards = mix_rows
            .iter()
            .enumerate()
            .map(|(s, row)| {
                mdp.admissible_actions(s)
                    .iter()
                    .map(|&a| row[a] * mdp.reward(s, a))
                    .sum()
            })
            .collect();
        Self {
            mdp,
            experts,
            mix_rows,
            p_rows,
            rewards,
            values: None,
        }
    }

    /// Applies new weights, rebuilding only the states whose rows changed.
    pub fn update(&mut self, q: &StateWeights, changed: &[usize]) {
        let num_actions = self.mdp.num_actions();
        for &s in changed {
            let row = mix_row(q.row(s), self.experts, s, num_actions);
            self.p_rows[s] = policy_transition_row(self.mdp, &row, s);
            self.rewards[s] = self
                .mdp
                .admissible_actions(s)
                .iter()
                .map(|&a| row[a] * self.mdp.reward(s, a))
                .sum();
            self.mix_rows[s] = row;
        }
    }

    /// Exact evaluation of the current mixture, warm-started on the previous
    /// round's solution.
    pub fn solve(&mut self) -> Result<&ValueFunction, MdpError> {
        let warm = self.values.as_ref().map(|v| v.as_slice());
        let values = solve_policy_values(self.mdp, &self.p_rows, &self.rewards, warm)?;
        self.values = Some(values);
        Ok(self.values.as_ref().unwrap())
    }

}

/// Expert advantages straight from a value vector, restricted to admissible
/// actions.
pub(crate) fn expert_advantage_rows(
    mdp: &TabularMdp,
    experts: &ExpertSet,
    values: &ValueFunction,
) -> Vec<Vec<f64>> {
    let per_state = |s: usize| -> Vec<f64> {
        let actions = mdp.admissible_actions(s);
        let advantages: Vec<f64> = actions
            .iter()
            .map(|&a| {
                let mut future = 0.0;
                for &(next, p) in mdp.transition_row(s, a) {
                    future += p * values.value(next);
                }
                mdp.reward(s, a) + mdp.discount() * future - values.value(s)
            })
            .collect();
        experts
            .iter()
            .map(|e| {
                actions
                    .iter()
                    .zip(advantages.iter())
                    .map(|(&a, adv)| e.row(s)[a] * adv)
                    .sum()
            })
            .collect()
    };
    if mdp.num_states() >= 2048 {
        (0..mdp.num_states()).into_par_iter().map(per_state).collect()
    } else {
        (0..mdp.num_states()).map(per_state).collect()
    }
}

/// States whose weight rows differ bitwise between two weight tables.
pub(crate) fn changed_states(old: &StateWeights, new: &StateWeights) -> Vec<usize> {
    (0..old.num_states())
        .filter(|&s| old.row(s) != new.row(s))
        .collect()
}

/// Runs the oracle learning loop: one adversarial learner per state, fed each
/// round with the exact expert advantages of the current mixture.
///
/// `gain_bound` is both the learners' validation range and the default scale
/// of their rate schedules; the exact range of expert advantages is
/// `reward_max / (1 - gamma)`.
pub fn run_oracle_loop(
    mdp: &TabularMdp,
    experts: &ExpertSet,
    strategy: StrategyKind,
    gain_bound: f64,
    rounds: usize,
    mu0: &[f64],
    options: &LoopOptions,
) -> Result<OracleRunRecord, OrchestrationError> {
    if rounds == 0 {
        return Err(OrchestrationError::ZeroRounds);
    }
    check_dims(mdp, experts)?;
    mdp.validate_state_distribution(mu0)?;
    let targets = match options.targets {
        Some(t) => t,
        None => run_targets(mdp, experts, mu0)?,
    };

    let num_states = mdp.num_states();
    let num_experts = experts.num_experts();
    let mut learners: Vec<Learner> = (0..num_states)
        .map(|_| Learner::new(strategy, num_experts, gain_bound))
        .collect::<Result<_, _>>()?;

    let mut q = StateWeights::uniform(num_states, num_experts);
    let mut ctx = MixtureContext::new(mdp, experts, &q);
    let mut values = Vec::with_capacity(rounds);
    let mut history = options
        .record_weight_history
        .then(|| Vec::with_capacity(rounds));

    for t in 1..=rounds {
        let v = ctx.solve()?;
        values.push(v.at_distribution(mu0));
        if let Some(h) = history.as_mut() {
            h.push(q.clone());
        }
        if t == rounds {
            break;
        }
        let abar = expert_advantage_rows(mdp, experts, v);
        let mut new_rows = Vec::with_capacity(num_states);
        for (s, learner) in learners.iter_mut().enumerate() {
            learner.observe_in_place(&GainVector::new(abar[s].clone(), t as u64))?;
            new_rows.push(learner.weights().to_vec());
        }
        let new_q = StateWeights::from_rows_unchecked(new_rows);
        let changed = changed_states(&q, &new_q);
        ctx.update(&new_q, &changed);
        q = new_q;
    }

    Ok(OracleRunRecord {
        values,
        final_weights: q,
        weight_history: history,
        targets,
        strategy,
        gain_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    fn seed7() -> TabularMdp {
        synthetic::random_mdp(5, 3, 0.8, 1.0, 7)
    }

    #[test]
    fn dirac_weights_recover_the_expert() {
        let mdp = seed7();
        let experts = synthetic::random_experts(&mdp, 3, 41);
        let picks = vec![1usize; 5];
        let q = StateWeights::dirac(3, &picks);
        let mixed = mix_policy(&q, &experts).unwrap();
        assert_eq!(mixed.rows(), experts.expert(1).rows());
    }

    #[test]
    fn identical_expert_rows_mix_to_themselves() {
        let mdp = seed7();
        let pi = synthetic::random_policy(&mdp, 3);
        let experts = ExpertSet::new(vec![pi.clone(), pi.clone()]).unwrap();
        let q = StateWeights::from_rows(vec![vec![0.3, 0.7]; 5]).unwrap();
        let mixed = mix_policy(&q, &experts).unwrap();
        for s in 0..5 {
            for a in 0..3 {
                assert!((mixed.row(s)[a] - pi.row(s)[a]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn two_dirac_experts_mix_convexly() {
        let mut b = TabularMdp::builder(1, 2, 0.5, 1.0);
        b.set_action(0, 0, 1.0, vec![(0, 1.0)]);
        b.set_action(0, 1, 0.5, vec![(0, 1.0)]);
        let mdp = b.build().unwrap();
        let e1 = StationaryPolicy::dirac(&mdp, &[0]).unwrap();
        let e2 = StationaryPolicy::dirac(&mdp, &[1]).unwrap();
        let experts = ExpertSet::new(vec![e1, e2]).unwrap();
        let q = StateWeights::from_rows(vec![vec![0.25, 0.75]]).unwrap();
        let mixed = mix_policy(&q, &experts).unwrap();
        assert_eq!(mixed.row(0), &[0.25, 0.75]);
    }

    #[test]
    fn lifting_all_dirac_experts_is_isomorphic() {
        // One Dirac expert per action: the lifted MDP is the original up to
        // action relabeling.
        let mdp = seed7();
        let experts = ExpertSet::new(
            (0..3)
                .map(|a| StationaryPolicy::dirac(&mdp, &[a; 5]).unwrap())
                .collect(),
        )
        .unwrap();
        let lifted = lift_mdp(&mdp, &experts).unwrap();
        for s in 0..5 {
            for a in 0..3 {
                assert_eq!(lifted.reward(s, a), mdp.reward(s, a));
                assert_eq!(lifted.transition_row(s, a), mdp.transition_row(s, a));
            }
        }
    }

    #[test]
    fn single_expert_lift_is_its_markov_chain() {
        let mdp = seed7();
        let pi = synthetic::random_policy(&mdp, 11);
        let experts = ExpertSet::new(vec![pi.clone()]).unwrap();
        let lifted = lift_mdp(&mdp, &experts).unwrap();
        let v_lift = mdp::policy_evaluation(&lifted, &StationaryPolicy::uniform(&lifted)).unwrap();
        let v_base = mdp::policy_evaluation(&mdp, &pi).unwrap();
        for s in 0..5 {
            assert!((v_lift.value(s) - v_base.value(s)).abs() < 1e-9);
        }
    }

    #[test]
    fn lifted_evaluation_matches_mixture_evaluation() {
        let mdp = seed7();
        let experts = synthetic::random_experts(&mdp, 3, 42);
        let lifted = lift_mdp(&mdp, &experts).unwrap();
        for seed in 0..5 {
            let q = synthetic::random_state_weights(5, 3, 100 + seed);
            let as_policy = StationaryPolicy::from_rows(&lifted, q.rows().to_vec()).unwrap();
            let v_lifted = mdp::policy_evaluation(&lifted, &as_policy).unwrap();
            let mixed = mix_policy(&q, &experts).unwrap();
            let v_base = mdp::policy_evaluation(&mdp, &mixed).unwrap();
            for s in 0..5 {
                assert!((v_lifted.value(s) - v_base.value(s)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn expert_advantages_of_dirac_experts_pick_table_entries() {
        let mdp = seed7();
        let experts = ExpertSet::new(
            (0..3)
                .map(|a| StationaryPolicy::dirac(&mdp, &[a; 5]).unwrap())
                .collect(),
        )
        .unwrap();
        let q = StateWeights::uniform(5, 3);
        let mixed = mix_policy(&q, &experts).unwrap();
        let v = mdp::policy_evaluation(&mdp, &mixed).unwrap();
        let (_, adv) = mdp::q_and_advantage(&mdp, &mixed, &v);
        let abar = expert_advantages(&adv, &experts);
        for s in 0..5 {
            for k in 0..3 {
                assert!((abar.value(s, k) - adv.value(s, k)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn identical_experts_have_zero_advantage() {
        let mdp = seed7();
        let pi = synthetic::random_policy(&mdp, 5);
        let experts = ExpertSet::new(vec![pi.clone(), pi.clone()]).unwrap();
        let q = StateWeights::uniform(5, 2);
        let mixed = mix_policy(&q, &experts).unwrap();
        let v = mdp::policy_evaluation(&mdp, &mixed).unwrap();
        let (_, adv) = mdp::q_and_advantage(&mdp, &mixed, &v);
        let abar = expert_advantages(&adv, &experts);
        for s in 0..5 {
            for k in 0..2 {
                assert!(abar.value(s, k).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn weighted_expert_advantage_under_own_weights_vanishes() {
        let mdp = seed7();
        let experts = synthetic::random_experts(&mdp, 3, 43);
        let q = synthetic::random_state_weights(5, 3, 44);
        let mixed = mix_policy(&q, &experts).unwrap();
        let v = mdp::policy_evaluation(&mdp, &mixed).unwrap();
        let (_, adv) = mdp::q_and_advantage(&mdp, &mixed, &v);
        let abar = expert_advantages(&adv, &experts);
        for s in 0..5 {
            let weighted: f64 = q
                .row(s)
                .iter()
                .zip(abar.row(s))
                .map(|(w, a)| w * a)
                .sum();
            assert!(weighted.abs() <= 1e-9);
        }
    }

    #[test]
    fn single_expert_orchestration_is_its_value() {
        let mdp = seed7();
        let pi = synthetic::random_policy(&mdp, 9);
        let experts = ExpertSet::new(vec![pi.clone()]).unwrap();
        let (q_star, v_star_mix) = optimal_orchestration(&mdp, &experts).unwrap();
        for s in 0..5 {
            assert_eq!(q_star.row(s), &[1.0]);
        }
        let v_expert = mdp::policy_evaluation(&mdp, &pi).unwrap();
        for s in 0..5 {
            assert!((v_star_mix.value(s) - v_expert.value(s)).abs() < 1e-8);
        }
    }

    #[test]
    fn optimal_orchestration_value_matches_reevaluation() {
        let mdp = seed7();
        let experts = synthetic::random_experts(&mdp, 3, 45);
        let (q_star, v_mix) = optimal_orchestration(&mdp, &experts).unwrap();
        let mixed = mix_policy(&q_star, &experts).unwrap();
        let v_again = mdp::policy_evaluation(&mdp, &mixed).unwrap();
        for s in 0..5 {
            assert!((v_mix.value(s) - v_again.value(s)).abs() < 1e-8);
        }
    }

    #[test]
    fn all_dirac_experts_have_no_approximation_error() {
        let mdp = seed7();
        let experts = ExpertSet::new(
            (0..3)
                .map(|a| StationaryPolicy::dirac(&mdp, &[a; 5]).unwrap())
                .collect(),
        )
        .unwrap();
        let mu0 = vec![0.2; 5];
        let report = approximation_error(&mdp, &experts, &mu0).unwrap();
        assert!(report.error.abs() <= 1e-8);
        assert!(report.certified_everywhere());
    }

    #[test]
    fn optimal_expert_gives_zero_error_and_certificates() {
        let mdp = seed7();
        let opt = mdp::value_iteration(&mdp).unwrap();
        let experts = ExpertSet::new(vec![opt.policy.clone(), synthetic::random_policy(&mdp, 8)])
            .unwrap();
        let mu0 = vec![0.2; 5];
        let report = approximation_error(&mdp, &experts, &mu0).unwrap();
        assert!(report.error.abs() <= 1e-8);
        assert!(report.certified_everywhere());
        for cert in &report.per_state {
            assert!(cert.as_ref().unwrap().contains(&0));
        }
    }

    #[test]
    fn suboptimal_expert_class_fails_certificates_and_has_error() {
        // Action 0 strictly dominates; the only expert always plays action 1.
        let mut b = TabularMdp::builder(2, 2, 0.5, 1.0);
        for s in 0..2 {
            b.set_action(s, 0, 1.0, vec![(s, 1.0)]);
            b.set_action(s, 1, 0.0, vec![(s, 1.0)]);
        }
        let mdp = b.build().unwrap();
        let bad = StationaryPolicy::dirac(&mdp, &[1, 1]).unwrap();
        let experts = ExpertSet::new(vec![bad]).unwrap();
        let report = approximation_error(&mdp, &experts, &[0.5, 0.5]).unwrap();
        assert!(report.error > 1e-6);
        assert!(!report.certified_everywhere());
        assert!(report.per_state.iter().all(|c| c.is_none()));
    }

    #[test]
    fn identical_experts_keep_loop_value_constant() {
        let mdp = seed7();
        let pi = synthetic::random_policy(&mdp, 6);
        let experts = ExpertSet::new(vec![pi.clone(), pi.clone()]).unwrap();
        let mu0 = vec![0.2; 5];
        let record = run_oracle_loop(
            &mdp,
            &experts,
            StrategyKind::poly_default(2),
            mdp.value_bound(),
            20,
            &mu0,
            &LoopOptions::default(),
        )
        .unwrap();
        for window in record.values.windows(2) {
            assert!((window[0] - window[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_loop_cesaro_bound_holds() {
        // Normalized 6-state MDP: Cesaro regret within B/( (1-gamma)^2 T ).
        let mdp = synthetic::random_mdp(6, 3, 0.8, 1.0, 19);
        let experts = synthetic::random_experts(&mdp, 3, 20);
        let mu0 = synthetic::random_distribution(6, 21);
        let gain_bound = mdp.value_bound();
        let rounds = 200;
        for strategy in [
            StrategyKind::poly_default(3),
            StrategyKind::ExpTimeVarying { rate: None },
            StrategyKind::GreedyProjection { rate: None },
        ] {
            let record = run_oracle_loop(
                &mdp,
                &experts,
                strategy,
                gain_bound,
                rounds,
                &mu0,
                &LoopOptions::default(),
            )
            .unwrap();
            let regret = record.targets.best_mixture_value - record.cesaro_mean();
            let b_norm = crate::adversarial::regret_bound(&strategy, rounds as u64, 3, 1.0);
            let bound = b_norm / ((1.0 - 0.8f64).powi(2) * rounds as f64);
            assert!(
                regret <= bound + 1e-8,
                "{strategy:?}: regret {regret} bound {bound}"
            );
        }
    }

    #[test]
    fn oracle_loop_fixed_eta_last_iterate_bound() {
        let mdp = synthetic::random_mdp(6, 3, 0.8, 1.0, 23);
        let experts = synthetic::random_experts(&mdp, 3, 24);
        let mu0 = synthetic::random_distribution(6, 25);
        let rounds = 200usize;
        let eta = 0.1;
        let record = run_oracle_loop(
            &mdp,
            &experts,
            StrategyKind::ExpFixed { eta },
            mdp.value_bound(),
            rounds,
            &mu0,
            &LoopOptions::default(),
        )
        .unwrap();
        let gamma = 0.8f64;
        let final_regret = record.targets.best_mixture_value - record.values[rounds - 1];
        let bound = (3.0f64).ln() / (eta * (1.0 - gamma) * rounds as f64)
            + 1.0 / ((1.0 - gamma).powi(2) * rounds as f64);
        assert!(final_regret <= bound + 1e-8, "{final_regret} vs {bound}");
    }

    #[test]
    fn monotone_strategies_never_decrease_loop_values() {
        let mdp = synthetic::random_mdp(5, 3, 0.7, 1.0, 29);
        let experts = synthetic::random_experts(&mdp, 3, 30);
        let mu0 = synthetic::random_distribution(5, 31);
        for strategy in [
            StrategyKind::poly_default(3),
            StrategyKind::ExpFixed { eta: 0.2 },
            StrategyKind::GreedyProjection { rate: None },
        ] {
            let record = run_oracle_loop(
                &mdp,
                &experts,
                strategy,
                mdp.value_bound(),
                100,
                &mu0,
                &LoopOptions::default(),
            )
            .unwrap();
            for w in record.values.windows(2) {
                assert!(w[1] >= w[0] - 1e-8, "{strategy:?}");
            }
        }
    }

    #[test]
    fn weight_history_rows_stay_on_simplex() {
        let mdp = synthetic::random_mdp(4, 3, 0.8, 1.0, 33);
        let experts = synthetic::random_experts(&mdp, 3, 34);
        let mu0 = synthetic::random_distribution(4, 35);
        let record = run_oracle_loop(
            &mdp,
            &experts,
            StrategyKind::ExpTimeVarying { rate: None },
            mdp.value_bound(),
            50,
            &mu0,
            &LoopOptions {
                record_weight_history: true,
                targets: None,
            },
        )
        .unwrap();
        let history = record.weight_history.unwrap();
        assert_eq!(history.len(), 50);
        for q in &history {
            for s in 0..4 {
                let sum: f64 = q.row(s).iter().sum();
                assert!((sum - 1.0).abs() <= 1e-12);
                assert!(q.row(s).iter().all(|&w| w >= 0.0));
            }
        }
    }
}
