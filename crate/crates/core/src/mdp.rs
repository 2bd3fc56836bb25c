//! Finite discounted MDPs and exact tabular computations: policy evaluation,
//! Q/advantage tables, optimal values, discounted visitation distributions,
//! and the performance-difference identity.
//!
//! Conventions: transition rows are sparse probability vectors; rewards are
//! deterministic means in `[0, reward_max]`; every state carries a nonempty
//! set of admissible actions; Q and advantage entries of inadmissible actions
//! are zero.

use thiserror::Error;

use crate::solver::{self, SparseRow};

/// Tolerance on probability rows (transitions, policies, weights).
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Contractual sup-norm residual of linear solves and value iteration.
pub const BELLMAN_RESIDUAL_TOL: f64 = 1e-9;
/// Iteration cap of the fixed-point fallback path.
pub const SOLVE_ITERATION_CAP: usize = 1_000_000;

/// Internal solve target; one order tighter than the contract so that
/// derived identities stay inside their own tolerances.
const INTERNAL_TOL: f64 = BELLMAN_RESIDUAL_TOL / 10.0;

#[derive(Debug, Error)]
pub enum MdpError {
    #[error("discount factor must lie in (0,1), got {0}")]
    InvalidDiscount(f64),
    #[error("reward_max must be positive and finite, got {0}")]
    InvalidRewardBound(f64),
    #[error("state and action counts must be positive")]
    EmptyDimensions,
    #[error("transition row ({state},{action}) sums to {sum}, not 1")]
    TransitionRowNotStochastic { state: usize, action: usize, sum: f64 },
    #[error("transition row ({state},{action}) has negative probability on {next}")]
    NegativeTransitionProbability { state: usize, action: usize, next: usize },
    #[error("transition row ({state},{action}) targets out-of-range state {next}")]
    TransitionTargetOutOfRange { state: usize, action: usize, next: usize },
    #[error("reward {value} at ({state},{action}) outside [0, {bound}]")]
    RewardOutOfRange { state: usize, action: usize, value: f64, bound: f64 },
    #[error("state {state} has no admissible action")]
    NoAdmissibleAction { state: usize },
    #[error("action index {action} out of range (num_actions {num_actions})")]
    ActionOutOfRange { action: usize, num_actions: usize },
    #[error("policy shape does not match the MDP")]
    PolicyShapeMismatch,
    #[error("policy row at state {state} sums to {sum}, not 1")]
    PolicyRowNotSimplex { state: usize, sum: f64 },
    #[error("policy row at state {state} is negative on action {action}")]
    PolicyRowNegative { state: usize, action: usize },
    #[error("policy at state {state} puts mass on inadmissible action {action}")]
    PolicyMassOnInadmissible { state: usize, action: usize },
    #[error("distribution sums to {sum}, not 1")]
    DistributionNotSimplex { sum: f64 },
    #[error("distribution has negative entry at index {index}")]
    DistributionNegative { index: usize },
    #[error("distribution length {got} does not match expected {expected}")]
    DistributionLengthMismatch { got: usize, expected: usize },
    #[error("state index {state} out of range (num_states {num_states})")]
    StateOutOfRange { state: usize, num_states: usize },
    #[error("action distribution puts mass on inadmissible action {action} at state {state}")]
    MassOnInadmissible { state: usize, action: usize },
    #[error("linear solve did not reach residual tolerance: residual {residual} after {iterations} iterations")]
    SolveDidNotConverge { residual: f64, iterations: usize },
}

/// A finite discounted MDP with sparse transitions and admissibility masks.
#[derive(Debug, Clone)]
pub struct TabularMdp {
    num_states: usize,
    num_actions: usize,
    discount: f64,
    reward_max: f64,
    transition: Vec<Vec<SparseRow>>,
    reward: Vec<Vec<f64>>,
    admissible: Vec<Vec<usize>>,
    admissible_mask: Vec<bool>,
}

impl TabularMdp {
    pub fn builder(
        num_states: usize,
        num_actions: usize,
        discount: f64,
        reward_max: f64,
    ) -> TabularMdpBuilder {
        TabularMdpBuilder {
            num_states,
            num_actions,
            discount,
            reward_max,
            transition: vec![vec![Vec::new(); num_actions]; num_states],
            reward: vec![vec![0.0; num_actions]; num_states],
            admissible_mask: vec![false; num_states * num_actions],
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn reward_max(&self) -> f64 {
        self.reward_max
    }

    /// Upper bound on any value function: `reward_max / (1 - gamma)`.
    pub fn value_bound(&self) -> f64 {
        self.reward_max / (1.0 - self.discount)
    }

    pub fn reward(&self, state: usize, action: usize) -> f64 {
        self.reward[state][action]
    }

    pub fn transition_row(&self, state: usize, action: usize) -> &[(usize, f64)] {
        &self.transition[state][action]
    }

    /// Admissible actions of `state`, in increasing order.
    pub fn admissible_actions(&self, state: usize) -> &[usize] {
        &self.admissible[state]
    }

    pub fn is_admissible(&self, state: usize, action: usize) -> bool {
        self.admissible_mask[state * self.num_actions + action]
    }

    /// Checks that `mu` is a probability distribution over states.
    pub fn validate_state_distribution(&self, mu: &[f64]) -> Result<(), MdpError> {
        validate_distribution(mu, self.num_states, 1e-9)
    }
}

/// Incremental constructor; an action becomes admissible once set.
pub struct TabularMdpBuilder {
    num_states: usize,
    num_actions: usize,
    discount: f64,
    reward_max: f64,
    transition: Vec<Vec<SparseRow>>,
    reward: Vec<Vec<f64>>,
    admissible_mask: Vec<bool>,
}

impl TabularMdpBuilder {
    /// Declares `(state, action)` admissible with the given reward and sparse
    /// successor distribution.
    pub fn set_action(
        &mut self,
        state: usize,
        action: usize,
        reward: f64,
        successors: Vec<(usize, f64)>,
    ) -> &mut Self {
        self.transition[state][action] = successors;
        self.reward[state][action] = reward;
        self.admissible_mask[state * self.num_actions + action] = true;
        self
    }

    pub fn build(self) -> Result<TabularMdp, MdpError> {
        if self.num_states == 0 || self.num_actions == 0 {
            return Err(MdpError::EmptyDimensions);
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(MdpError::InvalidDiscount(self.discount));
        }
        if !(self.reward_max > 0.0 && self.reward_max.is_finite()) {
            return Err(MdpError::InvalidRewardBound(self.reward_max));
        }
        let mut admissible = vec![Vec::new(); self.num_states];
        for (state, state_admissible) in admissible.iter_mut().enumerate() {
            for action in 0..self.num_actions {
                if !self.admissible_mask[state * self.num_actions + action] {
                    continue;
                }
                let row = &self.transition[state][action];
                let mut sum = 0.0;
                for &(next, p) in row {
                    if next >= self.num_states {
                        return Err(MdpError::TransitionTargetOutOfRange { state, action, next });
                    }
                    if p < 0.0 {
                        return Err(MdpError::NegativeTransitionProbability {
                            state,
                            action,
                            next,
                        });
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    return Err(MdpError::TransitionRowNotStochastic { state, action, sum });
                }
                let r = self.reward[state][action];
                if !(0.0..=self.reward_max).contains(&r) {
                    return Err(MdpError::RewardOutOfRange {
                        state,
                        action,
                        value: r,
                        bound: self.reward_max,
                    });
                }
                state_admissible.push(action);
            }
            if state_admissible.is_empty() {
                return Err(MdpError::NoAdmissibleAction { state });
            }
        }
        Ok(TabularMdp {
            num_states: self.num_states,
            num_actions: self.num_actions,
            discount: self.discount,
            reward_max: self.reward_max,
            transition: self.transition,
            reward: self.reward,
            admissible,
            admissible_mask: self.admissible_mask,
        })
    }
}

/// A stationary policy: one distribution over actions per state, supported on
/// admissible actions.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPolicy {
    probs: Vec<Vec<f64>>,
}

impl StationaryPolicy {
    pub fn from_rows(mdp: &TabularMdp, rows: Vec<Vec<f64>>) -> Result<Self, MdpError> {
        if rows.len() != mdp.num_states() {
            return Err(MdpError::PolicyShapeMismatch);
        }
        for (state, row) in rows.iter().enumerate() {
            if row.len() != mdp.num_actions() {
                return Err(MdpError::PolicyShapeMismatch);
            }
            let mut sum = 0.0;
            for (action, &p) in row.iter().enumerate() {
                if p < 0.0 {
                    return Err(MdpError::PolicyRowNegative { state, action });
                }
                if p > 0.0 && !mdp.is_admissible(state, action) {
                    return Err(MdpError::PolicyMassOnInadmissible { state, action });
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(MdpError::PolicyRowNotSimplex { state, sum });
            }
        }
        Ok(Self { probs: rows })
    }

    /// Uniform over the admissible actions of each state.
    pub fn uniform(mdp: &TabularMdp) -> Self {
        let rows = (0..mdp.num_states())
            .map(|s| {
                let actions = mdp.admissible_actions(s);
                let mut row = vec![0.0; mdp.num_actions()];
                let p = 1.0 / actions.len() as f64;
                for &a in actions {
                    row[a] = p;
                }
                row
            })
            .collect();
        Self { probs: rows }
    }

    /// Dirac mass on one admissible action per state.
    pub fn dirac(mdp: &TabularMdp, actions: &[usize]) -> Result<Self, MdpError> {
        if actions.len() != mdp.num_states() {
            return Err(MdpError::PolicyShapeMismatch);
        }
        let mut rows = vec![vec![0.0; mdp.num_actions()]; mdp.num_states()];
        for (state, &action) in actions.iter().enumerate() {
            if action >= mdp.num_actions() {
                return Err(MdpError::ActionOutOfRange {
                    action,
                    num_actions: mdp.num_actions(),
                });
            }
            if !mdp.is_admissible(state, action) {
                return Err(MdpError::PolicyMassOnInadmissible { state, action });
            }
            rows[state][action] = 1.0;
        }
        Ok(Self { probs: rows })
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<f64>>) -> Self {
        Self { probs: rows }
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.probs[state]
    }

    pub fn num_states(&self) -> usize {
        self.probs.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.probs
    }
}

/// State values of a fixed policy (or of the optimum).
#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction {
    values: Vec<f64>,
}

impl ValueFunction {
    pub(crate) fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn value(&self, state: usize) -> f64 {
        self.values[state]
    }

    /// Linear extension to an initial distribution: `sum_s mu(s) V(s)`.
    pub fn at_distribution(&self, mu: &[f64]) -> f64 {
        debug_assert_eq!(mu.len(), self.values.len());
        self.values
            .iter()
            .zip(mu.iter())
            .map(|(v, m)| v * m)
            .sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Action values; zero on inadmissible entries.
#[derive(Debug, Clone)]
pub struct QFunction {
    table: Vec<Vec<f64>>,
}

impl QFunction {
    pub fn value(&self, state: usize, action: usize) -> f64 {
        self.table[state][action]
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.table[state]
    }
}

/// Advantages `A(s,a) = Q(s,a) - V(s)`; zero on inadmissible entries.
#[derive(Debug, Clone)]
pub struct AdvantageTable {
    table: Vec<Vec<f64>>,
}

impl AdvantageTable {
    pub fn value(&self, state: usize, action: usize) -> f64 {
        self.table[state][action]
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.table[state]
    }

    pub fn num_states(&self) -> usize {
        self.table.len()
    }
}

/// Normalized discounted state-occupancy of a policy from an initial
/// distribution.
#[derive(Debug, Clone)]
pub struct VisitationDistribution {
    mu: Vec<f64>,
    origin: Vec<f64>,
    policy_tag: String,
}

impl VisitationDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.mu
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn policy_tag(&self) -> &str {
        &self.policy_tag
    }

    pub fn tagged(mut self, tag: impl Into<String>) -> Self {
        self.policy_tag = tag.into();
        self
    }
}

pub(crate) fn validate_distribution(
    mu: &[f64],
    expected_len: usize,
    tol: f64,
) -> Result<(), MdpError> {
    if mu.len() != expected_len {
        return Err(MdpError::DistributionLengthMismatch {
            got: mu.len(),
            expected: expected_len,
        });
    }
    let mut sum = 0.0;
    for (index, &p) in mu.iter().enumerate() {
        if p < -tol || !p.is_finite() {
            return Err(MdpError::DistributionNegative { index });
        }
        sum += p;
    }
    if (sum - 1.0).abs() > tol {
        return Err(MdpError::DistributionNotSimplex { sum });
    }
    Ok(())
}

/// Merged one-step transition rows of the Markov chain induced by `pi`:
/// `P(s'|s) = sum_a pi(a|s) T(s'|s,a)`.
pub(crate) fn policy_transition_rows(mdp: &TabularMdp, pi: &StationaryPolicy) -> Vec<SparseRow> {
    (0..mdp.num_states())
        .map(|s| policy_transition_row(mdp, pi.row(s), s))
        .collect()
}

pub(crate) fn policy_transition_row(
    mdp: &TabularMdp,
    policy_row: &[f64],
    state: usize,
) -> SparseRow {
    let mut entries: SparseRow = Vec::new();
    for &action in mdp.admissible_actions(state) {
        let weight = policy_row[action];
        if weight == 0.0 {
            continue;
        }
        for &(next, p) in mdp.transition_row(state, action) {
            entries.push((next, weight * p));
        }
    }
    entries.sort_unstable_by_key(|&(next, _)| next);
    let mut merged: SparseRow = Vec::with_capacity(entries.len());
    for (next, p) in entries {
        match merged.last_mut() {
            Some((last, acc)) if *last == next => *acc += p,
            _ => merged.push((next, p)),
        }
    }
    merged
}

/// Mean one-step reward of `pi`: `r_pi(s) = sum_a pi(a|s) r(s,a)`.
pub(crate) fn policy_reward(mdp: &TabularMdp, pi: &StationaryPolicy) -> Vec<f64> {
    (0..mdp.num_states())
        .map(|s| {
            mdp.admissible_actions(s)
                .iter()
                .map(|&a| pi.row(s)[a] * mdp.reward(s, a))
                .sum()
        })
        .collect()
}

fn check_policy(mdp: &TabularMdp, pi: &StationaryPolicy) -> Result<(), MdpError> {
    if pi.num_states() != mdp.num_states()
        || pi.rows().iter().any(|r| r.len() != mdp.num_actions())
    {
        return Err(MdpError::PolicyShapeMismatch);
    }
    Ok(())
}

/// Solves the Bellman consistency equation `V = r_pi + gamma P_pi V` to a
/// sup-norm residual of at most [`BELLMAN_RESIDUAL_TOL`].
pub fn policy_evaluation(mdp: &TabularMdp, pi: &StationaryPolicy) -> Result<ValueFunction, MdpError> {
    policy_evaluation_warm(mdp, pi, None)
}

/// Same as [`policy_evaluation`], seeding the iterative path with a previous
/// solution when available.
pub fn policy_evaluation_warm(
    mdp: &TabularMdp,
    pi: &StationaryPolicy,
    warm: Option<&ValueFunction>,
) -> Result<ValueFunction, MdpError> {
    check_policy(mdp, pi)?;
    let p_rows = policy_transition_rows(mdp, pi);
    let rewards = policy_reward(mdp, pi);
    solve_policy_values(mdp, &p_rows, &rewards, warm.map(|v| v.as_slice()))
}

pub(crate) fn solve_policy_values(
    mdp: &TabularMdp,
    p_rows: &[SparseRow],
    rewards: &[f64],
    warm: Option<&[f64]>,
) -> Result<ValueFunction, MdpError> {
    solver::solve_affine_fixed_point(
        p_rows,
        mdp.discount(),
        rewards,
        warm,
        INTERNAL_TOL,
        SOLVE_ITERATION_CAP,
    )
    .map(ValueFunction::new)
    .map_err(|f| MdpError::SolveDidNotConverge {
        residual: f.residual,
        iterations: f.iterations,
    })
}

/// Q-values and advantages of `pi` given its evaluation `v`.
///
/// `Q(s,a) = r(s,a) + gamma * sum_{s'} T(s'|s,a) V(s')` on admissible pairs;
/// inadmissible entries of both tables are zero.
pub fn q_and_advantage(
    mdp: &TabularMdp,
    pi: &StationaryPolicy,
    v: &ValueFunction,
) -> (QFunction, AdvantageTable) {
    debug_assert_eq!(v.len(), mdp.num_states());
    let _ = pi;
    let mut q = vec![vec![0.0; mdp.num_actions()]; mdp.num_states()];
    let mut adv = vec![vec![0.0; mdp.num_actions()]; mdp.num_states()];
    for s in 0..mdp.num_states() {
        for &a in mdp.admissible_actions(s) {
            let mut future = 0.0;
            for &(next, p) in mdp.transition_row(s, a) {
                future += p * v.value(next);
            }
            let qv = mdp.reward(s, a) + mdp.discount() * future;
            q[s][a] = qv;
            adv[s][a] = qv - v.value(s);
        }
    }
    (QFunction { table: q }, AdvantageTable { table: adv })
}

/// Advantage of playing the action distribution `nu` at `state`:
/// `sum_a nu(a) A(s,a)`.
pub fn advantage_of_distribution(
    mdp: &TabularMdp,
    advantages: &AdvantageTable,
    state: usize,
    nu: &[f64],
) -> Result<f64, MdpError> {
    if state >= mdp.num_states() {
        return Err(MdpError::StateOutOfRange {
            state,
            num_states: mdp.num_states(),
        });
    }
    validate_distribution(nu, mdp.num_actions(), 1e-9)?;
    for (action, &p) in nu.iter().enumerate() {
        if p > 1e-12 && !mdp.is_admissible(state, action) {
            return Err(MdpError::MassOnInadmissible { state, action });
        }
    }
    Ok(nu
        .iter()
        .zip(advantages.row(state).iter())
        .map(|(p, a)| p * a)
        .sum())
}

/// Result of solving the Bellman optimality equation.
#[derive(Debug, Clone)]
pub struct OptimalSolution {
    pub values: ValueFunction,
    pub q: QFunction,
    pub policy: StationaryPolicy,
}

/// Value iteration to a sup-norm fixed-point residual of at most
/// [`BELLMAN_RESIDUAL_TOL`]; the greedy policy breaks ties by lowest action
/// index.
pub fn value_iteration(mdp: &TabularMdp) -> Result<OptimalSolution, MdpError> {
    let n = mdp.num_states();
    let mut v = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut converged = false;
    for _ in 0..SOLVE_ITERATION_CAP {
        let delta = optimality_sweep(mdp, &v, &mut next);
        std::mem::swap(&mut v, &mut next);
        if delta <= INTERNAL_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        let delta = optimality_sweep(mdp, &v, &mut next);
        if delta > BELLMAN_RESIDUAL_TOL {
            return Err(MdpError::SolveDidNotConverge {
                residual: delta,
                iterations: SOLVE_ITERATION_CAP,
            });
        }
    }

    let values = ValueFunction::new(v);
    let mut q = vec![vec![0.0; mdp.num_actions()]; n];
    let mut greedy = vec![0usize; n];
    for s in 0..n {
        let mut best_action = mdp.admissible_actions(s)[0];
        let mut best_q = f64::NEG_INFINITY;
        for &a in mdp.admissible_actions(s) {
            let mut future = 0.0;
            for &(nxt, p) in mdp.transition_row(s, a) {
                future += p * values.value(nxt);
            }
            let qv = mdp.reward(s, a) + mdp.discount() * future;
            q[s][a] = qv;
            if qv > best_q {
                best_q = qv;
                best_action = a;
            }
        }
        greedy[s] = best_action;
    }
    let policy = StationaryPolicy::dirac(mdp, &greedy)?;
    Ok(OptimalSolution {
        values,
        q: QFunction { table: q },
        policy,
    })
}

fn optimality_sweep(mdp: &TabularMdp, v: &[f64], out: &mut [f64]) -> f64 {
    use rayon::prelude::*;
    let update = |s: usize| -> f64 {
        let mut best = f64::NEG_INFINITY;
        for &a in mdp.admissible_actions(s) {
            let mut future = 0.0;
            for &(next, p) in mdp.transition_row(s, a) {
                future += p * v[next];
            }
            let qv = mdp.reward(s, a) + mdp.discount() * future;
            if qv > best {
                best = qv;
            }
        }
        best
    };
    if mdp.num_states() >= 2048 {
        out.par_iter_mut()
            .enumerate()
            .for_each(|(s, o)| *o = update(s));
        out.par_iter()
            .zip(v.par_iter())
            .map(|(a, b)| (a - b).abs())
            .reduce(|| 0.0, f64::max)
    } else {
        let mut delta = 0.0f64;
        for (s, o) in out.iter_mut().enumerate() {
            *o = update(s);
            delta = delta.max((*o - v[s]).abs());
        }
        delta
    }
}

/// Discounted state visitation distribution:
/// `mu(s) = (1-gamma) sum_t gamma^t P(s_t = s)` under `pi` from `mu0`.
pub fn discounted_visitation(
    mdp: &TabularMdp,
    pi: &StationaryPolicy,
    mu0: &[f64],
) -> Result<VisitationDistribution, MdpError> {
    check_policy(mdp, pi)?;
    mdp.validate_state_distribution(mu0)?;
    let p_rows = policy_transition_rows(mdp, pi);
    let transposed = transpose_rows(&p_rows, mdp.num_states());
    let b: Vec<f64> = mu0.iter().map(|m| (1.0 - mdp.discount()) * m).collect();
    let mu = solver::solve_affine_fixed_point(
        &transposed,
        mdp.discount(),
        &b,
        None,
        // mu lives on the probability scale; a tight target is cheap.
        1e-12,
        SOLVE_ITERATION_CAP,
    )
    .map_err(|f| MdpError::SolveDidNotConverge {
        residual: f.residual,
        iterations: f.iterations,
    })?;
    Ok(VisitationDistribution {
        mu,
        origin: mu0.to_vec(),
        policy_tag: String::new(),
    })
}

pub(crate) fn transpose_rows(rows: &[SparseRow], n: usize) -> Vec<SparseRow> {
    let mut out: Vec<SparseRow> = vec![Vec::new(); n];
    for (i, row) in rows.iter().enumerate() {
        for &(j, p) in row {
            out[j].push((i, p));
        }
    }
    out
}

/// Both sides of the performance-difference identity at `mu0`:
/// the value gap `V_pi - V_pi'` and its visitation-weighted advantage form.
pub fn performance_difference(
    mdp: &TabularMdp,
    pi: &StationaryPolicy,
    pi_prime: &StationaryPolicy,
    mu0: &[f64],
) -> Result<(f64, f64), MdpError> {
    let v_pi = policy_evaluation(mdp, pi)?;
    let v_prime = policy_evaluation(mdp, pi_prime)?;
    let lhs = v_pi.at_distribution(mu0) - v_prime.at_distribution(mu0);

    let (_, adv_prime) = q_and_advantage(mdp, pi_prime, &v_prime);
    let visitation = discounted_visitation(mdp, pi, mu0)?;
    let mut weighted = 0.0;
    for s in 0..mdp.num_states() {
        let mut local = 0.0;
        for &a in mdp.admissible_actions(s) {
            local += pi.row(s)[a] * adv_prime.value(s, a);
        }
        weighted += visitation.probabilities()[s] * local;
    }
    let rhs = weighted / (1.0 - mdp.discount());
    Ok((lhs, rhs))
}
