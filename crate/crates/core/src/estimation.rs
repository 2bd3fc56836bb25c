//! Biased-but-bounded Monte-Carlo estimation of Q-values and expert
//! advantages, and the learning loop that runs on those estimates.
//!
//! Q-values are estimated by a single `H`-step truncated rollout, which is a
//! pessimistic estimator with bias at most `epsilon * reward_max` once
//! `gamma^H / (1 - gamma) <= epsilon`. Per round, only a Bernoulli(`kappa`)
//! share of states is estimated; selected rows are rescaled by `1/kappa`,
//! which keeps the estimates unbiased across the mask (up to the truncation
//! bias) and almost surely bounded by `reward_max / (kappa (1 - gamma))`.
//! The lazy variant instead estimates only the state currently visited by
//! the live trajectory, without rescaling.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::adversarial::{AdversarialError, GainVector, Learner, StrategyKind};
use crate::mdp::{MdpError, StationaryPolicy, TabularMdp};
use crate::orchestration::{
    changed_states, expert_advantage_rows, ExpertSet, LoopOptions, MixtureContext,
    OrchestrationError, RunTargets, StateWeights,
};
use crate::rng::{self, purpose};

#[derive(Debug, Error)]
pub enum EstimationError {
    #[error("discount factor must lie in (0,1), got {0}")]
    InvalidDiscount(f64),
    #[error("target bias must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("kappa must lie in (0,1], got {0}")]
    InvalidKappa(f64),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("rollout repeats must be at least 1")]
    ZeroRepeats,
    #[error("epsilon {epsilon} needs a horizon beyond the cap {cap}")]
    EpsilonTooSmall { epsilon: f64, cap: usize },
    #[error("horizon {horizon} leaves truncation bias {bias}, above epsilon {epsilon}")]
    HorizonTooShort { horizon: usize, bias: f64, epsilon: f64 },
    #[error("action {action} is inadmissible at state {state}")]
    InadmissibleAction { state: usize, action: usize },
    #[error(transparent)]
    Mdp(#[from] MdpError),
    #[error(transparent)]
    Orchestration(#[from] OrchestrationError),
    #[error(transparent)]
    Adversarial(#[from] AdversarialError),
}

/// Which states get estimated each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationMode {
    /// Independent Bernoulli(`kappa`) mask over all states, rows rescaled by
    /// `1/kappa`.
    Masked,
    /// Only the live trajectory's current state, no rescaling.
    Lazy,
}

const HORIZON_CAP: usize = 1_000_000;

/// Smallest horizon `H >= 1` with `gamma^H <= epsilon * (1 - gamma)`.
pub fn horizon_for_epsilon(gamma: f64, epsilon: f64) -> Result<usize, EstimationError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(EstimationError::InvalidDiscount(gamma));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(EstimationError::InvalidEpsilon(epsilon));
    }
    let target = epsilon * (1.0 - gamma);
    let mut h = 1usize;
    while gamma.powi(h as i32) > target {
        h += 1;
        if h > HORIZON_CAP {
            return Err(EstimationError::EpsilonTooSmall {
                epsilon,
                cap: HORIZON_CAP,
            });
        }
    }
    Ok(h)
}

/// Estimator parameters: target bias, rollout horizon, estimation share, and
/// mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationConfig {
    /// Target bias on the normalized reward scale; the reward-scale bias is
    /// `reward_max * epsilon`.
    pub epsilon: f64,
    pub horizon: usize,
    pub kappa: f64,
    pub mode: EstimationMode,
    /// Rollouts averaged per (state, action); the construction uses one.
    pub rollout_repeats: usize,
}

impl EstimationConfig {
    pub fn new(
        epsilon: f64,
        horizon: usize,
        kappa: f64,
        mode: EstimationMode,
    ) -> Result<Self, EstimationError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(EstimationError::InvalidEpsilon(epsilon));
        }
        if horizon == 0 {
            return Err(EstimationError::ZeroHorizon);
        }
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(EstimationError::InvalidKappa(kappa));
        }
        Ok(Self {
            epsilon,
            horizon,
            kappa,
            mode,
            rollout_repeats: 1,
        })
    }

    /// Derives the horizon from the target bias.
    pub fn for_bias(
        gamma: f64,
        epsilon: f64,
        kappa: f64,
        mode: EstimationMode,
    ) -> Result<Self, EstimationError> {
        let horizon = horizon_for_epsilon(gamma, epsilon)?;
        Self::new(epsilon, horizon, kappa, mode)
    }

    pub fn with_repeats(mut self, repeats: usize) -> Result<Self, EstimationError> {
        if repeats == 0 {
            return Err(EstimationError::ZeroRepeats);
        }
        self.rollout_repeats = repeats;
        Ok(self)
    }

    /// Checks the truncation invariant `gamma^H / (1-gamma) <= epsilon`.
    pub fn validate_for(&self, gamma: f64) -> Result<(), EstimationError> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(EstimationError::InvalidDiscount(gamma));
        }
        let bias = gamma.powi(self.horizon as i32) / (1.0 - gamma);
        if bias > self.epsilon {
            return Err(EstimationError::HorizonTooShort {
                horizon: self.horizon,
                bias,
                epsilon: self.epsilon,
            });
        }
        Ok(())
    }

    /// Almost-sure magnitude bound of the advantage estimates on the reward
    /// scale.
    pub fn gain_bound(&self, mdp: &TabularMdp) -> f64 {
        match self.mode {
            EstimationMode::Masked => mdp.value_bound() / self.kappa,
            EstimationMode::Lazy => mdp.value_bound(),
        }
    }
}

/// Draws an index from a sparse probability row.
pub(crate) fn sample_sparse(row: &[(usize, f64)], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for &(index, p) in row {
        acc += p;
        if u < acc {
            return index;
        }
    }
    // Rounding left u above the accumulated mass; take the last entry.
    row.last().expect("nonempty row").0
}

/// Draws an action from a dense policy row.
pub(crate) fn sample_dense(row: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (index, &p) in row.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = index;
            if u < acc {
                return index;
            }
        }
    }
    last_positive
}

/// One truncated rollout: the discounted return of `horizon` steps starting
/// from `(s0, a0)` and following `pi` afterwards.
pub fn rollout_q_estimate(
    mdp: &TabularMdp,
    pi: &StationaryPolicy,
    s0: usize,
    a0: usize,
    horizon: usize,
    rng: &mut ChaCha8Rng,
) -> Result<f64, EstimationError> {
    if !mdp.is_admissible(s0, a0) {
        return Err(EstimationError::InadmissibleAction {
            state: s0,
            action: a0,
        });
    }
    let mut state = s0;
    let mut action = a0;
    let mut total = 0.0;
    let mut discount = 1.0;
    for step in 0..horizon {
        total += discount * mdp.reward(state, action);
        if step + 1 == horizon {
            break;
        }
        discount *= mdp.discount();
        state = sample_sparse(mdp.transition_row(state, action), rng);
        action = sample_dense(pi.row(state), rng);
    }
    Ok(total)
}

/// Masked rollout estimates of the expert advantages at every state.
#[derive(Debug, Clone, PartialEq)]
pub struct AdvantageEstimate {
    rows: Vec<Vec<f64>>,
    mask: Vec<bool>,
}

impl AdvantageEstimate {
    pub fn row(&self, state: usize) -> &[f64] {
        &self.rows[state]
    }

    pub fn masked_on(&self, state: usize) -> bool {
        self.mask[state]
    }

    pub fn num_states(&self) -> usize {
        self.rows.len()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
}

/// Estimates expert advantages for round `round` under weights `q`.
///
/// One rollout batch per admissible action, shared across experts: with
/// `Z/kappa` masking (masked mode) or an indicator of `live_state` (lazy
/// mode),
/// `atilde(s,k) = factor * sum_a pi_k(a|s) (Qhat(s,a) - sum_b qPi(b|s) Qhat(s,b))`.
pub fn estimate_expert_advantages(
    mdp: &TabularMdp,
    q: &StateWeights,
    experts: &ExpertSet,
    config: &EstimationConfig,
    round: u64,
    root_seed: u64,
    live_state: Option<usize>,
) -> Result<AdvantageEstimate, EstimationError> {
    let mixture = crate::orchestration::mix_policy(q, experts)?;
    let mixture = &mixture;
    let num_states = mdp.num_states();
    let estimate = |s: usize| -> (Vec<f64>, bool) {
        estimate_state_advantages(mdp, mixture, experts, config, round, root_seed, live_state, s)
    };

    let results: Vec<(Vec<f64>, bool)> = if num_states >= 256 {
        (0..num_states).into_par_iter().map(estimate).collect()
    } else {
        (0..num_states).map(estimate).collect()
    };
    let mut rows = Vec::with_capacity(num_states);
    let mut mask = Vec::with_capacity(num_states);
    for (row, selected) in results {
        rows.push(row);
        mask.push(selected);
    }
    Ok(AdvantageEstimate { rows, mask })
}

/// One state's advantage-estimate row and its mask draw, from the mixture
/// policy `qPi`. Exposed for audits that sample single states repeatedly.
#[allow(clippy::too_many_arguments)]
pub fn estimate_state_advantages(
    mdp: &TabularMdp,
    mixture: &StationaryPolicy,
    experts: &ExpertSet,
    config: &EstimationConfig,
    round: u64,
    root_seed: u64,
    live_state: Option<usize>,
    s: usize,
) -> (Vec<f64>, bool) {
    let num_experts = experts.num_experts();
    let (selected, factor) = match config.mode {
        EstimationMode::Masked => {
            let mut mask_rng = rng::stream(root_seed, &[purpose::MASK, round, s as u64]);
            let z: f64 = mask_rng.random();
            (z < config.kappa, 1.0 / config.kappa)
        }
        EstimationMode::Lazy => (live_state == Some(s), 1.0),
    };
    if !selected {
        return (vec![0.0; num_experts], false);
    }
    let actions = mdp.admissible_actions(s);
    let q_hat: Vec<f64> = actions
        .iter()
        .map(|&a| {
            let mut acc = 0.0;
            for rep in 0..config.rollout_repeats {
                let mut rollout_rng = rng::stream(
                    root_seed,
                    &[purpose::ROLLOUT, round, s as u64, a as u64, rep as u64],
                );
                acc += rollout_q_estimate(mdp, mixture, s, a, config.horizon, &mut rollout_rng)
                    .expect("admissible by construction");
            }
            acc / config.rollout_repeats as f64
        })
        .collect();
    let baseline: f64 = actions
        .iter()
        .zip(q_hat.iter())
        .map(|(&a, qv)| mixture.row(s)[a] * qv)
        .sum();
    let row: Vec<f64> = experts
        .iter()
        .map(|e| {
            let weighted: f64 = actions
                .iter()
                .zip(q_hat.iter())
                .map(|(&a, qv)| e.row(s)[a] * (qv - baseline))
                .sum();
            factor * weighted
        })
        .collect();
    (row, true)
}

/// Record of one estimated learning run.
#[derive(Debug, Clone)]
pub struct EstimatedRunRecord {
    /// Exact `V_{qtilde_t Pi}(mu0)` for `t = 1..=rounds`, computed with the
    /// solver for reporting.
    pub values: Vec<f64>,
    pub final_weights: StateWeights,
    pub weight_history: Option<Vec<StateWeights>>,
    pub targets: RunTargets,
    pub strategy: StrategyKind,
    pub gain_bound: f64,
    pub root_seed: u64,
    /// Rounds at which the exact value decreased (reported, not bounded).
    pub value_decreases: usize,
}

impl EstimatedRunRecord {
    pub fn rounds(&self) -> usize {
        self.values.len()
    }

    pub fn cesaro_mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Runs the estimated learning loop: a live trajectory steps through the
/// environment while per-state learners are fed masked rollout estimates of
/// the expert advantages.
///
/// The live trajectory situates the learner in an online loop; it does not
/// feed the estimators, which draw their own rollouts. Fully reproducible
/// from `root_seed`.
#[allow(clippy::too_many_arguments)]
pub fn run_estimated_loop(
    mdp: &TabularMdp,
    experts: &ExpertSet,
    strategy: StrategyKind,
    gain_bound: f64,
    rounds: usize,
    config: &EstimationConfig,
    mu0: &[f64],
    root_seed: u64,
    options: &LoopOptions,
) -> Result<EstimatedRunRecord, EstimationError> {
    if rounds == 0 {
        return Err(OrchestrationError::ZeroRounds.into());
    }
    config.validate_for(mdp.discount())?;
    mdp.validate_state_distribution(mu0)?;
    let targets = match options.targets {
        Some(t) => t,
        None => crate::orchestration::run_targets(mdp, experts, mu0)?,
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
    let mut value_decreases = 0usize;

    let mut init_rng = rng::stream(root_seed, &[purpose::INIT_STATE]);
    let sparse_mu0: Vec<(usize, f64)> = mu0
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(s, &p)| (s, p))
        .collect();
    let mut live_state = sample_sparse(&sparse_mu0, &mut init_rng);
    let mut trajectory_rng = rng::stream(root_seed, &[purpose::TRAJECTORY]);

    for t in 1..=rounds {
        let value = ctx.solve()?.at_distribution(mu0);
        if let Some(&previous) = values.last() {
            if value < previous - 1e-12 {
                value_decreases += 1;
            }
        }
        values.push(value);
        if let Some(h) = history.as_mut() {
            h.push(q.clone());
        }
        if t == rounds {
            break;
        }

        // Live trajectory: draw an expert, an action, and the next state.
        let state_before = live_state;
        let expert_index = sample_dense(q.row(live_state), &mut trajectory_rng);
        let action = sample_dense(
            experts.expert(expert_index).row(live_state),
            &mut trajectory_rng,
        );
        live_state = sample_sparse(mdp.transition_row(live_state, action), &mut trajectory_rng);

        let estimate = estimate_expert_advantages(
            mdp,
            &q,
            experts,
            config,
            t as u64,
            root_seed,
            Some(state_before),
        )?;

        let mut new_rows = Vec::with_capacity(num_states);
        for (s, learner) in learners.iter_mut().enumerate() {
            learner.observe_in_place(&GainVector::new(estimate.row(s).to_vec(), t as u64))?;
            new_rows.push(learner.weights().to_vec());
        }
        let new_q = StateWeights::from_rows_unchecked(new_rows);
        let changed = changed_states(&q, &new_q);
        ctx.update(&new_q, &changed);
        q = new_q;
    }

    Ok(EstimatedRunRecord {
        values,
        final_weights: q,
        weight_history: history,
        targets,
        strategy,
        gain_bound,
        root_seed,
        value_decreases,
    })
}

/// Exact expert advantages (the estimation target), exposed for audits.
pub fn exact_expert_advantages(
    mdp: &TabularMdp,
    q: &StateWeights,
    experts: &ExpertSet,
) -> Result<Vec<Vec<f64>>, EstimationError> {
    let mixture = crate::orchestration::mix_policy(q, experts)?;
    let v = crate::mdp::policy_evaluation(mdp, &mixture)?;
    Ok(expert_advantage_rows(mdp, experts, &v))
}
