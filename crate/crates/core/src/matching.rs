//! A stochastic dynamic matching environment as a tabular MDP.
//!
//! Items of `I` classes arrive one per round according to fixed arrival
//! probabilities. When a compatible queued item is in stock the incoming
//! item must be matched — the policy chooses which class to take, earning
//! the edge payoff and removing the queued item. With no match available
//! the item is enqueued if its own queue has room, and trashed otherwise.
//! Every action also earns a holding reward `c * sum_j (L - rho_j)`
//! favoring short queues.
//!
//! States are pairs `(queues, incoming_class)` encoded as
//! `incoming * (L+1)^I + sum_j queues[j] * (L+1)^j`, so the full space has
//! `I * (L+1)^I` states. Queue lengths range over `0..=L`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mdp::{MdpError, StationaryPolicy, TabularMdp, ROW_SUM_TOL};
use crate::rng;

/// Default cap on the enumerated state count.
pub const DEFAULT_STATE_CAP: usize = 200_000;

#[derive(Debug, Error)]
pub enum MatchingError {
    #[error("need at least one class")]
    NoClasses,
    #[error("max_queue must be at least 1")]
    ZeroQueueCapacity,
    #[error("holding coefficient must be finite and nonnegative, got {0}")]
    InvalidHoldingCoeff(f64),
    #[error("arrival probabilities: {0}")]
    BadArrivalDistribution(String),
    #[error("edge ({a},{b}) is invalid: {reason}")]
    BadEdge { a: usize, b: usize, reason: String },
    #[error("permutation must be a bijection of 0..{expected}")]
    BadPermutation { expected: usize },
    #[error("state space {required} exceeds cap {cap}; raise state_cap to at least {required}")]
    StateSpaceTooLarge { required: usize, cap: usize },
    #[error("all rewards are zero (holding coefficient 0 and no positive payoff)")]
    DegenerateRewards,
    #[error(transparent)]
    Mdp(#[from] MdpError),
}

/// Transition rule applied to the matched queue.
///
/// `Removal` takes the matched item out of its queue. `LiteralIncrement` is a
/// comparison-only variant that grows the matched queue instead (clamped at
/// capacity); it does not model item departure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MatchSemantics {
    #[default]
    Removal,
    LiteralIncrement,
}

/// An undirected compatibility edge with its match payoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingEdge {
    pub a: usize,
    pub b: usize,
    pub payoff: f64,
}

/// Parameters of the matching environment. Class indices are `0..num_classes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingConfig {
    pub num_classes: usize,
    pub max_queue: usize,
    pub holding_coeff: f64,
    pub discount: f64,
    pub arrival_probs: Vec<f64>,
    pub edges: Vec<MatchingEdge>,
    /// Priority order used by the permutation-priority expert; drawn from
    /// `policy_seed` when absent.
    #[serde(default)]
    pub permutation: Option<Vec<usize>>,
    #[serde(default)]
    pub policy_seed: u64,
    #[serde(default)]
    pub semantics: MatchSemantics,
    #[serde(default = "default_state_cap")]
    pub state_cap: usize,
}

fn default_state_cap() -> usize {
    DEFAULT_STATE_CAP
}

impl MatchingConfig {
    pub fn validate(&self) -> Result<(), MatchingError> {
        if self.num_classes == 0 {
            return Err(MatchingError::NoClasses);
        }
        if self.max_queue == 0 {
            return Err(MatchingError::ZeroQueueCapacity);
        }
        if !(self.holding_coeff >= 0.0 && self.holding_coeff.is_finite()) {
            return Err(MatchingError::InvalidHoldingCoeff(self.holding_coeff));
        }
        if self.arrival_probs.len() != self.num_classes {
            return Err(MatchingError::BadArrivalDistribution(format!(
                "expected {} entries, got {}",
                self.num_classes,
                self.arrival_probs.len()
            )));
        }
        let mut sum = 0.0;
        for &p in &self.arrival_probs {
            if !p.is_finite() || p < 0.0 {
                return Err(MatchingError::BadArrivalDistribution(
                    "entries must be nonnegative".into(),
                ));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(MatchingError::BadArrivalDistribution(format!(
                "sums to {sum}, not 1"
            )));
        }
        for e in &self.edges {
            if e.a >= self.num_classes || e.b >= self.num_classes {
                return Err(MatchingError::BadEdge {
                    a: e.a,
                    b: e.b,
                    reason: "class out of range".into(),
                });
            }
            if e.a == e.b {
                return Err(MatchingError::BadEdge {
                    a: e.a,
                    b: e.b,
                    reason: "self-loop".into(),
                });
            }
            if !(e.payoff >= 0.0 && e.payoff.is_finite()) {
                return Err(MatchingError::BadEdge {
                    a: e.a,
                    b: e.b,
                    reason: "payoff must be finite and nonnegative".into(),
                });
            }
        }
        if let Some(p) = &self.permutation {
            if !is_permutation(p, self.num_classes) {
                return Err(MatchingError::BadPermutation {
                    expected: self.num_classes,
                });
            }
        }
        Ok(())
    }

    /// Reward range: `c*L*I + max payoff`.
    pub fn reward_max(&self) -> f64 {
        let max_payoff = self
            .edges
            .iter()
            .map(|e| e.payoff)
            .fold(0.0f64, f64::max);
        self.holding_coeff * self.max_queue as f64 * self.num_classes as f64 + max_payoff
    }
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in p {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Bijection between `(queues, incoming)` pairs and state indices.
#[derive(Debug, Clone, Copy)]
pub struct StateCodec {
    num_classes: usize,
    max_queue: usize,
}

impl StateCodec {
    pub fn new(num_classes: usize, max_queue: usize) -> Self {
        Self {
            num_classes,
            max_queue,
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_classes * (self.max_queue + 1).pow(self.num_classes as u32)
    }

    pub fn encode(&self, queues: &[usize], incoming: usize) -> usize {
        debug_assert_eq!(queues.len(), self.num_classes);
        debug_assert!(incoming < self.num_classes);
        let base = self.max_queue + 1;
        let mut code = incoming;
        for j in (0..self.num_classes).rev() {
            debug_assert!(queues[j] <= self.max_queue);
            code = code * base + queues[j];
        }
        code
    }

    pub fn decode(&self, index: usize) -> (Vec<usize>, usize) {
        let base = self.max_queue + 1;
        let mut rest = index;
        let mut queues = vec![0usize; self.num_classes];
        for q in queues.iter_mut() {
            *q = rest % base;
            rest /= base;
        }
        (queues, rest)
    }
}

/// The four tabular expert policies of the matching environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpertKind {
    /// Match the compatible class with the longest queue
    /// (ties: larger payoff, then lower class index).
    MatchLongest,
    /// Match the compatible class with the largest payoff
    /// (ties: longer queue, then lower class index).
    MaxPayoff,
    /// Match a compatible class uniformly at random.
    UniformRandom,
    /// Match the compatible class ranked highest by a fixed priority
    /// permutation.
    PermutationPriority,
}

/// The built environment: MDP, initial distribution, codec, and policy data.
pub struct MatchingEnv {
    pub mdp: TabularMdp,
    pub mu0: Vec<f64>,
    pub codec: StateCodec,
    config: MatchingConfig,
    payoff: Vec<Vec<Option<f64>>>,
    /// Priority permutation, resolved from config or drawn from the seed.
    pub sigma: Vec<usize>,
}

/// Enumerates all `(queues, incoming)` states and assembles the MDP.
pub fn build_matching_env(config: &MatchingConfig) -> Result<MatchingEnv, MatchingError> {
    config.validate()?;
    let codec = StateCodec::new(config.num_classes, config.max_queue);
    let num_states = codec.num_states();
    if num_states > config.state_cap {
        return Err(MatchingError::StateSpaceTooLarge {
            required: num_states,
            cap: config.state_cap,
        });
    }
    let reward_max = config.reward_max();
    if reward_max <= 0.0 {
        return Err(MatchingError::DegenerateRewards);
    }

    let classes = config.num_classes;
    let capacity = config.max_queue;
    let mut payoff: Vec<Vec<Option<f64>>> = vec![vec![None; classes]; classes];
    for e in &config.edges {
        payoff[e.a][e.b] = Some(e.payoff);
        payoff[e.b][e.a] = Some(e.payoff);
    }

    let arrivals: Vec<(usize, f64)> = config
        .arrival_probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, &p)| (i, p))
        .collect();

    let num_actions = classes + 2;
    let enqueue = classes;
    let trash = classes + 1;
    let mut builder = TabularMdp::builder(num_states, num_actions, config.discount, reward_max);

    let mut queues = vec![0usize; classes];
    for index in 0..num_states {
        let (decoded, incoming) = codec.decode(index);
        queues.copy_from_slice(&decoded);
        let holding: f64 = config.holding_coeff
            * queues.iter().map(|&q| (capacity - q) as f64).sum::<f64>();

        let arrival_row = |next_queues: &[usize]| -> Vec<(usize, f64)> {
            arrivals
                .iter()
                .map(|&(i, p)| (codec.encode(next_queues, i), p))
                .collect()
        };

        // Match actions: compatible class with at least one queued item.
        for j in 0..classes {
            if queues[j] == 0 {
                continue;
            }
            let Some(g) = payoff[incoming][j] else {
                continue;
            };
            let mut next_queues = queues.clone();
            match config.semantics {
                MatchSemantics::Removal => next_queues[j] -= 1,
                MatchSemantics::LiteralIncrement => {
                    next_queues[j] = (next_queues[j] + 1).min(capacity)
                }
            }
            builder.set_action(index, j, holding + g, arrival_row(&next_queues));
        }

        // Enqueue/trash are fallback actions, available only when no match
        // is; exactly one of them is admissible in that case.
        let any_match = (0..classes).any(|j| queues[j] >= 1 && payoff[incoming][j].is_some());
        if !any_match {
            if queues[incoming] < capacity {
                let mut next_queues = queues.clone();
                next_queues[incoming] += 1;
                builder.set_action(index, enqueue, holding, arrival_row(&next_queues));
            } else {
                builder.set_action(index, trash, holding, arrival_row(&queues));
            }
        }
    }

    let mdp = builder.build()?;

    let mut mu0 = vec![0.0; num_states];
    let empty = vec![0usize; classes];
    for &(i, p) in &arrivals {
        mu0[codec.encode(&empty, i)] = p;
    }

    let sigma = match &config.permutation {
        Some(p) => p.clone(),
        None => {
            let mut order: Vec<usize> = (0..classes).collect();
            let mut stream = rng::stream(config.policy_seed, &[rng::purpose::PERMUTATION]);
            // Fisher-Yates.
            for i in (1..classes).rev() {
                let j = stream.random_range(0..=i);
                order.swap(i, j);
            }
            order
        }
    };

    Ok(MatchingEnv {
        mdp,
        mu0,
        codec,
        config: config.clone(),
        payoff,
        sigma,
    })
}

impl MatchingEnv {
    pub fn config(&self) -> &MatchingConfig {
        &self.config
    }

    /// Compatible classes with stock available: `{j in N(i) : rho_j >= 1}`.
    pub fn prospective_matches(&self, queues: &[usize], incoming: usize) -> Vec<usize> {
        (0..self.config.num_classes)
            .filter(|&j| queues[j] >= 1 && self.payoff[incoming][j].is_some())
            .collect()
    }

    pub fn payoff(&self, a: usize, b: usize) -> Option<f64> {
        self.payoff[a][b]
    }

    /// Builds one of the four expert policies over the full state space.
    pub fn expert_policy(&self, kind: ExpertKind) -> StationaryPolicy {
        let classes = self.config.num_classes;
        let capacity = self.config.max_queue;
        let enqueue = classes;
        let trash = classes + 1;
        let num_actions = classes + 2;
        let rows: Vec<Vec<f64>> = (0..self.codec.num_states())
            .map(|index| {
                let (queues, incoming) = self.codec.decode(index);
                let matches = self.prospective_matches(&queues, incoming);
                let mut row = vec![0.0; num_actions];
                if matches.is_empty() {
                    let fallback = if queues[incoming] < capacity { enqueue } else { trash };
                    row[fallback] = 1.0;
                    return row;
                }
                match kind {
                    ExpertKind::MatchLongest => {
                        let pick = *matches
                            .iter()
                            .max_by(|&&x, &&y| {
                                (queues[x], self.payoff[incoming][x].unwrap(), std::cmp::Reverse(x))
                                    .partial_cmp(&(
                                        queues[y],
                                        self.payoff[incoming][y].unwrap(),
                                        std::cmp::Reverse(y),
                                    ))
                                    .unwrap()
                            })
                            .unwrap();
                        row[pick] = 1.0;
                    }
                    ExpertKind::MaxPayoff => {
                        let pick = *matches
                            .iter()
                            .max_by(|&&x, &&y| {
                                (self.payoff[incoming][x].unwrap(), queues[x], std::cmp::Reverse(x))
                                    .partial_cmp(&(
                                        self.payoff[incoming][y].unwrap(),
                                        queues[y],
                                        std::cmp::Reverse(y),
                                    ))
                                    .unwrap()
                            })
                            .unwrap();
                        row[pick] = 1.0;
                    }
                    ExpertKind::UniformRandom => {
                        let p = 1.0 / matches.len() as f64;
                        for &j in &matches {
                            row[j] = p;
                        }
                    }
                    ExpertKind::PermutationPriority => {
                        let pick = *matches.iter().max_by_key(|&&j| self.sigma[j]).unwrap();
                        row[pick] = 1.0;
                    }
                }
                row
            })
            .collect();
        StationaryPolicy::from_rows_unchecked(rows)
    }

    pub fn expert_policies(&self, kinds: &[ExpertKind]) -> Vec<StationaryPolicy> {
        kinds.iter().map(|&k| self.expert_policy(k)).collect()
    }
}

/// The four-class published benchmark configuration: capacity 5, holding
/// coefficient 0.5, discount 0.8, star-plus-cycle compatibility graph with
/// payoffs 200/30/50/10/1.
pub fn scenario_one() -> MatchingConfig {
    MatchingConfig {
        num_classes: 4,
        max_queue: 5,
        holding_coeff: 0.5,
        discount: 0.8,
        arrival_probs: vec![0.1, 0.41, 0.27, 0.22],
        edges: vec![
            MatchingEdge { a: 0, b: 1, payoff: 200.0 },
            MatchingEdge { a: 0, b: 2, payoff: 30.0 },
            MatchingEdge { a: 1, b: 2, payoff: 50.0 },
            MatchingEdge { a: 1, b: 3, payoff: 10.0 },
            MatchingEdge { a: 2, b: 3, payoff: 1.0 },
        ],
        permutation: None,
        policy_seed: 0,
        semantics: MatchSemantics::Removal,
        state_cap: DEFAULT_STATE_CAP,
    }
}
