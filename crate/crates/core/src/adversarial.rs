//! Full-information adversarial learners over K experts.
//!
//! Each strategy picks simplex weights, observes a full vector of signed
//! gains bounded by a known constant M, and guarantees a regret bound against
//! the best fixed expert (Cesa-Bianchi & Lugosi 2006). Implemented:
//! potential-based updates with polynomial and exponential potentials
//! (Cesa-Bianchi & Lugosi 2003), exponential weights with time-varying rates
//! (Auer, Cesa-Bianchi & Gentile 2002), and greedy projection, i.e. online
//! gradient ascent onto the simplex (Zinkevich 2003).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack applied to gain-bound validation.
const GAIN_BOUND_SLACK: f64 = 1e-9;
/// Simplex tolerance maintained by every update.
pub const WEIGHT_SIMPLEX_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AdversarialError {
    #[error("need at least 2 experts, got {0}")]
    TooFewExperts(usize),
    #[error("gain bound must be positive and finite, got {0}")]
    InvalidGainBound(f64),
    #[error("polynomial exponent must exceed 1, got {0}")]
    InvalidExponent(f64),
    #[error("learning rate must be positive and finite, got {0}")]
    InvalidLearningRate(f64),
    #[error("gain vector has length {got}, expected {expected}")]
    GainLengthMismatch { got: usize, expected: usize },
    #[error("gain {value} at index {index} outside [-{bound}, {bound}]")]
    GainOutOfBound { index: usize, value: f64, bound: f64 },
    #[error("gain vector is for round {got}, learner is at round {expected}")]
    RoundMismatch { got: u64, expected: u64 },
}

/// Weight-update strategies. Rates marked `Option` fall back to the
/// gain-bound-derived schedule when absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyKind {
    /// Potential `x -> max(x,0)^p` applied to cumulative instantaneous
    /// regrets.
    PolyPotential { exponent: f64 },
    /// Exponential potential with a fixed learning rate.
    ExpFixed { eta: f64 },
    /// Exponential potential with `eta_t = rate / sqrt(t)`;
    /// default rate `(1/M) sqrt(ln K)`.
    ExpTimeVarying { rate: Option<f64> },
    /// Projected ascent step `proj(w + eta_t g)` with `eta_t = rate/sqrt(t)`;
    /// default rate `(1/M) sqrt(2/K)`.
    GreedyProjection { rate: Option<f64> },
}

impl StrategyKind {
    /// Polynomial potential with the standard exponent
    /// `max(2, round(2 ln K))`.
    pub fn poly_default(num_experts: usize) -> Self {
        StrategyKind::PolyPotential {
            exponent: (2.0 * (num_experts as f64).ln()).round().max(2.0),
        }
    }

    /// Whether the strategy's stated regret bound vanishes per round
    /// (`B_{T,K}/T -> 0`). False for the fixed-rate exponential potential.
    pub fn has_vanishing_bound(&self) -> bool {
        !matches!(self, StrategyKind::ExpFixed { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            StrategyKind::PolyPotential { .. } => "poly",
            StrategyKind::ExpFixed { .. } => "exp-fixed",
            StrategyKind::ExpTimeVarying { .. } => "exp-tv",
            StrategyKind::GreedyProjection { .. } => "greedy",
        }
    }
}

/// A gain vector revealed at the end of a round.
#[derive(Debug, Clone, PartialEq)]
pub struct GainVector {
    pub gains: Vec<f64>,
    pub round: u64,
}

impl GainVector {
    pub fn new(gains: Vec<f64>, round: u64) -> Self {
        Self { gains, round }
    }
}

/// State of a full-information learner.
///
/// `observe` is an immutable update; loops that own their learners can use
/// [`Learner::observe_in_place`]. Weights start uniform at round 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Learner {
    kind: StrategyKind,
    num_experts: usize,
    gain_bound: f64,
    cumulative_regret_terms: Vec<f64>,
    weights: Vec<f64>,
    round: u64,
}

impl Learner {
    pub fn new(
        kind: StrategyKind,
        num_experts: usize,
        gain_bound: f64,
    ) -> Result<Self, AdversarialError> {
        if num_experts < 2 {
            return Err(AdversarialError::TooFewExperts(num_experts));
        }
        if !(gain_bound > 0.0 && gain_bound.is_finite()) {
            return Err(AdversarialError::InvalidGainBound(gain_bound));
        }
        match kind {
            StrategyKind::PolyPotential { exponent } => {
                if !(exponent > 1.0 && exponent.is_finite()) {
                    return Err(AdversarialError::InvalidExponent(exponent));
                }
            }
            StrategyKind::ExpFixed { eta } => {
                if !(eta > 0.0 && eta.is_finite()) {
                    return Err(AdversarialError::InvalidLearningRate(eta));
                }
            }
            StrategyKind::ExpTimeVarying { rate } | StrategyKind::GreedyProjection { rate } => {
                if let Some(r) = rate {
                    if !(r > 0.0 && r.is_finite()) {
                        return Err(AdversarialError::InvalidLearningRate(r));
                    }
                }
            }
        }
        Ok(Self {
            kind,
            num_experts,
            gain_bound,
            cumulative_regret_terms: vec![0.0; num_experts],
            weights: vec![1.0 / num_experts as f64; num_experts],
            round: 1,
        })
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn num_experts(&self) -> usize {
        self.num_experts
    }

    pub fn gain_bound(&self) -> f64 {
        self.gain_bound
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn cumulative_regret_terms(&self) -> &[f64] {
        &self.cumulative_regret_terms
    }

    /// The learning rate in force at the current round, when the strategy has
    /// one.
    pub fn current_learning_rate(&self) -> Option<f64> {
        match self.kind {
            StrategyKind::PolyPotential { .. } => None,
            StrategyKind::ExpFixed { eta } => Some(eta),
            StrategyKind::ExpTimeVarying { rate } => {
                Some(self.tv_rate(rate) / (self.round as f64).sqrt())
            }
            StrategyKind::GreedyProjection { rate } => {
                Some(self.greedy_rate(rate) / (self.round as f64).sqrt())
            }
        }
    }

    fn tv_rate(&self, rate: Option<f64>) -> f64 {
        rate.unwrap_or_else(|| (self.num_experts as f64).ln().sqrt() / self.gain_bound)
    }

    fn greedy_rate(&self, rate: Option<f64>) -> f64 {
        rate.unwrap_or_else(|| (2.0 / self.num_experts as f64).sqrt() / self.gain_bound)
    }

    /// Feeds the round-`t` gain vector and returns the updated learner.
    pub fn observe(&self, g: &GainVector) -> Result<Self, AdversarialError> {
        let mut next = self.clone();
        next.observe_in_place(g)?;
        Ok(next)
    }

    /// In-place variant of [`Learner::observe`].
    pub fn observe_in_place(&mut self, g: &GainVector) -> Result<(), AdversarialError> {
        if g.gains.len() != self.num_experts {
            return Err(AdversarialError::GainLengthMismatch {
                got: g.gains.len(),
                expected: self.num_experts,
            });
        }
        if g.round != self.round {
            return Err(AdversarialError::RoundMismatch {
                got: g.round,
                expected: self.round,
            });
        }
        for (index, &value) in g.gains.iter().enumerate() {
            if !value.is_finite() || value.abs() > self.gain_bound + GAIN_BOUND_SLACK {
                return Err(AdversarialError::GainOutOfBound {
                    index,
                    value,
                    bound: self.gain_bound,
                });
            }
        }

        let baseline: f64 = self
            .weights
            .iter()
            .zip(g.gains.iter())
            .map(|(w, gain)| w * gain)
            .sum();
        for (term, &gain) in self.cumulative_regret_terms.iter_mut().zip(g.gains.iter()) {
            *term += gain - baseline;
        }

        match self.kind {
            StrategyKind::PolyPotential { exponent } => {
                let mut total = 0.0;
                for (w, &term) in self.weights.iter_mut().zip(&self.cumulative_regret_terms) {
                    let v = if term > 0.0 { term.powf(exponent) } else { 0.0 };
                    *w = v;
                    total += v;
                }
                if total > 0.0 {
                    for w in &mut self.weights {
                        *w /= total;
                    }
                } else {
                    // All cumulative terms nonpositive: potential vector is
                    // identically zero, fall back to uniform.
                    self.weights
                        .fill(1.0 / self.num_experts as f64);
                }
            }
            StrategyKind::ExpFixed { eta } => {
                exponential_weights(&self.cumulative_regret_terms, eta, &mut self.weights);
            }
            StrategyKind::ExpTimeVarying { rate } => {
                let eta = self.tv_rate(rate) / ((self.round + 1) as f64).sqrt();
                exponential_weights(&self.cumulative_regret_terms, eta, &mut self.weights);
            }
            StrategyKind::GreedyProjection { rate } => {
                let eta = self.greedy_rate(rate) / (self.round as f64).sqrt();
                let point: Vec<f64> = self
                    .weights
                    .iter()
                    .zip(g.gains.iter())
                    .map(|(w, gain)| w + eta * gain)
                    .collect();
                self.weights = project_to_simplex(&point);
            }
        }
        self.round += 1;
        Ok(())
    }
}

/// Softmax of `eta * terms` with max subtraction.
fn exponential_weights(terms: &[f64], eta: f64, out: &mut [f64]) {
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (o, &term) in out.iter_mut().zip(terms) {
        let v = (eta * (term - top)).exp();
        *o = v;
        total += v;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

/// Euclidean projection onto the probability simplex by sorting and
/// thresholding (Duchi et al. 2008). The output satisfies the KKT form
/// `w_k = max(v_k - theta, 0)` with `sum w = 1`.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    let mut support = 0usize;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (i + 1) as f64;
        if u - candidate > 0.0 {
            threshold = candidate;
            support = i + 1;
        }
    }
    debug_assert!(support > 0, "projection input must be finite");
    v.iter().map(|&u| (u - threshold).max(0.0)).collect()
}

/// Realized adversarial regret of a played sequence:
/// `max_k sum_t g_{t,k} - sum_t <w_t, g_t>`.
pub fn realized_regret(gains: &[Vec<f64>], weights: &[Vec<f64>]) -> f64 {
    assert_eq!(gains.len(), weights.len(), "histories must align");
    if gains.is_empty() {
        return 0.0;
    }
    let k = gains[0].len();
    let mut best = vec![0.0; k];
    let mut earned = 0.0;
    for (g, w) in gains.iter().zip(weights) {
        assert_eq!(g.len(), k);
        assert_eq!(w.len(), k);
        for (acc, &gain) in best.iter_mut().zip(g) {
            *acc += gain;
        }
        earned += g.iter().zip(w).map(|(gain, weight)| gain * weight).sum::<f64>();
    }
    best.iter().copied().fold(f64::NEG_INFINITY, f64::max) - earned
}

/// The strategy's stated regret bound `M * B_{T,K}`:
/// poly `M sqrt(6 T ln K)`, fixed-rate exponential `ln K / eta + eta T M^2/2`
/// (not sublinear), time-varying exponential `M sqrt(T ln K)`, greedy
/// projection `3 M sqrt(K T)`.
pub fn regret_bound(kind: &StrategyKind, rounds: u64, num_experts: usize, gain_bound: f64) -> f64 {
    let t = rounds as f64;
    let k = num_experts as f64;
    match kind {
        StrategyKind::PolyPotential { .. } => gain_bound * (6.0 * t * k.ln()).sqrt(),
        StrategyKind::ExpFixed { eta } => k.ln() / eta + eta * t * gain_bound * gain_bound / 2.0,
        StrategyKind::ExpTimeVarying { .. } => gain_bound * (t * k.ln()).sqrt(),
        StrategyKind::GreedyProjection { .. } => 3.0 * gain_bound * (k * t).sqrt(),
    }
}

/// Correlation of the updated weights with the last instantaneous regret
/// vector: `sum_k w_{t+1,k} (g_k - <w_t, g>)`. Nonnegative for the
/// monotone strategies (polynomial and fixed-rate exponential potentials,
/// greedy projection).
pub fn monotonicity_gap(before: &Learner, g: &GainVector, after: &Learner) -> f64 {
    let baseline: f64 = before
        .weights()
        .iter()
        .zip(g.gains.iter())
        .map(|(w, gain)| w * gain)
        .sum();
    after
        .weights()
        .iter()
        .zip(g.gains.iter())
        .map(|(w, gain)| w * (gain - baseline))
        .sum()
}
