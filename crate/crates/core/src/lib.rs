//! Tabular reinforcement-learning toolkit for orchestrating a small set of
//! expert policies with full-information adversarial weight updates.
//!
//! The crate provides exact MDP computations ([`mdp`]), adversarial learners
//! over experts ([`adversarial`]), mixture policies and learning loops with
//! oracle advantages ([`orchestration`]), bounded Monte-Carlo advantage
//! estimation ([`estimation`]), a stochastic dynamic matching environment
//! ([`matching`]), and seeded synthetic problem generators ([`synthetic`]).

pub mod adversarial;
pub mod estimation;
pub mod matching;
pub mod mdp;
pub mod orchestration;
pub mod rng;
mod solver;
pub mod synthetic;

pub use adversarial::{
    monotonicity_gap, project_to_simplex, realized_regret, regret_bound, AdversarialError,
    GainVector, Learner, StrategyKind,
};
pub use estimation::{
    estimate_expert_advantages, horizon_for_epsilon, rollout_q_estimate, run_estimated_loop,
    AdvantageEstimate, EstimatedRunRecord, EstimationConfig, EstimationError, EstimationMode,
};
pub use matching::{
    build_matching_env, scenario_one, ExpertKind, MatchSemantics, MatchingConfig, MatchingEdge,
    MatchingEnv, MatchingError, StateCodec,
};
pub use mdp::{
    advantage_of_distribution, discounted_visitation, performance_difference, policy_evaluation,
    policy_evaluation_warm, q_and_advantage, value_iteration, AdvantageTable, MdpError,
    OptimalSolution, QFunction, StationaryPolicy, TabularMdp, TabularMdpBuilder, ValueFunction,
    VisitationDistribution, BELLMAN_RESIDUAL_TOL, ROW_SUM_TOL,
};
pub use orchestration::{
    approximation_error, expert_advantages, lift_mdp, mix_policy, optimal_orchestration,
    run_oracle_loop, run_targets, CertificateReport, ExpertAdvantage, ExpertSet, LoopOptions,
    OracleRunRecord, OrchestrationError, RunTargets, StateWeights,
};
