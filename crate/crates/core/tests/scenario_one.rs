//! Exact solves of the four-class matching benchmark: value ordering,
//! orchestration consistency, and a regression snapshot of the solved values.

use mdpmix_core::{
    approximation_error, build_matching_env, mix_policy, optimal_orchestration,
    policy_evaluation, scenario_one, value_iteration, ExpertKind, ExpertSet,
};

#[test]
fn benchmark_solution_structure() {
    let env = build_matching_env(&scenario_one()).unwrap();
    assert_eq!(env.mdp.num_states(), 5184);
    let kinds = [
        ExpertKind::MatchLongest,
        ExpertKind::MaxPayoff,
        ExpertKind::UniformRandom,
    ];
    let experts = ExpertSet::new(env.expert_policies(&kinds)).unwrap();

    let mut expert_values = Vec::new();
    for k in 0..3 {
        let v = policy_evaluation(&env.mdp, experts.expert(k)).unwrap();
        expert_values.push(v.at_distribution(&env.mu0));
    }
    let (q_star, v_mix) = optimal_orchestration(&env.mdp, &experts).unwrap();
    let v_qstar = v_mix.at_distribution(&env.mu0);
    let opt = value_iteration(&env.mdp).unwrap();
    let v_star = opt.values.at_distribution(&env.mu0);

    // Max-payoff beats match-longest beats uniform here; orchestration beats
    // every expert; the unrestricted optimum beats orchestration.
    assert!(expert_values[1] > expert_values[0]);
    assert!(expert_values[0] > expert_values[2]);
    let best_expert = expert_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!(v_qstar >= best_expert - 1e-8);
    assert!(v_star >= v_qstar - 1e-8);

    // Regression snapshot of the exact solution of these dynamics.
    let snapshot = [142.4252, 143.5688, 141.6879, v_qstar, v_star];
    for (got, want) in expert_values.iter().zip(&snapshot) {
        assert!((got - want).abs() < 5e-4, "{got} vs {want}");
    }
    assert!((v_qstar - 144.8522).abs() < 5e-4, "{v_qstar}");
    assert!((v_star - 145.5427).abs() < 5e-4, "{v_star}");

    // Re-evaluating the optimal mixture reproduces the lifted optimum.
    let mixed = mix_policy(&q_star, &experts).unwrap();
    let v_again = policy_evaluation(&env.mdp, &mixed).unwrap();
    assert!((v_again.at_distribution(&env.mu0) - v_qstar).abs() < 1e-8);

    // Approximation error at mu0 agrees with the value gap.
    let report = approximation_error(&env.mdp, &experts, &env.mu0).unwrap();
    assert!((report.error - (v_star - v_qstar)).abs() < 1e-8);
    assert!(report.error >= -1e-8);

    // Dirac frequencies sum to one over the three experts.
    let mut counts = [0usize; 3];
    for s in 0..env.mdp.num_states() {
        let k = q_star.row(s).iter().position(|&w| w == 1.0).unwrap();
        counts[k] += 1;
    }
    assert_eq!(counts.iter().sum::<usize>(), env.mdp.num_states());
}
