//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Criteria 1-3 check the published four-class benchmark table and learning
//! target. The printed formulas of that benchmark do not reproduce the
//! published numbers under any transition/reward reading we could construct
//! (see the solved-value comparison in the failure messages); those
//! assertions are kept as stated and fail honestly. Criterion 3's learning
//! substance is additionally verified against the self-computed
//! orchestration optimum, which passes.

use std::path::Path;
use std::time::Instant;

use mdpmix_cli::learn::{self, LearnMode};
use mdpmix_cli::regret::{run_harness, HarnessParams};
use mdpmix_cli::scenario::Scenario;
use mdpmix_cli::{gen, solve};
use mdpmix_core::estimation::estimate_state_advantages;
use mdpmix_core::synthetic::{random_distribution, random_experts, random_mdp};
use mdpmix_core::{
    approximation_error, lift_mdp, mix_policy, monotonicity_gap, performance_difference,
    policy_evaluation, project_to_simplex, q_and_advantage, rng, run_estimated_loop,
    run_oracle_loop, EstimationConfig, EstimationMode, ExpertSet, GainVector, Learner,
    LoopOptions, MatchSemantics, StationaryPolicy, StrategyKind, TabularMdp,
};
use rand::Rng;

fn scenario_one_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/scenario-1.json")
}

fn out_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("mdpmix-acceptance-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

struct Battery {
    mdp: TabularMdp,
    experts: ExpertSet,
    mu0: Vec<f64>,
    gamma: f64,
    num_experts: usize,
}

/// Randomized normalized MDPs: up to 8 states, 4 actions, 4 experts.
fn battery(index: u64) -> Battery {
    let n = 3 + (index as usize % 6);
    let actions = 2 + (index as usize % 3);
    let num_experts = 2 + (index as usize % 3);
    let gamma = 0.5 + 0.05 * (index as f64 % 6.0);
    let mdp = random_mdp(n, actions, gamma, 1.0, 10_000 + index);
    let experts = random_experts(&mdp, num_experts, 20_000 + index);
    let mu0 = random_distribution(n, 30_000 + index);
    Battery {
        mdp,
        experts,
        mu0,
        gamma,
        num_experts,
    }
}

#[test]
fn criterion_01_scenario_one_exact_table() {
    let published = [135.74, 136.80, 135.14, 138.18, 138.92];
    let tolerance = 0.01;
    let scenario = Scenario::load(&scenario_one_path()).unwrap();
    let started = Instant::now();

    let solve_with = |semantics: MatchSemantics| -> ([f64; 5], Vec<f64>) {
        let mut configured = scenario.clone();
        configured.matching.semantics = semantics;
        let resolved = configured.resolve().unwrap();
        let report = solve::run(&resolved, &out_dir("criterion1")).unwrap();
        (
            [
                report.expert_values[0],
                report.expert_values[1],
                report.expert_values[2],
                report.best_mixture_value,
                report.optimal_value,
            ],
            report.appearance_rates,
        )
    };

    let (removal, _) = solve_with(MatchSemantics::Removal);
    let elapsed = started.elapsed();
    let removal_ok = removal
        .iter()
        .zip(&published)
        .all(|(got, want)| (got - want).abs() <= tolerance);

    // The criterion designates the literal transition as the fallback arbiter.
    let (literal, _) = solve_with(MatchSemantics::LiteralIncrement);
    let literal_ok = literal
        .iter()
        .zip(&published)
        .all(|(got, want)| (got - want).abs() <= tolerance);

    assert!(
        elapsed.as_secs() < 30,
        "solve took {elapsed:?}, above the 30 s target"
    );

    let pass = removal_ok || literal_ok;
    println!(
        "ACCEPTANCE 01 scenario-1 exact table: {} (removal {removal:.4?}, literal {literal:.4?}, published {published:?}, solve time {elapsed:.2?})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(
        pass,
        "neither transition semantics reproduces the published table within {tolerance}: \
         removal {removal:.4?}, literal {literal:.4?}, published {published:?}. \
         The removal dynamics match the published gap structure but sit ~4.8% high; \
         no reading of the printed formulas closes the gap (see decisions ledger)."
    );
}

#[test]
fn criterion_02_scenario_one_appearance_rates() {
    let published = [0.48, 0.50, 0.02];
    let tolerance = 0.02;
    let scenario = Scenario::load(&scenario_one_path()).unwrap();
    let resolved = scenario.resolve().unwrap();
    let report = solve::run(&resolved, &out_dir("criterion2")).unwrap();
    let pass = report
        .appearance_rates
        .iter()
        .zip(&published)
        .all(|(got, want)| (got - want).abs() <= tolerance);
    println!(
        "ACCEPTANCE 02 scenario-1 appearance rates: {} (got {:.3?}, published {published:?})",
        if pass { "PASS" } else { "FAIL" },
        report.appearance_rates
    );
    assert!(
        pass,
        "appearance rates {:?} differ from published {published:?} beyond {tolerance}; \
         the optimal-Q landscape of the printed formulas favors the match-longest expert \
         (see decisions ledger)",
        report.appearance_rates
    );
}

#[test]
fn criterion_03_scenario_one_learning_curve() {
    let scenario = Scenario::load(&scenario_one_path()).unwrap();
    let resolved = scenario.resolve().unwrap();
    assert_eq!(resolved.estimation.horizon, 55);
    assert_eq!(resolved.estimation.kappa, 0.1);
    assert_eq!(
        resolved.strategy,
        StrategyKind::PolyPotential { exponent: 3.0 }
    );
    let started = Instant::now();
    let summary = learn::run(&resolved, LearnMode::Estimated, &out_dir("criterion3")).unwrap();
    let elapsed = started.elapsed();
    assert_eq!(summary.repetitions, 20);
    assert_eq!(summary.rounds, 2500);

    // Self-consistent check (the fallback construction used wherever no
    // reference target is reproducible): the mean value approaches the
    // self-computed orchestration optimum and beats the best single expert
    // over the final tenth of the rounds.
    let own_target = summary.best_mixture_value;
    let best_expert = {
        let experts = ExpertSet::new(resolved.experts.clone()).unwrap();
        (0..experts.num_experts())
            .map(|k| {
                policy_evaluation(&resolved.env.mdp, experts.expert(k))
                    .unwrap()
                    .at_distribution(&resolved.evaluation_point)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let tail_start = summary.rounds - summary.rounds / 10;
    let tail = &summary.mean_curve[tail_start..];
    let self_consistent_final = (own_target - summary.mean_final_value).abs() <= 0.5;
    let self_consistent_tail = tail.iter().all(|&v| v > best_expert);
    println!(
        "ACCEPTANCE 03b self-consistent learning target: {} (mean final {:.3}, own optimum {:.3}, best expert {:.3}, {:.0?})",
        if self_consistent_final && self_consistent_tail { "PASS" } else { "FAIL" },
        summary.mean_final_value,
        own_target,
        best_expert,
        elapsed
    );
    assert!(
        self_consistent_final,
        "mean final value {} not within 0.5 of the self-computed optimum {}",
        summary.mean_final_value, own_target
    );
    assert!(
        self_consistent_tail,
        "mean value dips below the best expert {best_expert} in the final tenth"
    );

    // Published anchors, as stated by the criterion.
    let published_target = 138.18;
    let published_best_expert = 136.80;
    let final_ok = (summary.mean_final_value - published_target).abs() <= 0.5;
    let tail_ok = tail.iter().all(|&v| v > published_best_expert);
    println!(
        "ACCEPTANCE 03 scenario-1 learning curve: {} (mean final {:.3} vs published target {published_target}, tail floor {published_best_expert})",
        if final_ok && tail_ok { "PASS" } else { "FAIL" },
        summary.mean_final_value
    );
    assert!(
        final_ok && tail_ok,
        "mean final value {:.3} tracks the self-computed optimum {:.3}, not the published \
         138.18: the benchmark values themselves are not reproducible from the printed \
         formulas (criterion 1); learning behavior is verified by the self-consistent check",
        summary.mean_final_value,
        own_target
    );
}

#[test]
fn criterion_04_oracle_cesaro_bound() {
    let rounds = 300usize;
    let mut violations = 0usize;
    let mut checked = 0usize;
    for index in 0..20u64 {
        let b = battery(index);
        let gain_bound = b.mdp.value_bound();
        for strategy in [
            StrategyKind::poly_default(b.num_experts),
            StrategyKind::ExpTimeVarying { rate: None },
            StrategyKind::GreedyProjection { rate: None },
        ] {
            let record = run_oracle_loop(
                &b.mdp,
                &b.experts,
                strategy,
                gain_bound,
                rounds,
                &b.mu0,
                &LoopOptions::default(),
            )
            .unwrap();
            let regret = record.targets.best_mixture_value - record.cesaro_mean();
            let b_norm =
                mdpmix_core::regret_bound(&strategy, rounds as u64, b.num_experts, 1.0);
            let bound = b_norm / ((1.0 - b.gamma).powi(2) * rounds as f64);
            checked += 1;
            if regret > bound + 1e-8 {
                violations += 1;
                eprintln!(
                    "battery {index} {strategy:?}: regret {regret} exceeds bound {bound}"
                );
            }
        }
    }
    println!(
        "ACCEPTANCE 04 oracle Cesaro bound: {} ({checked} runs, {violations} violations)",
        if violations == 0 { "PASS" } else { "FAIL" }
    );
    assert_eq!(violations, 0);
}

#[test]
fn criterion_05_fixed_rate_last_iterate_bound() {
    let rounds = 300usize;
    let mut violations = 0usize;
    let mut checked = 0usize;
    for index in 0..20u64 {
        let b = battery(index);
        for eta in [0.05, 0.2] {
            let record = run_oracle_loop(
                &b.mdp,
                &b.experts,
                StrategyKind::ExpFixed { eta },
                b.mdp.value_bound(),
                rounds,
                &b.mu0,
                &LoopOptions::default(),
            )
            .unwrap();
            let final_regret =
                record.targets.best_mixture_value - record.values[rounds - 1];
            let bound = (b.num_experts as f64).ln() / (eta * (1.0 - b.gamma) * rounds as f64)
                + 1.0 / ((1.0 - b.gamma).powi(2) * rounds as f64);
            checked += 1;
            if final_regret > bound + 1e-8 {
                violations += 1;
                eprintln!(
                    "battery {index} eta={eta}: last-iterate regret {final_regret} exceeds {bound}"
                );
            }
        }
    }
    println!(
        "ACCEPTANCE 05 fixed-rate last-iterate bound: {} ({checked} runs, {violations} violations)",
        if violations == 0 { "PASS" } else { "FAIL" }
    );
    assert_eq!(violations, 0);
}

#[test]
fn criterion_06_monotone_value_improvement() {
    let mut worst = f64::INFINITY;
    for index in 0..10u64 {
        let b = battery(index);
        for strategy in [
            StrategyKind::poly_default(b.num_experts),
            StrategyKind::ExpFixed { eta: 0.1 },
            StrategyKind::GreedyProjection { rate: None },
        ] {
            let record = run_oracle_loop(
                &b.mdp,
                &b.experts,
                strategy,
                b.mdp.value_bound(),
                150,
                &b.mu0,
                &LoopOptions::default(),
            )
            .unwrap();
            for w in record.values.windows(2) {
                worst = worst.min(w[1] - w[0]);
                assert!(
                    w[1] >= w[0] - 1e-8,
                    "battery {index} {strategy:?}: value decreased by {}",
                    w[0] - w[1]
                );
            }
        }
    }
    // The time-varying exponential strategy has no proven monotonicity;
    // its empirical decrease count is reported without an assertion.
    let mut tv_decreases = 0usize;
    let mut tv_steps = 0usize;
    for index in 0..10u64 {
        let b = battery(index);
        let record = run_oracle_loop(
            &b.mdp,
            &b.experts,
            StrategyKind::ExpTimeVarying { rate: None },
            b.mdp.value_bound(),
            150,
            &b.mu0,
            &LoopOptions::default(),
        )
        .unwrap();
        for w in record.values.windows(2) {
            tv_steps += 1;
            if w[1] < w[0] - 1e-8 {
                tv_decreases += 1;
            }
        }
    }
    println!(
        "ACCEPTANCE 06 monotone value improvement: PASS (worst step {worst:.2e}; time-varying rates decreased on {tv_decreases}/{tv_steps} steps, reported only)"
    );
}

#[test]
fn criterion_07_estimator_guarantees() {
    let mdp = random_mdp(5, 3, 0.8, 1.0, 7);
    let experts = random_experts(&mdp, 3, 83);
    let q = mdpmix_core::synthetic::random_state_weights(5, 3, 84);
    let mixture = mix_policy(&q, &experts).unwrap();
    let epsilon = 0.01;
    let config = EstimationConfig::for_bias(0.8, epsilon, 0.5, EstimationMode::Masked).unwrap();
    let bound = config.gain_bound(&mdp);

    let draws = 100_000u64;
    let mut bound_violations = 0usize;
    let mut worst_zero_sum = 0.0f64;
    let audited = [(1usize, 0usize), (3, 1), (4, 2)];
    let exact = mdpmix_core::estimation::exact_expert_advantages(&mdp, &q, &experts).unwrap();
    let mut sums = [0.0f64; 3];
    let mut sums_sq = [0.0f64; 3];

    for draw in 1..=draws {
        let s = (draw % 5) as usize;
        let (row, _) =
            estimate_state_advantages(&mdp, &mixture, &experts, &config, draw, 555, None, s);
        for &x in &row {
            if x.abs() > bound {
                bound_violations += 1;
            }
        }
        let weighted: f64 = q.row(s).iter().zip(&row).map(|(w, a)| w * a).sum();
        worst_zero_sum = worst_zero_sum.max(weighted.abs());
        for (idx, &(state, k)) in audited.iter().enumerate() {
            if state == s {
                sums[idx] += row[k];
                sums_sq[idx] += row[k] * row[k];
            }
        }
    }

    let mut bias_ok = true;
    for (idx, &(s, k)) in audited.iter().enumerate() {
        let n = (draws / 5) as f64;
        let mean = sums[idx] / n;
        let var = (sums_sq[idx] / n - mean * mean).max(0.0);
        let se = (var / n).sqrt();
        let gap = (mean - exact[s][k]).abs();
        if gap > epsilon * mdp.reward_max() + 3.0 * se {
            bias_ok = false;
            eprintln!("bias at ({s},{k}): {gap} vs {}", epsilon + 3.0 * se);
        }
    }

    let pass = bound_violations == 0 && worst_zero_sum <= 1e-9 && bias_ok;
    println!(
        "ACCEPTANCE 07 estimator guarantees: {} ({draws} draws, {bound_violations} bound violations, worst zero-sum {worst_zero_sum:.2e})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert_eq!(bound_violations, 0);
    assert!(worst_zero_sum <= 1e-9);
    assert!(bias_ok);
}

#[test]
fn criterion_08_estimated_cesaro_bound_in_expectation() {
    let gamma = 0.7;
    let mdp = random_mdp(6, 3, gamma, 1.0, 61);
    let experts = random_experts(&mdp, 3, 62);
    let mu0 = random_distribution(6, 63);
    let epsilon = 0.01;
    let kappa = 1.0;
    let rounds = 2000usize;
    let config = EstimationConfig::for_bias(gamma, epsilon, kappa, EstimationMode::Masked).unwrap();
    let strategy = StrategyKind::ExpTimeVarying { rate: None };
    let gain_bound = config.gain_bound(&mdp);
    let targets = mdpmix_core::run_targets(&mdp, &experts, &mu0).unwrap();
    let options = LoopOptions {
        record_weight_history: false,
        targets: Some(targets),
    };

    let seeds = 50u64;
    let regrets: Vec<f64> = (0..seeds)
        .map(|seed| {
            let record = run_estimated_loop(
                &mdp, &experts, strategy, gain_bound, rounds, &config, &mu0,
                rng::derive_seed(808, &[seed]),
                &options,
            )
            .unwrap();
            targets.best_mixture_value - record.cesaro_mean()
        })
        .collect();
    let mean: f64 = regrets.iter().sum::<f64>() / seeds as f64;
    let var = regrets.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (seeds as f64 - 1.0);
    let se = (var / seeds as f64).sqrt();

    let b_norm = mdpmix_core::regret_bound(&strategy, rounds as u64, 3, 1.0);
    let bound = epsilon / (1.0 - gamma)
        + b_norm / (kappa * (1.0 - gamma).powi(2) * rounds as f64)
        + 3.0 * se;
    let pass = mean <= bound;
    println!(
        "ACCEPTANCE 08 estimated Cesaro bound in expectation: {} (mean regret {mean:.4} vs bound {bound:.4}, se {se:.4})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "mean regret {mean} above {bound}");
}

#[test]
fn criterion_09_estimated_bound_high_probability() {
    let gamma = 0.5;
    let mdp = random_mdp(6, 3, gamma, 1.0, 71);
    let experts = random_experts(&mdp, 3, 72);
    let mu0 = random_distribution(6, 73);
    let epsilon = 0.01;
    let kappa = 0.5;
    let delta = 0.05f64;
    let rounds = 2500usize;
    let config = EstimationConfig::for_bias(gamma, epsilon, kappa, EstimationMode::Masked).unwrap();
    let strategy = StrategyKind::ExpTimeVarying { rate: None };
    let gain_bound = config.gain_bound(&mdp);
    let targets = mdpmix_core::run_targets(&mdp, &experts, &mu0).unwrap();
    let options = LoopOptions {
        record_weight_history: false,
        targets: Some(targets),
    };

    let b_norm = mdpmix_core::regret_bound(&strategy, rounds as u64, 3, 1.0);
    let bound = epsilon / (1.0 - gamma)
        + b_norm / (kappa * (1.0 - gamma).powi(2) * rounds as f64)
        + 2.0 * (1.0 / delta).ln() / (kappa * (1.0 - gamma).powi(2) * (rounds as f64).sqrt());

    let seeds = 100u64;
    let exceedances = (0..seeds)
        .filter(|&seed| {
            let record = run_estimated_loop(
                &mdp, &experts, strategy, gain_bound, rounds, &config, &mu0,
                rng::derive_seed(909, &[seed]),
                &options,
            )
            .unwrap();
            targets.best_mixture_value - record.cesaro_mean() > bound
        })
        .count();
    let pass = exceedances <= 10;
    println!(
        "ACCEPTANCE 09 estimated bound with high probability: {} ({exceedances}/100 exceed {bound:.4}, allowance 10)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{exceedances} exceedances of {bound}");
}

#[test]
fn criterion_10_adversarial_regret_harness() {
    let mut total_rows = 0usize;
    let mut violations = 0usize;
    for (num_experts, rounds, seeds) in [(3usize, 400u64, 50u64), (8, 500, 50)] {
        let params = HarnessParams {
            num_experts,
            gain_bound: 1.0,
            rounds,
            strategies: HarnessParams::default_strategies(num_experts, 1.0, rounds),
            seeds,
            checkpoints: 8,
        };
        let (rows, _) = run_harness(&params).unwrap();
        violations += rows.iter().filter(|r| r.violation).count();
        total_rows += rows.len();
    }
    println!(
        "ACCEPTANCE 10 adversarial regret harness: {} ({total_rows} checkpoints, {violations} violations)",
        if violations == 0 { "PASS" } else { "FAIL" }
    );
    assert_eq!(violations, 0);
}

#[test]
fn criterion_11_monotonicity_property() {
    let mut worst = f64::INFINITY;
    for kind in [
        StrategyKind::poly_default(3),
        StrategyKind::ExpFixed { eta: 0.3 },
        StrategyKind::GreedyProjection { rate: None },
    ] {
        let mut stream = rng::stream(1111, &[kind.label().len() as u64]);
        let mut learner = Learner::new(kind, 3, 1.0).unwrap();
        for t in 1..=10_000u64 {
            let gains: Vec<f64> = (0..3).map(|_| stream.random_range(-1.0..1.0)).collect();
            let g = GainVector::new(gains, t);
            let next = learner.observe(&g).unwrap();
            let gap = monotonicity_gap(&learner, &g, &next);
            worst = worst.min(gap);
            assert!(gap >= -1e-10, "{kind:?} round {t}: gap {gap}");
            learner = next;
        }
    }
    println!("ACCEPTANCE 11 monotonicity property: PASS (worst gap {worst:.2e} over 3x10^4 steps)");
}

#[test]
fn criterion_12_identity_suite() {
    // Advantage rows are mean-zero; the performance-difference identity and
    // lifted-evaluation equivalence hold; projection satisfies its KKT form;
    // the optimality certificate appears exactly when the approximation
    // error vanishes.
    let mut worst_a_null = 0.0f64;
    let mut worst_perf_diff = 0.0f64;
    let mut worst_lift = 0.0f64;
    for index in 0..10u64 {
        let b = battery(index);
        let q = mdpmix_core::synthetic::random_state_weights(
            b.mdp.num_states(),
            b.num_experts,
            40_000 + index,
        );
        let mixed = mix_policy(&q, &b.experts).unwrap();
        let v = policy_evaluation(&b.mdp, &mixed).unwrap();
        let (_, adv) = q_and_advantage(&b.mdp, &mixed, &v);
        for s in 0..b.mdp.num_states() {
            let weighted: f64 = mixed
                .row(s)
                .iter()
                .zip(adv.row(s))
                .map(|(p, a)| p * a)
                .sum();
            worst_a_null = worst_a_null.max(weighted.abs());
        }

        let pi = mdpmix_core::synthetic::random_policy(&b.mdp, 50_000 + index);
        let (lhs, rhs) = performance_difference(&b.mdp, &pi, &mixed, &b.mu0).unwrap();
        worst_perf_diff = worst_perf_diff.max((lhs - rhs).abs());

        let lifted = lift_mdp(&b.mdp, &b.experts).unwrap();
        let as_policy = StationaryPolicy::from_rows(&lifted, q.rows().to_vec()).unwrap();
        let v_lift = policy_evaluation(&lifted, &as_policy).unwrap();
        for s in 0..b.mdp.num_states() {
            worst_lift = worst_lift.max((v_lift.value(s) - v.value(s)).abs());
        }
    }
    assert!(worst_a_null <= 1e-9, "{worst_a_null}");
    assert!(worst_perf_diff <= 1e-8, "{worst_perf_diff}");
    assert!(worst_lift <= 1e-9, "{worst_lift}");

    let mut worst_kkt = 0.0f64;
    let mut stream = rng::stream(1212, &[0]);
    for _ in 0..500 {
        let v: Vec<f64> = (0..6).map(|_| stream.random_range(-4.0..4.0)).collect();
        let w = project_to_simplex(&v);
        let theta = v
            .iter()
            .zip(&w)
            .filter(|(_, &wk)| wk > 0.0)
            .map(|(&vk, &wk)| vk - wk)
            .next()
            .unwrap();
        let sum: f64 = w.iter().sum();
        worst_kkt = worst_kkt.max((sum - 1.0).abs());
        for (&vk, &wk) in v.iter().zip(&w) {
            worst_kkt = worst_kkt.max((wk - (vk - theta).max(0.0)).abs());
        }
    }
    assert!(worst_kkt <= 1e-10, "{worst_kkt}");

    // Certificate <=> zero approximation error, both directions.
    let mdp = random_mdp(5, 3, 0.8, 1.0, 1_313);
    let optimal = mdpmix_core::value_iteration(&mdp).unwrap();
    let with_optimal = ExpertSet::new(vec![
        optimal.policy.clone(),
        mdpmix_core::synthetic::random_policy(&mdp, 1_414),
    ])
    .unwrap();
    let mu0 = random_distribution(5, 1_515);
    let report = approximation_error(&mdp, &with_optimal, &mu0).unwrap();
    assert!(report.certified_everywhere());
    assert!(report.error.abs() <= 1e-6);

    let mut builder = TabularMdp::builder(2, 2, 0.5, 1.0);
    for s in 0..2 {
        builder.set_action(s, 0, 1.0, vec![(s, 1.0)]);
        builder.set_action(s, 1, 0.0, vec![(s, 1.0)]);
    }
    let dominated = builder.build().unwrap();
    let bad_only = ExpertSet::new(vec![StationaryPolicy::dirac(&dominated, &[1, 1]).unwrap()])
        .unwrap();
    let report = approximation_error(&dominated, &bad_only, &[0.5, 0.5]).unwrap();
    assert!(!report.certified_everywhere());
    assert!(report.error > 1e-6);

    println!(
        "ACCEPTANCE 12 identity suite: PASS (A-null {worst_a_null:.2e}, perf-diff {worst_perf_diff:.2e}, lift {worst_lift:.2e}, KKT {worst_kkt:.2e}, certificates both ways)"
    );
}

#[test]
fn scenario_two_analogue_self_consistent_convergence() {
    // The larger benchmark's exact numbers are unpublished; the criterion is
    // replaced by convergence of the lazy-estimation learner to the
    // self-computed orchestration optimum on a generated eight-class system.
    let params = gen::GenParams {
        classes: 8,
        max_queue: 2,
        seed: 2,
        state_cap: 200_000,
    };
    let scenario = gen::generate(&params).unwrap();
    let resolved = scenario.resolve().unwrap();
    assert_eq!(resolved.env.mdp.num_states(), 8 * 3usize.pow(8));
    let started = Instant::now();
    let summary = learn::run(&resolved, LearnMode::Estimated, &out_dir("scenario2")).unwrap();
    let elapsed = started.elapsed();
    let target = summary.best_mixture_value;
    let gap = (target - summary.mean_final_value).abs();
    let pass = gap <= 0.5;
    println!(
        "ACCEPTANCE scenario-2 analogue: {} (mean final {:.3} vs own optimum {:.3}, gap {gap:.3}, {:.0?})",
        if pass { "PASS" } else { "FAIL" },
        summary.mean_final_value,
        target,
        elapsed
    );
    assert!(pass, "gap {gap} above 0.5 after {} rounds", summary.rounds);
}
