use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mdpmix_cli::learn::LearnMode;
use mdpmix_cli::output::resolve_output_dir;
use mdpmix_cli::regret::HarnessParams;
use mdpmix_cli::scenario::{Scenario, StrategyName};
use mdpmix_cli::{audit, gen, learn, regret, solve, Overrides};

/// Expert-policy orchestration experiments on tabular matching MDPs.
#[derive(Parser)]
#[command(name = "mdpmix", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario exactly: expert values, best orchestration, optimum.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory (defaults to the scenario's reporting.output_dir).
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run learning repetitions and emit per-round value curves.
    Learn {
        #[arg(long)]
        scenario: PathBuf,
        /// oracle (exact advantages) or estimated (masked rollouts).
        #[arg(long)]
        mode: String,
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Check realized adversarial regret against the stated bounds.
    RegretHarness {
        #[arg(long, default_value_t = 3)]
        num_experts: usize,
        #[arg(long, default_value_t = 1.0)]
        gain_bound: f64,
        #[arg(long, default_value_t = 400)]
        rounds: u64,
        /// Comma-separated subset of poly,exp-fixed,exp-tv,greedy.
        #[arg(long, value_delimiter = ',')]
        strategies: Vec<String>,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        #[arg(long, default_value_t = 10)]
        checkpoints: usize,
        #[arg(long, default_value = "out/regret")]
        out: String,
    },
    /// Empirically audit the advantage estimator's guarantees.
    EstimatorAudit {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Number of audited (state, expert) pairs.
        #[arg(long, default_value_t = 4)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Draw a random scenario file (connected graph, payoffs in [0,20]).
    GenScenario {
        #[arg(long, default_value_t = 8)]
        classes: usize,
        #[arg(long, default_value_t = 2)]
        max_queue: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200_000)]
        state_cap: usize,
        /// Path of the scenario file to write.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct OverrideArgs {
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    poly_exponent: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    root_seed: Option<u64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    reward_scale_bias: Option<f64>,
    #[arg(long)]
    horizon: Option<usize>,
    /// masked or lazy.
    #[arg(long)]
    est_mode: Option<String>,
    #[arg(long)]
    holding_coeff: Option<f64>,
    #[arg(long)]
    discount: Option<f64>,
    #[arg(long)]
    max_queue: Option<usize>,
    /// removal or literal_increment.
    #[arg(long)]
    semantics: Option<String>,
    #[arg(long)]
    policy_seed: Option<u64>,
    #[arg(long)]
    sigma_seed: Option<u64>,
    #[arg(long)]
    state_cap: Option<usize>,
    #[arg(long)]
    confidence_delta: Option<f64>,
    #[arg(long)]
    evaluate_state: Option<usize>,
}

impl OverrideArgs {
    fn parse(&self) -> anyhow::Result<Overrides> {
        Ok(Overrides {
            strategy: self
                .strategy
                .as_deref()
                .map(str::parse::<StrategyName>)
                .transpose()?,
            poly_exponent: self.poly_exponent,
            eta: self.eta,
            rate: self.rate,
            rounds: self.rounds,
            repetitions: self.repetitions,
            root_seed: self.root_seed,
            kappa: self.kappa,
            epsilon: self.epsilon,
            reward_scale_bias: self.reward_scale_bias,
            horizon: self.horizon,
            est_mode: match self.est_mode.as_deref() {
                None => None,
                Some("masked") => Some(mdpmix_core::EstimationMode::Masked),
                Some("lazy") => Some(mdpmix_core::EstimationMode::Lazy),
                Some(other) => anyhow::bail!("unknown estimation mode {other:?}"),
            },
            holding_coeff: self.holding_coeff,
            discount: self.discount,
            max_queue: self.max_queue,
            semantics: match self.semantics.as_deref() {
                None => None,
                Some("removal") => Some(mdpmix_core::MatchSemantics::Removal),
                Some("literal_increment") => {
                    Some(mdpmix_core::MatchSemantics::LiteralIncrement)
                }
                Some(other) => anyhow::bail!("unknown semantics {other:?}"),
            },
            policy_seed: self.policy_seed,
            sigma_seed: self.sigma_seed,
            state_cap: self.state_cap,
            confidence_delta: self.confidence_delta,
            evaluate_state: self.evaluate_state,
        })
    }
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_AUDIT_FAILED: u8 = 3;

fn load_scenario(path: &Path, overrides: &OverrideArgs) -> anyhow::Result<Scenario> {
    let mut scenario = Scenario::load(path)?;
    overrides.parse()?.apply(&mut scenario)?;
    Ok(scenario)
}

fn validation_exit(err: anyhow::Error) -> ExitCode {
    eprintln!("error: {err:#}");
    ExitCode::from(EXIT_VALIDATION)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve { scenario, out, overrides } => {
            let loaded = match load_scenario(&scenario, &overrides) {
                Ok(s) => s,
                Err(e) => return validation_exit(e),
            };
            let resolved = match loaded.resolve() {
                Ok(r) => r,
                Err(e) => return validation_exit(e),
            };
            let out_dir = resolve_output_dir(out.as_deref(), &loaded.reporting.output_dir);
            match solve::run(&resolved, &out_dir) {
                Ok(report) => {
                    for (k, v) in report.expert_values.iter().enumerate() {
                        println!("V_expert_{} = {v:.4}", k + 1);
                    }
                    println!("V_best_mixture = {:.4}", report.best_mixture_value);
                    println!("V_optimal = {:.4}", report.optimal_value);
                    println!("approximation_error = {:.4}", report.approximation_error);
                    println!("table written to {}", out_dir.join("table.csv").display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Learn { scenario, mode, out, overrides } => {
            let mode: LearnMode = match mode.parse() {
                Ok(m) => m,
                Err(e) => return validation_exit(e),
            };
            let loaded = match load_scenario(&scenario, &overrides) {
                Ok(s) => s,
                Err(e) => return validation_exit(e),
            };
            let resolved = match loaded.resolve() {
                Ok(r) => r,
                Err(e) => return validation_exit(e),
            };
            let out_dir = resolve_output_dir(out.as_deref(), &loaded.reporting.output_dir);
            match learn::run(&resolved, mode, &out_dir) {
                Ok(summary) => {
                    println!(
                        "{} runs x {} rounds; mean final value {:.4} (best mixture {:.4}, optimum {:.4})",
                        summary.repetitions,
                        summary.rounds,
                        summary.mean_final_value,
                        summary.best_mixture_value,
                        summary.optimal_value
                    );
                    println!("curves written to {}", out_dir.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::RegretHarness {
            num_experts,
            gain_bound,
            rounds,
            strategies,
            seeds,
            checkpoints,
            out,
        } => {
            if num_experts < 2 || gain_bound <= 0.0 || rounds == 0 || seeds == 0 {
                return validation_exit(anyhow::anyhow!(
                    "need num_experts >= 2, gain_bound > 0, rounds >= 1, seeds >= 1"
                ));
            }
            let kinds = if strategies.is_empty() {
                HarnessParams::default_strategies(num_experts, gain_bound, rounds)
            } else {
                let mut kinds = Vec::new();
                for name in &strategies {
                    let parsed: StrategyName = match name.parse() {
                        Ok(p) => p,
                        Err(e) => return validation_exit(e),
                    };
                    let all = HarnessParams::default_strategies(num_experts, gain_bound, rounds);
                    kinds.push(match parsed {
                        StrategyName::Poly => all[0],
                        StrategyName::ExpFixed => all[1],
                        StrategyName::ExpTv => all[2],
                        StrategyName::Greedy => all[3],
                    });
                }
                kinds
            };
            let params = HarnessParams {
                num_experts,
                gain_bound,
                rounds,
                strategies: kinds,
                seeds,
                checkpoints,
            };
            let out_dir = resolve_output_dir(Some(&out), &out);
            match regret::run_harness(&params) {
                Ok((rows, any_violation)) => {
                    if let Err(e) = regret::write_csv(&rows, &out_dir) {
                        eprintln!("error: {e:#}");
                        return ExitCode::FAILURE;
                    }
                    let violations = rows.iter().filter(|r| r.violation).count();
                    println!(
                        "{} checkpoint rows, {} violations; written to {}",
                        rows.len(),
                        violations,
                        out_dir.join("regret.csv").display()
                    );
                    if any_violation {
                        ExitCode::from(EXIT_AUDIT_FAILED)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::EstimatorAudit { scenario, samples, pairs, seed, out, overrides } => {
            let loaded = match load_scenario(&scenario, &overrides) {
                Ok(s) => s,
                Err(e) => return validation_exit(e),
            };
            let resolved = match loaded.resolve() {
                Ok(r) => r,
                Err(e) => return validation_exit(e),
            };
            if samples < 1_000 {
                return validation_exit(anyhow::anyhow!("audit needs at least 1000 samples"));
            }
            let out_dir = resolve_output_dir(out.as_deref(), &loaded.reporting.output_dir);
            match audit::run(&resolved, samples, pairs, seed, &out_dir) {
                Ok(report) => {
                    if report.all_passed() {
                        println!("estimator audit passed");
                        ExitCode::SUCCESS
                    } else {
                        eprintln!("estimator audit FAILED");
                        ExitCode::from(EXIT_AUDIT_FAILED)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::GenScenario { classes, max_queue, seed, state_cap, out } => {
            let params = gen::GenParams {
                classes,
                max_queue,
                seed,
                state_cap,
            };
            match gen::generate(&params) {
                Ok(scenario) => {
                    if let Err(e) = scenario.save(&out) {
                        eprintln!("error: {e:#}");
                        return ExitCode::FAILURE;
                    }
                    println!("scenario written to {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => validation_exit(e),
            }
        }
    }
}
