//! Multi-seed experiment runs.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{render_pairs, Budget, ExperimentConfig, OracleSpec, ProblemSpec};
use super::csv::RunMetadata;
use crate::error::{Error, Result};
use crate::ingest::parse_libsvm_file;
use crate::oracles::{
    finite_sum_minibatch, gaussian_sample, seeded_rng, GaussianOracleConfig, RNG_FAMILY,
};
use crate::problems::{
    classification_accuracy, logistic_loss, FiniteSum, LogisticProblem, NonconvexPlProblem,
    Objective, QuadraticProblem,
};
use crate::step::IterateState;

/// A problem instance ready to run.
#[derive(Debug, Clone)]
pub enum LoadedProblem {
    Quadratic(QuadraticProblem),
    NonconvexPl(NonconvexPlProblem),
    Logistic(LogisticProblem),
}

impl LoadedProblem {
    pub fn load(spec: &ProblemSpec) -> Result<Self> {
        Ok(match spec {
            ProblemSpec::Quadratic { diag, shift } => {
                LoadedProblem::Quadratic(QuadraticProblem::new(diag.clone(), shift.clone())?)
            }
            ProblemSpec::NonconvexPl { dim } => {
                LoadedProblem::NonconvexPl(NonconvexPlProblem::new(*dim)?)
            }
            ProblemSpec::Logistic { train, test } => {
                let train = parse_libsvm_file(train)?;
                let test = test.as_ref().map(parse_libsvm_file).transpose()?;
                LoadedProblem::Logistic(LogisticProblem::from_rows(
                    &train.rows,
                    test.as_ref().map(|t| t.rows.as_slice()),
                )?)
            }
        })
    }

    pub fn objective(&self) -> &dyn Objective {
        match self {
            LoadedProblem::Quadratic(p) => p,
            LoadedProblem::NonconvexPl(p) => p,
            LoadedProblem::Logistic(p) => p,
        }
    }

    pub fn finite_sum(&self) -> Option<&dyn FiniteSum> {
        match self {
            LoadedProblem::Logistic(p) => Some(p),
            _ => None,
        }
    }

    /// Exact metrics on the full training (and testing) sets.
    fn metrics(&self, x: &[f64]) -> Result<Metrics> {
        Ok(match self {
            LoadedProblem::Logistic(p) => {
                let train = p.train();
                let (test_loss, test_acc) = match p.test() {
                    Some(t) => (
                        Some(logistic_loss(x, t)?),
                        Some(classification_accuracy(x, t)?),
                    ),
                    None => (None, None),
                };
                Metrics {
                    train_loss: logistic_loss(x, train)?,
                    train_acc: Some(classification_accuracy(x, train)?),
                    test_loss,
                    test_acc,
                }
            }
            other => Metrics {
                train_loss: other.objective().value(x),
                train_acc: None,
                test_loss: None,
                test_acc: None,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct Metrics {
    train_loss: f64,
    train_acc: Option<f64>,
    test_loss: Option<f64>,
    test_acc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    pub fraction: f64,
    /// Completed iterations; the recorded iterate is `x_{iteration+1}`.
    pub iteration: u64,
    pub train_loss: f64,
    pub train_acc: Option<f64>,
    pub test_loss: Option<f64>,
    pub test_acc: Option<f64>,
    pub case_counts: [u64; 3],
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    /// Checkpoints reached; a divergent run stops early.
    pub checkpoints: Vec<Checkpoint>,
    /// Set when the loss or the iterate became non-finite.
    pub divergent: bool,
    /// Component-gradient evaluations spent by the oracle (0 for
    /// non-finite-sum oracles).
    pub component_evaluations: u64,
}

impl RunRecord {
    pub fn final_checkpoint(&self) -> Option<&Checkpoint> {
        self.checkpoints.last()
    }
}

/// `⌈N/b⌉`
pub fn iterations_per_epoch(n_components: usize, batch_size: usize) -> u64 {
    n_components.div_ceil(batch_size) as u64
}

/// Total iterations for the configured budget.
pub fn total_iterations(config: &ExperimentConfig, problem: &LoadedProblem) -> Result<u64> {
    match config.budget {
        Budget::Iterations(n) => Ok(n),
        Budget::Epochs(e) => {
            let fs = problem.finite_sum().ok_or_else(|| {
                Error::usage("epoch budgets need a finite-sum problem; use `iterations`")
            })?;
            let per_epoch = iterations_per_epoch(fs.n_components(), config.batch_size);
            Ok(((e * per_epoch as f64).ceil() as u64).max(1))
        }
    }
}

/// Runs `n_seeds` trajectories (seeds `base_seed + i`) from the same `x₁`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let problem = LoadedProblem::load(&config.problem)?;
    run_experiment_on(config, &problem)
}

/// [`run_experiment`] on an already loaded problem.
pub fn run_experiment_on(
    config: &ExperimentConfig,
    problem: &LoadedProblem,
) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let total = total_iterations(config, problem)?;
    let x1 = config
        .initial_point
        .materialize(problem.objective().dim())?;
    if let (OracleSpec::MiniBatch(_), None) = (config.oracle, problem.finite_sum()) {
        return Err(Error::usage("mini-batch oracles need a finite-sum problem"));
    }
    if let Some(fs) = problem.finite_sum() {
        if config.batch_size > fs.n_components() {
            return Err(Error::usage(format!(
                "batch size {} exceeds the {} training pairs",
                config.batch_size,
                fs.n_components()
            )));
        }
    }
    let targets: Vec<u64> = config
        .checkpoint_fractions
        .iter()
        .map(|f| ((f * total as f64).round() as u64).clamp(1, total))
        .collect();

    (0..config.n_seeds as u64)
        .into_par_iter()
        .map(|i| {
            run_one(
                config,
                problem,
                &x1,
                &targets,
                config.base_seed.wrapping_add(i),
            )
        })
        .collect()
}

fn run_one(
    config: &ExperimentConfig,
    problem: &LoadedProblem,
    x1: &[f64],
    targets: &[u64],
    seed: u64,
) -> Result<RunRecord> {
    let start = Instant::now();
    let mut rng = seeded_rng(seed);
    let objective = problem.objective();
    let mut state = IterateState::new(x1.to_vec());
    let mut record = RunRecord {
        seed,
        checkpoints: Vec::with_capacity(targets.len()),
        divergent: false,
        component_evaluations: 0,
    };
    let mut done = 0u64;
    for (&target, &fraction) in targets.iter().zip(&config.checkpoint_fractions) {
        while done < target {
            let k = state.k();
            let alpha = config.schedule.at(k)?;
            let g = match config.oracle {
                OracleSpec::Exact => objective.gradient(state.x()),
                OracleSpec::MiniBatch(sampling) => {
                    let fs = problem.finite_sum().expect("checked by the caller");
                    record.component_evaluations += match sampling {
                        crate::oracles::BatchSampling::FullPass => fs.n_components() as u64,
                        _ => config.batch_size as u64,
                    };
                    finite_sum_minibatch(fs, state.x(), config.batch_size, sampling, &mut rng)?
                }
                OracleSpec::Gaussian(schedule) => {
                    let grad = objective.gradient(state.x());
                    if grad.iter().any(|v| !v.is_finite()) {
                        record.divergent = true;
                        return Ok(record);
                    }
                    let oracle = GaussianOracleConfig {
                        schedule,
                        rng_seed: seed,
                    };
                    gaussian_sample(&grad, &oracle, k, alpha, &mut rng)?
                }
            };
            if g.iter().any(|v| !v.is_finite()) {
                record.divergent = true;
                return Ok(record);
            }
            state.advance(&config.method, &g, &config.schedule)?;
            done += 1;
        }
        if state.x().iter().any(|v| !v.is_finite()) {
            record.divergent = true;
            return Ok(record);
        }
        let m = problem.metrics(state.x())?;
        if !m.train_loss.is_finite() || m.test_loss.is_some_and(|l| !l.is_finite()) {
            record.divergent = true;
            return Ok(record);
        }
        record.checkpoints.push(Checkpoint {
            fraction,
            iteration: done,
            train_loss: m.train_loss,
            train_acc: m.train_acc,
            test_loss: m.test_loss,
            test_acc: m.test_acc,
            case_counts: state.case_counts(),
            wall_ms: config
                .record_wall_time
                .then(|| start.elapsed().as_secs_f64() * 1e3),
        });
    }
    Ok(record)
}

/// Provenance for a run's CSV output.
pub fn run_metadata(config: &ExperimentConfig, problem: &LoadedProblem) -> Result<RunMetadata> {
    Ok(RunMetadata {
        config_hash: config.config_hash(),
        rng_family: RNG_FAMILY.to_string(),
        base_seed: config.base_seed,
        n_seeds: config.n_seeds,
        x1: config
            .initial_point
            .materialize(problem.objective().dim())?,
        config: render_pairs(&config.to_pairs()),
    })
}

/// Means of the final metrics over non-divergent runs, in seed order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunSummary {
    pub n_runs: usize,
    pub n_divergent: usize,
    pub train_loss: f64,
    pub train_acc: Option<f64>,
    pub test_loss: Option<f64>,
    pub test_acc: Option<f64>,
}

pub fn summarize(records: &[RunRecord]) -> RunSummary {
    let finals: Vec<&Checkpoint> = records
        .iter()
        .filter(|r| !r.divergent)
        .filter_map(RunRecord::final_checkpoint)
        .collect();
    let n = finals.len() as f64;
    let mean = |f: &dyn Fn(&Checkpoint) -> f64| {
        if finals.is_empty() {
            f64::NAN
        } else {
            finals.iter().map(|c| f(c)).sum::<f64>() / n
        }
    };
    let mean_opt = |f: &dyn Fn(&Checkpoint) -> Option<f64>| -> Option<f64> {
        let vals: Option<Vec<f64>> = finals.iter().map(|c| f(c)).collect();
        vals.filter(|v| !v.is_empty())
            .map(|v| v.iter().sum::<f64>() / v.len() as f64)
    };
    RunSummary {
        n_runs: records.len(),
        n_divergent: records.iter().filter(|r| r.divergent).count(),
        train_loss: mean(&|c| c.train_loss),
        train_acc: mean_opt(&|c| c.train_acc),
        test_loss: mean_opt(&|c| c.test_loss),
        test_acc: mean_opt(&|c| c.test_acc),
    }
}
