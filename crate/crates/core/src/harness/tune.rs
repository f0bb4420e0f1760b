//! Grid search over mini-batch size, stepsize and (for TRish) `γ₁`.

use serde::Serialize;

use super::config::ExperimentConfig;
use super::run::{run_experiment_on, summarize, LoadedProblem, RunSummary};
use crate::error::{Error, Result};
use crate::step::{Method, StepsizeSchedule, TrishParams};

/// Candidate values. For TRish every `γ₁` is paired with
/// `γ₂ = gamma2_ratio · γ₁`; SG ignores both.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneGrid {
    pub batch_sizes: Vec<usize>,
    pub alphas: Vec<f64>,
    pub gamma1s: Vec<f64>,
    pub gamma2_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub batch_size: usize,
    pub alpha: f64,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub summary: RunSummary,
    /// At least one run diverged; such configurations are never selected.
    pub divergent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneResult {
    /// Every combination in lexicographic `(batch, α, γ₁)` order.
    pub table: Vec<GridRow>,
    /// Index into `table`; `None` when every configuration diverged.
    pub best: Option<usize>,
}

impl TuneResult {
    pub fn best_row(&self) -> Option<&GridRow> {
        self.best.map(|i| &self.table[i])
    }
}

fn selection_key(s: &RunSummary) -> (f64, f64) {
    let acc = s.test_acc.or(s.train_acc).unwrap_or(f64::NEG_INFINITY);
    let loss = s.test_loss.unwrap_or(s.train_loss);
    (acc, loss)
}

/// Evaluates every grid point with `base`'s seeds and budget. The winner
/// maximizes mean final test accuracy (training accuracy without a test
/// set); ties go to the lower mean test loss, then to the earlier row.
pub fn tune_grid(
    base: &ExperimentConfig,
    problem: &LoadedProblem,
    grid: &TuneGrid,
) -> Result<TuneResult> {
    let trish = matches!(base.method, Method::Trish(_));
    if grid.batch_sizes.is_empty() || grid.alphas.is_empty() || (trish && grid.gamma1s.is_empty()) {
        return Err(Error::usage("every tuning grid must be nonempty"));
    }
    let mut batches = grid.batch_sizes.clone();
    batches.sort_unstable();
    batches.dedup();
    let sorted = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let alphas = sorted(&grid.alphas);
    let gammas: Vec<Option<f64>> = if trish {
        sorted(&grid.gamma1s).into_iter().map(Some).collect()
    } else {
        vec![None]
    };

    let mut table = Vec::new();
    for &batch_size in &batches {
        for &alpha in &alphas {
            for &gamma1 in &gammas {
                let mut cfg = base.clone();
                cfg.batch_size = batch_size;
                cfg.schedule = StepsizeSchedule::fixed(alpha)?;
                let gamma2 = gamma1.map(|g| g * grid.gamma2_ratio);
                if let (Some(g1), Some(g2)) = (gamma1, gamma2) {
                    cfg.method = Method::Trish(TrishParams::new(g1, g2)?);
                }
                let records = run_experiment_on(&cfg, problem)?;
                let summary = summarize(&records);
                log::info!("grid b={batch_size} alpha={alpha} gamma1={gamma1:?}: {summary:?}");
                table.push(GridRow {
                    batch_size,
                    alpha,
                    gamma1,
                    gamma2,
                    divergent: summary.n_divergent > 0,
                    summary,
                });
            }
        }
    }

    let mut best: Option<usize> = None;
    for (i, row) in table.iter().enumerate() {
        if row.divergent {
            continue;
        }
        let (acc, loss) = selection_key(&row.summary);
        let better = match best {
            None => true,
            Some(j) => {
                let (best_acc, best_loss) = selection_key(&table[j].summary);
                acc > best_acc || (acc == best_acc && loss < best_loss)
            }
        };
        if better {
            best = Some(i);
        }
    }
    Ok(TuneResult { table, best })
}
