//! Monte-Carlo verification of the theorem bounds and the per-case
//! decrease bounds.

use std::cmp::Ordering;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::config::sha256_hex;
use super::csv::RunMetadata;
use crate::error::{Error, HypothesisError, Result};
use crate::linalg::norm_sq;
use crate::oracles::{
    gaussian_sample, seeded_rng, GaussianOracleConfig, SigmaSchedule, RNG_FAMILY,
};
use crate::problems::{NonconvexPlProblem, Objective, QuadraticProblem};
use crate::step::{trish_step, StepCase, TrishParams};
use crate::theory::{
    gaussian_conditional_product, gaussian_h_constants, lemma1_rhs, theorem_bound, NoiseBound,
    StepsizeRule, TheoremConstants, TheoremId, TheoremInputs,
};

const SEEDS_PER_CHUNK: usize = 25;
const SE_MULTIPLIER: f64 = 3.0;
/// Tolerance for comparisons that carry no sampling error.
const DETERMINISTIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySpec {
    pub theorem: TheoremId,
    pub params: TrishParams,
    /// Isotropic Gaussian noise; also the source of the moment and
    /// h-constants when `exact_gradients` is set.
    pub noise: SigmaSchedule,
    /// Use `g = ∇f(x)`; the constants still come from `noise`, which then
    /// only loosens the bound.
    pub exact_gradients: bool,
    pub stepsize: StepsizeRule,
    pub x1: Vec<f64>,
    pub n_seeds: usize,
    /// `K`: iterates `x_1 … x_K` are tracked.
    pub horizon: u64,
    pub base_seed: u64,
}

impl VerifySpec {
    /// Reference setups with `γ = (2, 1.9)`, `x₁ = 1` and 2000 seeds:
    ///
    /// | theorem | problem | noise | stepsize | `K` |
    /// |---|---|---|---|---|
    /// | 1 | `½x²` | `σ = 0.1` | `α = 0.5` (the cap) | 200 |
    /// | 2 | `½x²` | `σ_k = α_k` | `α_k = 2/(3+k)` | 500 |
    /// | 3 | `½x²` | `σ_k² = 0.25^{k−1}` | `α = 0.47` | 100 |
    /// | 4 | `x² + 3sin²x` | `σ = 0.1` | `α = 1/16` (the cap) | 200 |
    /// | 5 | `x² + 3sin²x` | `σ_k = α_k` | `α_k = 1/(15+k)` | 5000 |
    pub fn standard(theorem: TheoremId) -> Self {
        let (noise, stepsize, horizon) = match theorem {
            TheoremId::FixedStepPl => (SigmaSchedule::Constant(0.1), StepsizeRule::Fixed(0.5), 200),
            TheoremId::DiminishingPl => (
                SigmaSchedule::StepsizeCoupled(1.0),
                StepsizeRule::Harmonic { a: 2.0, b: 3.0 },
                500,
            ),
            TheoremId::GeometricPl => (
                SigmaSchedule::GeometricDecay {
                    m3: 1.0,
                    zeta: 0.25,
                },
                StepsizeRule::Fixed(0.47),
                100,
            ),
            TheoremId::FixedStepNonconvex => (
                SigmaSchedule::Constant(0.1),
                StepsizeRule::Fixed(1.0 / 16.0),
                200,
            ),
            TheoremId::DiminishingNonconvex => (
                SigmaSchedule::StepsizeCoupled(1.0),
                StepsizeRule::Harmonic { a: 1.0, b: 15.0 },
                5000,
            ),
        };
        VerifySpec {
            theorem,
            params: TrishParams::new(2.0, 1.9).expect("valid constants"),
            noise,
            exact_gradients: false,
            stepsize,
            x1: vec![1.0],
            n_seeds: 2000,
            horizon,
            base_seed: 0,
        }
    }

    /// The problem the reference setup runs on.
    pub fn standard_problem(theorem: TheoremId) -> Box<dyn Objective> {
        if theorem.bounds_gap() {
            Box::new(QuadraticProblem::isotropic(1).expect("valid dimension"))
        } else {
            Box::new(NonconvexPlProblem::new(1).expect("valid dimension"))
        }
    }

    /// `key = value` description without the base seed.
    pub fn canonical(&self) -> String {
        format!(
            "theorem = {}\ngamma1 = {:?}\ngamma2 = {:?}\nnoise = {:?}\nexact = {}\n\
             stepsize = {:?}\nx1 = {:?}\nseeds = {}\nhorizon = {}\n",
            self.theorem.number(),
            self.params.gamma1(),
            self.params.gamma2(),
            self.noise,
            self.exact_gradients,
            self.stepsize,
            self.x1,
            self.n_seeds,
            self.horizon
        )
    }

    pub fn metadata(&self) -> RunMetadata {
        let config = self.canonical();
        RunMetadata {
            config_hash: sha256_hex(&config),
            rng_family: RNG_FAMILY.to_string(),
            base_seed: self.base_seed,
            n_seeds: self.n_seeds,
            x1: self.x1.clone(),
            config,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyRow {
    pub k: u64,
    /// Mean over seeds of `f(x_k) − f*` (theorems 1–3),
    /// `(1/k) Σ_{j≤k} ‖∇f(x_j)‖²` (theorem 4) or
    /// `Σ_{j≤k} α_j ‖∇f(x_j)‖²` (theorem 5).
    pub empirical: f64,
    pub standard_error: f64,
    pub bound: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub theorem: TheoremId,
    pub constants: TheoremConstants,
    pub n_seeds: usize,
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    pub fn violations(&self) -> Vec<u64> {
        self.rows
            .iter()
            .filter(|r| r.violated)
            .map(|r| r.k)
            .collect()
    }

    pub fn row(&self, k: u64) -> Option<&VerifyRow> {
        self.rows.get((k as usize).checked_sub(1)?)
    }
}

/// Collects the theorem's inputs from the problem's declared constants and
/// the Gaussian noise model. The nonconvex theorems never see `c`.
pub fn derive_theorem_inputs(problem: &dyn Objective, spec: &VerifySpec) -> Result<TheoremInputs> {
    let meta = problem.metadata();
    let lipschitz = meta
        .lipschitz
        .ok_or(HypothesisError::MissingConstant("L"))?;
    let f_star = meta.f_star.ok_or(HypothesisError::MissingConstant("f*"))?;
    let pl_constant = if spec.theorem.bounds_gap() {
        Some(
            meta.pl_constant
                .ok_or(HypothesisError::MissingConstant("c"))?,
        )
    } else {
        None
    };
    if spec.x1.len() != meta.dimension {
        return Err(Error::usage(format!(
            "x1 has dimension {}, problem has {}",
            spec.x1.len(),
            meta.dimension
        )));
    }
    let alpha_max = match spec.stepsize {
        StepsizeRule::Fixed(a) => a,
        StepsizeRule::Harmonic { a, b } => a / (b + 1.0),
    };
    let oracle = GaussianOracleConfig::new(spec.noise, spec.base_seed)?;
    let moments = oracle.moments(meta.dimension, Some(alpha_max))?;
    // ∇fᵀg ~ N(‖∇f‖², σ²‖∇f‖²) in any dimension, so the scalar constants hold
    let assumption =
        gaussian_h_constants(NoiseBound::from_schedule(&spec.noise, Some(alpha_max))?)?;
    Ok(TheoremInputs {
        params: spec.params,
        lipschitz,
        pl_constant,
        moments,
        assumption,
        stepsize: spec.stepsize,
        initial_gap: problem.value(&spec.x1) - f_star,
    })
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1.0;
        let d = v - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (v - self.mean);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0.0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n / n;
        self.m2 += o.m2 + d * d * self.n * o.n / n;
        self.n = n;
    }

    fn standard_error(&self) -> f64 {
        if self.n < 2.0 {
            0.0
        } else {
            (self.m2 / (self.n - 1.0) / self.n).sqrt()
        }
    }
}

/// Runs `n_seeds` TRish trajectories and compares the per-`k` mean with the
/// theorem's bound plus three standard errors. Hypotheses are checked before
/// any trajectory is simulated.
pub fn verify_theorem(problem: &dyn Objective, spec: &VerifySpec) -> Result<VerifyReport> {
    if spec.n_seeds == 0 || spec.horizon == 0 {
        return Err(Error::usage(
            "verification needs at least one seed and one iteration",
        ));
    }
    let inputs = derive_theorem_inputs(problem, spec)?;
    let constants = TheoremConstants::derive(spec.theorem, &inputs)?;
    let schedule = spec.stepsize.to_schedule()?;
    let f_star = problem.metadata().f_star.expect("checked above");
    let horizon = spec.horizon as usize;

    let seeds: Vec<u64> = (0..spec.n_seeds as u64)
        .map(|i| spec.base_seed.wrapping_add(i))
        .collect();
    let chunks: Vec<Result<Vec<Moments>>> = seeds
        .par_chunks(SEEDS_PER_CHUNK)
        .map(|chunk| {
            let mut acc = vec![Moments::default(); horizon];
            let mut values = vec![0.0; horizon];
            for &seed in chunk {
                simulate(problem, spec, &schedule, f_star, seed, &mut values)?;
                acc.iter_mut().zip(&values).for_each(|(m, &v)| m.push(v));
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![Moments::default(); horizon];
    for chunk in chunks {
        total.iter_mut().zip(&chunk?).for_each(|(t, c)| t.merge(c));
    }

    let rows = total
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let k = i as u64 + 1;
            let bound = theorem_bound(spec.theorem, &constants, k)?;
            let se = m.standard_error();
            let tolerance = bound + SE_MULTIPLIER * se + DETERMINISTIC_TOL * (1.0 + bound.abs());
            Ok(VerifyRow {
                k,
                empirical: m.mean,
                standard_error: se,
                bound,
                // a NaN mean counts as a violation
                violated: !matches!(
                    m.mean.partial_cmp(&tolerance),
                    Some(Ordering::Less | Ordering::Equal)
                ),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        theorem: spec.theorem,
        constants,
        n_seeds: spec.n_seeds,
        rows,
    })
}

fn simulate(
    problem: &dyn Objective,
    spec: &VerifySpec,
    schedule: &crate::step::StepsizeSchedule,
    f_star: f64,
    seed: u64,
    out: &mut [f64],
) -> Result<()> {
    let mut rng = seeded_rng(seed);
    let oracle = GaussianOracleConfig {
        schedule: spec.noise,
        rng_seed: seed,
    };
    let mut x = spec.x1.clone();
    let mut running = 0.0;
    let last = out.len() - 1;
    for (i, slot) in out.iter_mut().enumerate() {
        let k = i as u64 + 1;
        let alpha = schedule.at(k)?;
        let grad = problem.gradient(&x);
        *slot = match spec.theorem {
            TheoremId::FixedStepNonconvex => {
                running += norm_sq(&grad);
                running / k as f64
            }
            TheoremId::DiminishingNonconvex => {
                running += alpha * norm_sq(&grad);
                running
            }
            _ => problem.value(&x) - f_star,
        };
        if i == last {
            break;
        }
        let g = if spec.exact_gradients {
            grad
        } else {
            gaussian_sample(&grad, &oracle, k, alpha, &mut rng)?
        };
        x = trish_step(&x, &g, alpha, &spec.params)?.0;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1CaseReport {
    pub case: StepCase,
    pub n_samples: u64,
    /// Mean of `f(x_next) − f(x)` over draws that realized `case`.
    pub mean_decrease: f64,
    pub standard_error: f64,
    pub rhs: f64,
    /// `mean_decrease ≤ rhs + 3·SE`
    pub holds: bool,
}

/// One-step experiment at a fixed point with `g = ∇f(x) + σz`: draws until
/// every case has `min_per_case` samples (or `max_draws` is reached) and
/// compares each case-conditioned mean decrease with its bound. The bound
/// uses `M₁ = nσ²`, `M₂ = 1` and the closed-form conditional product.
#[allow(clippy::too_many_arguments)]
pub fn lemma1_case_check<R: Rng>(
    problem: &dyn Objective,
    x: &[f64],
    sigma: f64,
    params: &TrishParams,
    alpha: f64,
    min_per_case: u64,
    max_draws: u64,
    rng: &mut R,
) -> Result<Vec<Lemma1CaseReport>> {
    let lipschitz = problem
        .metadata()
        .lipschitz
        .ok_or(HypothesisError::MissingConstant("L"))?;
    if !(sigma > 0.0 && alpha > 0.0) {
        return Err(Error::usage("sigma and alpha must be positive"));
    }
    let grad = problem.gradient(x);
    let fx = problem.value(x);
    let mut stats = [Moments::default(); 3];
    let mut draws = 0;
    while draws < max_draws && stats.iter().any(|s| (s.n as u64) < min_per_case) {
        draws += 1;
        let g: Vec<f64> = grad
            .iter()
            .map(|&m| m + sigma * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let (next, case) = trish_step(x, &g, alpha, params)?;
        stats[case.index()].push(problem.value(&next) - fx);
    }
    let gns = norm_sq(&grad);
    let m1 = x.len() as f64 * sigma * sigma;
    let product = gaussian_conditional_product(&grad, sigma)?;
    Ok([StepCase::Case1, StepCase::Case2, StepCase::Case3]
        .into_iter()
        .map(|case| {
            let s = stats[case.index()];
            let rhs = lemma1_rhs(case, gns, alpha, params, m1, 1.0, lipschitz, product);
            let se = s.standard_error();
            Lemma1CaseReport {
                case,
                n_samples: s.n as u64,
                mean_decrease: if s.n > 0.0 { s.mean } else { f64::NAN },
                standard_error: se,
                rhs,
                holds: s.n > 0.0 && s.mean <= rhs + SE_MULTIPLIER * se,
            }
        })
        .collect())
}
