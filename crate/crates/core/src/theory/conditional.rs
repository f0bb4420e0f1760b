//! The conditional inner product `P[E]·E[∇fᵀg | E]`, `E = {∇fᵀg ≥ 0}`.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::AssumptionConstants;
use crate::error::{Error, Result};
use crate::linalg::{check_finite, dot, norm_sq};
use crate::oracles::seeded_rng;

pub const BOOTSTRAP_RESAMPLES: usize = 1000;
const MIN_SAMPLES: usize = 1000;
const MAX_BLOCKS: usize = 1000;
/// Slack added to every checker so closed-form (zero-SE) comparisons are
/// robust to rounding.
const DETERMINISTIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalInnerProductEstimate {
    /// Empirical `P[E]`.
    pub prob_event: f64,
    /// Empirical `E[∇fᵀg | E]`; NaN when the event never occurred.
    pub conditional_mean: f64,
    pub product: f64,
    /// Bootstrap standard error of `product`.
    pub standard_error: f64,
    pub n_samples: usize,
    /// Empirical `E[∇fᵀg | Ē]`; `None` when the complement never occurred.
    pub complement_mean: Option<f64>,
    /// Sample mean of `∇fᵀg`, assembled from the two conditional parts.
    pub total_mean: f64,
    /// Bootstrap standard error of `total_mean`.
    pub total_standard_error: f64,
    /// Set when the event never occurred in the sample.
    pub degenerate: bool,
}

impl ConditionalInnerProductEstimate {
    /// An exact value (zero standard error), for closed-form comparisons.
    pub fn exact(prob_event: f64, product: f64) -> Self {
        let conditional_mean = if prob_event > 0.0 {
            product / prob_event
        } else {
            f64::NAN
        };
        Self {
            prob_event,
            conditional_mean,
            product,
            standard_error: 0.0,
            n_samples: 0,
            complement_mean: None,
            total_mean: f64::NAN,
            total_standard_error: 0.0,
            degenerate: prob_event == 0.0,
        }
    }

    /// `standard_error / |product|`; infinite for a degenerate estimate.
    pub fn relative_error(&self) -> f64 {
        if self.degenerate {
            f64::INFINITY
        } else {
            self.standard_error / self.product.abs()
        }
    }

    /// `P·E[·|E] + (1−P)·E[·|Ē] − ‖∇f‖²`, which vanishes in expectation.
    pub fn total_expectation_residual(&self, grad_norm_sq: f64) -> f64 {
        let complement = self
            .complement_mean
            .map_or(0.0, |m| (1.0 - self.prob_event) * m);
        self.product + complement - grad_norm_sq
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Block {
    count: f64,
    event_count: f64,
    event_sum: f64,
    complement_sum: f64,
}

impl Block {
    fn add(&mut self, other: &Block) {
        self.count += other.count;
        self.event_count += other.event_count;
        self.event_sum += other.event_sum;
        self.complement_sum += other.complement_sum;
    }

    fn product(&self) -> f64 {
        self.event_sum / self.count
    }

    fn total_mean(&self) -> f64 {
        (self.event_sum + self.complement_sum) / self.count
    }
}

fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Monte-Carlo estimate from `n_samples` draws of `sampler`.
///
/// Standard errors come from a bootstrap over (at most 1000) contiguous
/// blocks of draws, resampled [`BOOTSTRAP_RESAMPLES`] times; the bootstrap
/// stream is seeded from `rng`, so the whole estimate is a deterministic
/// function of the incoming stream.
pub fn estimate_conditional_inner_product<R, F>(
    grad_true: &[f64],
    mut sampler: F,
    n_samples: usize,
    rng: &mut R,
) -> Result<ConditionalInnerProductEstimate>
where
    R: RngCore,
    F: FnMut(&mut R) -> Vec<f64>,
{
    if n_samples < MIN_SAMPLES {
        return Err(Error::usage(format!(
            "conditional estimates need at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    check_finite(grad_true, "true gradient")?;

    let n_blocks = n_samples.min(MAX_BLOCKS);
    let mut blocks = vec![Block::default(); n_blocks];
    for i in 0..n_samples {
        let g = sampler(rng);
        if g.len() != grad_true.len() {
            return Err(Error::usage(format!(
                "oracle returned dimension {}, expected {}",
                g.len(),
                grad_true.len()
            )));
        }
        let x = dot(grad_true, &g);
        if !x.is_finite() {
            return Err(Error::data("oracle produced a non-finite sample"));
        }
        let b = &mut blocks[i * n_blocks / n_samples];
        b.count += 1.0;
        if x >= 0.0 {
            b.event_count += 1.0;
            b.event_sum += x;
        } else {
            b.complement_sum += x;
        }
    }

    let mut all = Block::default();
    blocks.iter().for_each(|b| all.add(b));

    let mut boot_rng = seeded_rng(rng.next_u64());
    let mut products = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut totals = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let mut acc = Block::default();
        for _ in 0..n_blocks {
            acc.add(&blocks[boot_rng.random_range(0..n_blocks)]);
        }
        products.push(acc.product());
        totals.push(acc.total_mean());
    }

    let complement_count = all.count - all.event_count;
    let degenerate = all.event_count == 0.0;
    Ok(ConditionalInnerProductEstimate {
        prob_event: all.event_count / all.count,
        conditional_mean: if degenerate {
            f64::NAN
        } else {
            all.event_sum / all.event_count
        },
        product: all.product(),
        standard_error: std_dev(&products),
        n_samples,
        complement_mean: (complement_count > 0.0).then(|| all.complement_sum / complement_count),
        total_mean: all.total_mean(),
        total_standard_error: std_dev(&totals),
        degenerate,
    })
}

fn gaussian_moments(grad_true: &[f64], sigma: f64) -> Result<Option<(f64, f64)>> {
    check_finite(grad_true, "true gradient")?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::usage(format!("sigma must be positive, got {sigma}")));
    }
    let m = norm_sq(grad_true);
    Ok((m > 0.0).then(|| (m, sigma * m.sqrt())))
}

/// `P[∇fᵀg ≥ 0]` for `g ~ N(∇f, σ²I)`.
pub fn gaussian_event_probability(grad_true: &[f64], sigma: f64) -> Result<f64> {
    let std = Normal::standard();
    Ok(gaussian_moments(grad_true, sigma)?.map_or(1.0, |(m, s)| std.cdf(m / s)))
}

/// Closed form of `P[E]·E[∇fᵀg | E]` for `g ~ N(∇f, σ²I)`. With
/// `X = ∇fᵀg ~ N(m, s²)`, `m = ‖∇f‖²`, `s = σ‖∇f‖`, the truncated first
/// moment is `m·Φ(m/s) + s·φ(m/s)`.
pub fn gaussian_conditional_product(grad_true: &[f64], sigma: f64) -> Result<f64> {
    let std = Normal::standard();
    Ok(gaussian_moments(grad_true, sigma)?
        .map_or(0.0, |(m, s)| m * std.cdf(m / s) + s * std.pdf(m / s)))
}

/// `product ≤ h₁ + h₂‖∇f‖² + 3·SE`.
pub fn check_assumption4(
    estimate: &ConditionalInnerProductEstimate,
    h1: f64,
    h2: f64,
    grad_norm_sq: f64,
) -> bool {
    estimate.product <= h1 + h2 * grad_norm_sq + 3.0 * estimate.standard_error + DETERMINISTIC_TOL
}

/// The same comparison for any regime: the offset is `h₁`, `h₃α_k` or
/// `h₅λ^{k−1}`.
pub fn check_assumption(
    estimate: &ConditionalInnerProductEstimate,
    constants: &AssumptionConstants,
    grad_norm_sq: f64,
    k: u64,
    alpha_k: f64,
) -> bool {
    estimate.product
        <= constants.offset(k, alpha_k)
            + constants.gradient_coefficient() * grad_norm_sq
            + 3.0 * estimate.standard_error
            + DETERMINISTIC_TOL
}
