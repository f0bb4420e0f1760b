//! Constants and bounds from the convergence analysis.
//!
//! - [`gaussian_h_constants`]: the `(h, λ)` constants bounding the
//!   conditional inner product `P[E]·E[∇fᵀg | E]` for Gaussian oracles;
//! - [`estimate_conditional_inner_product`] and
//!   [`gaussian_conditional_product`]: Monte-Carlo and closed-form values of
//!   that quantity, with `E = {∇fᵀg ≥ 0}`;
//! - [`lemma1_rhs`]: the per-case expected-decrease bound;
//! - [`TheoremConstants`] / [`theorem_bound`]: hypotheses, derived constants
//!   and right-hand sides of the five expected-gap / gradient-norm bounds.

mod bounds;
mod conditional;

pub use bounds::{
    geometric_rate, lemma1_rhs, sg_comparison_bound, sg_fixed_step_limit, theorem1_stepsize_cap,
    theorem_bound, trigamma, StepsizeRule, TheoremConstants, TheoremId, TheoremInputs,
};
pub use conditional::{
    check_assumption, check_assumption4, estimate_conditional_inner_product,
    gaussian_conditional_product, gaussian_event_probability, ConditionalInnerProductEstimate,
    BOOTSTRAP_RESAMPLES,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles::SigmaSchedule;

/// `1/(2√(2π))`
pub const HALF_INV_SQRT_2PI: f64 = 0.199_471_140_200_716_35;

/// Coefficients bounding `P[E_k]·E[∇fᵀg | E_k]`, one variant per noise regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AssumptionConstants {
    /// `≤ h₁ + h₂‖∇f‖²`
    Fixed { h1: f64, h2: f64 },
    /// `≤ h₃α_k + h₄‖∇f‖²`
    StepsizeCoupled { h3: f64, h4: f64 },
    /// `≤ h₅λ^{k−1} + h₆‖∇f‖²`
    Geometric { h5: f64, h6: f64, lambda: f64 },
}

impl AssumptionConstants {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            AssumptionConstants::Fixed { h1, h2 } => h1 > 0.0 && h2 > 1.0,
            AssumptionConstants::StepsizeCoupled { h3, h4 } => h3 > 0.0 && h4 > 1.0,
            AssumptionConstants::Geometric { h5, h6, lambda } => {
                h5 > 0.0 && h6 > 1.0 && lambda > 0.0 && lambda < 1.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "invalid assumption constants {self:?}"
            )))
        }
    }

    /// The coefficient multiplying `‖∇f‖²`.
    pub fn gradient_coefficient(&self) -> f64 {
        match *self {
            AssumptionConstants::Fixed { h2, .. } => h2,
            AssumptionConstants::StepsizeCoupled { h4, .. } => h4,
            AssumptionConstants::Geometric { h6, .. } => h6,
        }
    }

    /// The additive term at iteration `k` with stepsize `alpha`.
    pub fn offset(&self, k: u64, alpha: f64) -> f64 {
        match *self {
            AssumptionConstants::Fixed { h1, .. } => h1,
            AssumptionConstants::StepsizeCoupled { h3, .. } => h3 * alpha,
            AssumptionConstants::Geometric { h5, lambda, .. } => {
                h5 * lambda.powf(k.saturating_sub(1) as f64)
            }
        }
    }

    pub fn regime(&self) -> &'static str {
        match self {
            AssumptionConstants::Fixed { .. } => "fixed-noise constants (h1, h2)",
            AssumptionConstants::StepsizeCoupled { .. } => "stepsize-coupled constants (h3, h4)",
            AssumptionConstants::Geometric { .. } => "geometric constants (h5, h6, lambda)",
        }
    }
}

/// What is known about the noise level of an isotropic Gaussian oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoiseBound {
    /// `σ_k ≤ sigma`
    Fixed { sigma: f64 },
    /// `σ_k ≤ multiplier·α_k` with `α_k ≤ alpha_bound`
    StepsizeCoupled { multiplier: f64, alpha_bound: f64 },
    /// `σ_k² ≤ M₃ζ^{k−1}`
    Geometric { m3: f64, zeta: f64 },
}

impl NoiseBound {
    /// The bound implied by a Gaussian oracle's schedule.
    pub fn from_schedule(schedule: &SigmaSchedule, alpha_bound: Option<f64>) -> Result<Self> {
        Ok(match *schedule {
            SigmaSchedule::Constant(sigma) => NoiseBound::Fixed { sigma },
            SigmaSchedule::StepsizeCoupled(multiplier) => NoiseBound::StepsizeCoupled {
                multiplier,
                alpha_bound: alpha_bound.ok_or_else(|| {
                    Error::usage("stepsize-coupled noise needs a bound on the stepsizes")
                })?,
            },
            SigmaSchedule::GeometricDecay { m3, zeta } => NoiseBound::Geometric { m3, zeta },
        })
    }
}

/// The Gaussian-oracle constants. With `σ` the per-coordinate standard
/// deviation of an isotropic oracle, `∇fᵀg ~ N(‖∇f‖², σ²‖∇f‖²)` and
/// `P[E]·E[∇fᵀg | E] ≤ σ/(2√(2π)) + (1 + σ/(2√(2π)))‖∇f‖²`.
pub fn gaussian_h_constants(bound: NoiseBound) -> Result<AssumptionConstants> {
    let positive = |name: &str, v: f64| -> Result<()> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::usage(format!("{name} must be positive, got {v}")))
        }
    };
    Ok(match bound {
        NoiseBound::Fixed { sigma } => {
            positive("sigma", sigma)?;
            let h1 = sigma * HALF_INV_SQRT_2PI;
            AssumptionConstants::Fixed { h1, h2: 1.0 + h1 }
        }
        NoiseBound::StepsizeCoupled {
            multiplier,
            alpha_bound,
        } => {
            positive("noise multiplier", multiplier)?;
            positive("stepsize bound", alpha_bound)?;
            let h3 = multiplier * HALF_INV_SQRT_2PI;
            AssumptionConstants::StepsizeCoupled {
                h3,
                h4: 1.0 + alpha_bound * h3,
            }
        }
        NoiseBound::Geometric { m3, zeta } => {
            positive("M3", m3)?;
            if !(zeta > 0.0 && zeta < 1.0) {
                return Err(Error::usage(format!("zeta must lie in (0, 1), got {zeta}")));
            }
            let h5 = m3.sqrt() * HALF_INV_SQRT_2PI;
            AssumptionConstants::Geometric {
                h5,
                h6: 1.0 + h5,
                lambda: zeta.sqrt(),
            }
        }
    })
}
