//! Per-case decrease bounds and the five theorem bounds.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::AssumptionConstants;
use crate::error::{Error, HypothesisError, Result};
use crate::oracles::OracleMoments;
use crate::step::{StepCase, StepsizeSchedule, TrishParams};

/// Relative slack when comparing a stepsize with its cap, so a stepsize
/// computed as the cap itself is accepted.
const CAP_RTOL: f64 = 1e-12;

/// Right-hand side of the expected-decrease bound
/// `E[f(x_{k+1})] − f(x_k) ≤ rhs` for the realized case.
#[allow(clippy::too_many_arguments)]
pub fn lemma1_rhs(
    case: StepCase,
    grad_norm_sq: f64,
    alpha: f64,
    params: &TrishParams,
    m1: f64,
    m2: f64,
    lipschitz: f64,
    conditional_product: f64,
) -> f64 {
    let (g1, g2) = (params.gamma1(), params.gamma2());
    let scaled = |gamma: f64| {
        -gamma * alpha * (1.0 - 0.5 * gamma * lipschitz * m2 * alpha) * grad_norm_sq
            + 0.5 * gamma * gamma * lipschitz * m1 * alpha * alpha
    };
    match case {
        StepCase::Case1 => scaled(g1),
        StepCase::Case2 => {
            -g1 * alpha * grad_norm_sq
                + (g1 - g2) * alpha * conditional_product
                + 0.5 * lipschitz * alpha * alpha
        }
        StepCase::Case3 => scaled(g2),
    }
}

/// Fixed-step TRish limit with `α = 1/(γ₁LM₂)` substituted:
/// `h₁(γ₁−γ₂)/(c·d) + 1/(2cM₂γ₁·d)` with `d = γ₁ − h₂(γ₁−γ₂)`.
/// `gamma1 == gamma2` is accepted as the degenerate limit.
pub fn sg_comparison_bound(
    gamma1: f64,
    gamma2: f64,
    h1: f64,
    h2: f64,
    c: f64,
    m2: f64,
) -> Result<f64> {
    if !(gamma1 >= gamma2 && gamma2 > 0.0) {
        return Err(Error::usage(format!(
            "need gamma1 >= gamma2 > 0, got ({gamma1}, {gamma2})"
        )));
    }
    if !(c > 0.0 && m2 > 0.0 && h1 >= 0.0 && h2 > 1.0) {
        return Err(Error::usage(
            "sg comparison needs c, M2 > 0, h1 >= 0, h2 > 1",
        ));
    }
    let d = ratio_margin(gamma1, gamma2, h2)?;
    Ok(h1 * (gamma1 - gamma2) / (c * d) + 1.0 / (2.0 * c * m2 * gamma1 * d))
}

/// SG's fixed-step limit with `α = 1/(LM₂)`: `M₁/(2cM₂)`.
pub fn sg_fixed_step_limit(m1: f64, c: f64, m2: f64) -> f64 {
    m1 / (2.0 * c * m2)
}

/// `γ₁ − h(γ₁−γ₂)`, which must be positive.
fn ratio_margin(gamma1: f64, gamma2: f64, h: f64) -> Result<f64> {
    let d = gamma1 - h * (gamma1 - gamma2);
    if d > 0.0 {
        Ok(d)
    } else {
        Err(HypothesisError::GammaRatio {
            ratio: gamma1 / gamma2,
            limit: h / (h - 1.0),
        }
        .into())
    }
}

fn check_cap(alpha: f64, cap: f64, which: &'static str) -> Result<()> {
    if alpha <= cap * (1.0 + CAP_RTOL) {
        Ok(())
    } else {
        Err(HypothesisError::StepsizeCap { alpha, cap, which }.into())
    }
}

/// Largest fixed stepsize admitted by the fixed-step P-L bound:
/// `min{1/(2cθ₁), 1/(γ₁LM₂)}`.
pub fn theorem1_stepsize_cap(
    params: &TrishParams,
    h2: f64,
    c: f64,
    lipschitz: f64,
    m2: f64,
) -> Result<f64> {
    let (g1, g2) = (params.gamma1(), params.gamma2());
    let theta1 = 0.5 * g2.min(ratio_margin(g1, g2, h2)?);
    Ok((1.0 / (2.0 * c * theta1)).min(1.0 / (g1 * lipschitz * m2)))
}

/// `ρ = max{1 − αcκ₁, λ, ζ}`
pub fn geometric_rate(alpha: f64, c: f64, kappa1: f64, lambda: f64, zeta: f64) -> f64 {
    (1.0 - alpha * c * kappa1).max(lambda).max(zeta)
}

/// `ψ₁(x) = Σ_{n≥0} 1/(x+n)²` for `x > 0`.
pub fn trigamma(mut x: f64) -> f64 {
    assert!(x > 0.0, "trigamma needs a positive argument");
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + inv
        + 0.5 * inv2
        + inv * inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 / 30.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    /// Fixed stepsize, P-L, fixed noise: linear convergence to a neighbourhood.
    FixedStepPl,
    /// Harmonic stepsizes, P-L, stepsize-coupled noise: `O(1/k)`.
    DiminishingPl,
    /// Fixed stepsize, P-L, geometrically decaying noise: linear convergence.
    GeometricPl,
    /// Fixed stepsize, nonconvex, fixed noise: averaged gradient norms.
    FixedStepNonconvex,
    /// Harmonic stepsizes, nonconvex, stepsize-coupled noise: weighted sums.
    DiminishingNonconvex,
}

impl TheoremId {
    pub const ALL: [TheoremId; 5] = [
        TheoremId::FixedStepPl,
        TheoremId::DiminishingPl,
        TheoremId::GeometricPl,
        TheoremId::FixedStepNonconvex,
        TheoremId::DiminishingNonconvex,
    ];

    pub fn number(self) -> u8 {
        match self {
            TheoremId::FixedStepPl => 1,
            TheoremId::DiminishingPl => 2,
            TheoremId::GeometricPl => 3,
            TheoremId::FixedStepNonconvex => 4,
            TheoremId::DiminishingNonconvex => 5,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        Self::ALL
            .get((n as usize).wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::usage(format!("theorem id must be 1..=5, got {n}")))
    }

    /// Whether the bound is on `E f(x_k) − f*` (as opposed to gradient norms).
    pub fn bounds_gap(self) -> bool {
        matches!(
            self,
            TheoremId::FixedStepPl | TheoremId::DiminishingPl | TheoremId::GeometricPl
        )
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "theorem {}", self.number())
    }
}

/// The stepsize rules the theorems cover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepsizeRule {
    Fixed(f64),
    Harmonic { a: f64, b: f64 },
}

impl StepsizeRule {
    pub fn from_schedule(schedule: &StepsizeSchedule) -> Result<Self> {
        match schedule {
            StepsizeSchedule::Fixed(a) => Ok(StepsizeRule::Fixed(*a)),
            StepsizeSchedule::Harmonic { a, b } => Ok(StepsizeRule::Harmonic { a: *a, b: *b }),
            StepsizeSchedule::Custom(_) => Err(HypothesisError::WrongRegime {
                expected: "a fixed or harmonic stepsize",
                found: "a custom sequence",
            }
            .into()),
        }
    }

    pub fn to_schedule(self) -> Result<StepsizeSchedule> {
        match self {
            StepsizeRule::Fixed(a) => StepsizeSchedule::fixed(a),
            StepsizeRule::Harmonic { a, b } => StepsizeSchedule::harmonic(a, b),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            StepsizeRule::Fixed(_) => "a fixed stepsize",
            StepsizeRule::Harmonic { .. } => "harmonic stepsizes",
        }
    }
}

/// Everything a theorem consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremInputs {
    pub params: TrishParams,
    pub lipschitz: f64,
    pub pl_constant: Option<f64>,
    pub moments: OracleMoments,
    pub assumption: AssumptionConstants,
    pub stepsize: StepsizeRule,
    /// `f(x₁) − f*`
    pub initial_gap: f64,
}

/// Derived constants, one variant per theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TheoremConstants {
    FixedStepPl {
        theta1: f64,
        theta2: f64,
        alpha: f64,
        c: f64,
        lipschitz: f64,
        initial_gap: f64,
    },
    DiminishingPl {
        beta1: f64,
        beta2: f64,
        nu: f64,
        a: f64,
        b: f64,
        c: f64,
        lipschitz: f64,
        initial_gap: f64,
    },
    GeometricPl {
        kappa1: f64,
        kappa2: f64,
        omega: f64,
        rho: f64,
        alpha: f64,
        c: f64,
        lipschitz: f64,
        initial_gap: f64,
    },
    FixedStepNonconvex {
        theta1: f64,
        theta2: f64,
        alpha: f64,
        lipschitz: f64,
        initial_gap: f64,
    },
    DiminishingNonconvex {
        beta1: f64,
        beta2: f64,
        a: f64,
        b: f64,
        lipschitz: f64,
        initial_gap: f64,
    },
}

fn wrong_regime(expected: &'static str, found: &'static str) -> Error {
    HypothesisError::WrongRegime { expected, found }.into()
}

fn fixed_alpha(rule: StepsizeRule) -> Result<f64> {
    match rule {
        StepsizeRule::Fixed(a) => Ok(a),
        other => Err(wrong_regime("a fixed stepsize", other.kind())),
    }
}

fn harmonic(rule: StepsizeRule) -> Result<(f64, f64)> {
    match rule {
        StepsizeRule::Harmonic { a, b } => Ok((a, b)),
        other => Err(wrong_regime("harmonic stepsizes", other.kind())),
    }
}

impl TheoremConstants {
    /// Checks the theorem's hypotheses and derives its constants. Each
    /// failed hypothesis is reported as a distinct [`HypothesisError`].
    pub fn derive(id: TheoremId, inputs: &TheoremInputs) -> Result<Self> {
        let TheoremInputs {
            params,
            lipschitz: l,
            moments,
            assumption,
            stepsize,
            initial_gap,
            ..
        } = *inputs;
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::usage(format!("L must be positive, got {l}")));
        }
        if !(initial_gap >= 0.0 && initial_gap.is_finite()) {
            return Err(Error::usage(format!(
                "initial gap must be finite and nonnegative, got {initial_gap}"
            )));
        }
        assumption.validate()?;
        let (g1, g2) = (params.gamma1(), params.gamma2());
        let dg = g1 - g2;
        let (m1, m2) = (moments.m1, moments.m2);
        let pl = || {
            inputs
                .pl_constant
                .ok_or(Error::from(HypothesisError::MissingConstant("c")))
        };
        let general_cap = 1.0 / (g1 * l * m2);

        Ok(match id {
            TheoremId::FixedStepPl | TheoremId::FixedStepNonconvex => {
                let AssumptionConstants::Fixed { h1, h2 } = assumption else {
                    return Err(wrong_regime(
                        "fixed-noise constants (h1, h2)",
                        assumption.regime(),
                    ));
                };
                let theta1 = 0.5 * g2.min(ratio_margin(g1, g2, h2)?);
                let alpha = fixed_alpha(stepsize)?;
                let theta2 = |alpha: f64| {
                    (0.5 * g1 * g1 * l * m1 * alpha * alpha)
                        .max(h1 * dg * alpha + 0.5 * l * alpha * alpha)
                };
                if id == TheoremId::FixedStepPl {
                    let c = pl()?;
                    check_cap(alpha, 1.0 / (2.0 * c * theta1), "1/(2c theta1)")?;
                    check_cap(alpha, general_cap, "1/(gamma1 L M2)")?;
                    TheoremConstants::FixedStepPl {
                        theta1,
                        theta2: theta2(alpha),
                        alpha,
                        c,
                        lipschitz: l,
                        initial_gap,
                    }
                } else {
                    check_cap(alpha, general_cap, "1/(gamma1 L M2)")?;
                    TheoremConstants::FixedStepNonconvex {
                        theta1,
                        theta2: theta2(alpha),
                        alpha,
                        lipschitz: l,
                        initial_gap,
                    }
                }
            }
            TheoremId::DiminishingPl | TheoremId::DiminishingNonconvex => {
                let AssumptionConstants::StepsizeCoupled { h3, h4 } = assumption else {
                    return Err(wrong_regime(
                        "stepsize-coupled constants (h3, h4)",
                        assumption.regime(),
                    ));
                };
                let beta1 = 0.5 * g2.min(ratio_margin(g1, g2, h4)?);
                let beta2 = (h3 * dg + 0.5 * l).max(0.5 * g1 * g1 * l * m1);
                let (a, b) = harmonic(stepsize)?;
                check_cap(a / (b + 1.0), general_cap, "alpha_1 <= 1/(gamma1 L M2)")?;
                if id == TheoremId::DiminishingPl {
                    let c = pl()?;
                    let lower = 1.0 / (2.0 * c * beta1);
                    let upper = (b + 1.0) / (2.0 * c * beta1);
                    if !(a > lower && a < upper) {
                        return Err(HypothesisError::HarmonicInterval { a, lower, upper }.into());
                    }
                    let nu =
                        (a * a * beta2 / (2.0 * a * c * beta1 - 1.0)).max((b + 1.0) * initial_gap);
                    TheoremConstants::DiminishingPl {
                        beta1,
                        beta2,
                        nu,
                        a,
                        b,
                        c,
                        lipschitz: l,
                        initial_gap,
                    }
                } else {
                    TheoremConstants::DiminishingNonconvex {
                        beta1,
                        beta2,
                        a,
                        b,
                        lipschitz: l,
                        initial_gap,
                    }
                }
            }
            TheoremId::GeometricPl => {
                let AssumptionConstants::Geometric { h5, h6, lambda } = assumption else {
                    return Err(wrong_regime(
                        "geometric constants (h5, h6, lambda)",
                        assumption.regime(),
                    ));
                };
                let (m3, zeta) = moments
                    .geometric
                    .ok_or(HypothesisError::MissingConstant("M3 and zeta"))?;
                let c = pl()?;
                let margin = ratio_margin(g1, g2, h6)?;
                let kappa1 = 0.5 * g2.min(margin);
                let alpha = fixed_alpha(stepsize)?;
                check_cap(
                    alpha,
                    margin / (g1 * g1 * l),
                    "(gamma1 - h6 (gamma1 - gamma2))/(gamma1^2 L)",
                )?;
                check_cap(alpha, 1.0 / (g1 * l), "1/(gamma1 L)")?;
                check_cap(alpha, 1.0 / (c * kappa1), "1/(c kappa1)")?;
                let kappa2 = h5 * dg + 0.5 * g1 * g1 * alpha * l * m3;
                let omega = initial_gap.max(kappa2 / (c * kappa1));
                let rho = geometric_rate(alpha, c, kappa1, lambda, zeta);
                if !(rho > 0.0 && rho < 1.0) {
                    return Err(HypothesisError::OutOfRange {
                        name: "rho",
                        value: rho,
                        range: "(0, 1)",
                    }
                    .into());
                }
                TheoremConstants::GeometricPl {
                    kappa1,
                    kappa2,
                    omega,
                    rho,
                    alpha,
                    c,
                    lipschitz: l,
                    initial_gap,
                }
            }
        })
    }

    pub fn id(&self) -> TheoremId {
        match self {
            TheoremConstants::FixedStepPl { .. } => TheoremId::FixedStepPl,
            TheoremConstants::DiminishingPl { .. } => TheoremId::DiminishingPl,
            TheoremConstants::GeometricPl { .. } => TheoremId::GeometricPl,
            TheoremConstants::FixedStepNonconvex { .. } => TheoremId::FixedStepNonconvex,
            TheoremConstants::DiminishingNonconvex { .. } => TheoremId::DiminishingNonconvex,
        }
    }

    pub fn initial_gap(&self) -> f64 {
        match *self {
            TheoremConstants::FixedStepPl { initial_gap, .. }
            | TheoremConstants::DiminishingPl { initial_gap, .. }
            | TheoremConstants::GeometricPl { initial_gap, .. }
            | TheoremConstants::FixedStepNonconvex { initial_gap, .. }
            | TheoremConstants::DiminishingNonconvex { initial_gap, .. } => initial_gap,
        }
    }

    /// The stepsize sequence the constants were derived for.
    pub fn stepsize(&self) -> StepsizeRule {
        match *self {
            TheoremConstants::FixedStepPl { alpha, .. }
            | TheoremConstants::GeometricPl { alpha, .. }
            | TheoremConstants::FixedStepNonconvex { alpha, .. } => StepsizeRule::Fixed(alpha),
            TheoremConstants::DiminishingPl { a, b, .. }
            | TheoremConstants::DiminishingNonconvex { a, b, .. } => {
                StepsizeRule::Harmonic { a, b }
            }
        }
    }

    /// Limit of the bound as `k → ∞` (`0` for the vanishing bounds).
    pub fn asymptote(&self) -> f64 {
        match *self {
            TheoremConstants::FixedStepPl {
                theta1,
                theta2,
                alpha,
                c,
                ..
            } => theta2 / (2.0 * c * alpha * theta1),
            TheoremConstants::FixedStepNonconvex {
                theta1,
                theta2,
                alpha,
                ..
            } => theta2 / (alpha * theta1),
            TheoremConstants::DiminishingNonconvex { .. } => {
                self.theorem5_limit().expect("variant checked")
            }
            _ => 0.0,
        }
    }

    /// `Kθ₂/(αθ₁) + gap₁/(αθ₁)`, bounding `Σ_{k≤K} E‖∇f(x_k)‖²`.
    pub fn theorem4_sum_bound(&self, big_k: u64) -> Result<f64> {
        match *self {
            TheoremConstants::FixedStepNonconvex {
                theta1,
                theta2,
                alpha,
                initial_gap,
                ..
            } => {
                check_k(big_k)?;
                Ok(big_k as f64 * theta2 / (alpha * theta1) + initial_gap / (alpha * theta1))
            }
            _ => Err(wrong_regime("theorem 4 constants", "other constants")),
        }
    }

    /// `gap₁/β₁ + (β₂/β₁)·a²ψ₁(b+1)`: the bound on the infinite weighted sum.
    pub fn theorem5_limit(&self) -> Result<f64> {
        match *self {
            TheoremConstants::DiminishingNonconvex {
                beta1,
                beta2,
                a,
                b,
                initial_gap,
                ..
            } => Ok(initial_gap / beta1 + beta2 / beta1 * a * a * trigamma(b + 1.0)),
            _ => Err(wrong_regime("theorem 5 constants", "other constants")),
        }
    }
}

fn check_k(k: u64) -> Result<()> {
    if k == 0 {
        Err(Error::usage("iterations are numbered from 1"))
    } else {
        Ok(())
    }
}

/// Right-hand side of theorem `id` at `k` (iterate index, 1-based) or `K`
/// (number of iterations, for the nonconvex bounds):
///
/// - 1: `θ₂/(2cαθ₁) + (1−2cαθ₁)^{k−1}(gap₁ − θ₂/(2cαθ₁))`;
/// - 2: `ν/(b+k)`;
/// - 3: `ω·ρ^{k−1}`;
/// - 4: `θ₂/(αθ₁) + gap₁/(Kαθ₁)`, the average of `E‖∇f(x_k)‖²` over `k ≤ K`;
/// - 5: `gap₁/β₁ + (β₂/β₁)Σ_{k≤K}α_k²`, bounding `Σ_{k≤K} α_k E‖∇f(x_k)‖²`.
pub fn theorem_bound(id: TheoremId, constants: &TheoremConstants, k: u64) -> Result<f64> {
    check_k(k)?;
    if constants.id() != id {
        return Err(wrong_regime(
            "constants derived for the requested theorem",
            "constants of another theorem",
        ));
    }
    let kf = k as f64;
    Ok(match *constants {
        TheoremConstants::FixedStepPl {
            theta1,
            alpha,
            c,
            initial_gap,
            ..
        } => {
            let limit = constants.asymptote();
            let factor = 1.0 - 2.0 * c * alpha * theta1;
            limit + factor.powi((k - 1) as i32) * (initial_gap - limit)
        }
        TheoremConstants::DiminishingPl { nu, b, .. } => nu / (b + kf),
        TheoremConstants::GeometricPl { omega, rho, .. } => omega * rho.powf(kf - 1.0),
        TheoremConstants::FixedStepNonconvex {
            theta1,
            theta2,
            alpha,
            initial_gap,
            ..
        } => theta2 / (alpha * theta1) + initial_gap / (kf * alpha * theta1),
        TheoremConstants::DiminishingNonconvex {
            beta1,
            beta2,
            a,
            b,
            initial_gap,
            ..
        } => {
            let sum_sq: f64 = (1..=k).map(|j| (a / (b + j as f64)).powi(2)).sum();
            initial_gap / beta1 + beta2 / beta1 * sum_sq
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{gaussian_h_constants, NoiseBound};

    fn p(g1: f64, g2: f64) -> TrishParams {
        TrishParams::new(g1, g2).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn lemma1_examples() {
        let params = p(2.0, 0.5);
        let r1 = lemma1_rhs(StepCase::Case1, 1.0, 0.1, &params, 1.0, 1.0, 1.0, 0.0);
        assert!(close(r1, -0.16, 1e-14));
        let r3 = lemma1_rhs(StepCase::Case3, 1.0, 0.1, &params, 1.0, 1.0, 1.0, 0.0);
        assert!(close(r3, -0.0475, 1e-14));
        let r0 = lemma1_rhs(StepCase::Case1, 0.0, 0.1, &params, 1.0, 1.0, 1.0, 0.0);
        assert!(close(r0, 0.02, 1e-14) && r0 > 0.0);
        let r2 = lemma1_rhs(StepCase::Case2, 1.0, 0.1, &params, 1.0, 1.0, 1.0, 2.0);
        assert!(close(r2, -0.2 + 0.3 + 0.005, 1e-14));
    }

    #[test]
    fn sg_comparison_examples() {
        let v = sg_comparison_bound(1.25, 1.0, 1.0, 1.25, 1.0, 1.0).unwrap();
        assert!(close(v, 0.25 / 0.9375 + 1.0 / (2.0 * 1.25 * 0.9375), 1e-14));
        assert!((v - 0.693_333).abs() < 1e-6);
        let eq = sg_comparison_bound(0.8, 0.8, 3.0, 1.5, 2.0, 1.0).unwrap();
        assert!(close(eq, 1.0 / (2.0 * 2.0 * 0.64), 1e-14));
        assert!(matches!(
            sg_comparison_bound(2.0, 1.0, 1.0, 2.0, 1.0, 1.0),
            Err(Error::Hypothesis(HypothesisError::GammaRatio { .. }))
        ));
    }

    #[test]
    fn trigamma_values() {
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(close(trigamma(1.0), pi2_6, 1e-13));
        assert!(close(trigamma(2.0), pi2_6 - 1.0, 1e-13));
        assert!(close(
            trigamma(0.5),
            std::f64::consts::PI.powi(2) / 2.0,
            1e-13
        ));
        assert!(close(
            trigamma(16.0),
            pi2_6 - (1..16).map(|n| 1.0 / (n * n) as f64).sum::<f64>(),
            1e-13
        ));
    }

    #[test]
    fn theorem_ids() {
        for id in TheoremId::ALL {
            assert_eq!(TheoremId::from_number(id.number()).unwrap(), id);
        }
        assert!(TheoremId::from_number(0).is_err());
        assert!(TheoremId::from_number(6).is_err());
    }

    fn fixed_inputs(alpha: f64) -> TheoremInputs {
        TheoremInputs {
            params: p(2.0, 1.9),
            lipschitz: 1.0,
            pl_constant: Some(1.0),
            moments: OracleMoments::new(0.01, 1.0, None).unwrap(),
            assumption: gaussian_h_constants(NoiseBound::Fixed { sigma: 0.1 }).unwrap(),
            stepsize: StepsizeRule::Fixed(alpha),
            initial_gap: 0.5,
        }
    }

    #[test]
    fn theorem1_derivation() {
        let inputs = fixed_inputs(0.5);
        let AssumptionConstants::Fixed { h1, h2 } = inputs.assumption else {
            panic!()
        };
        let cap = theorem1_stepsize_cap(&inputs.params, h2, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(cap, 0.5);
        let tc = TheoremConstants::derive(TheoremId::FixedStepPl, &inputs).unwrap();
        let TheoremConstants::FixedStepPl { theta1, theta2, .. } = tc else {
            panic!()
        };
        assert!(close(theta1, 0.5 * (2.0 - h2 * 0.1), 1e-15));
        assert!(close(
            theta2,
            (0.5 * 4.0 * 0.01 * 0.25_f64).max(h1 * 0.1 * 0.5 + 0.125),
            1e-15
        ));
        assert!(close(
            theorem_bound(TheoremId::FixedStepPl, &tc, 1).unwrap(),
            0.5,
            1e-15
        ));
        let err =
            TheoremConstants::derive(TheoremId::FixedStepPl, &fixed_inputs(0.51)).unwrap_err();
        assert!(matches!(
            err,
            Error::Hypothesis(HypothesisError::StepsizeCap { .. })
        ));
    }

    #[test]
    fn theorem1_contraction_zero() {
        let tc = TheoremConstants::FixedStepPl {
            theta1: 0.25,
            theta2: 0.3,
            alpha: 2.0,
            c: 1.0,
            lipschitz: 1.0,
            initial_gap: 5.0,
        };
        for k in 2..6 {
            assert_eq!(theorem_bound(TheoremId::FixedStepPl, &tc, k).unwrap(), 0.3);
        }
        assert_eq!(theorem_bound(TheoremId::FixedStepPl, &tc, 1).unwrap(), 5.0);
    }

    #[test]
    fn theorem1_monotone_toward_limit() {
        let tc = TheoremConstants::derive(TheoremId::FixedStepPl, &fixed_inputs(0.3)).unwrap();
        let limit = tc.asymptote();
        let seq: Vec<f64> = (1..50)
            .map(|k| theorem_bound(TheoremId::FixedStepPl, &tc, k).unwrap())
            .collect();
        assert!(seq.windows(2).all(|w| w[1] <= w[0] && w[1] >= limit));
    }

    #[test]
    fn missing_and_wrong_constants() {
        let mut inputs = fixed_inputs(0.5);
        inputs.pl_constant = None;
        assert!(matches!(
            TheoremConstants::derive(TheoremId::FixedStepPl, &inputs),
            Err(Error::Hypothesis(HypothesisError::MissingConstant("c")))
        ));
        // the nonconvex bound does not need c
        assert!(TheoremConstants::derive(TheoremId::FixedStepNonconvex, &inputs).is_ok());
        assert!(matches!(
            TheoremConstants::derive(TheoremId::DiminishingPl, &fixed_inputs(0.5)),
            Err(Error::Hypothesis(HypothesisError::WrongRegime { .. }))
        ));
        let tc = TheoremConstants::derive(TheoremId::FixedStepPl, &fixed_inputs(0.5)).unwrap();
        assert!(theorem_bound(TheoremId::GeometricPl, &tc, 1).is_err());
        assert!(theorem_bound(TheoremId::FixedStepPl, &tc, 0).is_err());
    }

    fn harmonic_inputs(a: f64, b: f64) -> TheoremInputs {
        TheoremInputs {
            params: p(2.0, 1.9),
            lipschitz: 1.0,
            pl_constant: Some(1.0),
            moments: OracleMoments::new(0.25, 1.0, None).unwrap(),
            assumption: gaussian_h_constants(NoiseBound::StepsizeCoupled {
                multiplier: 1.0,
                alpha_bound: a / (b + 1.0),
            })
            .unwrap(),
            stepsize: StepsizeRule::Harmonic { a, b },
            initial_gap: 0.5,
        }
    }

    #[test]
    fn theorem2_derivation() {
        let tc =
            TheoremConstants::derive(TheoremId::DiminishingPl, &harmonic_inputs(2.0, 3.0)).unwrap();
        let TheoremConstants::DiminishingPl {
            nu,
            b,
            initial_gap,
            beta1,
            ..
        } = tc
        else {
            panic!()
        };
        assert!(nu > 0.0);
        assert!(theorem_bound(TheoremId::DiminishingPl, &tc, 1).unwrap() >= initial_gap);
        assert!(close(
            theorem_bound(TheoremId::DiminishingPl, &tc, 7).unwrap(),
            nu / (b + 7.0),
            1e-15
        ));
        // a at or below 1/(2c beta1) is rejected
        let lower = 1.0 / (2.0 * beta1);
        let err = TheoremConstants::derive(TheoremId::DiminishingPl, &harmonic_inputs(0.5, 0.3))
            .unwrap_err();
        assert!(
            matches!(
                err,
                Error::Hypothesis(HypothesisError::HarmonicInterval { .. })
            ),
            "{err} {lower}"
        );
        let err = TheoremConstants::derive(TheoremId::DiminishingPl, &harmonic_inputs(2.0, 1.0))
            .unwrap_err();
        assert!(matches!(
            err,
            Error::Hypothesis(HypothesisError::StepsizeCap { .. })
        ));
    }

    #[test]
    fn theorem3_example() {
        let rho = geometric_rate(0.5, 1.0, 0.5, 0.25, 0.25);
        assert_eq!(rho, 0.75);
        let tc = TheoremConstants::GeometricPl {
            kappa1: 0.5,
            kappa2: 1.0,
            omega: 2.0,
            rho,
            alpha: 0.5,
            c: 1.0,
            lipschitz: 1.0,
            initial_gap: 2.0,
        };
        assert!(close(
            theorem_bound(TheoremId::GeometricPl, &tc, 3).unwrap(),
            1.125,
            1e-15
        ));
        let seq: Vec<f64> = (1..20)
            .map(|k| theorem_bound(TheoremId::GeometricPl, &tc, k).unwrap())
            .collect();
        assert!(seq.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn theorem3_derivation() {
        let inputs = TheoremInputs {
            params: p(2.0, 1.9),
            lipschitz: 1.0,
            pl_constant: Some(1.0),
            moments: OracleMoments::new(1.0, 1.0, Some((1.0, 0.25))).unwrap(),
            assumption: gaussian_h_constants(NoiseBound::Geometric {
                m3: 1.0,
                zeta: 0.25,
            })
            .unwrap(),
            stepsize: StepsizeRule::Fixed(0.47),
            initial_gap: 0.5,
        };
        let tc = TheoremConstants::derive(TheoremId::GeometricPl, &inputs).unwrap();
        let TheoremConstants::GeometricPl { rho, omega, .. } = tc else {
            panic!()
        };
        assert!(rho > 0.5 && rho < 0.6, "{rho}");
        assert!(omega >= 0.5);
        let mut no_geo = inputs;
        no_geo.moments = OracleMoments::new(1.0, 1.0, None).unwrap();
        assert!(matches!(
            TheoremConstants::derive(TheoremId::GeometricPl, &no_geo),
            Err(Error::Hypothesis(HypothesisError::MissingConstant(_)))
        ));
        let mut big = inputs;
        big.stepsize = StepsizeRule::Fixed(0.6);
        assert!(matches!(
            TheoremConstants::derive(TheoremId::GeometricPl, &big),
            Err(Error::Hypothesis(HypothesisError::StepsizeCap { .. }))
        ));
    }

    #[test]
    fn theorem4_forms() {
        let tc =
            TheoremConstants::derive(TheoremId::FixedStepNonconvex, &fixed_inputs(0.5)).unwrap();
        for k in [1, 10, 100] {
            let avg = theorem_bound(TheoremId::FixedStepNonconvex, &tc, k).unwrap();
            let sum = tc.theorem4_sum_bound(k).unwrap();
            assert!(close(avg * k as f64, sum, 1e-14));
        }
    }

    #[test]
    fn theorem5_partial_sums_approach_limit() {
        let inputs = harmonic_inputs(1.0, 15.0);
        let tc = TheoremConstants::derive(TheoremId::DiminishingNonconvex, &inputs).unwrap();
        let limit = tc.theorem5_limit().unwrap();
        let b100 = theorem_bound(TheoremId::DiminishingNonconvex, &tc, 100).unwrap();
        let b100k = theorem_bound(TheoremId::DiminishingNonconvex, &tc, 100_000).unwrap();
        assert!(b100 < b100k && b100k < limit);
        assert!(limit - b100k < 2e-5 * limit);
    }
}
