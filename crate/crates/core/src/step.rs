//! The TRish and SG iterate updates.
//!
//! TRish scales the stochastic gradient `g` according to where `‖g‖₂` falls
//! relative to the two thresholds `1/γ₁ < 1/γ₂`:
//!
//! ```text
//! ‖g‖ < 1/γ₁            x ← x − γ₁ α g          (case 1)
//! 1/γ₁ ≤ ‖g‖ ≤ 1/γ₂     x ← x − α g / ‖g‖       (case 2, normalized)
//! ‖g‖ > 1/γ₂            x ← x − γ₂ α g          (case 3)
//! ```
//!
//! Both endpoints of the middle interval belong to case 2. The step length is
//! a continuous, piecewise-linear function of `‖g‖` (see [`step_norm`]).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, check_finite, check_same_dim, norm};

/// The threshold pair `γ₁ > γ₂ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrishParams {
    gamma1: f64,
    gamma2: f64,
}

impl TrishParams {
    pub fn new(gamma1: f64, gamma2: f64) -> Result<Self> {
        if !(gamma1.is_finite() && gamma2.is_finite()) {
            return Err(Error::usage(format!(
                "gamma parameters must be finite, got ({gamma1}, {gamma2})"
            )));
        }
        if !(gamma2 > 0.0 && gamma1 > gamma2) {
            return Err(Error::usage(format!(
                "TRish requires gamma1 > gamma2 > 0, got ({gamma1}, {gamma2})"
            )));
        }
        let params = Self { gamma1, gamma2 };
        if !(params.lower_threshold().is_finite() && params.upper_threshold().is_finite()) {
            return Err(Error::usage("gamma thresholds 1/gamma must be finite"));
        }
        Ok(params)
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    /// `1/γ₁`, where case 2 begins.
    pub fn lower_threshold(&self) -> f64 {
        1.0 / self.gamma1
    }

    /// `1/γ₂`, where case 2 ends.
    pub fn upper_threshold(&self) -> f64 {
        1.0 / self.gamma2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StepCase {
    Case1,
    Case2,
    Case3,
}

impl StepCase {
    pub fn index(self) -> usize {
        match self {
            StepCase::Case1 => 0,
            StepCase::Case2 => 1,
            StepCase::Case3 => 2,
        }
    }
}

impl fmt::Display for StepCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case {}", self.index() + 1)
    }
}

/// Which update rule a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Method {
    Trish(TrishParams),
    Sg,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Trish(_) => "trish",
            Method::Sg => "sg",
        }
    }
}

pub fn classify_case(g_norm: f64, params: &TrishParams) -> Result<StepCase> {
    if g_norm.is_nan() || g_norm < 0.0 {
        return Err(Error::domain(format!(
            "gradient norm must be nonnegative, got {g_norm}"
        )));
    }
    Ok(if g_norm < params.lower_threshold() {
        StepCase::Case1
    } else if g_norm <= params.upper_threshold() {
        StepCase::Case2
    } else {
        StepCase::Case3
    })
}

fn check_stepsize(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::usage(format!(
            "stepsize must be positive and finite, got {alpha}"
        )));
    }
    Ok(())
}

/// One TRish update. Returns the new iterate and the case that was applied.
pub fn trish_step(
    x: &[f64],
    g: &[f64],
    alpha: f64,
    params: &TrishParams,
) -> Result<(Vec<f64>, StepCase)> {
    check_same_dim(x, g)?;
    check_stepsize(alpha)?;
    check_finite(g, "stochastic gradient")?;
    let g_norm = norm(g);
    let case = classify_case(g_norm, params)?;
    let scale = match case {
        StepCase::Case1 => params.gamma1 * alpha,
        // g_norm >= 1/γ₁ > 0 here
        StepCase::Case2 => alpha / g_norm,
        StepCase::Case3 => params.gamma2 * alpha,
    };
    Ok((axpy(x, -scale, g), case))
}

pub fn sg_step(x: &[f64], g: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_same_dim(x, g)?;
    check_stepsize(alpha)?;
    Ok(axpy(x, -alpha, g))
}

/// `‖x_{k+1} − x_k‖₂` as a function of `‖g_k‖₂`.
pub fn step_norm(g_norm: f64, alpha: f64, params: &TrishParams) -> Result<f64> {
    check_stepsize(alpha)?;
    Ok(match classify_case(g_norm, params)? {
        StepCase::Case1 => params.gamma1 * alpha * g_norm,
        StepCase::Case2 => alpha,
        StepCase::Case3 => params.gamma2 * alpha * g_norm,
    })
}

/// Stepsize sequence indexed from `k = 1`.
#[derive(Clone)]
pub enum StepsizeSchedule {
    Fixed(f64),
    /// `α_k = a / (b + k)`
    Harmonic {
        a: f64,
        b: f64,
    },
    Custom(Arc<dyn Fn(u64) -> f64 + Send + Sync>),
}

impl fmt::Debug for StepsizeSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepsizeSchedule::Fixed(alpha) => f.debug_tuple("Fixed").field(alpha).finish(),
            StepsizeSchedule::Harmonic { a, b } => f
                .debug_struct("Harmonic")
                .field("a", a)
                .field("b", b)
                .finish(),
            StepsizeSchedule::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl StepsizeSchedule {
    pub fn fixed(alpha: f64) -> Result<Self> {
        check_stepsize(alpha)?;
        Ok(StepsizeSchedule::Fixed(alpha))
    }

    pub fn harmonic(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
            return Err(Error::usage(format!(
                "harmonic schedule needs a > 0 and b > 0, got a = {a}, b = {b}"
            )));
        }
        Ok(StepsizeSchedule::Harmonic { a, b })
    }

    pub fn custom(f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        StepsizeSchedule::Custom(Arc::new(f))
    }

    /// Stepsize at 1-based iteration `k`.
    pub fn at(&self, k: u64) -> Result<f64> {
        if k == 0 {
            return Err(Error::usage("iterations are numbered from 1"));
        }
        let alpha = match self {
            StepsizeSchedule::Fixed(alpha) => *alpha,
            StepsizeSchedule::Harmonic { a, b } => a / (b + k as f64),
            StepsizeSchedule::Custom(f) => f(k),
        };
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::data(format!(
                "stepsize schedule emitted non-positive value {alpha} at k = {k}"
            )));
        }
        Ok(alpha)
    }

    /// Supremum of the sequence, when it is known without enumeration.
    pub fn max_value(&self) -> Option<f64> {
        match self {
            StepsizeSchedule::Fixed(alpha) => Some(*alpha),
            StepsizeSchedule::Harmonic { a, b } => Some(a / (b + 1.0)),
            StepsizeSchedule::Custom(_) => None,
        }
    }
}

/// Iterate plus bookkeeping for one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    x: Vec<f64>,
    k: u64,
    case_counts: [u64; 3],
}

impl IterateState {
    pub fn new(x1: Vec<f64>) -> Self {
        Self {
            x: x1,
            k: 1,
            case_counts: [0; 3],
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Index of the current iterate; starts at 1.
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn case_counts(&self) -> [u64; 3] {
        self.case_counts
    }

    /// Applies one update with stochastic gradient `g`. SG steps are not
    /// counted in `case_counts`.
    pub fn advance(
        &mut self,
        method: &Method,
        g: &[f64],
        schedule: &StepsizeSchedule,
    ) -> Result<Option<StepCase>> {
        let alpha = schedule.at(self.k)?;
        let case = match method {
            Method::Trish(params) => {
                let (next, case) = trish_step(&self.x, g, alpha, params)?;
                self.x = next;
                self.case_counts[case.index()] += 1;
                Some(case)
            }
            Method::Sg => {
                self.x = sg_step(&self.x, g, alpha)?;
                None
            }
        };
        self.k += 1;
        Ok(case)
    }
}
