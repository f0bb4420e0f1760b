//! Objectives with analytic gradients and, where known, their smoothness
//! constant `L`, P-L constant `c` and optimal value `f*`.

mod logistic;
mod nonconvex;
mod quadratic;

pub use logistic::{
    classification_accuracy, logistic_gradient, logistic_loss, DataSlice, LogisticProblem,
    SparseMatrix,
};
pub use nonconvex::NonconvexPlProblem;
pub use quadratic::{QuadraticProblem, QuadraticSum};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::norm_sq;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemMetadata {
    pub dimension: usize,
    /// Quadratic upper-bound (gradient Lipschitz) constant.
    pub lipschitz: Option<f64>,
    /// Polyak-Łojasiewicz constant.
    pub pl_constant: Option<f64>,
    pub f_star: Option<f64>,
}

impl ProblemMetadata {
    pub fn new(
        dimension: usize,
        lipschitz: Option<f64>,
        pl_constant: Option<f64>,
        f_star: Option<f64>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::usage("problem dimension must be positive"));
        }
        for (name, v) in [("L", lipschitz), ("c", pl_constant)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::usage(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if let (Some(c), Some(l)) = (pl_constant, lipschitz) {
            if c > l {
                return Err(Error::usage(format!("P-L constant {c} exceeds L = {l}")));
            }
        }
        Ok(Self {
            dimension,
            lipschitz,
            pl_constant,
            f_star,
        })
    }
}

/// A smooth objective `f : Rⁿ → R`.
pub trait Objective: Send + Sync {
    fn metadata(&self) -> &ProblemMetadata;

    fn dim(&self) -> usize {
        self.metadata().dimension
    }

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// `f(x) − f*`, when `f*` is declared.
    fn gap(&self, x: &[f64]) -> Option<f64> {
        self.metadata().f_star.map(|f_star| self.value(x) - f_star)
    }
}

/// `f = (1/N) Σ fᵢ` with individually evaluable component gradients.
pub trait FiniteSum: Objective {
    fn n_components(&self) -> usize;

    /// Adds `scale · ∇fᵢ(x)` into `out`.
    fn add_component_gradient(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlCheck {
    pub holds: bool,
    /// Largest `2c(f − f*) / ‖∇f‖²` over points where the gradient is nonzero.
    pub worst_ratio: f64,
}

/// Checks `2c(f(x) − f*) ≤ ‖∇f(x)‖²` (with `1e−12` absolute slack) at every point.
pub fn verify_pl_constant<P, I, X>(problem: &P, points: I) -> Result<PlCheck>
where
    P: Objective + ?Sized,
    I: IntoIterator<Item = X>,
    X: AsRef<[f64]>,
{
    let meta = problem.metadata();
    let c = meta
        .pl_constant
        .ok_or_else(|| Error::usage("P-L check needs a declared constant c"))?;
    let f_star = meta
        .f_star
        .ok_or_else(|| Error::usage("P-L check needs a declared f*"))?;
    let mut holds = true;
    let mut worst_ratio: f64 = 0.0;
    for x in points {
        let x = x.as_ref();
        let lhs = 2.0 * c * (problem.value(x) - f_star);
        let rhs = norm_sq(&problem.gradient(x));
        if lhs > rhs + 1e-12 {
            holds = false;
        }
        if rhs > 0.0 {
            worst_ratio = worst_ratio.max(lhs / rhs);
        }
    }
    Ok(PlCheck { holds, worst_ratio })
}
