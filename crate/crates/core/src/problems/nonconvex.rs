use super::{Objective, ProblemMetadata};
use crate::error::Result;

/// `f(x) = Σᵢ xᵢ² + 3 sin²(xᵢ)`: nonconvex, yet P-L with `c = 1/32`,
/// smooth with `L = 8` (`f'' = 2 + 6 cos 2x ∈ [−4, 8]`), and `f* = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonconvexPlProblem {
    meta: ProblemMetadata,
}

impl NonconvexPlProblem {
    pub const PL_CONSTANT: f64 = 1.0 / 32.0;
    pub const LIPSCHITZ: f64 = 8.0;

    pub fn new(dimension: usize) -> Result<Self> {
        Ok(Self {
            meta: ProblemMetadata::new(
                dimension,
                Some(Self::LIPSCHITZ),
                Some(Self::PL_CONSTANT),
                Some(0.0),
            )?,
        })
    }
}

impl Objective for NonconvexPlProblem {
    fn metadata(&self) -> &ProblemMetadata {
        &self.meta
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .map(|&t| {
                let s = t.sin();
                t * t + 3.0 * s * s
            })
            .sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&t| 2.0 * t + 3.0 * (2.0 * t).sin()).collect()
    }
}
