use super::{FiniteSum, Objective, ProblemMetadata};
use crate::error::{Error, Result};

/// `f(x) = ½ Σ dᵢ xᵢ² − Σ bᵢ xᵢ` with `d > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProblem {
    diag: Vec<f64>,
    shift: Vec<f64>,
    meta: ProblemMetadata,
}

fn check_diag(diag: &[f64]) -> Result<()> {
    if diag.is_empty() {
        return Err(Error::usage("quadratic needs at least one coordinate"));
    }
    if let Some(d) = diag.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(Error::usage(format!(
            "quadratic eigenvalues must be positive, got {d}"
        )));
    }
    Ok(())
}

fn extremes(diag: &[f64]) -> (f64, f64) {
    diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| {
        (lo.min(d), hi.max(d))
    })
}

impl QuadraticProblem {
    pub fn new(diag: Vec<f64>, shift: Vec<f64>) -> Result<Self> {
        check_diag(&diag)?;
        if shift.len() != diag.len() {
            return Err(Error::usage(
                "quadratic shift and diagonal differ in length",
            ));
        }
        let f_star = -0.5 * diag.iter().zip(&shift).map(|(d, b)| b * b / d).sum::<f64>();
        let (c, l) = extremes(&diag);
        let meta = ProblemMetadata::new(diag.len(), Some(l), Some(c), Some(f_star))?;
        Ok(Self { diag, shift, meta })
    }

    /// `½‖x‖²` in `n` dimensions: `c = L = 1`, `f* = 0`.
    pub fn isotropic(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n], vec![0.0; n])
    }

    pub fn minimizer(&self) -> Vec<f64> {
        self.shift
            .iter()
            .zip(&self.diag)
            .map(|(b, d)| b / d)
            .collect()
    }
}

impl Objective for QuadraticProblem {
    fn metadata(&self) -> &ProblemMetadata {
        &self.meta
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.diag)
            .zip(&self.shift)
            .map(|((x, d), b)| 0.5 * d * x * x - b * x)
            .sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.diag)
            .zip(&self.shift)
            .map(|((x, d), b)| d * x - b)
            .collect()
    }
}

/// Finite sum of shifted quadratics `fᵢ(x) = ½ Σⱼ dⱼ (xⱼ − cᵢⱼ)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSum {
    diag: Vec<f64>,
    centers: Vec<Vec<f64>>,
    meta: ProblemMetadata,
}

impl QuadraticSum {
    pub fn new(diag: Vec<f64>, centers: Vec<Vec<f64>>) -> Result<Self> {
        check_diag(&diag)?;
        if centers.is_empty() {
            return Err(Error::usage("finite sum needs at least one component"));
        }
        if centers.iter().any(|c| c.len() != diag.len()) {
            return Err(Error::usage("component center has the wrong dimension"));
        }
        let n = centers.len() as f64;
        let mean: Vec<f64> = (0..diag.len())
            .map(|j| centers.iter().map(|c| c[j]).sum::<f64>() / n)
            .collect();
        let (c, l) = extremes(&diag);
        let mut sum = Self {
            diag,
            centers,
            meta: ProblemMetadata::new(mean.len(), Some(l), Some(c), None)?,
        };
        let f_star = sum.value(&mean);
        sum.meta.f_star = Some(f_star);
        Ok(sum)
    }
}

impl Objective for QuadraticSum {
    fn metadata(&self) -> &ProblemMetadata {
        &self.meta
    }

    fn value(&self, x: &[f64]) -> f64 {
        let total: f64 = self
            .centers
            .iter()
            .map(|c| {
                x.iter()
                    .zip(c)
                    .zip(&self.diag)
                    .map(|((x, c), d)| 0.5 * d * (x - c) * (x - c))
                    .sum::<f64>()
            })
            .sum();
        total / self.centers.len() as f64
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        let scale = 1.0 / self.centers.len() as f64;
        for i in 0..self.centers.len() {
            self.add_component_gradient(i, x, scale, &mut out);
        }
        out
    }
}

impl FiniteSum for QuadraticSum {
    fn n_components(&self) -> usize {
        self.centers.len()
    }

    fn add_component_gradient(&self, i: usize, x: &[f64], scale: f64, out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o += scale * self.diag[j] * (x[j] - self.centers[i][j]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_and_minimizer() {
        let q = QuadraticProblem::new(vec![1.0, 4.0], vec![2.0, -4.0]).unwrap();
        let m = q.metadata();
        assert_eq!(m.lipschitz, Some(4.0));
        assert_eq!(m.pl_constant, Some(1.0));
        let x_star = q.minimizer();
        assert_eq!(x_star, vec![2.0, -1.0]);
        assert_eq!(q.value(&x_star), m.f_star.unwrap());
        assert_eq!(q.gradient(&x_star), vec![0.0, 0.0]);
        assert_eq!(m.f_star, Some(-4.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(QuadraticProblem::new(vec![], vec![]).is_err());
        assert!(QuadraticProblem::new(vec![0.0], vec![0.0]).is_err());
        assert!(QuadraticProblem::new(vec![1.0], vec![0.0, 1.0]).is_err());
        assert!(QuadraticSum::new(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn sum_gradient_matches_components() {
        let s = QuadraticSum::new(vec![1.0, 2.0], vec![vec![0.0, 1.0], vec![2.0, -1.0]]).unwrap();
        assert_eq!(s.gradient(&[1.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(s.gap(&[1.0, 0.0]), Some(0.0));
        let g = s.gradient(&[0.0, 0.0]);
        assert_eq!(g, vec![-1.0, 0.0]);
    }
}
