//! Stochastic gradient oracles.
//!
//! Every oracle is an immutable configuration; randomness comes from an
//! explicit stream passed on each call, so parallel runs only need
//! independently seeded streams. The reference stream is [`SeedRng`]
//! (ChaCha8), seeded through [`seeded_rng`].

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::FiniteSum;

pub type SeedRng = ChaCha8Rng;

/// Name of the generator family, recorded in run metadata.
pub const RNG_FAMILY: &str = "ChaCha8Rng (rand_chacha), seed_from_u64";

pub fn seeded_rng(seed: u64) -> SeedRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Second-moment constants: `E‖g‖² ≤ M₁ + M₂‖∇f‖²`, and optionally
/// `E‖g‖² ≤ M₃ ζ^{k−1} + ‖∇f‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleMoments {
    pub m1: f64,
    pub m2: f64,
    pub geometric: Option<(f64, f64)>,
}

impl OracleMoments {
    pub fn new(m1: f64, m2: f64, geometric: Option<(f64, f64)>) -> Result<Self> {
        if !(m1 > 0.0 && m2 > 0.0 && m1.is_finite() && m2.is_finite()) {
            return Err(Error::usage(format!(
                "moment constants must be positive, got M1 = {m1}, M2 = {m2}"
            )));
        }
        if let Some((m3, zeta)) = geometric {
            if !(m3 > 0.0 && m3.is_finite() && zeta > 0.0 && zeta < 1.0) {
                return Err(Error::usage(format!(
                    "geometric moments need M3 > 0 and 0 < zeta < 1, got ({m3}, {zeta})"
                )));
            }
        }
        Ok(Self { m1, m2, geometric })
    }
}

/// How the noise level `σ_k` evolves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SigmaSchedule {
    Constant(f64),
    /// `σ_k = multiplier · α_k`
    StepsizeCoupled(f64),
    /// `σ_k² = M₃ ζ^{k−1}`
    GeometricDecay {
        m3: f64,
        zeta: f64,
    },
}

impl SigmaSchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SigmaSchedule::Constant(s) => s > 0.0 && s.is_finite(),
            SigmaSchedule::StepsizeCoupled(m) => m > 0.0 && m.is_finite(),
            SigmaSchedule::GeometricDecay { m3, zeta } => {
                m3 > 0.0 && m3.is_finite() && zeta > 0.0 && zeta < 1.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::usage(format!("invalid noise schedule {self:?}")))
        }
    }

    pub fn sigma(&self, k: u64, alpha: f64) -> f64 {
        match *self {
            SigmaSchedule::Constant(s) => s,
            SigmaSchedule::StepsizeCoupled(m) => m * alpha,
            SigmaSchedule::GeometricDecay { m3, zeta } => (m3 * zeta.powf((k - 1) as f64)).sqrt(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SigmaSchedule::Constant(_) => "constant noise",
            SigmaSchedule::StepsizeCoupled(_) => "stepsize-coupled noise",
            SigmaSchedule::GeometricDecay { .. } => "geometrically decaying noise",
        }
    }
}

/// Isotropic Gaussian oracle `g = ∇f(x) + σ_k z`, `z ~ N(0, I)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianOracleConfig {
    pub schedule: SigmaSchedule,
    pub rng_seed: u64,
}

impl GaussianOracleConfig {
    pub fn new(schedule: SigmaSchedule, rng_seed: u64) -> Result<Self> {
        schedule.validate()?;
        Ok(Self { schedule, rng_seed })
    }

    pub fn rng(&self) -> SeedRng {
        seeded_rng(self.rng_seed)
    }

    /// Moment constants in dimension `dim`; `alpha_max` bounds the stepsizes
    /// and is needed for the stepsize-coupled schedule.
    pub fn moments(&self, dim: usize, alpha_max: Option<f64>) -> Result<OracleMoments> {
        let n = dim as f64;
        match self.schedule {
            SigmaSchedule::Constant(s) => OracleMoments::new(n * s * s, 1.0, None),
            SigmaSchedule::StepsizeCoupled(m) => {
                let alpha = alpha_max.ok_or_else(|| {
                    Error::usage("stepsize-coupled noise needs a bound on the stepsizes")
                })?;
                OracleMoments::new(n * (m * alpha).powi(2), 1.0, None)
            }
            SigmaSchedule::GeometricDecay { m3, zeta } => {
                OracleMoments::new(n * m3, 1.0, Some((n * m3, zeta)))
            }
        }
    }
}

pub fn gaussian_sample<R: Rng + ?Sized>(
    grad_true: &[f64],
    config: &GaussianOracleConfig,
    k: u64,
    alpha: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::usage("iterations are numbered from 1"));
    }
    crate::linalg::check_finite(grad_true, "true gradient")?;
    let sigma = config.schedule.sigma(k, alpha);
    Ok(grad_true
        .iter()
        .map(|&m| {
            let z: f64 = rng.sample(StandardNormal);
            m + sigma * z
        })
        .collect())
}

/// How mini-batch indices are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BatchSampling {
    /// Uniform i.i.d. indices; unbiased per draw.
    #[default]
    WithReplacement,
    WithoutReplacement,
    /// Every component once, ignoring the batch size: the exact gradient.
    FullPass,
}

/// `(1/b) Σⱼ ∇f_{iⱼ}(x)` over a sampled batch.
pub fn finite_sum_minibatch<P, R>(
    problem: &P,
    x: &[f64],
    batch_size: usize,
    sampling: BatchSampling,
    rng: &mut R,
) -> Result<Vec<f64>>
where
    P: FiniteSum + ?Sized,
    R: Rng + ?Sized,
{
    let n = problem.n_components();
    if batch_size == 0 {
        return Err(Error::usage("batch size must be positive"));
    }
    if batch_size > n {
        return Err(Error::usage(format!(
            "batch size {batch_size} exceeds the {n} available components"
        )));
    }
    let mut out = vec![0.0; x.len()];
    match sampling {
        BatchSampling::WithReplacement => {
            let scale = 1.0 / batch_size as f64;
            for _ in 0..batch_size {
                let i = rng.random_range(0..n);
                problem.add_component_gradient(i, x, scale, &mut out);
            }
        }
        BatchSampling::WithoutReplacement => {
            let scale = 1.0 / batch_size as f64;
            for i in index::sample(rng, n, batch_size) {
                problem.add_component_gradient(i, x, scale, &mut out);
            }
        }
        BatchSampling::FullPass => {
            let scale = 1.0 / n as f64;
            for i in 0..n {
                problem.add_component_gradient(i, x, scale, &mut out);
            }
        }
    }
    Ok(out)
}

/// Scalar oracle taking one of two values; by default `6` with probability
/// `1/3` and `−3/2` otherwise, which is unbiased for a gradient of `1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPointOracle {
    pub value_pos: f64,
    pub value_neg: f64,
    pub prob_pos: f64,
}

impl Default for TwoPointOracle {
    fn default() -> Self {
        Self {
            value_pos: 6.0,
            value_neg: -1.5,
            prob_pos: 1.0 / 3.0,
        }
    }
}

impl TwoPointOracle {
    pub fn new(value_pos: f64, value_neg: f64, prob_pos: f64) -> Result<Self> {
        if !(prob_pos > 0.0 && prob_pos <= 1.0) || !value_pos.is_finite() || !value_neg.is_finite()
        {
            return Err(Error::usage(format!(
                "two-point oracle needs finite values and prob in (0, 1], got ({value_pos}, {value_neg}, {prob_pos})"
            )));
        }
        Ok(Self {
            value_pos,
            value_neg,
            prob_pos,
        })
    }

    pub fn mean(&self) -> f64 {
        self.prob_pos * self.value_pos + (1.0 - self.prob_pos) * self.value_neg
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.random::<f64>() < self.prob_pos {
            self.value_pos
        } else {
            self.value_neg
        }
    }
}

pub fn two_point_sample<R: Rng + ?Sized>(oracle: &TwoPointOracle, rng: &mut R) -> f64 {
    oracle.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{Objective, QuadraticSum};

    #[test]
    fn geometric_sigma() {
        let s = SigmaSchedule::GeometricDecay {
            m3: 4.0,
            zeta: 0.25,
        };
        assert_eq!(s.sigma(3, 1.0), 0.5);
        assert_eq!(s.sigma(1, 1.0), 2.0);
        let mut prev = f64::INFINITY;
        for k in 1..40 {
            let sk = s.sigma(k, 1.0);
            assert!(sk > 0.0 && sk < prev);
            prev = sk;
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(GaussianOracleConfig::new(SigmaSchedule::Constant(0.0), 1).is_err());
        assert!(GaussianOracleConfig::new(SigmaSchedule::StepsizeCoupled(-1.0), 1).is_err());
        assert!(
            GaussianOracleConfig::new(SigmaSchedule::GeometricDecay { m3: 1.0, zeta: 1.0 }, 1)
                .is_err()
        );
        assert!(GaussianOracleConfig::new(SigmaSchedule::Constant(0.3), 1).is_ok());
    }

    #[test]
    fn moments_by_schedule() {
        let c = GaussianOracleConfig::new(SigmaSchedule::Constant(0.5), 0).unwrap();
        assert_eq!(c.moments(4, None).unwrap().m1, 1.0);
        let c = GaussianOracleConfig::new(SigmaSchedule::StepsizeCoupled(2.0), 0).unwrap();
        assert!(c.moments(1, None).is_err());
        assert_eq!(c.moments(1, Some(0.25)).unwrap().m1, 0.25);
        let c = GaussianOracleConfig::new(SigmaSchedule::GeometricDecay { m3: 2.0, zeta: 0.5 }, 0)
            .unwrap();
        assert_eq!(c.moments(3, None).unwrap().geometric, Some((6.0, 0.5)));
        assert!(OracleMoments::new(0.0, 1.0, None).is_err());
        assert!(OracleMoments::new(1.0, 1.0, Some((1.0, 1.5))).is_err());
    }

    #[test]
    fn determinism() {
        let c = GaussianOracleConfig::new(SigmaSchedule::Constant(1.0), 42).unwrap();
        let (mut a, mut b) = (c.rng(), c.rng());
        for k in 1..50 {
            let ga = gaussian_sample(&[1.0, -2.0], &c, k, 0.1, &mut a).unwrap();
            let gb = gaussian_sample(&[1.0, -2.0], &c, k, 0.1, &mut b).unwrap();
            assert_eq!(
                ga.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                gb.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
        }
        let mut c2 = seeded_rng(43);
        let g1 = gaussian_sample(&[0.0], &c, 1, 0.1, &mut c.rng()).unwrap();
        let g2 = gaussian_sample(&[0.0], &c, 1, 0.1, &mut c2).unwrap();
        assert_ne!(g1, g2);
    }

    #[test]
    fn minibatch_full_pass_and_identical_components() {
        let s = QuadraticSum::new(
            vec![1.0, 3.0],
            vec![vec![1.0, 2.0], vec![-1.0, 0.5], vec![0.0, 0.0]],
        )
        .unwrap();
        let x = [0.3, -0.7];
        let mut rng = seeded_rng(1);
        let g = finite_sum_minibatch(&s, &x, 3, BatchSampling::FullPass, &mut rng).unwrap();
        let exact = s.gradient(&x);
        for (a, b) in g.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-15);
        }

        let same = QuadraticSum::new(vec![2.0], vec![vec![1.5], vec![1.5]]).unwrap();
        for sampling in [
            BatchSampling::WithReplacement,
            BatchSampling::WithoutReplacement,
        ] {
            for b in 1..=2 {
                let g = finite_sum_minibatch(&same, &[0.0], b, sampling, &mut rng).unwrap();
                assert!((g[0] - same.gradient(&[0.0])[0]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn minibatch_errors() {
        let s = QuadraticSum::new(vec![1.0], vec![vec![0.0]]).unwrap();
        let mut rng = seeded_rng(0);
        let err = finite_sum_minibatch(&s, &[0.0], 0, BatchSampling::WithReplacement, &mut rng);
        assert!(matches!(err, Err(Error::Usage(_))));
        assert!(
            finite_sum_minibatch(&s, &[0.0], 2, BatchSampling::WithReplacement, &mut rng).is_err()
        );
    }

    #[test]
    fn two_point_degenerate() {
        let o = TwoPointOracle::new(2.0, -5.0, 1.0).unwrap();
        let mut rng = seeded_rng(9);
        assert!((0..1000).all(|_| o.sample(&mut rng) == 2.0));
        assert!(TwoPointOracle::new(1.0, 1.0, 0.0).is_err());
        assert_eq!(TwoPointOracle::default().mean(), 1.0);
    }
}
