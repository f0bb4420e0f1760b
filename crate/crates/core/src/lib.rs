//! TRish: a stochastic trust-region-ish method.
//!
//! TRish takes normalized steps of length `α_k` while the stochastic gradient
//! norm lies in `[1/γ₁, 1/γ₂]` and scaled gradient steps otherwise. This crate
//! provides
//!
//! - [`step`]: the TRish and SG updates, stepsize schedules, iterate state;
//! - [`oracles`]: mini-batch, Gaussian and two-point gradient oracles;
//! - [`problems`]: quadratic, nonconvex P-L and logistic-regression objectives;
//! - [`theory`]: convergence constants, closed-form and Monte-Carlo estimates
//!   of the conditional inner product, and the expected-gap bounds;
//! - [`ingest`]: LIBSVM parsing;
//! - [`harness`]: multi-seed experiments, grid tuning, bound verification
//!   and CSV output.

pub mod error;
pub mod harness;
pub mod ingest;
mod linalg;
pub mod oracles;
pub mod problems;
pub mod step;
pub mod theory;

pub use error::{Error, HypothesisError, Result};
pub use linalg::{dot, norm, norm_sq};
pub use oracles::{
    finite_sum_minibatch, gaussian_sample, seeded_rng, two_point_sample, BatchSampling,
    GaussianOracleConfig, OracleMoments, SeedRng, SigmaSchedule, TwoPointOracle,
};
pub use problems::{
    FiniteSum, LogisticProblem, NonconvexPlProblem, Objective, ProblemMetadata, QuadraticProblem,
};
pub use step::{
    classify_case, sg_step, step_norm, trish_step, IterateState, Method, StepCase,
    StepsizeSchedule, TrishParams,
};
