//! Central finite differences against the analytic gradients.

use rand::Rng;
use trish_core::harness::{LoadedProblem, ProblemSpec};
use trish_core::problems::QuadraticSum;
use trish_core::{
    norm, seeded_rng, LogisticProblem, NonconvexPlProblem, Objective, QuadraticProblem,
};

fn check(problem: &dyn Objective, x: &[f64], tol: f64) {
    let h = 1e-6;
    let analytic = problem.gradient(x);
    let diff: Vec<f64> = (0..x.len())
        .map(|i| {
            let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
            xp[i] += h;
            xm[i] -= h;
            analytic[i] - (problem.value(&xp) - problem.value(&xm)) / (2.0 * h)
        })
        .collect();
    let rel = norm(&diff) / norm(&analytic).max(1e-8);
    assert!(rel <= tol, "relative error {rel}");
}

#[test]
fn small_problems() {
    let mut rng = seeded_rng(21);
    let q = QuadraticProblem::new(vec![0.5, 2.0, 7.0], vec![1.0, 0.0, -3.0]).unwrap();
    let s = QuadraticSum::new(vec![1.0, 3.0], vec![vec![0.0, 1.0], vec![2.0, -1.0]]).unwrap();
    let nc = NonconvexPlProblem::new(3).unwrap();
    for _ in 0..5 {
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
        check(&q, &x, 1e-5);
        check(&nc, &x, 1e-5);
        check(&s, &x[..2], 1e-5);
    }
}

#[test]
fn logistic_with_large_margins() {
    // margins of order 30 exercise the overflow-safe branches
    let p = LogisticProblem::from_dense(
        &[vec![10.0, -3.0], vec![-8.0, 1.0], vec![0.5, 0.5]],
        &[1.0, 1.0, -1.0],
        None,
    )
    .unwrap();
    for x in [[3.0, 0.5], [-2.0, 4.0], [0.1, -0.1]] {
        check(&p, &x, 1e-5);
    }
}

#[test]
fn bundled_dataset() {
    let dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let p = LoadedProblem::load(&ProblemSpec::Logistic {
        train: dir.join("train.svm"),
        test: None,
    })
    .unwrap();
    let obj = p.objective();
    let mut rng = seeded_rng(22);
    for _ in 0..2 {
        let x: Vec<f64> = (0..obj.dim())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        check(obj, &x, 1e-5);
    }
}
