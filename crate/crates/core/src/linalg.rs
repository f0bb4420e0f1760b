//! Dense vector helpers. Plain left-to-right summation throughout; at the
//! dimensions used here compensated summation buys nothing measurable.

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub(crate) fn check_same_dim(x: &[f64], g: &[f64]) -> Result<()> {
    if x.len() != g.len() {
        return Err(Error::usage(format!(
            "dimension mismatch: iterate has {} entries, gradient has {}",
            x.len(),
            g.len()
        )));
    }
    Ok(())
}

pub(crate) fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::data(format!(
            "{what} has non-finite entry {} at index {i}",
            v[i]
        )));
    }
    Ok(())
}

/// `x + scale * d`
pub(crate) fn axpy(x: &[f64], scale: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi + scale * di).collect()
}
