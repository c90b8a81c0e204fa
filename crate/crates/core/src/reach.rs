//! The inverse problem: how far can a searcher guarantee ratio `R`?

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimal::expand_sequence_scaled;
use crate::polynomials::{alpha, eval_p, PolyEval};
use crate::strategy::Strategy;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachQuery {
    pub ratio: f64,
    pub lambda: f64,
}

impl ReachQuery {
    pub fn new(ratio: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
        }
        if ratio.is_nan() || ratio < 3.0 {
            return Err(Error::ReachInfeasible(ratio));
        }
        if ratio >= 9.0 {
            return Err(Error::ReachUnbounded(ratio));
        }
        Ok(ReachQuery { ratio, lambda })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachResult {
    pub upper: f64,
    pub n: usize,
    pub a0: f64,
    pub strategy: Strategy,
}

/// Largest `n` with `alpha_{n+1} <= a0`, for `1 <= a0 < 4`.
fn reach_n(a0: f64) -> usize {
    let x = PI / ((a0.sqrt() / 2.0).min(1.0)).acos();
    let guess = (x.floor() - 3.0).max(0.0) as usize;
    if (x - x.round()).abs() > 1e-12 * x {
        return guess;
    }
    // Near an integer the floor is unreliable; test the neighbours directly.
    let slack = 1.0 + 1e-12;
    (guess.saturating_sub(1)..=guess + 1)
        .rev()
        .find(|&n| alpha(n + 1) <= a0 * slack)
        .unwrap_or(0)
}

/// Largest `Lambda` such that some strategy has ratio at most `R` on `[lambda, Lambda]`.
pub fn maximal_reach(query: &ReachQuery) -> Result<ReachResult> {
    let query = ReachQuery::new(query.ratio, query.lambda)?;
    let a0 = (query.ratio - 1.0) / 2.0;
    let n = reach_n(a0);
    let lambda = PolyEval::from_f64(query.lambda);
    let upper_s = eval_p(n, a0) * lambda;
    let upper = upper_s.to_f64();
    if !upper.is_finite() {
        return Err(Error::Overflow(upper_s.log2_abs()));
    }
    let turns = expand_sequence_scaled(a0, n)
        .into_iter()
        .map(|a| (a * lambda).to_f64().min(upper))
        .collect();
    let strategy = Strategy::new(turns, upper, query.lambda)?;
    Ok(ReachResult { upper, n, a0, strategy })
}
