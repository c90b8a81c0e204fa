//! The optimal strategy for a target whose distance is known to lie in
//! `[lambda, Lambda]`.
//!
//! The work splits into choosing the iteration count `n`, solving
//! `p_n(a0) = rho`, and expanding `a_i = a0 (a_{i-1} - a_{i-2})` with
//! `a_{-1} = 1`. The resulting competitive ratio is `2 a0 + 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomials::{eval_p, eval_p_all, PolyEval};
use crate::solve::{limit_error_bound, solve_exact, solve_limit, solve_numeric, SolveMode, SolveResult};
use crate::strategy::Strategy;

/// A search instance: the target lies at distance `lambda <= D <= upper`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchProblem {
    lambda: f64,
    upper: f64,
    epsilon: f64,
}

impl SearchProblem {
    pub fn new(lambda: f64, upper: f64, epsilon: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidProblem(format!("lambda must be positive, got {lambda}")));
        }
        if !(upper >= lambda && upper.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "upper bound {upper} must be finite and at least lambda {lambda}"
            )));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidProblem(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(SearchProblem { lambda, upper, epsilon })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `Lambda / lambda`, in exponent-tracked form so it never overflows.
    pub fn rho(&self) -> PolyEval {
        PolyEval::from_f64(self.upper) / PolyEval::from_f64(self.lambda)
    }
}

/// The scale-free part of the optimum: everything except the turn list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSolution {
    pub n: usize,
    pub a0: f64,
    pub cr: f64,
    pub mode: SolveMode,
    pub cr_error_bound: f64,
    pub solve: SolveResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub strategy: Strategy,
    pub n: usize,
    pub a0: f64,
    pub cr: f64,
    pub mode: SolveMode,
    pub cr_error_bound: f64,
    pub solve: SolveResult,
}

/// Optimal iteration count: the `n` with `p_n(alpha_{n+1}) <= rho < p_n(alpha_{n+2})`.
///
/// Starts from `floor(log2 rho)` and steps down once when
/// `rho < (2 cos(pi / (n + 3)))^{n+1}`. Exact ties keep the larger `n`.
pub fn optimal_n(rho: impl Into<PolyEval>) -> Result<usize> {
    let rho = rho.into();
    if !(rho >= PolyEval::ONE) {
        return Err(Error::RatioBelowOne(rho.to_f64()));
    }
    let log2_rho = rho.log2_abs();
    let n = rho.exp2() as usize;
    if n == 0 {
        return Ok(0);
    }
    let log2_gamma = 1.0 + (PI / (n as f64 + 3.0)).cos().log2();
    let threshold = (n as f64 + 1.0) * log2_gamma;
    let tie = 1e-12 * log2_rho.max(1.0);
    if log2_rho < threshold - tie {
        Ok(n - 1)
    } else {
        Ok(n)
    }
}

/// `{a_0, ..., a_{n-1}}` from `a_1 = a0 (a0 - 1)` and `a_i = a0 (a_{i-1} - a_{i-2})`.
pub fn expand_sequence(a0: f64, n: usize) -> Vec<f64> {
    expand_sequence_scaled(a0, n).into_iter().map(PolyEval::to_f64).collect()
}

/// [`expand_sequence`] without leaving exponent-tracked form.
pub fn expand_sequence_scaled(a0: f64, n: usize) -> Vec<PolyEval> {
    if n == 0 {
        return Vec::new();
    }
    eval_p_all(n - 1, a0)
}

/// `a_n = p_n(a0)`, the value the sequence reaches after `n` steps.
pub fn implied_terminal(a0: f64, n: usize) -> PolyEval {
    eval_p(n, a0)
}

/// Smallest `n` for which `a0 = alpha_{n+2}` is within `epsilon` of optimal.
fn limit_threshold(epsilon: f64) -> f64 {
    7.0 * epsilon.powf(-1.0 / 3.0) - 4.0
}

/// Optimal `n`, `a0` and ratio for `rho`, without expanding the turns.
pub fn optimize_ratio(rho: impl Into<PolyEval>, epsilon: f64) -> Result<RatioSolution> {
    let rho = rho.into();
    if !(epsilon > 0.0) {
        return Err(Error::InvalidProblem(format!("epsilon must be positive, got {epsilon}")));
    }
    let n = optimal_n(rho)?;
    let (solve, cr_error_bound) = if n <= 3 {
        (solve_exact(n, rho.to_f64())?, 0.0)
    } else if n as f64 >= limit_threshold(epsilon) {
        (solve_limit(n, rho), limit_error_bound(n))
    } else {
        (solve_numeric(n, rho, epsilon / 2.0)?, epsilon)
    };
    Ok(RatioSolution {
        n,
        a0: solve.a0,
        cr: 2.0 * solve.a0 + 1.0,
        mode: solve.mode,
        cr_error_bound,
        solve,
    })
}

/// Optimum for a ratio given as `log2 rho`, for ratios beyond the double range.
pub fn optimize_log2(log2_rho: f64, epsilon: f64) -> Result<RatioSolution> {
    if !(log2_rho >= 0.0 && log2_rho.is_finite()) {
        return Err(Error::InvalidProblem(format!("log2 rho must be finite and >= 0, got {log2_rho}")));
    }
    optimize_ratio(PolyEval::from_log2(log2_rho), epsilon)
}

/// The optimal strategy for `problem` together with its competitive ratio.
pub fn optimize(problem: &SearchProblem) -> Result<StrategyReport> {
    let rho = problem.rho();
    let sol = optimize_ratio(rho, problem.epsilon)?;
    let lambda = PolyEval::from_f64(problem.lambda);
    // A turn that already reaches rho is the terminal walk; cut there.
    let turns = expand_sequence_scaled(sol.a0, sol.n)
        .into_iter()
        .take_while(|&a| a < rho)
        .map(|a| (a * lambda).to_f64())
        .collect();
    let strategy = Strategy::new(turns, problem.upper, problem.lambda)?;
    Ok(StrategyReport {
        strategy,
        n: sol.n,
        a0: sol.a0,
        cr: sol.cr,
        mode: sol.mode,
        cr_error_bound: sol.cr_error_bound,
        solve: sol.solve,
    })
}

/// The limit strategy `(2i + 4) 2^i lambda`.
pub fn f_infinity(i: usize, lambda: f64) -> f64 {
    (2.0 * i as f64 + 4.0) * 2f64.powi(i as i32) * lambda
}

/// Closed-form bracket on the optimal ratio in terms of `log2 rho`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioBounds {
    /// `8 cos^2(pi / (ceil(log2 rho) + 2)) + 1`.
    pub lower_stated: f64,
    /// `8 cos^2(pi / (ceil(log2 rho) + 1)) + 1` for `rho >= 2`, `2 rho + 1` below.
    pub lower: f64,
    /// `8 cos^2(pi / (floor(log2 rho) + 4)) + 1`.
    pub upper: f64,
}

pub fn ratio_bounds(log2_rho: f64) -> RatioBounds {
    let band = |k: f64| {
        let c = (PI / k).cos();
        8.0 * c * c + 1.0
    };
    let ceil = log2_rho.ceil();
    let lower = if log2_rho >= 1.0 {
        band(ceil + 1.0)
    } else {
        2.0 * log2_rho.exp2() + 1.0
    };
    RatioBounds {
        lower_stated: band(ceil + 2.0),
        lower,
        upper: band(log2_rho.floor() + 4.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::{alpha, p_at_alpha, p_at_alpha2};
    use crate::solve::solve_for_iterations;

    fn report(lambda: f64, upper: f64) -> StrategyReport {
        optimize(&SearchProblem::new(lambda, upper, 1e-9).unwrap()).unwrap()
    }

    #[test]
    fn optimal_n_examples() {
        assert_eq!(optimal_n(1.0).unwrap(), 0);
        assert_eq!(optimal_n(1.99).unwrap(), 0);
        assert_eq!(optimal_n(2.0).unwrap(), 1);
        assert_eq!(optimal_n(4.0).unwrap(), 1);
        assert_eq!(optimal_n(10.0).unwrap(), 3);
        assert_eq!(optimal_n(9.0).unwrap(), 3);
        assert_eq!(optimal_n(20.0).unwrap(), 4);
        assert!(optimal_n(0.5).is_err());
        // rho = 4 certificate: p_1(alpha_2) = 2 <= 4 < alpha_3^{3/2}
        assert!((p_at_alpha(1).to_f64() - 2.0).abs() < 1e-15);
        assert!((p_at_alpha2(1).to_f64() - 4.2360679).abs() < 1e-6);
        assert!((p_at_alpha2(4).to_f64() - (2.0 + 2f64.sqrt()).powi(3)).abs() < 1e-12);
    }

    #[test]
    fn expand_examples() {
        assert_eq!(expand_sequence(4.0, 4), vec![4.0, 12.0, 32.0, 80.0]);
        assert_eq!(expand_sequence(3.0, 3), vec![3.0, 6.0, 9.0]);
        assert_eq!(implied_terminal(3.0, 3).to_f64(), 9.0);
        assert!(expand_sequence(2.0, 0).is_empty());
        let a0 = solve_numeric(3, 10.0, 1e-14).unwrap().a0;
        let seq = expand_sequence(a0, 3);
        for (got, want) in seq.iter().zip([3.0296, 6.1489, 9.4495]) {
            assert!((got - want).abs() < 1e-3, "{got} vs {want}");
        }
        assert!((implied_terminal(a0, 3).to_f64() - 10.0).abs() < 1e-6);
    }

    #[test]
    fn optimize_examples() {
        let r = report(1.0, 1.0);
        assert!(r.strategy.turns().is_empty());
        assert_eq!(r.strategy.terminal(), 1.0);
        assert_eq!(r.cr, 3.0);

        let r = report(1.0, 2.0);
        assert!((r.cr - 5.0).abs() < 1e-12);

        let r = report(1.0, 10.0);
        assert_eq!(r.n, 3);
        assert!((r.cr - 7.0592).abs() < 1e-4);
        assert_eq!(r.strategy.terminal(), 10.0);
        for (got, want) in r.strategy.turns().iter().zip([3.0296, 6.1489, 9.4495]) {
            assert!((got - want).abs() < 1e-3);
        }

        let golden = 2.0 + 5f64.sqrt();
        let r = report(1.0, golden);
        assert!((r.cr - (4.0 + 5f64.sqrt())).abs() < 1e-10);

        assert!(SearchProblem::new(0.0, 1.0, 1e-9).is_err());
        assert!(SearchProblem::new(2.0, 1.0, 1e-9).is_err());
        assert!(SearchProblem::new(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn dispatch_modes() {
        assert_eq!(report(1.0, 18.0).mode, SolveMode::Exact);
        assert_eq!(report(1.0, 20.0).mode, SolveMode::Numeric);
        // eps = 0.125 puts the limit branch at n >= 10
        let p = SearchProblem::new(1.0, 2f64.powi(12), 0.125).unwrap();
        let r = optimize(&p).unwrap();
        assert_eq!(r.mode, SolveMode::LimitApprox);
        assert_eq!(r.a0, alpha(r.n + 2));
        assert!(r.cr_error_bound <= 0.125);
        assert_eq!(r.strategy.terminal(), 4096.0);
    }

    #[test]
    fn scale_only_changes_turns() {
        let a = report(1.0, 10.0);
        let b = report(2.0, 20.0);
        assert_eq!(a.n, b.n);
        assert!((a.cr - b.cr).abs() < 1e-12);
        for (x, y) in a.strategy.turns().iter().zip(b.strategy.turns()) {
            assert!((2.0 * x - y).abs() < 1e-12 * y);
        }
    }

    #[test]
    fn strategy_invariants_across_rhos() {
        for k in 0..200 {
            let rho = 2f64.powf(k as f64 * 0.2);
            let r = report(1.0, rho);
            let t = r.strategy.turns();
            assert!(t.windows(2).all(|w| w[0] <= w[1]));
            assert!(t.iter().all(|&x| x >= 1.0 - 1e-12));
            if r.n > 0 {
                let an = implied_terminal(r.a0, r.n);
                // a0 is accurate to eps / 2; the slope of p_n amplifies that in a_n
                assert!(an.rel_diff(PolyEval::from_f64(rho)) < 1e-6, "rho={rho}");
            }
            let b = ratio_bounds(rho.log2());
            assert!(r.cr >= b.lower - 1e-9 && r.cr <= b.upper + 1e-9, "rho={rho}");
            assert!(r.cr < 9.0);
        }
    }

    #[test]
    fn stated_lower_band_fails_inside_octaves() {
        // n = 1 is optimal on [4, 4.236); its ratio is below the ceil + 2 band.
        let r = report(1.0, 4.01);
        assert_eq!(r.n, 1);
        let b = ratio_bounds(4.01f64.log2());
        assert!(r.cr < b.lower_stated);
        assert!(r.cr >= b.lower);
    }

    #[test]
    fn optimum_beats_neighbouring_counts() {
        for rho in [1.5, 2.5, 4.0, 10.0, 20.0, 100.0, 1e4] {
            let r = report(1.0, rho);
            for m in r.n.saturating_sub(2)..=r.n + 2 {
                if m == r.n {
                    continue;
                }
                let other = solve_for_iterations(m, rho, 1e-13).unwrap();
                assert!(r.cr < 2.0 * other.a0 + 1.0, "rho={rho} m={m}");
            }
        }
    }

    #[test]
    fn f_infinity_values() {
        assert_eq!(f_infinity(0, 1.0), 4.0);
        assert_eq!(f_infinity(2, 1.0), 32.0);
        assert_eq!(f_infinity(3, 0.5), 40.0);
    }

    #[test]
    fn approaches_limit_strategy() {
        let mut prev_gap = f64::INFINITY;
        for k in [10, 20, 40] {
            let r = report(1.0, 2f64.powi(k));
            let gap = (0..5)
                .map(|i| (r.strategy.turn(i) - f_infinity(i, 1.0)).abs() / f_infinity(i, 1.0))
                .fold(0.0, f64::max);
            assert!(gap < prev_gap, "k={k}");
            prev_gap = gap;
        }
    }

    #[test]
    fn huge_ratio() {
        let s = optimize_log2(1000.0, 1e-9).unwrap();
        assert!(s.cr < 9.0 && s.cr > 8.99);
        let r = report(1.0, 2f64.powi(1000));
        assert_eq!(r.n, s.n);
        assert!((r.cr - s.cr).abs() < 1e-12);
        let far = optimize_log2(5000.0, 1e-9).unwrap();
        assert_eq!(far.mode, SolveMode::Numeric);
        assert!(far.cr < 9.0);
        let limit = optimize_log2(8000.0, 1e-9).unwrap();
        assert_eq!(limit.mode, SolveMode::LimitApprox);
    }
}
