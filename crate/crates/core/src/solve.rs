//! Solving `p_n(x) = rho` for the first turn distance `a0`.
//!
//! For `n <= 3` the root is produced by radicals. Otherwise a Newton step
//! safeguarded by bisection runs on `[alpha_{n+1}, alpha_{n+2})`, where `p_n`
//! is strictly increasing.

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomials::{alpha, eval_p, eval_p_with_derivative, p_at_alpha, p_at_alpha2};
use crate::polynomials::{PolyEval, PolyIndex};

/// Relative slack accepted at the ends of the selection bracket.
const BOUNDARY_SLACK: f64 = 1e-12;
const MAX_ITERATIONS: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    Exact,
    LimitApprox,
    Numeric,
}

impl SolveMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMode::Exact => "exact",
            SolveMode::LimitApprox => "limit_approx",
            SolveMode::Numeric => "numeric",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub a0: f64,
    pub mode: SolveMode,
    /// `|p_n(a0) - rho|`; infinite when it exceeds the double range.
    pub residual: f64,
    /// `|p_n(a0) - rho| / rho`.
    pub rel_residual: f64,
    /// Final enclosing interval for the exact root.
    pub bracket: (f64, f64),
    pub bracket_width: f64,
    pub iterations: usize,
}

fn residuals(n: PolyIndex, a0: f64, rho: PolyEval) -> (f64, f64) {
    let diff = (eval_p(n, a0) - rho).abs();
    (diff.to_f64(), (diff / rho).to_f64())
}

fn validate_rho(rho: PolyEval) -> Result<()> {
    if !(rho >= PolyEval::ONE) {
        return Err(Error::RatioBelowOne(rho.to_f64()));
    }
    Ok(())
}

/// Does `(n, rho)` satisfy `p_n(alpha_{n+1}) <= rho < p_n(alpha_{n+2})`, up to
/// rounding at either end?
pub fn selects_n(n: PolyIndex, rho: PolyEval) -> bool {
    let lower = p_at_alpha(n) * (1.0 - BOUNDARY_SLACK);
    let upper = p_at_alpha2(n) * (1.0 + BOUNDARY_SLACK);
    lower <= rho && rho < upper
}

fn check_criterion(n: PolyIndex, rho: PolyEval) -> Result<()> {
    if selects_n(n, rho) {
        Ok(())
    } else {
        Err(Error::CriterionViolated {
            n,
            log2_rho: rho.log2_abs(),
        })
    }
}

/// Bound `7^3 (n + 4)^-3` on the ratio error of taking `a0 = alpha_{n+2}`.
pub fn limit_error_bound(n: PolyIndex) -> f64 {
    343.0 / (n as f64 + 4.0).powi(3)
}

/// Largest real root of `p_n(x) = rho` by radicals, `n <= 3`.
pub fn solve_exact(n: PolyIndex, rho: f64) -> Result<SolveResult> {
    if n > 3 {
        return Err(Error::DegreeTooHigh(n));
    }
    let rho_s = PolyEval::from_f64(rho);
    validate_rho(rho_s)?;
    check_criterion(n, rho_s)?;
    let a0 = exact_root(n, rho);
    let (residual, rel_residual) = residuals(n, a0, rho_s);
    Ok(SolveResult {
        a0,
        mode: SolveMode::Exact,
        residual,
        rel_residual,
        bracket: (a0, a0),
        bracket_width: 0.0,
        iterations: 0,
    })
}

/// Largest real root of `p_n(x) = rho` for `n <= 3` and `rho >= 1`.
pub(crate) fn exact_root(n: PolyIndex, rho: f64) -> f64 {
    match n {
        0 => rho,
        1 => (1.0 + (1.0 + 4.0 * rho).sqrt()) / 2.0,
        2 => {
            // x^3 - 2x^2 = rho
            let c = (8.0 + 13.5 * rho + 1.5 * 3f64.sqrt() * (rho * (32.0 + 27.0 * rho)).sqrt()).cbrt();
            (2.0 + 4.0 / c + c) / 3.0
        }
        3 => largest_quartic_root(rho),
        _ => unreachable!("exact_root called with n = {n}"),
    }
}

/// Largest real root of `x^4 - 3x^3 + x^2 - rho = 0` (Ferrari).
fn largest_quartic_root(rho: f64) -> f64 {
    // x = y + 3/4 gives y^4 + p y^2 + q y + r = 0
    let p = -19.0 / 8.0;
    let q = -15.0 / 8.0;
    let r = -99.0 / 256.0 - rho;
    // resolvent: m^3 + p m^2 + (p^2/4 - r) m - q^2/8 = 0, with a root m > 0
    let m = largest_cubic_root(p, p * p / 4.0 - r, -q * q / 8.0);
    let s = (2.0 * m).sqrt();
    let mut best = f64::NEG_INFINITY;
    for (sign, disc) in [
        (1.0, -2.0 * m - 2.0 * p - 2.0 * q / s),
        (-1.0, -2.0 * m - 2.0 * p + 2.0 * q / s),
    ] {
        if disc >= 0.0 {
            best = best.max((sign * s + disc.sqrt()) / 2.0);
        }
    }
    best + 0.75
}

/// Largest real root of the monic cubic `t^3 + a t^2 + b t + c`, using the
/// trigonometric form when all three roots are real.
fn largest_cubic_root(a: f64, b: f64, c: f64) -> f64 {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let t = if p < 0.0 && disc <= 0.0 {
        let radius = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        radius * (arg.acos() / 3.0).cos()
    } else {
        let sq = disc.sqrt();
        (-q / 2.0 + sq).cbrt() + (-q / 2.0 - sq).cbrt()
    };
    t - shift
}

/// Root of `p_n(x) = rho` in `[alpha_{n+1}, alpha_{n+2})` to within `tol_a0`.
pub fn solve_numeric(n: PolyIndex, rho: impl Into<PolyEval>, tol_a0: f64) -> Result<SolveResult> {
    let rho = rho.into();
    if !(tol_a0 > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol_a0}")));
    }
    validate_rho(rho)?;
    check_criterion(n, rho)?;
    let lo = alpha(n + 1);
    let hi = alpha(n + 2);
    Ok(refine(n, rho, lo, hi, tol_a0))
}

/// Root of `p_n(x) = rho` above `alpha_n`, for any `n`.
///
/// Unlike [`solve_numeric`] this does not require `n` to be the optimal
/// iteration count for `rho`; it yields the first turn of the best strategy
/// restricted to exactly `n + 2` iterations.
pub fn solve_for_iterations(n: PolyIndex, rho: impl Into<PolyEval>, tol_a0: f64) -> Result<SolveResult> {
    let rho = rho.into();
    if !(tol_a0 > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol_a0}")));
    }
    validate_rho(rho)?;
    let lo = alpha(n);
    let mut hi = 4.0;
    while eval_p(n, hi) < rho {
        hi *= 2.0;
    }
    Ok(refine(n, rho, lo, hi, tol_a0))
}

/// `a0 = alpha_{n+2}`, the upper end of the selection bracket.
pub fn solve_limit(n: PolyIndex, rho: impl Into<PolyEval>) -> SolveResult {
    let rho = rho.into();
    let a0 = alpha(n + 2);
    let diff = (p_at_alpha2(n) - rho).abs();
    let lo = alpha(n + 1);
    SolveResult {
        a0,
        mode: SolveMode::LimitApprox,
        residual: diff.to_f64(),
        rel_residual: (diff / rho).to_f64(),
        bracket: (lo, a0),
        bracket_width: a0 - lo,
        iterations: 0,
    }
}

/// Newton iteration safeguarded by bisection on `[lo, hi]`, where
/// `p_n(lo) <= rho < p_n(hi)` and `p_n` is increasing.
fn refine(n: PolyIndex, rho: PolyEval, mut lo: f64, mut hi: f64, tol: f64) -> SolveResult {
    let mut x = 0.5 * (lo + hi);
    let mut iterations = 0;
    let mut exact_hit = false;
    while iterations < MAX_ITERATIONS && hi - lo > 2.0 * tol {
        iterations += 1;
        let (p, dp) = eval_p_with_derivative(n, x);
        let f = p - rho;
        if f.is_zero() {
            lo = x;
            hi = x;
            exact_hit = true;
            break;
        }
        if f.signum() < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let mut next = if dp.is_zero() { f64::NAN } else { x - (f / dp).to_f64() };
        let step = next - x;
        if step.abs() < 0.5 * tol {
            // overshoot slightly so that the bracket closes from the far side
            next = x + step.signum() * 0.5 * tol + step;
        }
        if !(next > lo && next < hi) {
            next = mid;
        }
        x = next;
    }
    let a0 = if exact_hit { lo } else { 0.5 * (lo + hi) };
    debug!("p_{n}(x) = {rho}: a0 = {a0} in [{lo}, {hi}] after {iterations} iterations");
    let (residual, rel_residual) = residuals(n, a0, rho);
    SolveResult {
        a0,
        mode: SolveMode::Numeric,
        residual,
        rel_residual,
        bracket: (lo, hi),
        bracket_width: hi - lo,
        iterations,
    }
}
