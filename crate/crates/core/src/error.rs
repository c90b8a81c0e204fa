use thiserror::Error;

/// Errors produced by the search-strategy routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid search problem: {0}")]
    InvalidProblem(String),

    #[error("ratio {0} is below 1")]
    RatioBelowOne(f64),

    #[error("closed-form solution only exists for n <= 3 (got n = {0})")]
    DegreeTooHigh(usize),

    #[error("ratio 2^{log2_rho} does not select n = {n}: expected p_n(alpha_(n+1)) <= rho < p_n(alpha_(n+2))")]
    CriterionViolated { n: usize, log2_rho: f64 },

    #[error("target at distance {distance} lies beyond the terminal distance {terminal}")]
    Unreachable { distance: f64, terminal: f64 },

    #[error("strategy does not cover [lambda, Lambda]: terminal {terminal} < {upper}")]
    IncompleteStrategy { terminal: f64, upper: f64 },

    #[error("strategy is not monotone at turn {0}")]
    NotMonotone(usize),

    #[error("unknown baseline strategy '{0}'")]
    UnknownBaseline(String),

    #[error("ratio budget {0} is infeasible: every strategy has ratio at least 3")]
    ReachInfeasible(f64),

    #[error("unbounded reach: ratio budget {0} >= 9 admits every upper bound")]
    ReachUnbounded(f64),

    #[error("value 2^{0} is not representable as a double")]
    Overflow(f64),

    #[error("infeasible parameters m = {m}, a = {a}, b = {b}: b must lie in [{lo}, {hi}]")]
    InfeasibleParams {
        m: usize,
        a: f64,
        b: f64,
        lo: f64,
        hi: f64,
    },

    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
