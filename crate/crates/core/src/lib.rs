//! Optimal search for a target on a line whose distance is known to lie in
//! `[lambda, Lambda]`, with a simulator to check the claimed ratios and the
//! `m`-ray generalization.
//!
//! ```
//! use linesearch_core::{optimize, SearchProblem};
//!
//! let report = optimize(&SearchProblem::new(1.0, 10.0, 1e-9).unwrap()).unwrap();
//! assert_eq!(report.n, 3);
//! assert!((report.cr - 7.0592).abs() < 1e-4);
//! ```

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod mrays;
pub mod optimal;
pub mod polynomials;
pub mod reach;
pub mod simulate;
pub mod solve;
pub mod strategy;

pub use error::{Error, Result};
pub use mrays::{MultiPoint, RayFamilyParams};
pub use optimal::{optimize, optimize_log2, optimize_ratio, RatioSolution, SearchProblem, StrategyReport};
pub use polynomials::{PolyEval, PolyIndex};
pub use reach::{maximal_reach, ReachQuery, ReachResult};
pub use simulate::{Baseline, RatioReport, Side, TargetSpec};
pub use solve::{SolveMode, SolveResult};
pub use strategy::Strategy;
