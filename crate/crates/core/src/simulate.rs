//! Cost and worst-case ratio of arbitrary turn-point strategies.
//!
//! Nothing here knows how a strategy was produced; the optimizer's output is
//! checked against these routines.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategy::Strategy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Explored on even iterations.
    Right,
    /// Explored on odd iterations.
    Left,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub distance: f64,
    pub side: Side,
}

impl TargetSpec {
    pub fn new(distance: f64, side: Side) -> Self {
        TargetSpec { distance, side }
    }
}

/// Supremum of `cost / D` over one piece `(lower, upper]` of `[lambda, Lambda]`
/// on which `f^{-1}(D) = index`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSup {
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    pub sup: f64,
    /// False when the supremum is only approached as `D -> lower+`.
    pub attained: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub sup_ratio: f64,
    pub argmax_interval: usize,
    pub per_interval: Vec<IntervalSup>,
}

impl RatioReport {
    /// Largest relative spread between the per-interval suprema.
    pub fn spread(&self) -> f64 {
        let min = self.per_interval.iter().map(|p| p.sup).fold(f64::INFINITY, f64::min);
        (self.sup_ratio - min) / self.sup_ratio
    }
}

/// Index of the first iteration reaching `distance`, and the prefix sum of
/// all turns up to and including it.
fn first_reaching(strategy: &Strategy, distance: f64) -> Result<(usize, f64)> {
    if distance > strategy.terminal() {
        return Err(Error::Unreachable {
            distance,
            terminal: strategy.terminal(),
        });
    }
    let mut sum = 0.0;
    for (j, &t) in strategy.turns().iter().enumerate() {
        sum += t;
        if t >= distance {
            return Ok((j, sum));
        }
    }
    Ok((strategy.turns().len(), sum + strategy.terminal()))
}

/// Worst-orientation cost `2 * sum_{i <= j} f(i) + D` with `j = f^{-1}(D)`.
pub fn cost(strategy: &Strategy, target: &TargetSpec) -> Result<f64> {
    let (_, sum) = first_reaching(strategy, target.distance)?;
    Ok(2.0 * sum + target.distance)
}

/// Distance actually walked before finding a target on the given side.
pub fn walk_cost(strategy: &Strategy, target: &TargetSpec) -> Result<f64> {
    if target.distance > strategy.terminal() {
        return Err(Error::Unreachable {
            distance: target.distance,
            terminal: strategy.terminal(),
        });
    }
    let mut walked = 0.0;
    let mut i = 0;
    loop {
        let side = if i % 2 == 0 { Side::Right } else { Side::Left };
        let reach = strategy.turn(i);
        if side == target.side && reach >= target.distance {
            return Ok(walked + target.distance);
        }
        walked += 2.0 * reach;
        i += 1;
    }
}

/// Exact `sup_{D in [lambda, upper]} cost(D) / D`, taken over the pieces on
/// which `f^{-1}(D)` is constant.
pub fn worst_case_ratio(strategy: &Strategy, lambda: f64, upper: f64) -> Result<RatioReport> {
    if !(lambda > 0.0 && upper >= lambda) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < lambda <= Lambda, got [{lambda}, {upper}]"
        )));
    }
    if strategy.terminal() < upper {
        return Err(Error::IncompleteStrategy {
            terminal: strategy.terminal(),
            upper,
        });
    }
    let mut per_interval = Vec::new();
    let mut prev = 0.0f64;
    let mut sum = 0.0;
    let mut j = 0;
    loop {
        let t = strategy.turn(j);
        sum += t;
        let top = t.min(upper);
        let (lower, attained) = if prev < lambda { (lambda, true) } else { (prev, false) };
        let nonempty = if attained { lower <= top } else { lower < top };
        if nonempty {
            per_interval.push(IntervalSup {
                index: j,
                lower,
                upper: top,
                sup: 1.0 + 2.0 * sum / lower,
                attained,
            });
        }
        if t >= upper {
            break;
        }
        prev = t;
        j += 1;
    }
    let (argmax_interval, sup_ratio) = per_interval
        .iter()
        .enumerate()
        .map(|(k, p)| (k, p.sup))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(RatioReport {
        sup_ratio,
        argmax_interval,
        per_interval,
    })
}

/// Brute-force maximum of `cost(D) / D` over `points` geometrically spaced
/// distances from `lambda` to `upper` inclusive.
pub fn grid_sweep_ratio(strategy: &Strategy, lambda: f64, upper: f64, points: usize) -> Result<f64> {
    if points < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 grid points, got {points}")));
    }
    if !(lambda > 0.0 && upper >= lambda) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < lambda <= Lambda, got [{lambda}, {upper}]"
        )));
    }
    if strategy.terminal() < upper {
        return Err(Error::IncompleteStrategy {
            terminal: strategy.terminal(),
            upper,
        });
    }
    let values = strategy.with_terminal();
    let prefix: Vec<f64> = values
        .iter()
        .scan(0.0, |acc, &t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let log_span = (upper / lambda).ln();
    let last = (points - 1) as f64;
    let mut best = f64::NEG_INFINITY;
    for k in 0..points {
        let d = if k == 0 {
            lambda
        } else if k == points - 1 {
            upper
        } else {
            lambda * (log_span * k as f64 / last).exp()
        };
        let j = values.partition_point(|&t| t < d).min(values.len() - 1);
        best = best.max((2.0 * prefix[j] + d) / d);
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    /// `2^i lambda`.
    PowerOfTwo,
    /// `(2i + 4) 2^i lambda`.
    FInfinity,
    /// `sqrt(1 + i/2) 2^i lambda`.
    LosSqrt,
    /// Straight to `Lambda` every time.
    SingleShot,
}

impl Baseline {
    pub const ALL: [Baseline; 4] = [
        Baseline::PowerOfTwo,
        Baseline::FInfinity,
        Baseline::LosSqrt,
        Baseline::SingleShot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Baseline::PowerOfTwo => "power_of_two",
            Baseline::FInfinity => "f_infinity",
            Baseline::LosSqrt => "los_sqrt",
            Baseline::SingleShot => "single_shot",
        }
    }

    fn value(self, i: usize, lambda: f64) -> Option<f64> {
        let i_f = i as f64;
        let pow = 2f64.powi(i as i32);
        match self {
            Baseline::PowerOfTwo => Some(pow * lambda),
            Baseline::FInfinity => Some((2.0 * i_f + 4.0) * pow * lambda),
            Baseline::LosSqrt => Some((1.0 + i_f / 2.0).sqrt() * pow * lambda),
            Baseline::SingleShot => None,
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Baseline::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownBaseline(s.to_string()))
    }
}

/// The named baseline, cut at the first turn reaching `upper`, which becomes
/// the terminal.
pub fn baseline(kind: Baseline, lambda: f64, upper: f64) -> Result<Strategy> {
    if !(lambda > 0.0 && upper >= lambda && upper.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < lambda <= Lambda, got [{lambda}, {upper}]"
        )));
    }
    let mut turns = Vec::new();
    let mut i = 0;
    while let Some(v) = kind.value(i, lambda) {
        if v >= upper {
            break;
        }
        turns.push(v);
        i += 1;
    }
    Strategy::new(turns, upper, lambda)
}

/// [`baseline`] looked up by name.
pub fn baseline_by_name(name: &str, lambda: f64, upper: f64) -> Result<Strategy> {
    baseline(name.parse()?, lambda, upper)
}
