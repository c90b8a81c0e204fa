//! Search on `m` concurrent rays: the two-parameter family
//! `f_{a,b}(i) = (a i + b) (m / (m - 1))^i lambda`, its worst-case ratio, and
//! the multivariate recurrence whose roots play the part of `alpha_n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `m^m / (m - 1)^(m - 1)`.
pub fn ray_constant(m: usize) -> f64 {
    let m_f = m as f64;
    m_f.powi(m as i32) / (m_f - 1.0).powi(m as i32 - 1)
}

/// `1 + 2 m^m / (m - 1)^(m - 1)`, the ratio every family member tends to.
pub fn ratio_bound(m: usize) -> f64 {
    1.0 + 2.0 * ray_constant(m)
}

fn growth(m: usize) -> f64 {
    m as f64 / (m as f64 - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayFamilyParams {
    pub m: usize,
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
}

impl RayFamilyParams {
    pub fn new(m: usize, a: f64, b: f64, lambda: f64) -> Self {
        RayFamilyParams { m, a, b, lambda }
    }

    /// Value of the family member at iteration `i`, ignoring feasibility.
    pub fn value(&self, i: usize) -> f64 {
        (self.a * i as f64 + self.b) * growth(self.m).powi(i as i32) * self.lambda
    }

    /// Checks `m >= 2`, `a >= 0`, `lambda > 0` and that `b` is feasible.
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::InvalidArgument(format!("need m >= 2 rays, got {}", self.m)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidArgument(format!("a must be non-negative, got {}", self.a)));
        }
        let (lo, hi) = feasible_b_interval(self.m, self.a)?;
        let slack = 1e-12 * hi.abs().max(1.0);
        if !(self.b >= lo - slack && self.b <= hi + slack) {
            return Err(Error::InfeasibleParams {
                m: self.m,
                a: self.a,
                b: self.b,
                lo,
                hi,
            });
        }
        Ok(())
    }

    /// The member with `a` and `b` at the single point where the feasible
    /// interval closes: `a = m / (m - 1)^2`, `b = m a`.
    pub fn limit(m: usize, lambda: f64) -> Self {
        let a = m as f64 / ((m as f64 - 1.0) * (m as f64 - 1.0));
        RayFamilyParams::new(m, a, m as f64 * a, lambda)
    }
}

/// Feasible values of `b` for given `m` and `a`; empty (`lo > hi`) once `a`
/// passes `m / (m - 1)^2`.
pub fn feasible_b_interval(m: usize, a: f64) -> Result<(f64, f64)> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("need m >= 2 rays, got {m}")));
    }
    let k = ray_constant(m);
    let m_f = m as f64;
    let lo = (m_f * a).max(1.0);
    let hi = ((k - m_f * m_f) * a + growth(m) * k) / (k - m_f);
    Ok((lo, hi))
}

/// The first `count` turn distances of `f_{a,b}`.
pub fn family_strategy(params: &RayFamilyParams, count: usize) -> Result<Vec<f64>> {
    params.validate()?;
    Ok((0..count).map(|i| params.value(i)).collect())
}

/// Worst-case cost over the `m` rays of finding a target at `distance`
/// with the cyclic strategy `f`, for `f(j) <= D < f(j + 1)`.
pub fn mray_cost(f: impl Fn(usize) -> f64, m: usize, distance: f64) -> f64 {
    let mut j = None;
    let mut i = 0;
    while f(i) <= distance {
        j = Some(i);
        i += 1;
    }
    let last = match j {
        Some(j) => j + m - 1,
        None => m - 2,
    };
    2.0 * (0..=last).map(&f).sum::<f64>() + distance
}

/// Extreme values of `cost / D` on each piece `f(j) <= D < f(j + 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MrayRatioReport {
    pub m: usize,
    /// Largest breakpoint supremum.
    pub sup_ratio: f64,
    /// `cost / D` at `D = f(j)`, for `j = 0..horizon`, preceded by the value
    /// at `D = lambda` when `f(0) > lambda`.
    pub breakpoint_sups: Vec<f64>,
    /// Limits of `cost / D` as `D -> f(j + 1)` from below.
    pub breakpoint_infs: Vec<f64>,
    /// `1 + 2 m^m / (m - 1)^(m - 1)`.
    pub bound: f64,
    /// `1 + 2 (m - 1)`.
    pub lower_bound: f64,
    /// `bound - sup_ratio`: how far the horizon stops short of the limit.
    pub residual: f64,
    pub horizon: usize,
}

impl MrayRatioReport {
    /// Does every breakpoint lie in `[lower_bound, bound]` up to `tol`?
    pub fn within_bounds(&self, tol: f64) -> bool {
        self.breakpoint_sups
            .iter()
            .chain(&self.breakpoint_infs)
            .all(|&r| r >= self.lower_bound - tol && r <= self.bound + tol)
    }
}

/// Horizon after which the `a = 0` member is within `1e-6 * bound` of the limit.
pub fn default_horizon(m: usize) -> usize {
    let gap = 2.0 * (m as f64 - 1.0) / (1e-6 * ratio_bound(m));
    (gap.ln() / growth(m).ln()).ceil() as usize + m
}

/// Breakpoint ratios of `f_{a,b}` on `D <= f(horizon)` without checking
/// feasibility.
pub fn mray_ratio_profile(params: &RayFamilyParams, horizon: usize) -> MrayRatioReport {
    let m = params.m;
    let q = growth(m);
    let (a, b) = (params.a, params.b);
    // t[k] = sum_{i <= k} (a i + b) q^(i - k), i.e. S_k / (lambda q^k)
    let mut t = Vec::with_capacity(horizon + m + 1);
    let mut acc = 0.0;
    for k in 0..=horizon + m {
        acc = acc / q + a * k as f64 + b;
        t.push(acc);
    }
    let mut sups = Vec::with_capacity(horizon + 2);
    let mut infs = Vec::with_capacity(horizon + 2);
    if b > 1.0 {
        // D in [lambda, f(0)): the walk covers f(0..=m-2) first
        let scaled = t[m - 2] * q.powi(m as i32 - 2);
        sups.push(1.0 + 2.0 * scaled);
        infs.push(1.0 + 2.0 * scaled / b);
    }
    let q_m1 = q.powi(m as i32 - 1);
    let q_m2 = q.powi(m as i32 - 2);
    for j in 0..horizon {
        let s = t[j + m - 1];
        sups.push(1.0 + 2.0 * s * q_m1 / (a * j as f64 + b));
        infs.push(1.0 + 2.0 * s * q_m2 / (a * (j + 1) as f64 + b));
    }
    let bound = ratio_bound(m);
    let sup_ratio = sups.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    MrayRatioReport {
        m,
        sup_ratio,
        breakpoint_sups: sups,
        breakpoint_infs: infs,
        bound,
        lower_bound: 1.0 + 2.0 * (m as f64 - 1.0),
        residual: bound - sup_ratio,
        horizon,
    }
}

/// Supremum of `cost / D` for a feasible family member, up to `D = f(horizon)`.
pub fn mray_worst_ratio(params: &RayFamilyParams, horizon: usize) -> Result<MrayRatioReport> {
    params.validate()?;
    if horizon < params.m {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} must be at least m = {}",
            params.m
        )));
    }
    Ok(mray_ratio_profile(params, horizon))
}

/// A point `(x_0, ..., x_{m-2})` for the `m`-ray polynomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiPoint {
    pub coords: Vec<f64>,
}

impl MultiPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        MultiPoint { coords }
    }

    /// `|x|`, the coordinate sum.
    pub fn norm(&self) -> f64 {
        self.coords.iter().sum()
    }

    pub fn is_ordered(&self) -> bool {
        self.coords.first().is_none_or(|&x| x >= 0.0) && self.coords.windows(2).all(|w| w[0] <= w[1])
    }
}

/// `p_n(x)` for the `m`-ray recurrence.
pub fn multi_p(n: usize, point: &MultiPoint, m: usize) -> Result<f64> {
    Ok(multi_p_all(n, point, m)?[n])
}

/// `p_0(x), ..., p_n(x)`.
pub fn multi_p_all(n: usize, point: &MultiPoint, m: usize) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("need m >= 2 rays, got {m}")));
    }
    if point.coords.len() != m - 1 {
        return Err(Error::DimensionMismatch {
            expected: m - 1,
            got: point.coords.len(),
        });
    }
    let x = &point.coords;
    let norm = point.norm();
    let mut p = Vec::with_capacity(n.max(m) + 1);
    for k in 0..=n.max(m - 1) {
        let v = if k + 2 <= m {
            x[k]
        } else if k == m - 1 {
            norm * (x[0] - 1.0)
        } else {
            norm * (p[k - m + 1] - p[k - m])
        };
        p.push(v);
    }
    p.truncate(n + 1);
    Ok(p)
}

/// Closed form of `alpha_5` for `m = 2`, through complex cube roots.
fn alpha5_line() -> f64 {
    let w = Complex64::new(1.0, 3.0 * 3f64.sqrt());
    let first = Complex64::from(7f64.powf(2.0 / 3.0)) / (w * 0.5).cbrt();
    let second = (w * 3.5).cbrt();
    ((Complex64::from(5.0) + first + second) / 3.0).re
}

/// Tabulated root `alpha_n` of the `m`-ray system for `2 <= m <= 5`, `n <= 6`.
pub fn alpha_table(m: usize, n: usize) -> Option<MultiPoint> {
    let s3 = 3f64.sqrt();
    let s13 = 13f64.sqrt();
    let s21 = 21f64.sqrt();
    let s6 = 6f64.sqrt();
    let s2 = 2f64.sqrt();
    let coords = match (m, n) {
        (2, 0) => vec![0.0],
        (2, 1) => vec![1.0],
        (2, 2) => vec![2.0],
        (2, 3) => vec![(3.0 + 5f64.sqrt()) / 2.0],
        (2, 4) => vec![3.0],
        (2, 5) => vec![alpha5_line()],
        (2, 6) => vec![2.0 + s2],
        (3, 0) | (3, 1) => vec![0.0; 2],
        (3, 2) => vec![1.0; 2],
        (3, 3) => vec![1.5; 2],
        (3, 4) => vec![(3.0 + s3) / 3.0, (3.0 + 2.0 * s3) / 3.0],
        (3, 5) => vec![(7.0 + s13) / 6.0, (4.0 + s13) / 3.0],
        (3, 6) => vec![(15.0 + 3.0 * s3) / 11.0, (18.0 + 8.0 * s3) / 11.0],
        (4, 0..=2) => vec![0.0; 3],
        (4, 3) => vec![1.0; 3],
        (4, 4) => vec![4.0 / 3.0; 3],
        (4, 5) => vec![(9.0 + s21) / 10.0, (4.0 + s21) / 5.0, (4.0 + s21) / 5.0],
        (4, 6) => vec![(6.0 + s6) / 6.0, (3.0 + s6) / 3.0, (2.0 + s6) / 2.0],
        (5, 0..=3) => vec![0.0; 4],
        (5, 4) => vec![1.0; 4],
        (5, 5) => vec![1.25; 4],
        (5, 6) => {
            let tail = (5.0 + 4.0 * s2) / 7.0;
            vec![(6.0 + 2.0 * s2) / 7.0, tail, tail, tail]
        }
        _ => return None,
    };
    Some(MultiPoint::new(coords))
}

/// Substitutes the tabulated `alpha_n` and checks that it zeroes
/// `p_n, ..., p_{n+m-2}` and is ordered. False outside the table.
pub fn verify_alpha_table(m: usize, n: usize) -> bool {
    let Some(point) = alpha_table(m, n) else {
        return false;
    };
    let Ok(p) = multi_p_all(n + m - 2, &point, m) else {
        return false;
    };
    point.is_ordered() && p[n..].iter().all(|v| v.abs() <= 1e-10)
}

/// Checks `p_n(f(0), ..., f(m-2)) = f(n)` for the limit member of the family.
pub fn f_infinity_fixed_point(m: usize, n: usize) -> bool {
    if m < 2 {
        return false;
    }
    let params = RayFamilyParams::limit(m, 1.0);
    let point = MultiPoint::new((0..m - 1).map(|i| params.value(i)).collect());
    match multi_p(n, &point, m) {
        Ok(p) => {
            let want = params.value(n);
            (p - want).abs() <= 1e-9 * want.abs()
        }
        Err(_) => false,
    }
}
