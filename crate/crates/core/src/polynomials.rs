//! The polynomial family `p_0(x) = x`, `p_1(x) = x(x - 1)`,
//! `p_i(x) = x (p_{i-1}(x) - p_{i-2}(x))`, its largest roots `alpha_n`
//! and the closed forms evaluated at those roots.
//!
//! Values of `p_n` grow like `2^n` near `x = 4`, so evaluation is carried out
//! in [`PolyEval`], a mantissa plus a base-2 exponent that never overflows.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Index `n` of `p_n` (degree `n + 1`) and of `alpha_n`.
pub type PolyIndex = usize;

/// A real number stored as `mantissa * 2^exp2` with `|mantissa|` in `[1, 2)`,
/// or exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyEval {
    mantissa: f64,
    exp2: i64,
}

/// Splits a finite non-zero `x` into `(m, e)` with `|m|` in `[1, 2)`.
fn frexp(x: f64) -> (f64, i64) {
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        // subnormal
        let (m, e) = frexp(x * f64::from_bits((1023 + 64) << 52));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52));
    (m, biased - 1023)
}

/// `x * 2^e` without intermediate overflow or underflow of the scale factor.
fn ldexp(x: f64, e: i64) -> f64 {
    let pow2 = |k: i64| f64::from_bits(((k + 1023) as u64) << 52);
    if x == 0.0 {
        return x;
    }
    if e > 2100 {
        return x * f64::INFINITY;
    }
    if e < -2200 {
        return x * 0.0;
    }
    let mut x = x;
    let mut e = e;
    while e > 1023 {
        x *= pow2(1023);
        e -= 1023;
    }
    while e < -1022 {
        x *= pow2(-1022);
        e += 1022;
    }
    x * pow2(e)
}

impl PolyEval {
    pub const ZERO: PolyEval = PolyEval {
        mantissa: 0.0,
        exp2: 0,
    };
    pub const ONE: PolyEval = PolyEval {
        mantissa: 1.0,
        exp2: 0,
    };

    /// Builds `mantissa * 2^exp2`, renormalising the mantissa.
    pub fn new(mantissa: f64, exp2: i64) -> Self {
        assert!(mantissa.is_finite(), "PolyEval mantissa must be finite");
        if mantissa == 0.0 {
            return Self::ZERO;
        }
        let (m, e) = frexp(mantissa);
        PolyEval {
            mantissa: m,
            exp2: exp2 + e,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        Self::new(x, 0)
    }

    /// The positive number `2^log2`.
    pub fn from_log2(log2: f64) -> Self {
        assert!(log2.is_finite(), "log2 must be finite");
        let e = log2.floor();
        let m = (log2 - e).exp2();
        Self::new(m, e as i64)
    }

    pub fn mantissa(self) -> f64 {
        self.mantissa
    }

    pub fn exp2(self) -> i64 {
        self.exp2
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0.0
    }

    pub fn signum(self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    pub fn abs(self) -> Self {
        PolyEval {
            mantissa: self.mantissa.abs(),
            exp2: self.exp2,
        }
    }

    /// Nearest double; saturates to `±inf` or `±0` outside the double range.
    pub fn to_f64(self) -> f64 {
        ldexp(self.mantissa, self.exp2)
    }

    /// `log2 |self|`; `-inf` for zero.
    pub fn log2_abs(self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.exp2 as f64 + self.mantissa.abs().log2()
        }
    }

    /// `self^power` for a positive value.
    pub fn powf(self, power: f64) -> Self {
        assert!(self.mantissa > 0.0, "powf needs a positive base");
        Self::from_log2(power * self.log2_abs())
    }

    /// Relative distance `|self - other| / max(|self|, |other|)`.
    pub fn rel_diff(self, other: PolyEval) -> f64 {
        let scale = if self.abs() >= other.abs() {
            self.abs()
        } else {
            other.abs()
        };
        if scale.is_zero() {
            return 0.0;
        }
        ((self - other) / scale).to_f64().abs()
    }
}

impl From<f64> for PolyEval {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl fmt::Display for PolyEval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if (-1000..=1000).contains(&self.exp2) {
            write!(f, "{}", self.to_f64())
        } else {
            write!(f, "{}*2^{}", self.mantissa, self.exp2)
        }
    }
}

impl Neg for PolyEval {
    type Output = PolyEval;
    fn neg(self) -> PolyEval {
        PolyEval {
            mantissa: -self.mantissa,
            exp2: self.exp2,
        }
    }
}

impl Add for PolyEval {
    type Output = PolyEval;
    fn add(self, rhs: PolyEval) -> PolyEval {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp2 >= rhs.exp2 {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = lo.exp2 - hi.exp2;
        if shift < -60 {
            return hi;
        }
        PolyEval::new(hi.mantissa + ldexp(lo.mantissa, shift), hi.exp2)
    }
}

impl Sub for PolyEval {
    type Output = PolyEval;
    fn sub(self, rhs: PolyEval) -> PolyEval {
        self + (-rhs)
    }
}

impl Mul for PolyEval {
    type Output = PolyEval;
    fn mul(self, rhs: PolyEval) -> PolyEval {
        if self.is_zero() || rhs.is_zero() {
            return PolyEval::ZERO;
        }
        PolyEval::new(self.mantissa * rhs.mantissa, self.exp2 + rhs.exp2)
    }
}

impl Mul<f64> for PolyEval {
    type Output = PolyEval;
    fn mul(self, rhs: f64) -> PolyEval {
        self * PolyEval::from_f64(rhs)
    }
}

impl Div for PolyEval {
    type Output = PolyEval;
    fn div(self, rhs: PolyEval) -> PolyEval {
        assert!(!rhs.is_zero(), "division by zero");
        if self.is_zero() {
            return PolyEval::ZERO;
        }
        PolyEval::new(self.mantissa / rhs.mantissa, self.exp2 - rhs.exp2)
    }
}

impl PartialOrd for PolyEval {
    fn partial_cmp(&self, other: &PolyEval) -> Option<Ordering> {
        let s = self.signum();
        let o = other.signum();
        if s != o {
            return s.partial_cmp(&o);
        }
        if s == 0.0 {
            return Some(Ordering::Equal);
        }
        let magnitude = self
            .exp2
            .cmp(&other.exp2)
            .then(self.mantissa.abs().total_cmp(&other.mantissa.abs()));
        Some(if s > 0.0 {
            magnitude
        } else {
            magnitude.reverse()
        })
    }
}

/// `p_n(x)` via the three-term recurrence with `p_{-1} = 1`.
pub fn eval_p(n: PolyIndex, x: f64) -> PolyEval {
    let mut prev = PolyEval::ONE; // p_{-1}
    let mut cur = PolyEval::from_f64(x); // p_0
    for _ in 0..n {
        let next = (cur - prev) * x;
        prev = cur;
        cur = next;
    }
    cur
}

/// `(p_n(x), p_n'(x))`, differentiating the recurrence alongside it.
pub fn eval_p_with_derivative(n: PolyIndex, x: f64) -> (PolyEval, PolyEval) {
    let mut prev = PolyEval::ONE;
    let mut cur = PolyEval::from_f64(x);
    let mut dprev = PolyEval::ZERO;
    let mut dcur = PolyEval::ONE;
    for _ in 0..n {
        let diff = cur - prev;
        let next = diff * x;
        let dnext = diff + (dcur - dprev) * x;
        prev = cur;
        cur = next;
        dprev = dcur;
        dcur = dnext;
    }
    (cur, dcur)
}

/// Every `p_0(x), ..., p_n(x)` in order.
pub fn eval_p_all(n: PolyIndex, x: f64) -> Vec<PolyEval> {
    let mut out = Vec::with_capacity(n + 1);
    let mut prev = PolyEval::ONE;
    let mut cur = PolyEval::from_f64(x);
    out.push(cur);
    for _ in 0..n {
        let next = (cur - prev) * x;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Largest real root of `p_n`: `4 cos^2(pi / (n + 2))`.
pub fn alpha(n: PolyIndex) -> f64 {
    // 4 - 4 sin^2 keeps full relative accuracy of the gap to 4 for large n.
    let s = (PI / (n as f64 + 2.0)).sin();
    4.0 - 4.0 * s * s
}

/// `p_n(alpha_{n+1}) = alpha_{n+1}^{(n+1)/2}`, in closed form.
pub fn p_at_alpha(n: PolyIndex) -> PolyEval {
    gamma_power(n + 3, n + 1)
}

/// `p_n(alpha_{n+2}) = alpha_{n+2}^{(n+2)/2}`, in closed form.
pub fn p_at_alpha2(n: PolyIndex) -> PolyEval {
    gamma_power(n + 4, n + 2)
}

/// `(2 cos(pi / k))^power`, i.e. `alpha_{k-2}^{power/2}`.
fn gamma_power(k: usize, power: usize) -> PolyEval {
    let log2_gamma = 1.0 + (PI / k as f64).cos().log2();
    PolyEval::from_log2(power as f64 * log2_gamma)
}

/// All `n + 1` roots of `p_n` with multiplicity, ascending.
pub fn roots_of_p(n: PolyIndex) -> Vec<f64> {
    let mut roots = vec![0.0; n.div_ceil(2)];
    let denom = n + 2;
    for k in 1..=(n + 2) / 2 {
        if 2 * k == denom {
            roots.push(0.0);
        } else {
            let c = (k as f64 * PI / denom as f64).cos();
            roots.push(4.0 * c * c);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}
