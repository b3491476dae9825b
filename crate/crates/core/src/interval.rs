//! Outward-rounded interval arithmetic over `f64` endpoints, and named boxes
//! of intervals.
//!
//! Basic operations (`+ - * /`, `sqrt`) use error-free transformations
//! (TwoSum, fused multiply-add residuals) to decide the rounding direction of
//! each endpoint, so results are the tightest floating-point enclosure of the
//! exact real result. Transcendental endpoints are evaluated with the platform
//! libm and padded outward by one ulp.
//!
//! The empty interval is a distinguished value; `lo()`/`hi()` on it are not
//! meaningful, use [`Interval::bounds`] when emptiness is possible.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::BoxError;

/// Products and quotients below this magnitude may have lost bits to
/// gradual underflow, where the fma residual is no longer exact.
const UNDERFLOW_GUARD: f64 = 1e-290;

fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_infinite() {
        if a.is_finite() && b.is_finite() {
            return if s > 0.0 { f64::MAX } else { f64::NEG_INFINITY };
        }
        return s;
    }
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    -add_down(-a, -b)
}

pub(crate) fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

pub(crate) fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if p.is_infinite() {
        if a.is_finite() && b.is_finite() && p > 0.0 {
            return f64::MAX;
        }
        return p;
    }
    if p.abs() < UNDERFLOW_GUARD {
        let d = p.next_down();
        return if (a > 0.0) == (b > 0.0) { d.max(0.0) } else { d };
    }
    if a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    -mul_down(-a, b)
}

/// `a / b` rounded toward −∞; `b` must be non-zero.
pub(crate) fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    if a.is_infinite() || b.is_infinite() {
        return a / b;
    }
    let q = a / b;
    if q.is_infinite() {
        return if q > 0.0 { f64::MAX } else { q };
    }
    if q.abs() < UNDERFLOW_GUARD {
        let d = q.next_down();
        return if (a > 0.0) == (b > 0.0) { d.max(0.0) } else { d };
    }
    // a - q*b is exact; the exact quotient exceeds q iff r/b > 0.
    let r = (-q).mul_add(b, a);
    if (r < 0.0) != (b < 0.0) && r != 0.0 {
        q.next_down()
    } else {
        q
    }
}

pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    -div_down(-a, b)
}

fn sqrt_down(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::MAX;
    }
    let r = x.sqrt();
    if (-r).mul_add(r, x) < 0.0 {
        r.next_down()
    } else {
        r
    }
}

fn sqrt_up(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return x;
    }
    let r = x.sqrt();
    if (-r).mul_add(r, x) > 0.0 {
        r.next_up()
    } else {
        r
    }
}

/// `x^k` for `x >= 0`, rounded down.
fn pow_down_nonneg(x: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    let mut base = x;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_down(acc, base);
        }
        e >>= 1;
        if e > 0 {
            base = mul_down(base, base);
        }
    }
    acc
}

/// `x^k` for `x >= 0`, rounded up.
fn pow_up_nonneg(x: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    let mut base = x;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_up(acc, base);
        }
        e >>= 1;
        if e > 0 {
            base = mul_up(base, base);
        }
    }
    acc
}

/// Lower bound on the real `k`-th root of `x >= 0`.
fn root_down_nonneg(x: f64, k: u32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::MAX;
    }
    let mut r = x.powf(1.0 / f64::from(k)).next_down();
    while r > 0.0 && pow_up_nonneg(r, k) > x {
        r = r.next_down();
    }
    r.max(0.0)
}

/// Upper bound on the real `k`-th root of `x >= 0`.
fn root_up_nonneg(x: f64, k: u32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return x;
    }
    let mut r = x.powf(1.0 / f64::from(k)).next_up();
    while pow_down_nonneg(r, k) < x {
        r = r.next_up();
    }
    r
}

fn exp_down(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let v = x.exp();
    if v.is_infinite() {
        return f64::MAX;
    }
    let v = v.next_down().max(0.0);
    if x > 0.0 { v.max(1.0) } else { v }
}

fn exp_up(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    let v = x.exp().next_up();
    if x < 0.0 { v.min(1.0) } else { v }
}

fn ln_down(x: f64) -> f64 {
    if x == 1.0 {
        return 0.0;
    }
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    if x.is_infinite() {
        return f64::MAX;
    }
    let v = x.ln().next_down();
    if x > 1.0 { v.max(0.0) } else { v }
}

fn ln_up(x: f64) -> f64 {
    if x == 1.0 {
        return 0.0;
    }
    if x == 0.0 {
        return f64::MIN;
    }
    let v = x.ln().next_up();
    if x < 1.0 { v.min(0.0) } else { v }
}

/// Does `[lo, hi]` (conservatively) contain some point `phase + 2πk`?
fn hits_phase(lo: f64, hi: f64, phase: f64) -> bool {
    let slack = 1e-9 + 1e-13 * lo.abs().max(hi.abs());
    let k_lo = ((lo - phase) / TAU - slack).ceil();
    let k_hi = ((hi - phase) / TAU + slack).floor();
    k_lo <= k_hi
}

/// A closed interval `[lo, hi]` with `f64` endpoints, possibly unbounded, or
/// the empty set.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    /// An enclosure of π.
    pub const PI: Interval = Interval {
        lo: 3.141592653589793,
        hi: 3.1415926535897936,
    };

    /// Builds `[lo, hi]`.
    ///
    /// Panics if `lo > hi`, either bound is NaN, or the interval would not
    /// contain a real number (`lo = +∞` or `hi = −∞`).
    pub fn new(lo: f64, hi: f64) -> Self {
        Self::try_new(lo, hi).unwrap_or_else(|| panic!("invalid interval bounds [{lo}, {hi}]"))
    }

    pub fn try_new(lo: f64, hi: f64) -> Option<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
        {
            None
        } else {
            Some(Self { lo, hi })
        }
    }

    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    pub fn empty() -> Self {
        Self::EMPTY
    }

    pub fn entire() -> Self {
        Self::ENTIRE
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// `Some((lo, hi))` for a non-empty interval.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        (!self.is_empty()).then_some((self.lo, self.hi))
    }

    pub fn is_finite(&self) -> bool {
        !self.is_empty() && self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Width rounded up; zero for the empty interval.
    pub fn width(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            sub_up(self.hi, self.lo)
        }
    }

    /// Midpoint, guaranteed to lie in the interval. Unbounded sides are
    /// replaced by the largest finite value.
    pub fn mid(&self) -> f64 {
        if self.is_empty() {
            return f64::NAN;
        }
        let lo = self.lo.max(f64::MIN);
        let hi = self.hi.min(f64::MAX);
        let m = 0.5 * lo + 0.5 * hi;
        m.clamp(lo, hi)
    }

    pub fn mag(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.lo.abs().max(self.hi.abs())
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `self ⊆ other`. The empty interval is a subset of everything.
    pub fn is_subset(&self, other: &Interval) -> bool {
        self.is_empty() || (other.lo <= self.lo && self.hi <= other.hi)
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        !self.intersect(other).is_empty()
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo > hi {
            Self::EMPTY
        } else {
            Self { lo, hi }
        }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Widens by `rel * width + abs` on each side.
    pub fn inflate(&self, rel: f64, abs: f64) -> Interval {
        if self.is_empty() {
            return *self;
        }
        let pad = add_up(mul_up(self.width(), rel), abs);
        Self {
            lo: sub_down(self.lo, pad),
            hi: add_up(self.hi, pad),
        }
    }

    /// Splits at the midpoint. Returns `None` when the interval is empty,
    /// unbounded or too narrow for both halves to be strictly smaller.
    pub fn split(&self) -> Option<(Interval, Interval)> {
        if !self.is_finite() {
            return None;
        }
        let m = self.mid();
        if m <= self.lo || m >= self.hi {
            return None;
        }
        Some((
            Self { lo: self.lo, hi: m },
            Self { lo: m, hi: self.hi },
        ))
    }

    pub fn sqr(&self) -> Interval {
        self.powi(2)
    }

    pub fn powi(&self, k: i32) -> Interval {
        if self.is_empty() {
            return *self;
        }
        match k {
            0 => Self::ONE,
            1 => *self,
            k if k < 0 => Self::ONE / self.powi(-k),
            k => {
                let k = k as u32;
                if k % 2 == 0 {
                    let m = self.abs();
                    Self {
                        lo: pow_down_nonneg(m.lo, k),
                        hi: pow_up_nonneg(m.hi, k),
                    }
                } else {
                    let lo = if self.lo >= 0.0 {
                        pow_down_nonneg(self.lo, k)
                    } else {
                        -pow_up_nonneg(-self.lo, k)
                    };
                    let hi = if self.hi >= 0.0 {
                        pow_up_nonneg(self.hi, k)
                    } else {
                        -pow_down_nonneg(-self.hi, k)
                    };
                    Self { lo, hi }
                }
            }
        }
    }

    /// Real `k`-th root for `k >= 1`; even roots are restricted to the
    /// non-negative part of the operand and return the principal root.
    pub fn root(&self, k: u32) -> Interval {
        if self.is_empty() || k == 0 {
            return Self::EMPTY;
        }
        if k == 1 {
            return *self;
        }
        if k % 2 == 0 {
            let d = self.intersect(&Self::new(0.0, f64::INFINITY));
            if d.is_empty() {
                return d;
            }
            Self {
                lo: root_down_nonneg(d.lo, k),
                hi: root_up_nonneg(d.hi, k),
            }
        } else {
            let lo = if self.lo >= 0.0 {
                root_down_nonneg(self.lo, k)
            } else {
                -root_up_nonneg(-self.lo, k)
            };
            let hi = if self.hi >= 0.0 {
                root_up_nonneg(self.hi, k)
            } else {
                -root_down_nonneg(-self.hi, k)
            };
            Self { lo, hi }
        }
    }

    pub fn exp(&self) -> Interval {
        if self.is_empty() {
            return *self;
        }
        Self {
            lo: exp_down(self.lo),
            hi: exp_up(self.hi),
        }
    }

    /// Natural logarithm over the positive part of the operand.
    pub fn ln(&self) -> Interval {
        if self.is_empty() || self.hi <= 0.0 {
            return Self::EMPTY;
        }
        Self {
            lo: ln_down(self.lo.max(0.0)),
            hi: ln_up(self.hi),
        }
    }

    /// Square root over the non-negative part of the operand.
    pub fn sqrt(&self) -> Interval {
        if self.is_empty() || self.hi < 0.0 {
            return Self::EMPTY;
        }
        Self {
            lo: sqrt_down(self.lo.max(0.0)),
            hi: sqrt_up(self.hi),
        }
    }

    pub fn sin(&self) -> Interval {
        self.periodic(f64::sin, FRAC_PI_2, -FRAC_PI_2)
    }

    pub fn cos(&self) -> Interval {
        self.periodic(f64::cos, 0.0, PI)
    }

    fn periodic(&self, f: fn(f64) -> f64, max_phase: f64, min_phase: f64) -> Interval {
        if self.is_empty() {
            return *self;
        }
        let unit = Self::new(-1.0, 1.0);
        if !self.is_finite() || self.width() >= TAU {
            return unit;
        }
        let (a, b) = (f(self.lo), f(self.hi));
        let mut lo = a.min(b).next_down();
        let mut hi = a.max(b).next_up();
        if hits_phase(self.lo, self.hi, max_phase) {
            hi = 1.0;
        }
        if hits_phase(self.lo, self.hi, min_phase) {
            lo = -1.0;
        }
        Self {
            lo: lo.max(-1.0),
            hi: hi.min(1.0),
        }
    }

    pub fn abs(&self) -> Interval {
        if self.is_empty() {
            return *self;
        }
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            -*self
        } else {
            Self {
                lo: 0.0,
                hi: (-self.lo).max(self.hi),
            }
        }
    }

    pub fn min(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Self::EMPTY;
        }
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    pub fn max(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Self::EMPTY;
        }
        Self {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Sign function extended to intervals: `[-1, 1]` whenever zero is
    /// contained, so it also bounds generalized derivatives of `|x|`.
    pub fn signum(&self) -> Interval {
        if self.is_empty() {
            *self
        } else if self.lo > 0.0 {
            Self::ONE
        } else if self.hi < 0.0 {
            -Self::ONE
        } else {
            Self::new(-1.0, 1.0)
        }
    }

    /// Division where the divisor may contain zero: the hull of both
    /// branches of the extended quotient.
    fn div_extended(&self, b: &Interval) -> Interval {
        let a = *self;
        if a.is_empty() || b.is_empty() {
            return Self::EMPTY;
        }
        if b.lo == 0.0 && b.hi == 0.0 {
            return Self::EMPTY;
        }
        if a.lo == 0.0 && a.hi == 0.0 {
            return Self::ZERO;
        }
        if b.lo > 0.0 || b.hi < 0.0 {
            return div_nonzero(&a, b);
        }
        if b.lo < 0.0 && b.hi > 0.0 {
            return Self::ENTIRE;
        }
        if b.lo == 0.0 {
            // b = [0, d], d > 0
            if a.lo >= 0.0 {
                Self {
                    lo: div_down(a.lo, b.hi),
                    hi: f64::INFINITY,
                }
            } else if a.hi <= 0.0 {
                Self {
                    lo: f64::NEG_INFINITY,
                    hi: div_up(a.hi, b.hi),
                }
            } else {
                Self::ENTIRE
            }
        } else {
            // b = [c, 0], c < 0
            if a.lo >= 0.0 {
                Self {
                    lo: f64::NEG_INFINITY,
                    hi: div_up(a.lo, b.lo),
                }
            } else if a.hi <= 0.0 {
                Self {
                    lo: div_down(a.hi, b.lo),
                    hi: f64::INFINITY,
                }
            } else {
                Self::ENTIRE
            }
        }
    }
}

fn div_nonzero(a: &Interval, b: &Interval) -> Interval {
    let (lo, hi) = if b.lo > 0.0 {
        if a.lo >= 0.0 {
            (div_down(a.lo, b.hi), div_up(a.hi, b.lo))
        } else if a.hi <= 0.0 {
            (div_down(a.lo, b.lo), div_up(a.hi, b.hi))
        } else {
            (div_down(a.lo, b.lo), div_up(a.hi, b.lo))
        }
    } else if a.lo >= 0.0 {
        (div_down(a.hi, b.hi), div_up(a.lo, b.lo))
    } else if a.hi <= 0.0 {
        (div_down(a.hi, b.lo), div_up(a.lo, b.hi))
    } else {
        (div_down(a.hi, b.hi), div_up(a.lo, b.hi))
    };
    Interval { lo, hi }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        Interval {
            lo: add_down(self.lo, rhs.lo),
            hi: add_up(self.hi, rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        Interval {
            lo: sub_down(self.lo, rhs.hi),
            hi: sub_up(self.hi, rhs.lo),
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        let (a, b) = (self, rhs);
        let lo = mul_down(a.lo, b.lo)
            .min(mul_down(a.lo, b.hi))
            .min(mul_down(a.hi, b.lo))
            .min(mul_down(a.hi, b.hi));
        let hi = mul_up(a.lo, b.lo)
            .max(mul_up(a.lo, b.hi))
            .max(mul_up(a.hi, b.lo))
            .max(mul_up(a.hi, b.hi));
        Interval { lo, hi }
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, rhs: Interval) -> Interval {
        self.div_extended(&rhs)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "[empty]")
        } else {
            // `+ 0.0` folds negative zero into zero.
            write!(f, "[{:?}, {:?}]", self.lo + 0.0, self.hi + 0.0)
        }
    }
}

/// An ordered assignment of intervals to named variables.
///
/// The name list is shared between boxes derived from the same problem, so
/// cloning and bisecting only copy the interval vector.
#[derive(Clone, PartialEq)]
pub struct VarBox {
    names: Arc<[String]>,
    ivs: Vec<Interval>,
}

impl VarBox {
    pub fn new(names: Arc<[String]>, ivs: Vec<Interval>) -> Self {
        assert_eq!(names.len(), ivs.len(), "one interval per variable");
        Self { names, ivs }
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, Interval)>) -> Self {
        let (names, ivs): (Vec<String>, Vec<Interval>) =
            pairs.into_iter().map(|(n, i)| (n.into(), i)).unzip();
        Self {
            names: names.into(),
            ivs,
        }
    }

    pub fn names(&self) -> &Arc<[String]> {
        &self.names
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.ivs
    }

    pub fn intervals_mut(&mut self) -> &mut [Interval] {
        &mut self.ivs
    }

    pub fn dim(&self) -> usize {
        self.ivs.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn get(&self, name: &str) -> Option<Interval> {
        self.index_of(name).map(|i| self.ivs[i])
    }

    pub fn set(&mut self, index: usize, iv: Interval) {
        self.ivs[index] = iv;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Interval)> + '_ {
        self.names.iter().map(String::as_str).zip(self.ivs.iter().copied())
    }

    /// A box is empty iff one of its components is.
    pub fn is_empty(&self) -> bool {
        self.ivs.iter().any(Interval::is_empty)
    }

    /// Max-norm width ‖B‖∞.
    pub fn width(&self) -> f64 {
        self.ivs.iter().map(Interval::width).fold(0.0, f64::max)
    }

    pub fn same_vars(&self, other: &VarBox) -> bool {
        Arc::ptr_eq(&self.names, &other.names) || self.names == other.names
    }

    pub fn is_subset(&self, other: &VarBox) -> bool {
        self.is_empty() || self.ivs.iter().zip(&other.ivs).all(|(a, b)| a.is_subset(b))
    }

    pub fn contains_point(&self, point: &[f64]) -> bool {
        self.ivs.iter().zip(point).all(|(iv, x)| iv.contains(*x))
    }

    pub fn intersect(&self, other: &VarBox) -> Result<VarBox, BoxError> {
        if !self.same_vars(other) {
            return Err(BoxError::MismatchedVariables);
        }
        Ok(Self {
            names: self.names.clone(),
            ivs: self.ivs.iter().zip(&other.ivs).map(|(a, b)| a.intersect(b)).collect(),
        })
    }

    /// Smallest box containing every box in `boxes`. `Ok(None)` for an empty
    /// collection; empty members contribute nothing.
    pub fn hull(boxes: &[VarBox]) -> Result<Option<VarBox>, BoxError> {
        let Some(first) = boxes.first() else {
            return Ok(None);
        };
        let mut acc = VarBox {
            names: first.names.clone(),
            ivs: vec![Interval::EMPTY; first.dim()],
        };
        for b in boxes {
            if !b.same_vars(first) {
                return Err(BoxError::MismatchedVariables);
            }
            if b.is_empty() {
                continue;
            }
            for (a, i) in acc.ivs.iter_mut().zip(&b.ivs) {
                *a = a.hull(i);
            }
        }
        Ok(Some(acc))
    }

    /// Splits the box at the midpoint of one variable.
    pub fn bisect(&self, var: usize) -> Result<(VarBox, VarBox), BoxError> {
        let iv = *self.ivs.get(var).ok_or(BoxError::NoSuchIndex(var))?;
        let (l, r) = iv.split().ok_or_else(|| BoxError::Unsplittable {
            var: self.names[var].clone(),
            interval: iv,
        })?;
        let mut left = self.clone();
        let mut right = self.clone();
        left.ivs[var] = l;
        right.ivs[var] = r;
        Ok((left, right))
    }

    pub fn bisect_named(&self, name: &str) -> Result<(VarBox, VarBox), BoxError> {
        let i = self
            .index_of(name)
            .ok_or_else(|| BoxError::UnknownVariable(name.to_string()))?;
        self.bisect(i)
    }
}

impl std::ops::Index<usize> for VarBox {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.ivs[i]
    }
}

impl std::ops::IndexMut<usize> for VarBox {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.ivs[i]
    }
}

impl fmt::Debug for VarBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

impl fmt::Display for VarBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, iv) in self.iter() {
            writeln!(f, "{name} : {iv}")?;
        }
        Ok(())
    }
}
