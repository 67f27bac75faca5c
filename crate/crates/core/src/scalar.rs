//! Scalar abstractions.
//!
//! Geometry, the displacement algorithms and the coverage verifier only need
//! ordered field arithmetic, so they are written against [`Scalar`] and run
//! unchanged over `f32`, `f64` and exact rationals ([`Exact`]). Anything that
//! needs transcendental functions (quadrature, log-gamma) asks for [`Real`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// Arbitrary-precision rational used for exact geometric decisions.
pub type Exact = BigRational;

/// Ordered field element usable as a coordinate.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Largest integer not greater than `self`.
    fn floor(&self) -> Self;

    /// False for NaN and infinities.
    fn is_finite(&self) -> bool;

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable")
    }

    /// Conversion from `f64`; exact for [`Exact`] and `f64`, rounding for `f32`.
    fn from_real(x: f64) -> Self {
        Self::from_f64(x).expect("non-finite value")
    }

    fn to_real(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Midpoint of `self` and `other`.
    fn midpoint(&self, other: &Self) -> Self {
        (self.clone() + other.clone()) / Self::from_count(2)
    }

    fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.partial_cmp(other).expect("unordered scalar")
    }
}

impl Scalar for f64 {
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Scalar for f32 {
    fn floor(&self) -> Self {
        f32::floor(*self)
    }
    fn is_finite(&self) -> bool {
        f32::is_finite(*self)
    }
}

impl Scalar for BigRational {
    fn floor(&self) -> Self {
        BigRational::floor(self)
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn from_real(x: f64) -> Self {
        BigRational::from_float(x).expect("non-finite value")
    }
}

/// Floating-point scalar with the transcendental functions the analytic
/// module needs.
pub trait Real: Scalar + Float + Copy {
    fn constant(x: f64) -> Self {
        <Self as Scalar>::from_real(x)
    }
}

impl Real for f64 {}
impl Real for f32 {}

/// Exact rational `num/den`.
pub fn ratio(num: i64, den: i64) -> Exact {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Sum with Neumaier compensation; the result does not depend on platform
/// fused-multiply-add choices and is stable for long sums.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Integer `d`-th root if `n` is an exact `d`-th power.
pub fn exact_root(n: usize, d: usize) -> Option<usize> {
    let m = floor_int_root(n, d);
    (checked_pow(m, d) == Some(n)).then_some(m)
}

/// `⌊n^{1/d}⌋` computed without floating-point drift.
pub fn floor_int_root(n: usize, d: usize) -> usize {
    assert!(d >= 1);
    if d == 1 || n < 2 {
        return n;
    }
    let mut m = (n as f64).powf(1.0 / d as f64).round() as usize;
    while checked_pow(m, d).is_none_or(|p| p > n) {
        m -= 1;
    }
    while checked_pow(m + 1, d).is_some_and(|p| p <= n) {
        m += 1;
    }
    m
}

/// `⌊x^{1/d}⌋` for a nonnegative real `x`, corrected so that
/// `k^d ≤ x < (k+1)^d` holds in floating point.
pub fn floor_real_root(x: f64, d: usize) -> usize {
    assert!(d >= 1);
    if !(x >= 1.0) {
        return 0;
    }
    let pow = |k: usize| (k as f64).powi(d as i32);
    let mut k = x.powf(1.0 / d as f64).floor() as usize;
    while k > 0 && pow(k) > x {
        k -= 1;
    }
    while pow(k + 1) <= x {
        k += 1;
    }
    k
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots() {
        assert_eq!(exact_root(3600, 2), Some(60));
        assert_eq!(exact_root(27, 3), Some(3));
        assert_eq!(exact_root(10, 2), None);
        assert_eq!(exact_root(1, 5), Some(1));
        assert_eq!(floor_int_root(10, 2), 3);
        assert_eq!(floor_int_root(63, 3), 3);
        assert_eq!(floor_int_root(64, 3), 4);
        assert_eq!(floor_int_root(usize::MAX, 2), 4294967295);
        assert_eq!(floor_real_root(15.99, 2), 3);
        assert_eq!(floor_real_root(16.0, 2), 4);
        assert_eq!(floor_real_root(0.5, 2), 0);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn exact_conversion_is_lossless() {
        let x = 0.1_f64;
        let q = <Exact as Scalar>::from_real(x);
        assert_eq!(q.to_real(), x);
        assert_ne!(q, ratio(1, 10));
    }
}
