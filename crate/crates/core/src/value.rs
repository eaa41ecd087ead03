//! Certified numeric values: exact rationals with an interval fallback.
//!
//! Arithmetic stays on the exact path as long as both operands are rational;
//! anything touching an irrational enclosure degrades to intervals. Floor
//! resolution on the interval path demands `floor(lo) == floor(hi)` and
//! otherwise reports `Unresolved` so the caller can climb the precision
//! ladder.

use crate::error::RealError;
use crate::real::Interval;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub enum Value {
    Exact(BigRational),
    Approx(Interval),
}

/// Outcome of an operation that may need more precision.
#[derive(Debug, Clone)]
pub enum Resolved<T> {
    Done(T),
    /// A floor/comparison could not be decided at the current precision.
    Unresolved,
    Fail(RealError),
}

impl<T> Resolved<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Resolved<U> {
        match self {
            Resolved::Done(t) => Resolved::Done(f(t)),
            Resolved::Unresolved => Resolved::Unresolved,
            Resolved::Fail(e) => Resolved::Fail(e),
        }
    }
}

impl Value {
    pub fn zero() -> Self {
        Value::Exact(BigRational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Value::Exact(BigRational::from(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Value::Exact(BigRational::from(n))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Approx(_) => None,
        }
    }

    /// Exact integer value, if this is an exact rational with denominator 1.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Value::Exact(r) if r.denom().is_one() => Some(r.numer().clone()),
            _ => None,
        }
    }

    pub fn to_interval(&self, p: u32) -> Interval {
        match self {
            Value::Exact(r) => Interval::from_rational(r, p),
            Value::Approx(iv) => iv.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or_else(|| {
                // fall back through dyadic conversion for huge numerators
                Interval::from_rational(r, 64).midpoint_f64()
            }),
            Value::Approx(iv) => iv.midpoint_f64(),
        }
    }

    pub fn add(&self, other: &Value, p: u32) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Approx(self.to_interval(p).add(&other.to_interval(p), p)),
        }
    }

    pub fn sub(&self, other: &Value, p: u32) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a - b),
            _ => Value::Approx(self.to_interval(p).sub(&other.to_interval(p), p)),
        }
    }

    pub fn mul(&self, other: &Value, p: u32) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            _ => Value::Approx(self.to_interval(p).mul(&other.to_interval(p), p)),
        }
    }

    pub fn neg(&self) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(-a),
            Value::Approx(iv) => Value::Approx(iv.neg()),
        }
    }

    pub fn pow(&self, k: u32, p: u32) -> Value {
        match self {
            Value::Exact(a) => {
                let mut acc = BigRational::one();
                for _ in 0..k {
                    acc *= a;
                }
                Value::Exact(acc)
            }
            Value::Approx(iv) => Value::Approx(iv.pow(k, p)),
        }
    }

    pub fn abs(&self) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(a.abs()),
            Value::Approx(iv) => Value::Approx(iv.abs()),
        }
    }

    /// Floor; on the interval path requires a resolved floor.
    pub fn floor(&self) -> Resolved<BigInt> {
        match self {
            Value::Exact(r) => Resolved::Done(r.floor().numer().clone()),
            Value::Approx(iv) => match iv.resolved_floor() {
                Some(k) => Resolved::Done(k),
                None => Resolved::Unresolved,
            },
        }
    }

    /// Fractional part in [0, 1); requires the floor to resolve.
    pub fn frac(&self, p: u32) -> Resolved<Value> {
        match self.floor() {
            Resolved::Done(k) => Resolved::Done(self.sub(&Value::from_bigint(k), p)),
            Resolved::Unresolved => Resolved::Unresolved,
            Resolved::Fail(e) => Resolved::Fail(e),
        }
    }

    /// Distance to the nearest integer.
    pub fn dist_to_int(&self, p: u32) -> Value {
        match self {
            Value::Exact(r) => {
                let f = r - r.floor();
                let alt = BigRational::one() - &f;
                Value::Exact(if f <= alt { f } else { alt })
            }
            Value::Approx(iv) => Value::Approx(iv.dist_to_int(p)),
        }
    }

    /// Certified strict comparison `self < r`; `Unresolved` when the interval
    /// straddles the bound.
    pub fn lt_rational(&self, r: &BigRational) -> Resolved<bool> {
        match self {
            Value::Exact(a) => Resolved::Done(a < r),
            Value::Approx(iv) => match iv.lt_rational(r) {
                Some(b) => Resolved::Done(b),
                None => Resolved::Unresolved,
            },
        }
    }

    /// Certified sign; `Unresolved` when the interval straddles zero.
    pub fn is_positive(&self) -> Resolved<bool> {
        match self {
            Value::Exact(a) => Resolved::Done(a.is_positive()),
            Value::Approx(iv) => match iv.is_sign_positive() {
                Some(b) => Resolved::Done(b),
                None => Resolved::Unresolved,
            },
        }
    }

    /// Upper bound on |self - other|, as f64.
    pub fn abs_diff_upper(&self, other: &Value, p: u32) -> f64 {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => {
                let d = (a - b).abs();
                d.to_f64().unwrap_or(f64::INFINITY)
            }
            _ => self
                .to_interval(p)
                .sub(&other.to_interval(p), p)
                .abs()
                .hi()
                .to_f64(),
        }
    }

    /// True if the enclosure of `self - other` certifiably excludes zero.
    pub fn certified_nonequal(&self, other: &Value, p: u32) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a != b,
            _ => !self
                .to_interval(p)
                .sub(&other.to_interval(p), p)
                .contains_zero(),
        }
    }

    pub fn width_upper(&self) -> f64 {
        match self {
            Value::Exact(_) => 0.0,
            Value::Approx(iv) => iv.width().to_f64(),
        }
    }
}

pub fn rational_frac(r: &BigRational) -> BigRational {
    r - r.floor()
}

/// Exact distance to the nearest integer for a rational.
pub fn rational_dist_to_int(r: &BigRational) -> BigRational {
    let f = rational_frac(r);
    let alt = BigRational::one() - &f;
    if f <= alt {
        f
    } else {
        alt
    }
}

pub fn dyadic_sample_unit(rng: &mut impl rand::Rng, scale: i64) -> BigRational {
    // uniform dyadic rational in [0, 1) with 53 random bits
    let x: u64 = rng.gen::<u64>() >> 11;
    BigRational::new(BigInt::from(x), BigInt::one() << 53) * BigRational::from(BigInt::from(scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::RealConst;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exact_path_stays_exact() {
        let a = Value::Exact(rat(1, 3));
        let b = Value::Exact(rat(1, 6));
        match a.add(&b, 64) {
            Value::Exact(r) => assert_eq!(r, rat(1, 2)),
            _ => panic!("exact + exact must stay exact"),
        }
    }

    #[test]
    fn mixed_path_encloses() {
        let a = Value::Exact(rat(1, 2));
        let s2 = RealConst::sqrt_int(2).eval_interval(64).unwrap();
        let b = Value::Approx(s2);
        let c = a.mul(&b, 64);
        let iv = c.to_interval(64);
        assert!((iv.midpoint_f64() - 0.7071067811865476).abs() < 1e-12);
    }

    #[test]
    fn rational_dist() {
        assert_eq!(rational_dist_to_int(&rat(27, 10)), rat(3, 10));
        assert_eq!(rational_dist_to_int(&rat(-13, 10)), rat(3, 10));
        assert_eq!(rational_dist_to_int(&rat(1, 2)), rat(1, 2));
        assert_eq!(rational_dist_to_int(&rat(4, 1)), rat(0, 1));
    }
}
