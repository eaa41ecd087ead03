//! Closed dyadic intervals with outward rounding.
//!
//! The represented true value always lies in `[lo, hi]`. Every operation
//! takes a working precision `p` (significant bits kept per endpoint).

use super::dyadic::Dyadic;
use crate::error::RealError;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::cmp::Ordering;

#[derive(Clone, Debug)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo.cmp_val(&hi) != Ordering::Greater, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(d: Dyadic) -> Self {
        Interval { lo: d.clone(), hi: d }
    }

    pub fn zero() -> Self {
        Interval::point(Dyadic::zero())
    }

    pub fn from_rational(r: &BigRational, p: u32) -> Self {
        if let Some(d) = Dyadic::from_rational_exact(r) {
            return Interval::point(d);
        }
        Interval {
            lo: Dyadic::from_rational_dir(r, p, false),
            hi: Dyadic::from_rational_dir(r, p, true),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub_exact(&self.lo)
    }

    pub fn midpoint_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.sign() != num_bigint::Sign::Plus && self.hi.sign() != num_bigint::Sign::Minus
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        self.lo.to_rational() <= *r && *r <= self.hi.to_rational()
    }

    /// True if `self` is contained in `other` widened by `slack` ulps at 2^-p.
    pub fn within(&self, other: &Interval, slack_exp: i64) -> bool {
        let pad = Dyadic::new(BigInt::from(1), slack_exp);
        other.lo.sub_exact(&pad).cmp_val(&self.lo) != Ordering::Greater
            && self.hi.cmp_val(&other.hi.add_exact(&pad)) != Ordering::Greater
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn add(&self, other: &Interval, p: u32) -> Interval {
        Interval {
            lo: self.lo.add_exact(&other.lo).round_dir(p, false),
            hi: self.hi.add_exact(&other.hi).round_dir(p, true),
        }
    }

    pub fn sub(&self, other: &Interval, p: u32) -> Interval {
        self.add(&other.neg(), p)
    }

    pub fn mul(&self, other: &Interval, p: u32) -> Interval {
        let cands = [
            self.lo.mul_exact(&other.lo),
            self.lo.mul_exact(&other.hi),
            self.hi.mul_exact(&other.lo),
            self.hi.mul_exact(&other.hi),
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            lo = Dyadic::min(lo, c.clone());
            hi = Dyadic::max(hi, c.clone());
        }
        Interval { lo: lo.round_dir(p, false), hi: hi.round_dir(p, true) }
    }

    pub fn div(&self, other: &Interval, p: u32) -> Result<Interval, RealError> {
        if other.contains_zero() {
            return Err(RealError::DivisorStraddlesZero { bits: p });
        }
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for (a, b) in pairs {
            let d = a.div_dir(b, p, false);
            lo = Some(match lo {
                None => d,
                Some(x) => Dyadic::min(x, d),
            });
            let u = a.div_dir(b, p, true);
            hi = Some(match hi {
                None => u,
                Some(x) => Dyadic::max(x, u),
            });
        }
        Ok(Interval { lo: lo.unwrap(), hi: hi.unwrap() })
    }

    pub fn pow(&self, k: u32, p: u32) -> Interval {
        let mut acc = Interval::point(Dyadic::one());
        for _ in 0..k {
            acc = acc.mul(self, p);
        }
        acc
    }

    pub fn abs(&self) -> Interval {
        use num_bigint::Sign::*;
        match (self.lo.sign(), self.hi.sign()) {
            (Minus, Minus) => self.neg(),
            (Minus, _) => Interval {
                lo: Dyadic::zero(),
                hi: Dyadic::max(self.lo.neg(), self.hi.clone()),
            },
            _ => self.clone(),
        }
    }

    /// `Some(k)` when every value in the interval has floor `k`.
    pub fn resolved_floor(&self) -> Option<BigInt> {
        let fl = self.lo.floor();
        let fh = self.hi.floor();
        if fl == fh {
            Some(fl)
        } else {
            None
        }
    }

    /// Enclosure of the distance to the nearest integer.
    ///
    /// Uses k = round(midpoint); since |mid - k| <= 1/2, |x - k| lower-bounds
    /// dist(x, Z) over the whole interval, and dist(x, Z) <= 1/2 caps it.
    pub fn dist_to_int(&self, p: u32) -> Interval {
        let half = Dyadic::new(BigInt::from(1), -1);
        let mid = {
            let sum = self.lo.add_exact(&self.hi);
            Dyadic::new(sum.mant().clone(), sum.exp() - 1)
        };
        let k = mid.add_exact(&half).floor();
        let d = self.sub(&Interval::point(Dyadic::from_bigint(k)), p).abs();
        let hi = Dyadic::min(d.hi.clone(), half);
        let lo = if d.lo.cmp_val(&hi) == Ordering::Greater { hi.clone() } else { d.lo };
        Interval { lo, hi }
    }

    /// Certified strict comparison against a rational bound, if decidable at
    /// this precision.
    pub fn lt_rational(&self, r: &BigRational) -> Option<bool> {
        if self.hi.to_rational() < *r {
            Some(true)
        } else if self.lo.to_rational() >= *r {
            Some(false)
        } else {
            None
        }
    }

    pub fn is_sign_positive(&self) -> Option<bool> {
        use num_bigint::Sign::*;
        match (self.lo.sign(), self.hi.sign()) {
            (Plus, _) => Some(true),
            (_, Minus) | (_, NoSign) => Some(false),
            _ => None,
        }
    }

    pub fn max_abs_f64(&self) -> f64 {
        self.lo.to_f64().abs().max(self.hi.to_f64().abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn mul_encloses_products() {
        let a = Interval::from_rational(&rat(-1, 3), 64);
        let b = Interval::from_rational(&rat(2, 7), 64);
        let c = a.mul(&b, 64);
        assert!(c.contains_rational(&(rat(-1, 3) * rat(2, 7))));
    }

    #[test]
    fn div_excludes_zero_divisor() {
        let a = Interval::from_rational(&rat(1, 1), 64);
        let b = Interval::new(Dyadic::from_i64(-1), Dyadic::from_i64(1));
        assert!(a.div(&b, 64).is_err());
        let c = Interval::from_rational(&rat(1, 3), 64);
        let q = a.div(&c, 64).unwrap();
        assert!(q.contains_rational(&rat(3, 1)));
    }

    #[test]
    fn dist_to_int_basic() {
        let x = Interval::from_rational(&rat(27, 10), 64); // 2.7 -> dist 0.3
        let d = x.dist_to_int(64);
        assert!(d.contains_rational(&rat(3, 10)));
        let y = Interval::from_rational(&rat(-13, 10), 64); // -1.3 -> dist 0.3
        let d = y.dist_to_int(64);
        assert!(d.contains_rational(&rat(3, 10)));
    }

    #[test]
    fn resolved_floor() {
        let x = Interval::from_rational(&rat(5, 2), 64);
        assert_eq!(x.resolved_floor(), Some(BigInt::from(2)));
        let wide = Interval::new(Dyadic::from_i64(1), Dyadic::from_i64(2));
        assert_eq!(wide.resolved_floor(), None);
    }
}
