//! Arbitrary-precision dyadic rationals `mant * 2^exp`.
//!
//! All rounding is directed (toward -inf or +inf) so that interval endpoints
//! stay outward-correct.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        Dyadic { mant, exp }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Dyadic { mant: n, exp: 0 }
    }

    pub fn from_i64(n: i64) -> Self {
        Dyadic { mant: BigInt::from(n), exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.mant.sign()
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    /// Upper bound for log2(|self|): |self| < 2^approx_log2 and |self| >= 2^(approx_log2 - 1).
    fn approx_log2(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.mant.bits() as i64 + self.exp
    }

    /// Floor of the represented value as a BigInt.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as usize)
        } else {
            // BigInt shr is an arithmetic shift: rounds toward -inf.
            &self.mant >> ((-self.exp) as usize)
        }
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from(&self.mant << (self.exp as usize))
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << ((-self.exp) as usize))
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (m, e) = if bits > 53 {
            let s = (bits - 53) as i64;
            (&self.mant >> (s as usize), self.exp + s)
        } else {
            (self.mant.clone(), self.exp)
        };
        let m: i64 = m.try_into().expect("mantissa fits after truncation");
        let e = e.clamp(-2000, 2000) as i32;
        (m as f64) * 2f64.powi(e)
    }

    /// Round to at most `p` significant bits, toward -inf (`up = false`) or +inf.
    pub fn round_dir(&self, p: u32, up: bool) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= p as u64 {
            return self.clone();
        }
        let s = (bits - p as u64) as usize;
        let q = if up {
            -((-&self.mant) >> s)
        } else {
            &self.mant >> s
        };
        Dyadic { mant: q, exp: self.exp + s as i64 }
    }

    /// Exact sum (no rounding).
    pub fn add_exact(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << ((self.exp - e) as usize);
        let b = &other.mant << ((other.exp - e) as usize);
        Dyadic { mant: a + b, exp: e }
    }

    pub fn sub_exact(&self, other: &Dyadic) -> Dyadic {
        self.add_exact(&other.neg())
    }

    pub fn mul_exact(&self, other: &Dyadic) -> Dyadic {
        Dyadic { mant: &self.mant * &other.mant, exp: self.exp + other.exp }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    /// Directed quotient with roughly `p` significant bits.
    pub fn div_dir(&self, other: &Dyadic, p: u32, up: bool) -> Dyadic {
        assert!(!other.is_zero(), "division by zero dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let na = self.mant.bits() as i64;
        let nb = other.mant.bits() as i64;
        let k = (p as i64 + 2 + nb - na).max(0) as usize;
        let num = &self.mant << k;
        let q = if up {
            -((-num).div_floor(&other.mant))
        } else {
            num.div_floor(&other.mant)
        };
        Dyadic { mant: q, exp: self.exp - other.exp - k as i64 }.round_dir(p, up)
    }

    /// Directed conversion of a rational at `p` significant bits.
    pub fn from_rational_dir(r: &BigRational, p: u32, up: bool) -> Dyadic {
        let num = Dyadic::from_bigint(r.numer().clone());
        let den = Dyadic::from_bigint(r.denom().clone());
        num.div_dir(&den, p, up)
    }

    /// Exact conversion when the denominator is a power of two.
    pub fn from_rational_exact(r: &BigRational) -> Option<Dyadic> {
        let den = r.denom();
        if den.is_one() {
            return Some(Dyadic::from_bigint(r.numer().clone()));
        }
        let bits = den.bits();
        if den == &(BigInt::one() << ((bits - 1) as usize)) {
            return Some(Dyadic { mant: r.numer().clone(), exp: -((bits - 1) as i64) });
        }
        None
    }

    pub fn min(a: Dyadic, b: Dyadic) -> Dyadic {
        if a.cmp_val(&b) == Ordering::Greater { b } else { a }
    }

    pub fn max(a: Dyadic, b: Dyadic) -> Dyadic {
        if a.cmp_val(&b) == Ordering::Less { b } else { a }
    }

    pub fn cmp_val(&self, other: &Dyadic) -> Ordering {
        use Sign::*;
        match (self.sign(), other.sign()) {
            (NoSign, NoSign) => Ordering::Equal,
            (NoSign, Plus) | (Minus, NoSign) | (Minus, Plus) => Ordering::Less,
            (NoSign, Minus) | (Plus, NoSign) | (Plus, Minus) => Ordering::Greater,
            (Plus, Plus) | (Minus, Minus) => {
                let la = self.approx_log2();
                let lb = other.approx_log2();
                let mag = if la >= lb + 1 {
                    Ordering::Greater
                } else if lb >= la + 1 {
                    Ordering::Less
                } else {
                    // magnitudes within a factor of two: compare exactly
                    let e = self.exp.min(other.exp);
                    let a = self.mant.magnitude() << ((self.exp - e) as usize);
                    let b = other.mant.magnitude() << ((other.exp - e) as usize);
                    a.cmp(&b)
                };
                if self.sign() == Plus { mag } else { mag.reverse() }
            }
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_val(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn shr_is_floor_for_negatives() {
        // the rounding logic relies on BigInt >> behaving as floor division
        let x = BigInt::from(-5);
        assert_eq!(&x >> 1usize, BigInt::from(-3));
    }

    #[test]
    fn floor_matches_rational_floor() {
        let d = Dyadic::new(BigInt::from(-7), -1); // -3.5
        assert_eq!(d.floor(), BigInt::from(-4));
        let d = Dyadic::new(BigInt::from(7), -1); // 3.5
        assert_eq!(d.floor(), BigInt::from(3));
    }

    #[test]
    fn directed_division_brackets_quotient() {
        let a = Dyadic::from_i64(1);
        let b = Dyadic::from_i64(3);
        let lo = a.div_dir(&b, 64, false).to_rational();
        let hi = a.div_dir(&b, 64, true).to_rational();
        let third = rat(1, 3);
        assert!(lo <= third && third <= hi);
        let width = &hi - &lo;
        assert!(width < rat(1, 1 << 60));
    }

    #[test]
    fn rounding_directions() {
        let d = Dyadic::new(BigInt::from_i64(0b10110111).unwrap(), 0);
        let down = d.round_dir(4, false);
        let up = d.round_dir(4, true);
        assert!(down.to_rational() <= d.to_rational());
        assert!(up.to_rational() >= d.to_rational());
        assert!(down.mant().bits() <= 4);
    }

    #[test]
    fn cmp_across_scales() {
        let small = Dyadic::new(BigInt::from(1), -200);
        let big = Dyadic::new(BigInt::from(1), 200);
        assert_eq!(small.cmp_val(&big), Ordering::Less);
        assert_eq!(big.cmp_val(&big), Ordering::Equal);
        let neg = Dyadic::new(BigInt::from(-1), 200);
        assert_eq!(neg.cmp_val(&small), Ordering::Less);
    }
}
