//! Symbolic real constants over a fixed atom set, with rigorous interval
//! enclosures and an exact big-rational fast path.
//!
//! Atoms: rationals, square roots of nonnegative rationals, pi, logarithms of
//! positive rationals, and truncated Liouville sums `sum_{j<=J} 10^(-j!)`.
//! The set is closed under `+ - * /` (nonzero divisor).

use super::dyadic::Dyadic;
use super::interval::Interval;
use crate::error::RealError;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::sync::Arc;

/// Precision ladder: geometric refinement from `start` to `max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionConfig {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig { start_bits: 128, max_bits: 16384 }
    }
}

impl PrecisionConfig {
    pub fn ladder(&self) -> impl Iterator<Item = u32> {
        let start = self.start_bits.max(32);
        let max = self.max_bits.max(start);
        std::iter::successors(Some(start), move |&p| {
            if p >= max {
                None
            } else {
                Some((p * 2).min(max))
            }
        })
    }
}

pub const LIOUVILLE_MAX_TERMS: u32 = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RealConst {
    Rational(BigRational),
    /// Square root of a nonnegative rational that is not a perfect square
    /// (perfect squares simplify at construction).
    Sqrt(BigRational),
    Pi,
    /// Natural log of a positive rational != 1 (log 1 simplifies to 0).
    Log(BigRational),
    /// `sum_{j=1}^{J} 10^(-j!)`, exactly representable; J <= 6.
    Liouville(u32),
    Add(Arc<RealConst>, Arc<RealConst>),
    Sub(Arc<RealConst>, Arc<RealConst>),
    Mul(Arc<RealConst>, Arc<RealConst>),
    /// Division; the `u32` records the precision at which the divisor's
    /// enclosure was certified to exclude zero.
    Div(Arc<RealConst>, Arc<RealConst>, u32),
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

impl RealConst {
    pub fn rational(r: BigRational) -> Self {
        RealConst::Rational(r)
    }

    pub fn integer(n: i64) -> Self {
        RealConst::Rational(BigRational::from(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        RealConst::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Square root with perfect-square simplification.
    pub fn sqrt(r: BigRational) -> Result<Self, RealError> {
        if r.is_negative() {
            return Err(RealError::InvalidAtom(format!("sqrt of negative rational {}", r)));
        }
        match rational_sqrt(&r) {
            Some(s) => Ok(RealConst::Rational(s)),
            None => Ok(RealConst::Sqrt(r)),
        }
    }

    pub fn sqrt_int(n: u64) -> Self {
        Self::sqrt(BigRational::from(BigInt::from(n))).expect("nonnegative")
    }

    pub fn log(r: BigRational) -> Result<Self, RealError> {
        if !r.is_positive() {
            return Err(RealError::InvalidAtom(format!("log of nonpositive rational {}", r)));
        }
        if r.is_one() {
            Ok(RealConst::Rational(BigRational::zero()))
        } else {
            Ok(RealConst::Log(r))
        }
    }

    pub fn liouville(terms: u32) -> Result<Self, RealError> {
        if terms == 0 || terms > LIOUVILLE_MAX_TERMS {
            return Err(RealError::InvalidAtom(format!(
                "liouville truncation must have 1..={} terms, got {}",
                LIOUVILLE_MAX_TERMS, terms
            )));
        }
        Ok(RealConst::Liouville(terms))
    }

    pub fn liouville_value(terms: u32) -> BigRational {
        let mut acc = BigRational::zero();
        let ten = BigInt::from(10);
        let mut fact: u64 = 1;
        for j in 1..=terms as u64 {
            fact *= j;
            acc += BigRational::new(BigInt::one(), num_traits::pow::pow(ten.clone(), fact as usize));
        }
        acc
    }

    fn exact_is(c: &RealConst, v: i64) -> bool {
        matches!(c, RealConst::Rational(r) if *r == BigRational::from(BigInt::from(v)))
    }

    pub fn add(a: RealConst, b: RealConst) -> Self {
        match (&a, &b) {
            (RealConst::Rational(x), RealConst::Rational(y)) => RealConst::Rational(x + y),
            _ if Self::exact_is(&a, 0) => b,
            _ if Self::exact_is(&b, 0) => a,
            _ => RealConst::Add(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn sub(a: RealConst, b: RealConst) -> Self {
        match (&a, &b) {
            (RealConst::Rational(x), RealConst::Rational(y)) => RealConst::Rational(x - y),
            _ if Self::exact_is(&b, 0) => a,
            _ => RealConst::Sub(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn mul(a: RealConst, b: RealConst) -> Self {
        match (&a, &b) {
            (RealConst::Rational(x), RealConst::Rational(y)) => RealConst::Rational(x * y),
            _ if Self::exact_is(&a, 0) || Self::exact_is(&b, 0) => {
                RealConst::Rational(BigRational::zero())
            }
            _ if Self::exact_is(&a, 1) => b,
            _ if Self::exact_is(&b, 1) => a,
            _ => RealConst::Mul(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn neg(a: RealConst) -> Self {
        Self::sub(RealConst::Rational(BigRational::zero()), a)
    }

    /// Division; certifies at construction time that the divisor's enclosure
    /// excludes zero at some precision on the ladder.
    pub fn div(a: RealConst, b: RealConst) -> Result<Self, RealError> {
        if let Some(r) = b.as_exact_rational() {
            if r.is_zero() {
                return Err(RealError::ZeroDivisor);
            }
            if let Some(ra) = a.as_exact_rational() {
                return Ok(RealConst::Rational(ra / r));
            }
        }
        let cfg = PrecisionConfig::default();
        for p in cfg.ladder() {
            let iv = b.eval_interval(p)?;
            if !iv.contains_zero() {
                return Ok(RealConst::Div(Arc::new(a), Arc::new(b), p));
            }
        }
        Err(RealError::DivisorStraddlesZero { bits: cfg.max_bits })
    }

    /// Exact rational value, when every atom is rational after simplification.
    pub fn as_exact_rational(&self) -> Option<BigRational> {
        match self {
            RealConst::Rational(r) => Some(r.clone()),
            RealConst::Liouville(j) => Some(Self::liouville_value(*j)),
            RealConst::Sqrt(r) => rational_sqrt(r),
            RealConst::Log(r) => {
                if r.is_one() {
                    Some(BigRational::zero())
                } else {
                    None
                }
            }
            RealConst::Pi => None,
            RealConst::Add(a, b) => Some(a.as_exact_rational()? + b.as_exact_rational()?),
            RealConst::Sub(a, b) => Some(a.as_exact_rational()? - b.as_exact_rational()?),
            RealConst::Mul(a, b) => Some(a.as_exact_rational()? * b.as_exact_rational()?),
            RealConst::Div(a, b, _) => {
                let d = b.as_exact_rational()?;
                if d.is_zero() {
                    None
                } else {
                    Some(a.as_exact_rational()? / d)
                }
            }
        }
    }

    /// Rigorous enclosure at `p` bits of working precision (`p >= 32`).
    pub fn eval_interval(&self, p: u32) -> Result<Interval, RealError> {
        assert!(p >= 32, "precision below 32 bits");
        self.eval_at(p + 8)
    }

    fn eval_at(&self, p: u32) -> Result<Interval, RealError> {
        match self {
            RealConst::Rational(r) => Ok(Interval::from_rational(r, p)),
            RealConst::Liouville(j) => Ok(Interval::from_rational(&Self::liouville_value(*j), p)),
            RealConst::Sqrt(r) => Ok(sqrt_enclosure(r, p)),
            RealConst::Pi => Ok(pi_enclosure(p)),
            RealConst::Log(r) => Ok(log_enclosure(r, p)),
            RealConst::Add(a, b) => Ok(a.eval_at(p)?.add(&b.eval_at(p)?, p)),
            RealConst::Sub(a, b) => Ok(a.eval_at(p)?.sub(&b.eval_at(p)?, p)),
            RealConst::Mul(a, b) => Ok(a.eval_at(p)?.mul(&b.eval_at(p)?, p)),
            RealConst::Div(a, b, cert) => {
                // the constructor certified nonzero at `cert` bits; evaluate
                // the divisor at whichever precision is higher
                let pd = p.max(*cert);
                let den = b.eval_at(pd)?;
                a.eval_at(p)?.div(&den, p)
            }
        }
    }

    pub fn approx_f64(&self) -> f64 {
        match self.as_exact_rational() {
            Some(r) => r.to_f64().unwrap_or(f64::NAN),
            None => self
                .eval_interval(128)
                .map(|iv| iv.midpoint_f64())
                .unwrap_or(f64::NAN),
        }
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for RealConst {
    /// Renders in the constant-expression grammar accepted by the parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealConst::Rational(r) => {
                if r.is_negative() {
                    write!(f, "(0 - ")?;
                    fmt_rational(&-r, f)?;
                    write!(f, ")")
                } else {
                    fmt_rational(r, f)
                }
            }
            RealConst::Sqrt(r) => {
                write!(f, "sqrt(")?;
                fmt_rational(r, f)?;
                write!(f, ")")
            }
            RealConst::Pi => write!(f, "pi"),
            RealConst::Log(r) => {
                write!(f, "log(")?;
                fmt_rational(r, f)?;
                write!(f, ")")
            }
            RealConst::Liouville(j) => write!(f, "liouville({})", j),
            RealConst::Add(a, b) => write!(f, "({} + {})", a, b),
            RealConst::Sub(a, b) => write!(f, "({} - {})", a, b),
            RealConst::Mul(a, b) => write!(f, "({}*{})", a, b),
            RealConst::Div(a, b, _) => write!(f, "({}/{})", a, b),
        }
    }
}

/// Enclosure of sqrt(r) with relative width <= 2^(1-p).
///
/// Normalizes r into [1, 4) by an even power of two, then takes the integer
/// square root of floor(r' * 4^p): s <= sqrt(r')*2^p < s + 2.
fn sqrt_enclosure(r: &BigRational, p: u32) -> Interval {
    if r.is_zero() {
        return Interval::zero();
    }
    debug_assert!(r.is_positive());
    let four = BigRational::from(BigInt::from(4));
    // r * 4^(-k) in [1, 4)
    let bits_num = r.numer().bits() as i64;
    let bits_den = r.denom().bits() as i64;
    let mut k = (bits_num - bits_den) / 2;
    let mut scaled = r / pow_rational(&four, k);
    while scaled >= four {
        scaled /= &four;
        k += 1;
    }
    while scaled < BigRational::one() {
        scaled *= &four;
        k -= 1;
    }
    let shifted = (scaled.numer() << (2 * p as usize)).div_floor(scaled.denom());
    let s = shifted.sqrt();
    let lo = Dyadic::new(s.clone(), -(p as i64) + k);
    let hi = Dyadic::new(s + 2, -(p as i64) + k);
    Interval::new(lo, hi)
}

fn pow_rational(base: &BigRational, k: i64) -> BigRational {
    let mut acc = BigRational::one();
    let b = if k >= 0 { base.clone() } else { base.recip() };
    for _ in 0..k.unsigned_abs() {
        acc *= &b;
    }
    acc
}

/// Scaled alternating arctangent series: returns (sum, err) with
/// |sum * 2^-prec - atan(1/x)| <= err * 2^-prec.
///
/// power_k tracks floor-ish of 2^prec / x^(2k+1); each integer division
/// introduces at most one ulp, so after K terms the accumulated error is
/// bounded by (K+2)^2 ulps plus the alternating-series tail.
fn atan_inv_scaled(x: u64, prec: u32) -> (BigInt, BigInt) {
    let one_scaled = BigInt::one() << (prec as usize);
    let x_big = BigInt::from(x);
    let x2 = &x_big * &x_big;
    let mut power = one_scaled.div_floor(&x_big);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        let term = power.div_floor(&BigInt::from(2 * k + 1));
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        if term.is_zero() {
            break;
        }
        power = power.div_floor(&x2);
        k += 1;
    }
    // one-sided ulp errors per division plus tail (<= 1 ulp once term is 0)
    let err = BigInt::from((k + 2) * (k + 2) + 2);
    (sum, err)
}

/// Machin's formula: pi = 16 atan(1/5) - 4 atan(1/239).
fn pi_enclosure(p: u32) -> Interval {
    let prec = p + 32;
    let (a, ea) = atan_inv_scaled(5, prec);
    let (b, eb) = atan_inv_scaled(239, prec);
    let val = 16 * &a - 4 * &b;
    let err = 16 * ea + 4 * eb;
    let lo = Dyadic::new(&val - &err, -(prec as i64)).round_dir(p, false);
    let hi = Dyadic::new(val + err, -(prec as i64)).round_dir(p, true);
    Interval::new(lo, hi)
}

/// Scaled atanh series for 0 < y = a/b <= 1/3: returns (sum, err) with
/// |sum * 2^-prec - atanh(y)| <= err * 2^-prec.
fn atanh_scaled(a: &BigInt, b: &BigInt, prec: u32) -> (BigInt, BigInt) {
    debug_assert!(a.is_positive() && b.is_positive());
    let a2 = a * a;
    let b2 = b * b;
    let mut power = (a << (prec as usize)).div_floor(b);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        let term = power.div_floor(&BigInt::from(2 * k + 1));
        sum += &term;
        if term.is_zero() {
            break;
        }
        power = (&power * &a2).div_floor(&b2);
        k += 1;
    }
    // positive series, floor-truncated terms: deficit <= (K+2)^2 ulps;
    // tail after term hits zero: <= (9/8) * 1/(2k+3) < 1 ulp scale margin
    let err = BigInt::from((k + 2) * (k + 2) + 2);
    (sum, err)
}

/// log 2 = 2 atanh(1/3).
fn log2_scaled(prec: u32) -> (BigInt, BigInt) {
    let (s, e) = atanh_scaled(&BigInt::one(), &BigInt::from(3), prec);
    (2 * s, 2 * e)
}

/// Enclosure of log(r) for positive rational r != 1.
///
/// Reduces r = 2^e * r' with r' in [1/2, 2), then
/// log r = e log 2 + 2 atanh((r'-1)/(r'+1)) with |y| <= 1/3.
fn log_enclosure(r: &BigRational, p: u32) -> Interval {
    let prec = p + 32;
    let one = BigRational::one();
    let two = BigRational::from(BigInt::from(2));
    let half = one.clone() / &two;
    let mut e: i64 = r.numer().bits() as i64 - r.denom().bits() as i64;
    let mut reduced = r / pow_rational(&two, e);
    while reduced >= two {
        reduced /= &two;
        e += 1;
    }
    while reduced < half {
        reduced *= &two;
        e -= 1;
    }
    let y = (&reduced - &one) / (&reduced + &one);
    let (mut sum, mut err) = if y.is_zero() {
        (BigInt::zero(), BigInt::zero())
    } else {
        let a = y.numer().abs();
        let (s, er) = atanh_scaled(&a, y.denom(), prec);
        if y.is_negative() {
            (-2 * s, 2 * er)
        } else {
            (2 * s, 2 * er)
        }
    };
    if e != 0 {
        let (l2, el2) = log2_scaled(prec);
        sum += BigInt::from(e) * &l2;
        err += BigInt::from(e.unsigned_abs()) * el2;
    }
    let lo = Dyadic::new(&sum - &err, -(prec as i64)).round_dir(p, false);
    let hi = Dyadic::new(sum + err, -(prec as i64)).round_dir(p, true);
    Interval::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Independent Newton-iteration oracle: upper bound x_k for sqrt(r)
    /// (Newton from above), paired lower bound r / x_k.
    fn newton_sqrt_bounds(r: &BigRational, iters: usize) -> (BigRational, BigRational) {
        let mut x = r.clone() + BigRational::one();
        let two = BigRational::from(BigInt::from(2));
        for _ in 0..iters {
            x = (&x + r / &x) / &two;
        }
        (r / &x, x)
    }

    #[test]
    fn sqrt2_matches_newton_oracle() {
        let c = RealConst::sqrt(rat(2, 1)).unwrap();
        let iv = c.eval_interval(128).unwrap();
        // Newton converges quadratically: 12 iterations give far more than
        // 256 correct bits, so the oracle bracket is much tighter than the
        // 128-bit kernel enclosure and must sit inside it.
        let (lo, hi) = newton_sqrt_bounds(&rat(2, 1), 12);
        assert!(iv.lo().to_rational() <= lo);
        assert!(hi <= iv.hi().to_rational());
        // enclosure is tight: width <= 2^-120
        assert!(iv.width().to_rational() < rat(1, 1 << 62) * rat(1, 1 << 58));
    }

    #[test]
    fn perfect_square_simplifies() {
        let c = RealConst::sqrt(rat(4, 9)).unwrap();
        assert_eq!(c.as_exact_rational(), Some(rat(2, 3)));
        let c = RealConst::sqrt(rat(2, 1)).unwrap();
        assert_eq!(c.as_exact_rational(), None);
    }

    #[test]
    fn sqrt4_over_2_is_one() {
        let c = RealConst::div(
            RealConst::sqrt(rat(4, 1)).unwrap(),
            RealConst::integer(2),
        )
        .unwrap();
        assert_eq!(c.as_exact_rational(), Some(rat(1, 1)));
    }

    #[test]
    fn liouville_hand_values() {
        // 10^-1 + 10^-2 = 0.11
        assert_eq!(RealConst::liouville_value(2), rat(11, 100));
        // 10^-1 + 10^-2 + 10^-6 = 0.110001
        assert_eq!(RealConst::liouville_value(3), rat(110001, 1_000_000));
        let c = RealConst::liouville(3).unwrap();
        let iv = c.eval_interval(64).unwrap();
        assert!(iv.contains_rational(&rat(110001, 1_000_000)));
        assert!(RealConst::liouville(7).is_err());
        assert!(RealConst::liouville(0).is_err());
    }

    #[test]
    fn pi_against_reference_digits() {
        // 3.14159265358979323846264338327950288 < pi < ...289
        let lo = "314159265358979323846264338327950288"
            .parse::<BigInt>()
            .unwrap();
        let scale = BigInt::from(10u8).pow(35);
        let pi_lo = BigRational::new(lo.clone(), scale.clone());
        let pi_hi = BigRational::new(lo + 1, scale);
        // the kernel enclosure at 160 bits is far tighter than the 36-digit
        // reference bracket, so it must sit inside it
        let iv = RealConst::Pi.eval_interval(160).unwrap();
        assert!(pi_lo <= iv.lo().to_rational());
        assert!(iv.hi().to_rational() <= pi_hi);
    }

    #[test]
    fn log2_against_reference_digits() {
        // log 2 = 0.693147180559945309417232121458...
        let lo = "693147180559945309417232121458".parse::<BigInt>().unwrap();
        let scale = BigInt::from(10u8).pow(30);
        let l_lo = BigRational::new(lo.clone(), scale.clone());
        let l_hi = BigRational::new(lo + 1, scale);
        let iv = RealConst::log(rat(2, 1)).unwrap().eval_interval(128).unwrap();
        assert!(l_lo <= iv.lo().to_rational());
        assert!(iv.hi().to_rational() <= l_hi);
    }

    #[test]
    fn log_reduction_consistency() {
        // log(8) = 3 log(2)
        let l8 = RealConst::log(rat(8, 1)).unwrap().eval_interval(128).unwrap();
        let l2 = RealConst::log(rat(2, 1)).unwrap().eval_interval(128).unwrap();
        let three = Interval::from_rational(&rat(3, 1), 128);
        let t = l2.mul(&three, 128);
        // intervals must overlap
        assert!(l8.lo().to_rational() <= t.hi().to_rational());
        assert!(t.lo().to_rational() <= l8.hi().to_rational());
        // log(1/3) = -log(3)
        let a = RealConst::log(rat(1, 3)).unwrap().eval_interval(128).unwrap();
        let b = RealConst::log(rat(3, 1)).unwrap().eval_interval(128).unwrap().neg();
        assert!(a.lo().to_rational() <= b.hi().to_rational());
        assert!(b.lo().to_rational() <= a.hi().to_rational());
        assert_eq!(
            RealConst::log(rat(1, 1)).unwrap().as_exact_rational(),
            Some(rat(0, 1))
        );
    }

    #[test]
    fn monotone_refinement() {
        let consts = [
            RealConst::sqrt(rat(2, 1)).unwrap(),
            RealConst::Pi,
            RealConst::log(rat(2, 1)).unwrap(),
            RealConst::add(RealConst::Pi, RealConst::sqrt(rat(3, 1)).unwrap()),
        ];
        for c in &consts {
            let coarse = c.eval_interval(64).unwrap();
            let fine = c.eval_interval(256).unwrap();
            assert!(fine.within(&coarse, -60), "refinement escaped for {}", c);
            assert!(fine.width().to_rational() < coarse.width().to_rational());
        }
    }

    #[test]
    fn division_certificate() {
        let tiny = RealConst::sub(
            RealConst::sqrt(rat(2, 1)).unwrap(),
            RealConst::sqrt(rat(2, 1)).unwrap(),
        );
        // sqrt2 - sqrt2 == 0 but is not syntactically rational: the ladder
        // never separates it from zero
        assert!(matches!(
            RealConst::div(RealConst::integer(1), tiny),
            Err(RealError::DivisorStraddlesZero { .. })
        ));
        assert!(matches!(
            RealConst::div(RealConst::integer(1), RealConst::integer(0)),
            Err(RealError::ZeroDivisor)
        ));
        let ok = RealConst::div(
            RealConst::integer(1),
            RealConst::mul(RealConst::integer(2), RealConst::sqrt_int(3)),
        )
        .unwrap();
        let iv = ok.eval_interval(128).unwrap();
        // 1/(2 sqrt 3) = 0.2886751345948129...
        assert!((iv.midpoint_f64() - 0.2886751345948129).abs() < 1e-12);
    }

    #[test]
    fn atom_relative_width_bound() {
        // relative width <= 2^(2-p) for atom enclosures
        for (c, p) in [
            (RealConst::sqrt(rat(2, 1)).unwrap(), 64u32),
            (RealConst::sqrt(rat(1, 10_000_000)).unwrap(), 64),
            (RealConst::Pi, 96),
            (RealConst::log(rat(7, 3)).unwrap(), 64),
            (RealConst::log(rat(1_000_001, 1_000_000)).unwrap(), 64),
        ] {
            let iv = c.eval_interval(p).unwrap();
            let w = iv.width().to_rational();
            let mag = iv.lo().to_rational().abs();
            let bound = BigRational::new(BigInt::from(4), BigInt::one() << (p as usize)) * mag;
            assert!(w <= bound, "relative width too large for {} at {} bits", c, p);
        }
    }
}
