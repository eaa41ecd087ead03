//! Partial normal form for constants: Q-linear combinations of monomials
//! `sqrt(core) * prod atom^exp` over the irrational atoms pi and log(r).
//! Distinct monomials are treated as Q-linearly independent (true for square
//! roots of distinct squarefree integers; a declared assumption once pi or
//! logarithms are mixed in), which is what the exact-zero, sign, and
//! ratio-rationality decisions rely on.

use crate::real::RealConst;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum IrratAtom {
    Pi,
    Log(BigRational),
}

/// The irrational part of a monomial: a squarefree radicand (1 for none)
/// and the transcendental atom exponents.
pub(crate) type MonoKey = (BigInt, BTreeMap<IrratAtom, i32>);

fn trivial_key() -> MonoKey {
    (BigInt::one(), BTreeMap::new())
}

/// Multiply two keys; square parts of the combined radicand move into the
/// returned rational factor.
fn key_mul(a: &MonoKey, b: &MonoKey) -> (BigRational, MonoKey) {
    let (s, core) = extract_square(&a.0 * &b.0);
    let mut atoms = a.1.clone();
    for (at, e) in &b.1 {
        *atoms.entry(at.clone()).or_insert(0) += e;
    }
    atoms.retain(|_, e| *e != 0);
    (BigRational::from(s), (core, atoms))
}

/// Sign of the irrational part: radicals and pi are positive; log(r) carries
/// the sign of r - 1.
fn key_sign(key: &MonoKey) -> Ordering {
    let mut neg = false;
    for (a, e) in &key.1 {
        if let IrratAtom::Log(r) = a {
            if r < &BigRational::one() && e % 2 != 0 {
                neg = !neg;
            }
        }
    }
    if neg {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Q-linear combination of independent monomials.
#[derive(Clone, Debug, PartialEq, Default)]
pub(crate) struct LinComb {
    terms: BTreeMap<MonoKey, BigRational>,
}

impl LinComb {
    pub fn zero() -> Self {
        LinComb::default()
    }

    pub fn rational(r: BigRational) -> Self {
        let mut l = LinComb::zero();
        if !r.is_zero() {
            l.terms.insert(trivial_key(), r);
        }
        l
    }

    fn single(key: MonoKey, coeff: BigRational) -> Self {
        let mut l = LinComb::zero();
        if !coeff.is_zero() {
            l.terms.insert(key, coeff);
        }
        l
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|k| *k == trivial_key())
    }

    pub fn add(&self, other: &LinComb) -> LinComb {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            let entry = terms.entry(k.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(k);
            }
        }
        LinComb { terms }
    }

    pub fn neg(&self) -> LinComb {
        LinComb {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &LinComb) -> LinComb {
        let mut out = LinComb::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let (extra, key) = key_mul(k1, k2);
                out = out.add(&LinComb::single(key, c1 * c2 * extra));
            }
        }
        out
    }

    /// Inverse of a single-monomial combination; sums are not rationalized.
    pub fn inv(&self) -> Option<LinComb> {
        if self.terms.len() != 1 {
            return None;
        }
        let (key, coeff) = self.terms.iter().next().unwrap();
        // 1/(c sqrt(d) A) = (1/(c d)) sqrt(d) A^-1
        let rat = BigRational::one() / (coeff * BigRational::from(key.0.clone()));
        let atoms = key.1.iter().map(|(a, e)| (a.clone(), -e)).collect();
        Some(LinComb::single((key.0.clone(), atoms), rat))
    }

    /// `Some(r)` when `self = r * other` as linear combinations.
    pub fn proportion_to(&self, other: &LinComb) -> Option<BigRational> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let (k0, c0) = other.terms.iter().next().unwrap();
        let r = self.terms.get(k0)? / c0;
        for (k, c) in &other.terms {
            if self.terms.get(k)? != &(&r * c) {
                return None;
            }
        }
        Some(r)
    }

    /// Certified sign when decidable from the structure alone: zero, or a
    /// single monomial, or all monomials pulling the same way.
    pub fn structural_sign(&self) -> Option<Ordering> {
        if self.is_zero() {
            return Some(Ordering::Equal);
        }
        let mut signs = self.terms.iter().map(|(k, c)| {
            let s = key_sign(k);
            if c.is_negative() {
                s.reverse()
            } else {
                s
            }
        });
        let first = signs.next().unwrap();
        if signs.all(|s| s == first) {
            Some(first)
        } else {
            None
        }
    }
}

/// n = s^2 * core with core squarefree up to the trial-division bound; a
/// large leftover factor is kept whole, which only makes equality checks
/// more conservative.
pub(crate) fn extract_square(n: BigInt) -> (BigInt, BigInt) {
    debug_assert!(n.is_positive());
    let mut s = BigInt::one();
    let mut core = BigInt::one();
    let mut m = n;
    let mut d = 2u64;
    while BigInt::from(d) * BigInt::from(d) <= m && d < 100_000 {
        let dd = BigInt::from(d);
        let mut e = 0u32;
        while (&m % &dd).is_zero() {
            m /= &dd;
            e += 1;
        }
        if e > 0 {
            s *= dd.pow(e / 2);
            if e % 2 == 1 {
                core *= BigInt::from(d);
            }
        }
        d += 1;
    }
    if !m.is_one() {
        let r = m.sqrt();
        if &r * &r == m {
            s *= r;
        } else {
            core *= m;
        }
    }
    (s, core)
}

/// Normal form of a constant; `None` only for division by a sum.
pub(crate) fn normal_form(c: &RealConst) -> Option<LinComb> {
    match c {
        RealConst::Rational(r) => Some(LinComb::rational(r.clone())),
        RealConst::Liouville(j) => Some(LinComb::rational(RealConst::liouville_value(*j))),
        RealConst::Sqrt(r) => {
            // sqrt(p/q) = sqrt(pq)/q
            let pq = r.numer() * r.denom();
            if pq.is_zero() {
                return Some(LinComb::zero());
            }
            let (s, core) = extract_square(pq);
            Some(LinComb::single(
                (core, BTreeMap::new()),
                BigRational::new(s, r.denom().clone()),
            ))
        }
        RealConst::Pi => Some(LinComb::single(
            (BigInt::one(), [(IrratAtom::Pi, 1)].into_iter().collect()),
            BigRational::one(),
        )),
        RealConst::Log(r) => Some(LinComb::single(
            (
                BigInt::one(),
                [(IrratAtom::Log(r.clone()), 1)].into_iter().collect(),
            ),
            BigRational::one(),
        )),
        RealConst::Add(a, b) => Some(normal_form(a)?.add(&normal_form(b)?)),
        RealConst::Sub(a, b) => Some(normal_form(a)?.add(&normal_form(b)?.neg())),
        RealConst::Mul(a, b) => Some(normal_form(a)?.mul(&normal_form(b)?)),
        RealConst::Div(a, b, _) => Some(normal_form(a)?.mul(&normal_form(b)?.inv()?)),
    }
}

/// `Some(true)` when c1/c2 is rational, `Some(false)` when the normal forms
/// are not proportional (irrational under the independence assumption),
/// `None` when no normal form exists or c2 is zero.
pub(crate) fn ratio_rational(c1: &RealConst, c2: &RealConst) -> Option<bool> {
    let l1 = normal_form(c1)?;
    let l2 = normal_form(c2)?;
    if l2.is_zero() {
        return None;
    }
    Some(l1.proportion_to(&l2).is_some())
}

/// The exact rational ratio c1/c2 when the normal forms are proportional.
/// Outer `None`: no normal form or zero divisor; inner `None`: not
/// proportional.
pub(crate) fn exact_ratio(c1: &RealConst, c2: &RealConst) -> Option<Option<BigRational>> {
    let l1 = normal_form(c1)?;
    let l2 = normal_form(c2)?;
    if l2.is_zero() {
        return None;
    }
    Some(l1.proportion_to(&l2))
}

pub(crate) fn is_structurally_zero(c: &RealConst) -> bool {
    normal_form(c).map_or(false, |m| m.is_zero())
        || c.as_exact_rational().map_or(false, |r| r.is_zero())
}

/// Certified sign of a constant: interval ladder first, normal-form algebra
/// as the exact-zero / aligned-sign fallback; `None` when both are
/// inconclusive.
pub(crate) fn certified_const_sign(c: &RealConst) -> Option<Ordering> {
    let ladder = crate::real::PrecisionConfig::default();
    for p in ladder.ladder().take(4) {
        if let Ok(iv) = c.eval_interval(p) {
            match iv.is_sign_positive() {
                Some(true) => return Some(Ordering::Greater),
                Some(false) => {
                    if iv.hi().sign() == num_bigint::Sign::Minus {
                        return Some(Ordering::Less);
                    }
                    if iv.lo().cmp_val(iv.hi()) == Ordering::Equal {
                        return Some(Ordering::Equal);
                    }
                }
                None => {}
            }
        }
    }
    normal_form(c).and_then(|m| m.structural_sign())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn square_extraction() {
        let (s, d) = extract_square(BigInt::from(72)); // 36 * 2
        assert_eq!(s, BigInt::from(6));
        assert_eq!(d, BigInt::from(2));
        let (s, d) = extract_square(BigInt::from(1));
        assert_eq!(s, BigInt::from(1));
        assert_eq!(d, BigInt::from(1));
    }

    #[test]
    fn exact_zero_of_cancelling_sum() {
        // (2 - sqrt2) - (2 - sqrt2) built from different trees
        let step = RealConst::sub(RealConst::integer(2), RealConst::sqrt_int(2));
        let other = RealConst::add(
            RealConst::integer(2),
            RealConst::mul(RealConst::integer(-1), RealConst::sqrt_int(2)),
        );
        let diff = RealConst::sub(step, other);
        assert!(is_structurally_zero(&diff));
        assert_eq!(certified_const_sign(&diff), Some(Ordering::Equal));
        // sqrt8 - 2 sqrt2 = 0 through the radicand normalization
        let diff = RealConst::sub(
            RealConst::sqrt_int(8),
            RealConst::mul(RealConst::integer(2), RealConst::sqrt_int(2)),
        );
        assert!(is_structurally_zero(&diff));
    }

    #[test]
    fn sign_decisions() {
        let pos = RealConst::sub(RealConst::sqrt_int(2), RealConst::integer(1));
        assert_eq!(certified_const_sign(&pos), Some(Ordering::Greater));
        let neg = RealConst::sub(RealConst::integer(1), RealConst::sqrt_int(2));
        assert_eq!(certified_const_sign(&neg), Some(Ordering::Less));
        // log(1/2) < 0
        let l = RealConst::log(rat(1, 2)).unwrap();
        assert_eq!(certified_const_sign(&l), Some(Ordering::Less));
    }

    #[test]
    fn ratio_decisions() {
        let s2 = RealConst::sqrt_int(2);
        let s3 = RealConst::sqrt_int(3);
        let s8 = RealConst::sqrt_int(8); // 2 sqrt2
        assert_eq!(ratio_rational(&s2, &s3), Some(false));
        assert_eq!(ratio_rational(&s8, &s2), Some(true));
        assert_eq!(exact_ratio(&s8, &s2), Some(Some(rat(2, 1))));
        assert_eq!(ratio_rational(&RealConst::Pi, &s2), Some(false));
        let tricky = RealConst::mul(RealConst::sqrt_int(6), RealConst::sqrt_int(2));
        // sqrt6 sqrt2 = 2 sqrt3
        assert_eq!(ratio_rational(&tricky, &s3), Some(true));
        assert_eq!(exact_ratio(&tricky, &s3), Some(Some(rat(2, 1))));
        // binomial proportionality: (2 + 2 sqrt2) / (1 + sqrt2) = 2
        let b1 = RealConst::add(
            RealConst::integer(2),
            RealConst::mul(RealConst::integer(2), s2.clone()),
        );
        let b2 = RealConst::add(RealConst::integer(1), s2.clone());
        assert_eq!(exact_ratio(&b1, &b2), Some(Some(rat(2, 1))));
        // non-proportional binomials are declared irrational
        let b3 = RealConst::add(RealConst::integer(1), s3);
        assert_eq!(ratio_rational(&b1, &b3), Some(false));
    }
}
