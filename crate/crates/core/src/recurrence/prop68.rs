//! Classifier for the recurrence behavior of `[q(n)]` with `q` a real
//! polynomial having an irrational non-constant coefficient.
//!
//! Case A: two non-constant coefficients with irrational ratio.
//! Case B: `q = alpha q0 + beta` with `alpha` irrational, `beta` in [0, 1],
//! and `q0` an intersective integer polynomial (checked by full residue
//! scans over all moduli up to a documented bound; a pass is evidence, not
//! proof).
//!
//! Ratio rationality is decided from the declared atom structure of the
//! coefficients: monomials `rat * sqrt(d) * pi^j * prod log(r)^e` with the
//! same irrational part have rational ratio, and structurally distinct
//! irrational parts are declared irrational by assumption.

use crate::error::RecurrenceError;
use crate::real::RealConst;
use crate::symbolic::{exact_ratio, is_structurally_zero, normal_form, ratio_rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

/// Moduli bound for the intersectivity scan.
pub const INTERSECTIVE_SCAN_MAX: u64 = 10_000;

#[derive(Clone, Debug, Serialize)]
pub enum Prop68Verdict {
    /// Two non-constant coefficients (at the reported degrees) have an
    /// irrational ratio.
    CaseA { degree_i: usize, degree_j: usize },
    /// `q = alpha q0 + beta` with the reported integer polynomial and shift.
    CaseB {
        q0_coeffs: Vec<String>,
        alpha: String,
        beta: String,
        shift: String,
        intersective_checked_to: u64,
        sample_roots: Vec<(u64, u64)>,
    },
    Neither { reason: String },
}

/// Full residue scan: does `q0` have a root modulo every `s <= bound`?
/// Returns the first failing modulus on refutation.
fn intersective_scan(coeffs: &[BigInt], bound: u64) -> Result<Vec<(u64, u64)>, u64> {
    let mut samples = Vec::new();
    for s in 2..=bound {
        let m = s as i64;
        let reduced: Vec<i64> = coeffs
            .iter()
            .map(|c| {
                let r = c.mod_floor(&BigInt::from(m));
                r.to_i64().expect("residue fits")
            })
            .collect();
        let mut found = None;
        for n in 0..m {
            let mut acc: i64 = 0;
            for c in reduced.iter().rev() {
                acc = (acc * n + c).rem_euclid(m);
            }
            if acc == 0 {
                found = Some(n as u64);
                break;
            }
        }
        match found {
            Some(n) => {
                if s <= 12 {
                    samples.push((s, n));
                }
            }
            None => return Err(s),
        }
    }
    Ok(samples)
}

/// Classify a real polynomial (coefficients in ascending degree) against the
/// two recurrence-friendly shapes.
pub fn prop_6_8_condition_v(coeffs: &[RealConst]) -> Result<Prop68Verdict, RecurrenceError> {
    if coeffs.len() < 2 {
        return Err(RecurrenceError::InvalidParameter(
            "polynomial must have degree >= 1".into(),
        ));
    }
    let nonconst: Vec<usize> = (1..coeffs.len())
        .filter(|&i| !is_structurally_zero(&coeffs[i]))
        .collect();
    if nonconst.is_empty() {
        return Err(RecurrenceError::InvalidParameter(
            "polynomial has no non-constant term".into(),
        ));
    }
    let any_irrational = nonconst.iter().any(|&i| {
        normal_form(&coeffs[i]).map_or(true, |m| !m.is_rational())
    });
    if !any_irrational {
        return Ok(Prop68Verdict::Neither {
            reason: "every non-constant coefficient is rational".into(),
        });
    }
    // Case A: some pair with irrational ratio
    for (ai, &i) in nonconst.iter().enumerate() {
        for &j in &nonconst[ai + 1..] {
            if ratio_rational(&coeffs[i], &coeffs[j]) == Some(false) {
                return Ok(Prop68Verdict::CaseA { degree_i: i, degree_j: j });
            }
        }
    }
    // Case B: q = alpha q0 + beta. All non-constant coefficients are
    // rational multiples of the base coefficient.
    let base = &coeffs[nonconst[0]];
    let mut ratios = Vec::new();
    for &i in &nonconst {
        match exact_ratio(&coeffs[i], base) {
            Some(Some(r)) => ratios.push((i, r)),
            _ => {
                return Ok(Prop68Verdict::Neither {
                    reason: format!(
                        "coefficient ratio at degree {} undecidable from atom structure",
                        i
                    ),
                })
            }
        }
    }
    let lcm = ratios
        .iter()
        .fold(BigInt::one(), |acc, (_, r)| acc.lcm(r.denom()));
    let alpha = RealConst::mul(
        base.clone(),
        RealConst::rational(BigRational::new(BigInt::one(), lcm.clone())),
    );
    let mut m_coeffs = vec![BigInt::zero(); coeffs.len()];
    for (i, r) in &ratios {
        let v = r * BigRational::from(lcm.clone());
        debug_assert!(v.denom().is_one());
        m_coeffs[*i] = v.numer().clone();
    }
    let beta0 = coeffs[0].clone();
    // k must satisfy beta0 - alpha k in [0, 1]: a bounded window
    let pcfg = crate::real::PrecisionConfig::default();
    let alpha_iv = alpha.eval_interval(256).map_err(crate::error::EvalError::from)?;
    let beta_iv = beta0.eval_interval(256).map_err(crate::error::EvalError::from)?;
    let a_mid = alpha_iv.midpoint_f64();
    let b_mid = beta_iv.midpoint_f64();
    if a_mid.abs() < 1e-300 {
        return Ok(Prop68Verdict::Neither { reason: "degenerate leading scale".into() });
    }
    let e1 = (b_mid - 1.0) / a_mid;
    let e2 = b_mid / a_mid;
    let k_lo = e1.min(e2).floor() as i64 - 1;
    let k_hi = e1.max(e2).ceil() as i64 + 1;
    for k in k_lo..=k_hi {
        // beta = beta0 - alpha k must lie in [0, 1]; exclude only when the
        // enclosure certifies it is outside
        let beta = RealConst::sub(
            beta0.clone(),
            RealConst::mul(alpha.clone(), RealConst::integer(k)),
        );
        let mut outside = false;
        for p in pcfg.ladder().take(3) {
            let iv = beta.eval_interval(p).map_err(crate::error::EvalError::from)?;
            let lo = iv.lo().to_rational();
            let hi = iv.hi().to_rational();
            if hi < BigRational::zero() || lo > BigRational::one() {
                outside = true;
                break;
            }
            if lo >= BigRational::zero() && hi <= BigRational::one() {
                break;
            }
        }
        if outside {
            continue;
        }
        let mut q0 = m_coeffs.clone();
        q0[0] = BigInt::from(k);
        match intersective_scan(&q0, INTERSECTIVE_SCAN_MAX) {
            Ok(sample_roots) => {
                return Ok(Prop68Verdict::CaseB {
                    q0_coeffs: q0.iter().map(|c| c.to_string()).collect(),
                    alpha: alpha.to_string(),
                    beta: beta.to_string(),
                    shift: k.to_string(),
                    intersective_checked_to: INTERSECTIVE_SCAN_MAX,
                    sample_roots,
                });
            }
            Err(_) => continue,
        }
    }
    Ok(Prop68Verdict::Neither {
        reason: format!(
            "no integer shift k in [{}, {}] gives an offset in [0,1] with an \
             intersective polynomial (moduli scanned to {})",
            k_lo, k_hi, INTERSECTIVE_SCAN_MAX
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_a_two_irrational_directions() {
        // sqrt2 n^2 + sqrt3 n
        let v = prop_6_8_condition_v(&[
            RealConst::integer(0),
            RealConst::sqrt_int(3),
            RealConst::sqrt_int(2),
        ])
        .unwrap();
        assert!(matches!(v, Prop68Verdict::CaseA { .. }), "{:?}", v);
    }

    #[test]
    fn case_b_shift_of_intersective() {
        // sqrt2 (n^2 + 4n - 12)
        let s2 = RealConst::sqrt_int(2);
        let v = prop_6_8_condition_v(&[
            RealConst::mul(RealConst::integer(-12), s2.clone()),
            RealConst::mul(RealConst::integer(4), s2.clone()),
            s2.clone(),
        ])
        .unwrap();
        match v {
            Prop68Verdict::CaseB { q0_coeffs, sample_roots, .. } => {
                assert_eq!(q0_coeffs, vec!["-12", "4", "1"]);
                // a root mod 4 is reported, and 2 is itself a root mod 4
                let (_, r4) = sample_roots.iter().find(|(s, _)| *s == 4).copied().unwrap();
                let q0 = |n: i64| n * n + 4 * n - 12;
                assert_eq!(q0(r4 as i64).rem_euclid(4), 0);
                assert_eq!(q0(2).rem_euclid(4), 0);
            }
            other => panic!("expected CaseB, got {:?}", other),
        }
    }

    #[test]
    fn neither_for_sqrt11_shift_2() {
        // sqrt11 n + 2: no integer k puts 2 - sqrt11 k in [0, 1]
        let v = prop_6_8_condition_v(&[RealConst::integer(2), RealConst::sqrt_int(11)]).unwrap();
        assert!(matches!(v, Prop68Verdict::Neither { .. }), "{:?}", v);
    }

    #[test]
    fn intersectivity_refutation() {
        // n^2 + 1 has no root mod 4 (squares are 0 or 1, +1 gives 1 or 2)
        let err = intersective_scan(&[BigInt::one(), BigInt::zero(), BigInt::one()], 100);
        assert!(err.is_err());
        // n^2 is intersective (root 0 everywhere)
        let ok = intersective_scan(&[BigInt::zero(), BigInt::zero(), BigInt::one()], 100).unwrap();
        assert!(ok.contains(&(2, 0)));
    }

    #[test]
    fn rational_polynomial_is_neither() {
        let v = prop_6_8_condition_v(&[RealConst::Pi, RealConst::integer(2)]).unwrap();
        assert!(matches!(v, Prop68Verdict::Neither { .. }));
    }
}
