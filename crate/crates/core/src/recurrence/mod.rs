//! Recurrence experiments: smallness densities for toral translations,
//! exact arithmetic lemma checks, the floor-polynomial recurrence
//! classifier, and a catalog of named scenarios with frozen expectations.

mod prop68;
mod scenarios;

pub use prop68::{prop_6_8_condition_v, Prop68Verdict};
pub use scenarios::{run_scenario, scenario_names, ScenarioCheck, ScenarioOutcome};

use crate::dist::Density;
use crate::error::{EvalError, RecurrenceError};
use crate::gp::GPExpr;
use crate::real::{Interval, PrecisionConfig, RealConst};
use crate::value::rational_dist_to_int;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;

/// A toral translation target: translation vector and smallness radius for
/// the max-of-coordinates distance to the lattice.
#[derive(Clone, Debug)]
pub struct ToralTarget {
    pub alphas: Vec<RealConst>,
    pub eps: BigRational,
}

impl ToralTarget {
    pub fn new(alphas: Vec<RealConst>, eps: BigRational) -> Result<Self, RecurrenceError> {
        if alphas.is_empty() {
            return Err(RecurrenceError::InvalidParameter(
                "target needs at least one coordinate".into(),
            ));
        }
        if !eps.is_positive() || eps >= BigRational::new(BigInt::from(1), BigInt::from(2)) {
            return Err(RecurrenceError::InvalidParameter(
                "eps must lie in (0, 1/2)".into(),
            ));
        }
        Ok(ToralTarget { alphas, eps })
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }
}

/// Decides `dist(k * alpha, Z) < eps` with certainty, climbing precision as
/// needed; exact when alpha is rational.
struct SmallnessTester {
    exact: Option<BigRational>,
    alpha: RealConst,
    enclosures: HashMap<u32, Interval>,
}

impl SmallnessTester {
    fn new(alpha: &RealConst) -> Self {
        SmallnessTester {
            exact: alpha.as_exact_rational(),
            alpha: alpha.clone(),
            enclosures: HashMap::new(),
        }
    }

    fn dist_below(
        &mut self,
        k: &BigInt,
        eps: &BigRational,
        cfg: &PrecisionConfig,
    ) -> Result<bool, EvalError> {
        if let Some(r) = &self.exact {
            return Ok(&rational_dist_to_int(&(r * BigRational::from(k.clone()))) < eps);
        }
        for p in cfg.ladder() {
            let iv = match self.enclosures.get(&p) {
                Some(iv) => iv.clone(),
                None => {
                    let iv = self.alpha.eval_interval(p)?;
                    self.enclosures.insert(p, iv.clone());
                    iv
                }
            };
            let prod = iv.mul(&Interval::point(crate::real::Dyadic::from_bigint(k.clone())), p);
            match prod.dist_to_int(p).lt_rational(eps) {
                Some(b) => return Ok(b),
                None => continue,
            }
        }
        Err(EvalError::PrecisionExhausted { n: 0, bits: cfg.max_bits })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceDensity {
    pub density: Density,
    /// First few n with simultaneous smallness.
    pub witnesses: Vec<i64>,
}

/// Density over `1..=N` of n with `dist(q(n) * alpha_i, Z) < eps` for every
/// coordinate. Requires q to be integer-valued on the sampled range.
pub fn toral_recurrence_density(
    q: &GPExpr,
    target: &ToralTarget,
    n_max: i64,
    cfg: &PrecisionConfig,
) -> Result<RecurrenceDensity, RecurrenceError> {
    simultaneous_smallness(q, &target.alphas, &target.eps, n_max, cfg)
}

/// The executable hypothesis of the recurrence criterion: the set
/// `{n : dist(q(n) gamma_i, Z) < eps for all i}` and its density.
pub fn simultaneous_smallness(
    q: &GPExpr,
    gammas: &[RealConst],
    eps: &BigRational,
    n_max: i64,
    cfg: &PrecisionConfig,
) -> Result<RecurrenceDensity, RecurrenceError> {
    let values = q.eval_range(1, n_max, cfg).map_err(RecurrenceError::from)?;
    let mut testers: Vec<SmallnessTester> = gammas.iter().map(SmallnessTester::new).collect();
    let mut count = 0u64;
    let mut witnesses = Vec::new();
    for (i, v) in values.iter().enumerate() {
        let n = i as i64 + 1;
        let k = v
            .as_integer()
            .ok_or(RecurrenceError::NonIntegerValue(n))?;
        let mut all_small = true;
        for t in testers.iter_mut() {
            if !t.dist_below(&k, eps, cfg).map_err(RecurrenceError::from)? {
                all_small = false;
                break;
            }
        }
        if all_small {
            count += 1;
            if witnesses.len() < 20 {
                witnesses.push(n);
            }
        }
    }
    Ok(RecurrenceDensity {
        density: Density::from_counts(count, n_max as u64),
        witnesses,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma67Report {
    pub trials: u64,
    pub clause1_checked: u64,
    pub clause2_checked: u64,
    pub violations: u64,
    pub pass: bool,
}

/// Exact property test of the two floor-scaling clauses:
/// (1) `[x] = b [x/b]` and `{x} = b {x/b}` iff `{x/b} < 1/b`;
/// (2) `dist(x/b, Z) < delta < 1/(2ab)` implies
///     `dist(a x, Z) = a b dist(x/b, Z)`.
pub fn lemma_6_7_check(a: u64, b: u64, trials: u64, seed: u64) -> Result<Lemma67Report, RecurrenceError> {
    if a == 0 || b == 0 {
        return Err(RecurrenceError::InvalidParameter("a, b must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a_rat = BigRational::from(BigInt::from(a));
    let b_rat = BigRational::from(BigInt::from(b));
    let inv_b = BigRational::new(BigInt::one(), BigInt::from(b));
    let bound2 = BigRational::new(BigInt::one(), BigInt::from(2 * a * b));
    let mut clause1 = 0u64;
    let mut clause2 = 0u64;
    let mut violations = 0u64;
    for t in 0..trials {
        // clause 1 on generic x in [0, 10); every third trial pins {x/b}
        // right at the 1/b edge
        let x = if t % 3 == 2 {
            let k = BigInt::from(rng.gen_range(0..10));
            let jitter = BigRational::new(
                BigInt::from(rng.gen_range(-1000i64..1000)),
                BigInt::from(1_000_000u64),
            );
            (BigRational::from(k) + &inv_b + jitter) * &b_rat
        } else {
            let u: u64 = rng.gen::<u64>() >> 11;
            BigRational::new(BigInt::from(u) * BigInt::from(10), BigInt::one() << 53)
        };
        let x_over_b = &x / &b_rat;
        let fx = &x - x.floor();
        let fxb = &x_over_b - x_over_b.floor();
        let lhs_holds = x.floor() == x_over_b.floor() * &b_rat && fx == &fxb * &b_rat;
        let rhs_holds = fxb < inv_b;
        clause1 += 1;
        if lhs_holds != rhs_holds {
            violations += 1;
        }
        // clause 2: construct x = b(k + eta) with |eta| < delta < 1/(2ab)
        let delta = &bound2
            * BigRational::new(BigInt::from(rng.gen_range(1..1000)), BigInt::from(1000));
        let eta = &delta
            * BigRational::new(
                BigInt::from(rng.gen_range(-999i64..1000)),
                BigInt::from(1000),
            );
        let k = BigInt::from(rng.gen_range(0..100));
        let x2 = (&BigRational::from(k) + &eta) * &b_rat;
        let x2_over_b = &x2 / &b_rat;
        let d = rational_dist_to_int(&x2_over_b);
        if d < delta {
            clause2 += 1;
            let lhs = rational_dist_to_int(&(&a_rat * &x2));
            let rhs = &a_rat * &b_rat * &d;
            if lhs != rhs {
                violations += 1;
            }
        }
    }
    Ok(Lemma67Report {
        trials,
        clause1_checked: clause1,
        clause2_checked: clause2,
        violations,
        pass: violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::parse;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn square_times_sqrt2_smallness_density() {
        // {n^2 sqrt2} is u.d., so dist < 0.1 has density about 0.2
        let q = parse("n^2").unwrap();
        let t = ToralTarget::new(vec![RealConst::sqrt_int(2)], rat(1, 10)).unwrap();
        let r = toral_recurrence_density(&q, &t, 20_000, &PrecisionConfig::default()).unwrap();
        assert!((r.density.value - 0.2).abs() < 0.02, "density {}", r.density.value);
    }

    #[test]
    fn non_integer_value_rejected() {
        let q = parse("sqrt(2)*n").unwrap();
        let t = ToralTarget::new(vec![RealConst::sqrt_int(2)], rat(1, 10)).unwrap();
        match toral_recurrence_density(&q, &t, 10, &PrecisionConfig::default()) {
            Err(RecurrenceError::NonIntegerValue(1)) => {}
            other => panic!("expected NonIntegerValue, got {:?}", other),
        }
    }

    #[test]
    fn lemma_6_7_hand_cases() {
        // x = 0.4, b = 2: {x/2} = 0.2 < 1/2 and [0.4] = 0 = 2*[0.2]
        let x = rat(2, 5);
        let b = rat(2, 1);
        let xb = &x / &b;
        assert!(&xb - xb.floor() < rat(1, 2));
        assert_eq!(x.floor(), xb.floor() * &b);
        // x = 1.5, b = 2: {0.75} >= 1/2 and [1.5] = 1 != 2[0.75] = 0
        let x = rat(3, 2);
        let xb = &x / &b;
        assert!(&xb - xb.floor() >= rat(1, 2));
        assert_ne!(x.floor(), xb.floor() * &b);
        // randomized clauses
        let rep = lemma_6_7_check(3, 4, 2000, 5).unwrap();
        assert!(rep.pass, "violations: {}", rep.violations);
        assert!(rep.clause2_checked > 100);
        // a = b = 1 degenerates but must still hold
        let rep = lemma_6_7_check(1, 1, 500, 6).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn eps_range_enforced() {
        assert!(ToralTarget::new(vec![RealConst::sqrt_int(2)], rat(1, 2)).is_err());
        assert!(ToralTarget::new(vec![RealConst::sqrt_int(2)], rat(0, 1)).is_err());
        assert!(ToralTarget::new(vec![], rat(1, 10)).is_err());
    }
}
