//! Randomized numeric verification of mod-1 congruences.
//!
//! Samples are exact dyadic rationals, so both congruence sides evaluate on
//! the exact path and the defect (distance of lhs - rhs to the nearest
//! integer) is computed without rounding. Guard-boundary-adjacent samples
//! are mixed in to exercise branch edges.

use super::terms::{GuardCond, Identity, Side, TermSum};
use crate::error::RewriteError;
use crate::gp::GPExpr;
use crate::real::{PrecisionConfig, RealConst};
use crate::value::{rational_dist_to_int, rational_frac};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceReport {
    pub id: String,
    pub trials: u64,
    pub worst_defect: f64,
    pub failures: u64,
    pub pass: bool,
    /// Assignment that produced the worst defect (decimal renderings).
    pub worst_sample: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub trials: u64,
    pub tol: f64,
    pub bits: u32,
    pub seed: u64,
    /// Fraction of trials drawn next to guard edges (within 1e-3).
    pub boundary_share: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { trials: 1000, tol: 1e-20, bits: 128, seed: 0, boundary_share: 0.2 }
    }
}

/// Uniform dyadic rational in [0, 10).
fn sample_uniform(rng: &mut ChaCha8Rng) -> BigRational {
    let x: u64 = rng.gen::<u64>() >> 11; // 53 bits
    BigRational::new(BigInt::from(x) * BigInt::from(10), BigInt::one() << 53)
}

/// Collect the guard edges of an identity (fractional-part values where
/// branches meet), for boundary-adjacent sampling.
fn guard_edges(id: &Identity) -> Vec<BigRational> {
    let mut edges = vec![BigRational::zero()];
    for side in [&id.lhs, &id.rhs] {
        if let Side::Guarded(g) = side {
            for (conds, _) in &g.branches {
                for c in conds {
                    if let GuardCond::FracInCo { lo, hi, .. } = c {
                        edges.push(lo.clone());
                        edges.push(hi.clone());
                    }
                }
            }
        }
    }
    edges.sort();
    edges.dedup();
    edges
}

fn eval_sum_exact(
    sum: &TermSum,
    assignment: &[BigRational],
    cfg: &PrecisionConfig,
) -> Result<BigRational, RewriteError> {
    let subst = |i: usize| GPExpr::Const(RealConst::rational(assignment[i].clone()));
    let expr = sum.to_gpexpr(&subst);
    let v = expr.eval(0, cfg)?;
    v.as_exact()
        .cloned()
        .ok_or_else(|| RewriteError::BadParameters("expected exact evaluation".into()))
}

fn eval_side_exact(
    side: &Side,
    assignment: &[BigRational],
    cfg: &PrecisionConfig,
) -> Result<BigRational, RewriteError> {
    match side {
        Side::Sum(s) => eval_sum_exact(s, assignment, cfg),
        Side::Guarded(g) => {
            let fracs: Vec<BigRational> = assignment.iter().map(rational_frac).collect();
            let branch = g.select(&fracs)?;
            eval_sum_exact(branch, assignment, cfg)
        }
    }
}

/// Run randomized trials of `lhs = rhs (mod 1)`; reports the worst distance
/// to an integer of the difference. Failures are report entries, not errors.
pub fn verify_congruence(id: &Identity, cfg: &VerifyConfig) -> Result<CongruenceReport, RewriteError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let edges = guard_edges(id);
    let eps = BigRational::new(BigInt::one(), BigInt::from(1u64 << 20)); // ~1e-6
    let near = BigRational::new(BigInt::one(), BigInt::from(1000));
    let pcfg = PrecisionConfig { start_bits: cfg.bits.max(32), max_bits: cfg.bits.max(32) * 4 };
    let mut worst: Option<(BigRational, Vec<BigRational>)> = None;
    let mut failures = 0u64;
    let boundary_every = if cfg.boundary_share > 0.0 {
        (1.0 / cfg.boundary_share).max(1.0) as u64
    } else {
        u64::MAX
    };
    for t in 0..cfg.trials {
        let mut assignment: Vec<BigRational> = (0..id.vars).map(|_| sample_uniform(&mut rng)).collect();
        if t % boundary_every == 1 && !edges.is_empty() {
            // push one variable's fractional part next to a guard edge
            let v = rng.gen_range(0..id.vars);
            let e = &edges[rng.gen_range(0..edges.len())];
            let above = rng.gen_bool(0.5);
            let base = BigRational::from(BigInt::from(rng.gen_range(0..10)));
            let delta = &near * BigRational::new(BigInt::from(rng.gen_range(1..1000)), BigInt::from(1000));
            let frac_target = if above { e + &eps + delta } else { (e - &eps - delta).max(BigRational::zero()) };
            let frac_target = if frac_target >= BigRational::one() {
                BigRational::one() - &eps
            } else {
                frac_target
            };
            assignment[v] = base + frac_target;
        }
        let lhs = eval_side_exact(&id.lhs, &assignment, &pcfg)?;
        let rhs = eval_side_exact(&id.rhs, &assignment, &pcfg)?;
        let defect = rational_dist_to_int(&(lhs - rhs));
        let fail = defect.to_f64().unwrap_or(f64::INFINITY) >= cfg.tol;
        if fail {
            failures += 1;
        }
        let is_worse = match &worst {
            None => true,
            Some((w, _)) => defect > *w,
        };
        if is_worse {
            worst = Some((defect, assignment));
        }
    }
    let (worst_defect, worst_sample) = match worst {
        Some((d, a)) => (
            d.to_f64().unwrap_or(f64::INFINITY),
            a.iter().map(|r| format!("{:.6}", r.to_f64().unwrap_or(f64::NAN))).collect(),
        ),
        None => (0.0, vec![]),
    };
    Ok(CongruenceReport {
        id: id.name.clone(),
        trials: cfg.trials,
        worst_defect,
        failures,
        pass: failures == 0,
        worst_sample,
    })
}

/// Verify `lhs = rhs (mod 1)` pointwise for integer arguments in
/// `1..=samples`, with certified interval arithmetic: the reported defect is
/// an upper bound on dist(lhs - rhs, Z).
pub fn verify_gp_congruence(
    name: &str,
    lhs: &GPExpr,
    rhs: &GPExpr,
    samples: i64,
    tol: f64,
    bits: u32,
) -> Result<CongruenceReport, RewriteError> {
    let cfg = PrecisionConfig { start_bits: bits.max(64), max_bits: (bits.max(64)) * 8 };
    let diff = GPExpr::sub(lhs.clone(), rhs.clone());
    let mut worst = 0.0f64;
    let mut worst_n = 0i64;
    let mut failures = 0u64;
    for n in 1..=samples {
        let v = diff.eval(n, &cfg)?;
        let d = v.dist_to_int(cfg.start_bits);
        let upper = match &d {
            crate::value::Value::Exact(r) => r.to_f64().unwrap_or(f64::INFINITY),
            crate::value::Value::Approx(iv) => iv.hi().to_f64(),
        };
        if upper >= tol {
            failures += 1;
        }
        if upper > worst {
            worst = upper;
            worst_n = n;
        }
    }
    Ok(CongruenceReport {
        id: name.to_string(),
        trials: samples as u64,
        worst_defect: worst,
        failures,
        pass: failures == 0,
        worst_sample: vec![format!("n={}", worst_n)],
    })
}

#[cfg(test)]
mod tests {
    use super::super::identities::*;
    use super::*;

    fn quick(id: &Identity) -> CongruenceReport {
        verify_congruence(
            id,
            &VerifyConfig { trials: 300, ..VerifyConfig::default() },
        )
        .unwrap()
    }

    #[test]
    fn id6_hand_check() {
        // u1 = 0.6, u2 = 0.7: lhs = 0.42, rhs = 0.42 - 0.42 + 0.42
        let id = id_pull_out(2).unwrap();
        let a = vec![
            BigRational::new(BigInt::from(6), BigInt::from(10)),
            BigRational::new(BigInt::from(7), BigInt::from(10)),
        ];
        let cfg = PrecisionConfig::default();
        let lhs = eval_side_exact(&id.lhs, &a, &cfg).unwrap();
        let rhs = eval_side_exact(&id.rhs, &a, &cfg).unwrap();
        let expect = BigRational::new(BigInt::from(42), BigInt::from(100));
        assert_eq!(lhs, expect);
        assert_eq!(rhs, expect);
    }

    #[test]
    fn id3_zero_branch() {
        let id = id_neg();
        let a = vec![BigRational::from(BigInt::from(4))]; // {u} = 0
        let cfg = PrecisionConfig::default();
        let rhs = eval_side_exact(&id.rhs, &a, &cfg).unwrap();
        assert!(rhs.is_zero());
        let lhs = eval_side_exact(&id.lhs, &a, &cfg).unwrap();
        assert!(rational_dist_to_int(&(lhs - rhs)).is_zero());
    }

    #[test]
    fn id4_half_half() {
        let id = id_frac_of_product(2);
        let a = vec![
            BigRational::new(BigInt::from(1), BigInt::from(2)),
            BigRational::new(BigInt::from(1), BigInt::from(2)),
        ];
        let cfg = PrecisionConfig::default();
        let lhs = eval_side_exact(&id.lhs, &a, &cfg).unwrap();
        let rhs = eval_side_exact(&id.rhs, &a, &cfg).unwrap();
        let expect = BigRational::new(BigInt::from(1), BigInt::from(4));
        assert_eq!(lhs, expect);
        assert_eq!(rhs, expect);
    }

    #[test]
    fn battery_passes_and_control_fails() {
        for name in all_identity_names() {
            let id = identity_by_name(name).unwrap();
            let rep = quick(&id);
            assert!(rep.pass, "{} failed: worst defect {}", name, rep.worst_defect);
            assert_eq!(rep.worst_defect, 0.0, "{} defect must be exactly zero", name);
        }
        let bad = id_pull_out_2_corrupted();
        let rep = quick(&bad);
        assert!(!rep.pass, "corrupted identity must fail");
        // defect of the sign flip is 2 u2 {u1} mod 1, generically far from 0
        assert!(rep.worst_defect > 0.05);
    }
}
