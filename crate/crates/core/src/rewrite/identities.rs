//! The mod-1 identity battery on fractional parts.
//!
//! Sign convention for the pull-out family: expanding
//! `prod_i ({u_i} - u_i) = prod_i (-[u_i])`, which is an integer, gives
//!
//! `u_1 prod_{i>=2} {u_i} = prod_i {u_i} - sum_{j>=2} u_j prod_{i!=j} {u_i}
//!    + sum_{l=2}^{k} (-1)^l sum_{|S|=l} (prod_{i in S} u_i) prod_{i not in S} {u_i}  (mod 1)`
//!
//! so `q_S = (-1)^{|S|} prod_{i in S} u_i`.

use super::terms::{frac, raw, Factor, GuardCond, GuardedSum, Identity, Operand, Side, Term, TermSum};
use crate::error::RewriteError;
use crate::real::RealConst;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Splitting a fractional part over a sum: `{u_1 + ... + u_k} = sum {u_i}`.
pub fn id_split_sum(k: usize) -> Identity {
    assert!(k >= 1);
    let inner = TermSum::new(
        (0..k)
            .map(|i| Term::from_int(1, vec![raw(i)]))
            .collect(),
    );
    let lhs = TermSum::single(Term::from_int(
        1,
        vec![Factor::Frac(Operand::Sum(Box::new(inner)))],
    ));
    let rhs = TermSum::new((0..k).map(|i| Term::from_int(1, vec![frac(i)])).collect());
    Identity {
        name: format!("id1[k={}]", k),
        vars: k,
        lhs: Side::Sum(lhs),
        rhs: Side::Sum(rhs),
    }
}

/// Scaling inside a fractional part: for a > 0, on the branch
/// `b/a <= {u} < min((b+1)/a, 1)` one has `{a{u}} = a{u} - b`.
pub fn id_scale_frac(a: &BigRational) -> Result<Identity, RewriteError> {
    if !a.is_positive() {
        return Err(RewriteError::BadParameters("scale must be positive".into()));
    }
    let inner = TermSum::single(Term::new(RealConst::rational(a.clone()), vec![frac(0)]));
    let lhs = TermSum::single(Term::from_int(
        1,
        vec![Factor::Frac(Operand::Sum(Box::new(inner)))],
    ));
    let mut branches = Vec::new();
    let b_max = a.floor().numer().clone();
    let mut b = BigInt::zero();
    while b <= b_max {
        let lo = BigRational::from(b.clone()) / a;
        let hi_raw = BigRational::from(&b + BigInt::one()) / a;
        let one = BigRational::one();
        let hi = if hi_raw < one { hi_raw } else { one };
        if lo < hi {
            let sum = TermSum::new(vec![
                Term::new(RealConst::rational(a.clone()), vec![frac(0)]),
                Term::new(RealConst::rational(-BigRational::from(b.clone())), vec![]),
            ]);
            branches.push((vec![GuardCond::FracInCo { var: 0, lo, hi }], sum));
        }
        b += BigInt::one();
    }
    Ok(Identity {
        name: format!("id2[a={}]", a),
        vars: 1,
        lhs: Side::Sum(lhs),
        rhs: Side::Guarded(GuardedSum { branches }),
    })
}

/// Integer-scale variant: for a natural a, on `b/a <= {u} < (b+1)/a` one has
/// `{a u} = a{u} - b`.
pub fn id_scale_int(a: u32) -> Result<Identity, RewriteError> {
    if a == 0 {
        return Err(RewriteError::BadParameters("scale must be >= 1".into()));
    }
    let a_rat = BigRational::from(BigInt::from(a));
    let inner = TermSum::single(Term::from_int(a as i64, vec![raw(0)]));
    let lhs = TermSum::single(Term::from_int(
        1,
        vec![Factor::Frac(Operand::Sum(Box::new(inner)))],
    ));
    let mut branches = Vec::new();
    for b in 0..a {
        let lo = BigRational::new(BigInt::from(b), BigInt::from(a));
        let hi = BigRational::new(BigInt::from(b + 1), BigInt::from(a));
        let sum = TermSum::new(vec![
            Term::new(RealConst::rational(a_rat.clone()), vec![frac(0)]),
            Term::from_int(-(b as i64), vec![]),
        ]);
        branches.push((vec![GuardCond::FracInCo { var: 0, lo, hi }], sum));
    }
    Ok(Identity {
        name: format!("id2p[a={}]", a),
        vars: 1,
        lhs: Side::Sum(lhs),
        rhs: Side::Guarded(GuardedSum { branches }),
    })
}

/// Negation: `{-u} = 1 - {u}` when `{u} > 0`, and `0` when `{u} = 0`.
pub fn id_neg() -> Identity {
    let inner = TermSum::single(Term::from_int(-1, vec![raw(0)]));
    let lhs = TermSum::single(Term::from_int(
        1,
        vec![Factor::Frac(Operand::Sum(Box::new(inner)))],
    ));
    let pos = TermSum::new(vec![
        Term::from_int(1, vec![]),
        Term::from_int(-1, vec![frac(0)]),
    ]);
    let zero = TermSum::new(vec![]);
    Identity {
        name: "id3".into(),
        vars: 1,
        lhs: Side::Sum(lhs),
        rhs: Side::Guarded(GuardedSum {
            branches: vec![
                (vec![GuardCond::FracPositive { var: 0 }], pos),
                (vec![GuardCond::FracZero { var: 0 }], zero),
            ],
        }),
    }
}

/// A product of fractional parts is its own fractional part:
/// `{prod {u_i}} = prod {u_i}`.
pub fn id_frac_of_product(k: usize) -> Identity {
    assert!(k >= 1);
    let inner = TermSum::single(Term::from_int(1, (0..k).map(frac).collect()));
    let lhs = TermSum::single(Term::from_int(
        1,
        vec![Factor::Frac(Operand::Sum(Box::new(inner)))],
    ));
    let rhs = TermSum::single(Term::from_int(1, (0..k).map(frac).collect()));
    Identity {
        name: format!("id4[k={}]", k),
        vars: k,
        lhs: Side::Sum(lhs),
        rhs: Side::Sum(rhs),
    }
}

/// Pull-out rhs terms: shared by id5/id6/id7/id8. Variables are `vars[i]`
/// (so id8 can identify the first m of them); coefficients are multiplied by
/// `scale`. The raw-factor sum starts at position `raw_start`: 1 for the
/// plain pull-out, m for the multiple identity (the j-sums over the
/// identified copies are absorbed into the left side).
fn pull_out_rhs(vars: &[usize], scale: &BigRational, raw_start: usize) -> TermSum {
    let k = vars.len();
    let mut terms = Vec::new();
    // prod_i {u_i}
    terms.push(Term::new(
        RealConst::rational(scale.clone()),
        vars.iter().map(|&v| frac(v)).collect(),
    ));
    // - sum_{j > raw_start - 1} u_j prod_{i != j} {u_i}
    for j in raw_start..k {
        let mut fs = vec![raw(vars[j])];
        fs.extend(
            vars.iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .map(|(_, &v)| frac(v)),
        );
        terms.push(Term::new(RealConst::rational(-scale.clone()), fs));
    }
    // + sum_{l>=2} sum_{|S|=l} (-1)^l prod_S u_i prod_notS {u_i}
    for mask in 0u32..(1 << k) {
        let l = mask.count_ones();
        if l < 2 {
            continue;
        }
        let sign = if l % 2 == 0 { scale.clone() } else { -scale.clone() };
        let mut fs = Vec::with_capacity(k);
        for (i, &v) in vars.iter().enumerate() {
            if mask & (1 << i) != 0 {
                fs.push(raw(v));
            }
        }
        for (i, &v) in vars.iter().enumerate() {
            if mask & (1 << i) == 0 {
                fs.push(frac(v));
            }
        }
        terms.push(Term::new(RealConst::rational(sign), fs));
    }
    TermSum::new(terms)
}

/// The general pull-out identity (k >= 2):
/// `u_1 prod_{i>=2} {u_i} = ...` modulo 1. `k = 2` and `k = 3` are the
/// two- and three-variable specializations.
pub fn id_pull_out(k: usize) -> Result<Identity, RewriteError> {
    if k < 2 || k > 8 {
        return Err(RewriteError::BadParameters(
            "pull-out supports 2..=8 variables".into(),
        ));
    }
    let vars: Vec<usize> = (0..k).collect();
    let mut lhs_factors = vec![raw(0)];
    lhs_factors.extend((1..k).map(frac));
    let lhs = TermSum::single(Term::from_int(1, lhs_factors));
    let name = match k {
        2 => "id6".into(),
        3 => "id7".into(),
        _ => format!("id5[k={}]", k),
    };
    Ok(Identity {
        name,
        vars: k,
        lhs: Side::Sum(lhs),
        rhs: Side::Sum(pull_out_rhs(&vars, &BigRational::one(), 1)),
    })
}

/// The multiple identity: for `1 <= m <= k` and `m | M`,
/// `M u_1 {u_1}^(m-1) prod_{i>m} {u_i} = (M/m) * (pull-out rhs with the
/// first m variables identified)` modulo 1.
///
/// Free variables: u_1 and u_{m+1}..u_k (so `k - m + 1` in total).
pub fn id_multiple(big_m: i64, m: u32, k: usize) -> Result<Identity, RewriteError> {
    if m == 0 || (m as usize) > k || k > 8 {
        return Err(RewriteError::BadParameters(
            "need 1 <= m <= k <= 8".into(),
        ));
    }
    if big_m % (m as i64) != 0 {
        return Err(RewriteError::BadParameters(format!(
            "m = {} must divide M = {}",
            m, big_m
        )));
    }
    // variable layout: slot 0 repeated m times, then slots 1..=(k-m)
    let mut vars = vec![0usize; m as usize];
    vars.extend(1..=(k - m as usize));
    let mut lhs_factors = vec![raw(0)];
    for _ in 0..(m - 1) {
        lhs_factors.push(frac(0));
    }
    for v in 1..=(k - m as usize) {
        lhs_factors.push(frac(v));
    }
    let lhs = TermSum::single(Term::from_int(big_m, lhs_factors));
    let scale = BigRational::from(BigInt::from(big_m / m as i64));
    Ok(Identity {
        name: format!("id8[M={},m={},k={}]", big_m, m, k),
        vars: k - m as usize + 1,
        lhs: Side::Sum(lhs),
        rhs: Side::Sum(pull_out_rhs(&vars, &scale, m as usize)),
    })
}

/// Identity lookup by the CLI names.
pub fn identity_by_name(name: &str) -> Result<Identity, RewriteError> {
    match name {
        "id1" => Ok(id_split_sum(3)),
        "id2" => id_scale_frac(&BigRational::new(BigInt::from(5), BigInt::from(2))),
        "id2p" => id_scale_int(3),
        "id3" => Ok(id_neg()),
        "id4" => Ok(id_frac_of_product(3)),
        "id5" => id_pull_out(4),
        "id6" => id_pull_out(2),
        "id7" => id_pull_out(3),
        "id8" => id_multiple(6, 3, 4),
        other => Err(RewriteError::BadParameters(format!(
            "unknown identity `{}` (expected id1..id8 or id2p)",
            other
        ))),
    }
}

pub fn all_identity_names() -> &'static [&'static str] {
    &["id1", "id2", "id2p", "id3", "id4", "id5", "id6", "id7", "id8"]
}

/// The deliberately broken two-variable pull-out (sign flipped on the
/// `-u_2 {u_1}` term); used as a negative control for the verifier.
pub fn id_pull_out_2_corrupted() -> Identity {
    let mut id = id_pull_out(2).unwrap();
    if let Side::Sum(sum) = &mut id.rhs {
        // term layout: [prod fracs, -u2{u1}, +u1u2]; flip the middle sign
        let t = &mut sum.terms[1];
        t.coeff = RealConst::rational(
            -t.coeff.as_exact_rational().expect("integer coefficient"),
        );
    }
    id.name = "id6-corrupted".into();
    id
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id8_complexity_shape() {
        // every rhs term except (M/m) prod {u_i} has complexity <= lhs
        let id = id_multiple(6, 3, 4).unwrap();
        let (Side::Sum(lhs), Side::Sum(rhs)) = (&id.lhs, &id.rhs) else {
            panic!()
        };
        let lhs_cmp = lhs.terms[0].complexity();
        assert_eq!(lhs_cmp, 3); // {u1}^2 {u4}
        let exceeding: Vec<&Term> = rhs
            .terms
            .iter()
            .filter(|t| t.complexity() > lhs_cmp)
            .collect();
        assert_eq!(exceeding.len(), 1, "exactly one term may exceed");
        assert_eq!(exceeding[0].complexity(), 4); // {u1}^3 {u4}
        assert_eq!(
            exceeding[0].coeff.as_exact_rational().unwrap(),
            BigRational::from(BigInt::from(2)) // M/m = 6/3
        );
        assert_eq!(exceeding[0].factors.len(), 4);
        assert!(exceeding[0].factors.iter().all(|f| matches!(f, Factor::Frac(_))));
    }

    #[test]
    fn id2_guards_partition_unit_interval() {
        let a = BigRational::new(BigInt::from(5), BigInt::from(2));
        let id = id_scale_frac(&a).unwrap();
        let Side::Guarded(g) = &id.rhs else { panic!() };
        // guards [0, 2/5), [2/5, 4/5), [4/5, 1) cover [0,1) disjointly
        let mut edges = Vec::new();
        for (conds, _) in &g.branches {
            let GuardCond::FracInCo { lo, hi, .. } = &conds[0] else {
                panic!()
            };
            edges.push((lo.clone(), hi.clone()));
        }
        edges.sort_by(|x, y| x.0.cmp(&y.0));
        assert!(edges[0].0.is_zero());
        assert!(edges.last().unwrap().1.is_one());
        for w in edges.windows(2) {
            assert_eq!(w[0].1, w[1].0, "guard gap or overlap");
        }
    }
}
