//! Decomposition of a generalized polynomial into `sum_i b_i(n) n^i` with
//! bounded generalized-polynomial coefficients `b_i`.
//!
//! Supported fragment: sums of products in which every factor is either
//! bracket-free (a plain polynomial) or syntactically bounded (built from
//! constants and fractional parts); top-level integer parts are distributed
//! through `[u] = u - {u}`. Anything else reports `Unsupported`.

use super::ast::GPExpr;
use crate::real::{PrecisionConfig, RealConst};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub enum GrowthDecomposition {
    /// Pairs (i, b_i) with q(n) = sum b_i(n) n^i, highest degree first.
    Terms(Vec<(u32, GPExpr)>),
    Unsupported,
}

pub fn poly_growth_decompose(q: &GPExpr) -> GrowthDecomposition {
    let mut acc: BTreeMap<u32, Vec<GPExpr>> = BTreeMap::new();
    if !decompose_sum(q, false, &mut acc) {
        return GrowthDecomposition::Unsupported;
    }
    let mut terms: Vec<(u32, GPExpr)> = acc
        .into_iter()
        .filter_map(|(deg, summands)| {
            if summands.is_empty() {
                None
            } else {
                Some((deg, GPExpr::add(summands)))
            }
        })
        .collect();
    terms.sort_by(|a, b| b.0.cmp(&a.0));
    let result = GrowthDecomposition::Terms(terms);
    if verify_on_sample(q, &result) {
        result
    } else {
        GrowthDecomposition::Unsupported
    }
}

fn decompose_sum(e: &GPExpr, negate: bool, acc: &mut BTreeMap<u32, Vec<GPExpr>>) -> bool {
    match e {
        GPExpr::Add(ts) => ts.iter().all(|t| decompose_sum(t, negate, acc)),
        GPExpr::Neg(inner) => decompose_sum(inner, !negate, acc),
        GPExpr::IntPart(u) => {
            // [u] = u - {u}; the fractional part is bounded of degree 0
            if !decompose_sum(u, negate, acc) {
                return false;
            }
            let frac = GPExpr::frac_part((**u).clone());
            let contrib = if negate { frac } else { GPExpr::neg(frac) };
            acc.entry(0).or_default().push(contrib);
            true
        }
        other => decompose_product(other, negate, acc),
    }
}

fn decompose_product(e: &GPExpr, negate: bool, acc: &mut BTreeMap<u32, Vec<GPExpr>>) -> bool {
    let mut poly = vec![RealConst::integer(1)];
    let mut bounded: Vec<GPExpr> = Vec::new();
    if !collect_factors(e, &mut poly, &mut bounded) {
        return false;
    }
    for (deg, coeff) in poly.into_iter().enumerate() {
        if crate::symbolic::is_structurally_zero(&coeff) {
            continue;
        }
        let coeff = if negate { RealConst::neg(coeff) } else { coeff };
        let is_one = coeff.as_exact_rational().map_or(false, |r| r.is_one());
        let b = if bounded.is_empty() {
            GPExpr::Const(coeff)
        } else if is_one {
            GPExpr::mul(bounded.clone())
        } else {
            let mut fs = vec![GPExpr::Const(coeff)];
            fs.extend(bounded.iter().cloned());
            GPExpr::mul(fs)
        };
        acc.entry(deg as u32).or_default().push(b);
    }
    true
}

fn collect_factors(e: &GPExpr, poly: &mut Vec<RealConst>, bounded: &mut Vec<GPExpr>) -> bool {
    match e {
        GPExpr::Mul(fs) => fs.iter().all(|f| collect_factors(f, poly, bounded)),
        other if !other.has_brackets() => match poly_coeffs(other) {
            Some(cs) => {
                *poly = convolve(poly, &cs);
                true
            }
            None => false,
        },
        other if is_syntactically_bounded(other) => {
            bounded.push(other.clone());
            true
        }
        GPExpr::Pow(base, k) => {
            for _ in 0..*k {
                if !collect_factors(base, poly, bounded) {
                    return false;
                }
            }
            true
        }
        _ => false,
    }
}

/// Bounded by construction: constants, fractional parts of anything, and
/// sums/products/powers/negations/integer parts of bounded expressions.
fn is_syntactically_bounded(e: &GPExpr) -> bool {
    match e {
        GPExpr::Const(_) => true,
        GPExpr::Var => false,
        GPExpr::FracPart(_) => true,
        GPExpr::Add(ts) => ts.iter().all(is_syntactically_bounded),
        GPExpr::Mul(fs) => fs.iter().all(is_syntactically_bounded),
        GPExpr::Neg(x) | GPExpr::Pow(x, _) | GPExpr::IntPart(x) => is_syntactically_bounded(x),
    }
}

/// Coefficient list (ascending degree) of a bracket-free expression.
fn poly_coeffs(e: &GPExpr) -> Option<Vec<RealConst>> {
    match e {
        GPExpr::Const(c) => Some(vec![c.clone()]),
        GPExpr::Var => Some(vec![RealConst::integer(0), RealConst::integer(1)]),
        GPExpr::Add(ts) => {
            let mut acc = vec![];
            for t in ts {
                acc = add_coeffs(&acc, &poly_coeffs(t)?);
            }
            Some(acc)
        }
        GPExpr::Mul(fs) => {
            let mut acc = vec![RealConst::integer(1)];
            for f in fs {
                acc = convolve(&acc, &poly_coeffs(f)?);
            }
            Some(acc)
        }
        GPExpr::Neg(x) => Some(poly_coeffs(x)?.into_iter().map(RealConst::neg).collect()),
        GPExpr::Pow(x, k) => {
            let base = poly_coeffs(x)?;
            let mut acc = vec![RealConst::integer(1)];
            for _ in 0..*k {
                acc = convolve(&acc, &base);
            }
            Some(acc)
        }
        GPExpr::IntPart(_) | GPExpr::FracPart(_) => None,
    }
}

pub(crate) fn add_coeffs(a: &[RealConst], b: &[RealConst]) -> Vec<RealConst> {
    let mut out = Vec::with_capacity(a.len().max(b.len()));
    for i in 0..a.len().max(b.len()) {
        let x = a.get(i).cloned().unwrap_or_else(|| RealConst::integer(0));
        let y = b.get(i).cloned().unwrap_or_else(|| RealConst::integer(0));
        out.push(RealConst::add(x, y));
    }
    out
}

pub(crate) fn convolve(a: &[RealConst], b: &[RealConst]) -> Vec<RealConst> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![RealConst::integer(0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = RealConst::add(out[i + j].clone(), RealConst::mul(x.clone(), y.clone()));
        }
    }
    out
}

fn verify_on_sample(q: &GPExpr, d: &GrowthDecomposition) -> bool {
    let GrowthDecomposition::Terms(terms) = d else {
        return true;
    };
    let recomposed = GPExpr::add(
        terms
            .iter()
            .map(|(i, b)| {
                if *i == 0 {
                    b.clone()
                } else {
                    GPExpr::mul(vec![b.clone(), GPExpr::pow(GPExpr::Var, *i)])
                }
            })
            .collect::<Vec<_>>(),
    );
    let recomposed = if terms.is_empty() { GPExpr::int(0) } else { recomposed };
    let cfg = PrecisionConfig::default();
    for n in -25..=25 {
        let (Ok(a), Ok(b)) = (q.eval(n, &cfg), recomposed.eval(n, &cfg)) else {
            return false;
        };
        if a.certified_nonequal(&b, 128) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::parse::parse;

    fn degrees(d: &GrowthDecomposition) -> Vec<u32> {
        match d {
            GrowthDecomposition::Terms(ts) => ts.iter().map(|(i, _)| *i).collect(),
            GrowthDecomposition::Unsupported => vec![],
        }
    }

    #[test]
    fn already_in_form() {
        let q = parse("{sqrt(2)*n}*n^2 + 3*{sqrt(2)*n}").unwrap();
        let d = poly_growth_decompose(&q);
        assert_eq!(degrees(&d), vec![2, 0]);
        match &d {
            GrowthDecomposition::Terms(ts) => {
                // both coefficients are bounded
                for (_, b) in ts {
                    assert!(is_syntactically_bounded(b), "unbounded coefficient {}", b);
                }
            }
            _ => panic!("expected Terms"),
        }
    }

    #[test]
    fn floor_difference_splits() {
        // [sqrt3 n] - [sqrt2 n] = (sqrt3 - sqrt2) n - ({sqrt3 n} - {sqrt2 n})
        let q = parse("[sqrt(3)*n] - [sqrt(2)*n]").unwrap();
        let d = poly_growth_decompose(&q);
        assert_eq!(degrees(&d), vec![1, 0]);
        let GrowthDecomposition::Terms(ts) = &d else { panic!() };
        let b1 = &ts[0].1;
        // degree-1 coefficient is the constant sqrt3 - sqrt2 = 0.3178...
        assert!(!b1.contains_var());
        let v = b1.eval(0, &PrecisionConfig::default()).unwrap().to_f64();
        assert!((v - 0.31783724519578224).abs() < 1e-12);
    }

    #[test]
    fn nested_bracket_product_is_unsupported() {
        let q = parse("{sqrt(2)*{sqrt(3)*n}*n}*[n*{sqrt(5)*n}]").unwrap();
        assert_eq!(poly_growth_decompose(&q), GrowthDecomposition::Unsupported);
    }

    #[test]
    fn plain_polynomial_decomposes_to_constants() {
        let q = parse("2*n^2 - n + 5").unwrap();
        let d = poly_growth_decompose(&q);
        assert_eq!(degrees(&d), vec![2, 1, 0]);
    }
}
