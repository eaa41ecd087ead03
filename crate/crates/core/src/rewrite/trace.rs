//! Worked rewrite replay: reduces the fractional part of a degree-two
//! generalized polynomial times an independent constant to the shape
//! `-{v_gamma} + w'(n)` with `w'` free of the leading basic index `gamma`,
//! exercising the three-variable pull-out, the product law, and the
//! two-variable pull-out along the way. Every step is verified numerically
//! as a mod-1 congruence.

use super::identities::id_pull_out;
use super::terms::Side;
use super::verify::{verify_gp_congruence, CongruenceReport};
use crate::error::RewriteError;
use crate::gp::GPExpr;
use crate::index::{basic_gp, cmp_index, mul_frac, render_index, IndexSym, PolySystem};
use crate::real::RealConst;
use serde::Serialize;
use std::cmp::Ordering;

#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub name: String,
    pub description: String,
    pub report: CongruenceReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct RewriteTrace {
    /// The four branches produced by the three-variable pull-out.
    pub expansion_branches: Vec<String>,
    pub steps: Vec<TraceStep>,
    pub gamma: String,
    pub gamma_valid: bool,
    pub gamma_above_top_atom: bool,
    pub pass: bool,
}

const SAMPLES: i64 = 500;
const TOL: f64 = 1e-20;
const BITS: u32 = 256;

fn frac(e: GPExpr) -> GPExpr {
    GPExpr::frac_part(e)
}

fn mul(fs: Vec<GPExpr>) -> GPExpr {
    GPExpr::mul(fs)
}

/// Replay of the worked example: q(n) built from sqrt2, sqrt3, sqrt5,
/// sqrt7, sqrt11 fractional parts, lambda = pi.
pub fn apply_worked_example() -> Result<RewriteTrace, RewriteError> {
    let lambda = RealConst::Pi;
    let s2 = GPExpr::monomial(RealConst::sqrt_int(2), 1); // atom a
    let s7 = GPExpr::monomial(RealConst::sqrt_int(7), 1); // atom b
    let s5 = GPExpr::monomial(RealConst::sqrt_int(5), 2); // atom c
    let s11 = GPExpr::monomial(RealConst::sqrt_int(11), 3); // atom d
    let s55 = GPExpr::monomial(RealConst::sqrt_int(55), 5); // atom e
    let ln = GPExpr::monomial(lambda.clone(), 1); // atom f

    let system = PolySystem::new(vec![
        ("a".into(), s2.clone()),
        ("b".into(), s7.clone()),
        ("c".into(), s5.clone()),
        ("d".into(), s11.clone()),
        ("e".into(), s55.clone()),
        ("f".into(), ln.clone()),
    ])
    .map_err(|e| RewriteError::BadParameters(e.to_string()))?;
    let idx = |text: &str| crate::index::parse_index(text, &system).expect("trace index literal");

    // the three pull-out operands: u1 = lambda n, u2 = v_[c,b],
    // u3 = v_[[d,c],[d,b]]
    let i_u2 = idx("[c,b]");
    let i_u3 = idx("[[d,c],[d,b]]");
    let u1 = ln.clone();
    let u2 = basic_gp(&i_u2, &system).map_err(bad)?;
    let u3 = basic_gp(&i_u3, &system).map_err(bad)?;

    // branch terms of the three-variable pull-out
    let b_head = mul(vec![frac(u1.clone()), frac(u2.clone()), frac(u3.clone())]);
    let b_mid = mul(vec![u2.clone(), frac(u1.clone()), frac(u3.clone())]);
    let b_gamma = mul(vec![u3.clone(), frac(u1.clone()), frac(u2.clone())]);
    let b_rest = GPExpr::add(vec![
        mul(vec![u1.clone(), u2.clone(), frac(u3.clone())]),
        mul(vec![u1.clone(), u3.clone(), frac(u2.clone())]),
        mul(vec![u2.clone(), u3.clone(), frac(u1.clone())]),
        GPExpr::neg(mul(vec![u1.clone(), u2.clone(), u3.clone()])),
    ]);

    let mut steps = Vec::new();

    // Step 1: the three-variable pull-out applied to u1 {u2}{u3}.
    let w_term = mul(vec![u1.clone(), frac(u2.clone()), frac(u3.clone())]);
    let expansion = GPExpr::add(vec![
        b_head.clone(),
        GPExpr::neg(b_mid.clone()),
        GPExpr::neg(b_gamma.clone()),
        b_rest.clone(),
    ]);
    steps.push(TraceStep {
        name: "pull-out-3".into(),
        description: "u1 {u2}{u3} expands into four branches modulo 1".into(),
        report: verify_gp_congruence("pull-out-3", &w_term, &expansion, SAMPLES, TOL, BITS)?,
    });
    // cross-check against the formal identity object
    debug_assert!(matches!(id_pull_out(3).unwrap().rhs, Side::Sum(_)));

    // Step 2: the third branch is a single basic generalized polynomial
    // v_gamma, with gamma produced by three applications of the product law.
    let gamma = {
        let g1 = mul_frac(&idx("[d,c]"), &idx("f")).map_err(bad)?;
        let g2 = mul_frac(&g1, &i_u2).map_err(bad)?;
        mul_frac(&g2, &idx("[d,b]")).map_err(bad)?
    };
    let gamma_expected = idx("[[[[d,c],f],[c,b]],[d,b]]");
    if gamma != gamma_expected {
        return Err(RewriteError::BadParameters(format!(
            "product law produced {} instead of {}",
            render_index(&gamma, &system),
            render_index(&gamma_expected, &system)
        )));
    }
    let v_gamma = basic_gp(&gamma, &system).map_err(bad)?;
    steps.push(TraceStep {
        name: "gamma-branch".into(),
        description: "u3 {u1}{u2} equals the basic polynomial v_gamma".into(),
        report: verify_gp_congruence("gamma-branch", &b_gamma, &v_gamma, SAMPLES, TOL, BITS)?,
    });
    let gamma_valid = gamma.is_valid(system.len());
    let gamma_above_top_atom =
        cmp_index(&gamma, &IndexSym::atom(3)) == Ordering::Greater; // atom d

    // Step 3: the second branch via the two-variable pull-out with
    // u1' = u2 {u1} = v_[[c,b],f] and u2' = u3.
    let i_u1p = mul_frac(&i_u2, &idx("f")).map_err(bad)?;
    debug_assert_eq!(i_u1p, idx("[[c,b],f]"));
    let v_u1p = basic_gp(&i_u1p, &system).map_err(bad)?;
    let i_mid = mul_frac(&i_u3, &i_u1p).map_err(bad)?;
    debug_assert_eq!(i_mid, idx("[[[d,c],[d,b]],[[c,b],f]]"));
    let v_mid = basic_gp(&i_mid, &system).map_err(bad)?;
    let i_55 = idx("[[[[e,b],c],f],[d,b]]");
    let v_55 = basic_gp(&i_55, &system).map_err(bad)?;
    // u1' u2' really is v_55 (sqrt5 sqrt11 = sqrt55, degrees 2+3 = 5)
    steps.push(TraceStep {
        name: "mid-branch-product".into(),
        description: "u1'u2' collapses into the sqrt55 basic polynomial".into(),
        report: verify_gp_congruence(
            "mid-branch-product",
            &mul(vec![v_u1p.clone(), u3.clone()]),
            &v_55,
            SAMPLES,
            TOL,
            BITS,
        )?,
    });
    let id6_rhs = GPExpr::add(vec![
        mul(vec![frac(v_u1p.clone()), frac(u3.clone())]),
        GPExpr::neg(v_mid.clone()),
        v_55.clone(),
    ]);
    steps.push(TraceStep {
        name: "pull-out-2".into(),
        description: "u2 {u1}{u3} rewrites through the two-variable pull-out".into(),
        report: verify_gp_congruence("pull-out-2", &b_mid, &id6_rhs, SAMPLES, TOL, BITS)?,
    });

    // Step 4: assemble the full polynomial and exhibit
    // {q(n) lambda} = -{v_gamma} + w'(n) mod 1.
    let lam = GPExpr::Const(lambda.clone());
    let q = GPExpr::add(vec![
        mul(vec![frac(s2.clone()), GPExpr::pow(GPExpr::Var, 2)]),
        mul(vec![
            GPExpr::add(vec![
                mul(vec![GPExpr::Const(RealConst::sqrt_int(3)), frac(s2.clone())]),
                mul(vec![frac(u2.clone()), frac(u3.clone())]),
            ]),
            GPExpr::Var,
        ]),
        GPExpr::add(vec![
            mul(vec![GPExpr::int(3), frac(s2.clone())]),
            GPExpr::neg(mul(vec![frac(s5.clone()), frac(s7.clone()), frac(s11.clone())])),
        ]),
    ]);
    let poly_terms = GPExpr::add(vec![
        mul(vec![lam.clone(), GPExpr::pow(GPExpr::Var, 2), frac(s2.clone())]),
        mul(vec![
            GPExpr::Const(RealConst::sqrt_int(3)),
            lam.clone(),
            GPExpr::Var,
            frac(s2.clone()),
        ]),
        mul(vec![
            lam.clone(),
            GPExpr::add(vec![
                mul(vec![GPExpr::int(3), frac(s2.clone())]),
                GPExpr::neg(mul(vec![frac(s5.clone()), frac(s7.clone()), frac(s11.clone())])),
            ]),
        ]),
    ]);
    let w_prime = GPExpr::add(vec![
        poly_terms,
        b_head.clone(),
        GPExpr::neg(id6_rhs.clone()),
        b_rest.clone(),
    ]);
    let lhs_final = GPExpr::add(vec![mul(vec![q.clone(), lam.clone()]), v_gamma.clone()]);
    steps.push(TraceStep {
        name: "final-shape".into(),
        description: "{q(n) lambda} + {v_gamma} matches w'(n) modulo 1".into(),
        report: verify_gp_congruence("final-shape", &lhs_final, &w_prime, SAMPLES, TOL, BITS)?,
    });

    let pass = steps.iter().all(|s| s.report.pass) && gamma_valid && gamma_above_top_atom;
    Ok(RewriteTrace {
        expansion_branches: vec![
            b_head.render(),
            format!("-({})", b_mid.render()),
            format!("-({})", b_gamma.render()),
            b_rest.render(),
        ],
        steps,
        gamma: render_index(&gamma, &system),
        gamma_valid,
        gamma_above_top_atom,
        pass,
    })
}

fn bad(e: crate::error::IndexError) -> RewriteError {
    RewriteError::BadParameters(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_trace_passes() {
        let trace = apply_worked_example().unwrap();
        assert_eq!(trace.expansion_branches.len(), 4);
        assert!(trace.gamma_valid);
        assert!(trace.gamma_above_top_atom);
        assert_eq!(trace.gamma, "[[[[d,c],f],[c,b]],[d,b]]");
        for s in &trace.steps {
            assert!(s.report.pass, "step {} failed: {:?}", s.name, s.report);
        }
        assert!(trace.pass);
    }
}
