//! Named scenario catalog: each scenario wires expressions to statistics and
//! grades the outcome against frozen expectations from the fixtures file.

use super::{simultaneous_smallness, ToralTarget};
use crate::dist;
use crate::error::{EvalError, RecurrenceError};
use crate::gp::{dist_to_int_expr, sturmian_diff_expr, GPExpr};
use crate::index::{basic_gp, parse_index, PolySystem};
use crate::primes;
use crate::real::{PrecisionConfig, RealConst};
use crate::value::{rational_dist_to_int, Value};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::json;
use std::cmp::Ordering;

const FIXTURES: &str = include_str!("../../fixtures/scenarios.json");

#[derive(serde::Deserialize)]
struct ScenarioSpec {
    claim: String,
    default_n: i64,
    #[serde(default)]
    thresholds: serde_json::Map<String, serde_json::Value>,
}

#[derive(serde::Deserialize)]
struct Fixtures {
    schema: String,
    scenarios: std::collections::BTreeMap<String, ScenarioSpec>,
}

fn fixtures() -> &'static Fixtures {
    use std::sync::OnceLock;
    static CELL: OnceLock<Fixtures> = OnceLock::new();
    CELL.get_or_init(|| {
        let f: Fixtures = serde_json::from_str(FIXTURES).expect("scenario fixtures parse");
        assert_eq!(f.schema, "gpequi-scenarios/1");
        f
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioCheck {
    pub what: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioOutcome {
    pub name: String,
    pub claim: String,
    pub n: i64,
    pub observations: serde_json::Value,
    pub checks: Vec<ScenarioCheck>,
    pub pass: bool,
}

pub fn scenario_names() -> Vec<(String, String)> {
    fixtures()
        .scenarios
        .iter()
        .map(|(k, v)| (k.clone(), v.claim.clone()))
        .collect()
}

struct Ctx<'a> {
    spec: &'a ScenarioSpec,
    n: i64,
    cfg: PrecisionConfig,
    checks: Vec<ScenarioCheck>,
    obs: serde_json::Map<String, serde_json::Value>,
}

impl Ctx<'_> {
    fn th(&self, key: &str) -> f64 {
        self.spec
            .thresholds
            .get(key)
            .and_then(|v| v.as_f64())
            .unwrap_or_else(|| panic!("missing threshold `{}`", key))
    }

    fn check(&mut self, what: &str, pass: bool) {
        self.checks.push(ScenarioCheck { what: what.to_string(), pass });
    }

    fn observe(&mut self, key: &str, v: serde_json::Value) {
        self.obs.insert(key.to_string(), v);
    }
}

pub fn run_scenario(
    name: &str,
    n_override: Option<i64>,
    cfg: &PrecisionConfig,
) -> Result<ScenarioOutcome, RecurrenceError> {
    let spec = fixtures()
        .scenarios
        .get(name)
        .ok_or_else(|| RecurrenceError::UnknownScenario(name.to_string()))?;
    let n = n_override.unwrap_or(spec.default_n);
    if n < 10 {
        return Err(RecurrenceError::InvalidParameter("range too small".into()));
    }
    let mut ctx = Ctx {
        spec,
        n,
        cfg: *cfg,
        checks: Vec::new(),
        obs: serde_json::Map::new(),
    };
    match name {
        "ex6.2" => scenario_ex62(&mut ctx)?,
        "ex6.4" => scenario_ex64(&mut ctx)?,
        "ex6.27a" => scenario_ex627(&mut ctx, Gate::A)?,
        "ex6.27b" => scenario_ex627(&mut ctx, Gate::B)?,
        "ex6.27c" => scenario_ex627(&mut ctx, Gate::C)?,
        "remark1.2" => scenario_liouville_growth(&mut ctx)?,
        "remark6.12i" => scenario_always_odd(&mut ctx)?,
        "remark5.3a" => scenario_prime_halfline(&mut ctx)?,
        "remark5.3b" => scenario_parity_quartic(&mut ctx)?,
        "intro-piecewise" => scenario_intro_piecewise(&mut ctx)?,
        "u-two-valued" => scenario_u_two_valued(&mut ctx)?,
        "dist-to-z" => scenario_dist_to_z(&mut ctx)?,
        "ex2.5" => scenario_cube_triple(&mut ctx)?,
        "n-u-adequacy" => scenario_nu_adequacy(&mut ctx)?,
        "sqrt2-ud" => scenario_sqrt2_ud(&mut ctx)?,
        other => return Err(RecurrenceError::UnknownScenario(other.to_string())),
    }
    let pass = ctx.checks.iter().all(|c| c.pass);
    Ok(ScenarioOutcome {
        name: name.to_string(),
        claim: spec.claim.clone(),
        n,
        observations: serde_json::Value::Object(ctx.obs),
        checks: ctx.checks,
        pass,
    })
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn con(c: RealConst) -> GPExpr {
    GPExpr::Const(c)
}

/// Certified sign of `expr(n)`: precision ladder first, with an exact
/// monomial-algebra fallback for values sitting exactly on zero.
fn certified_sign(expr: &GPExpr, n: i64, cfg: &PrecisionConfig) -> Result<Ordering, EvalError> {
    // a short numeric ladder catches everything except exact boundary hits
    for p in cfg.ladder().take(3) {
        let sub = PrecisionConfig { start_bits: p, max_bits: cfg.max_bits };
        let v = expr.eval(n, &sub)?;
        match v {
            Value::Exact(r) => {
                return Ok(if r.is_zero() {
                    Ordering::Equal
                } else if r.is_positive() {
                    Ordering::Greater
                } else {
                    Ordering::Less
                })
            }
            Value::Approx(iv) => match iv.is_sign_positive() {
                Some(true) => return Ok(Ordering::Greater),
                Some(false) => {
                    if iv.hi().sign() == num_bigint::Sign::Minus {
                        return Ok(Ordering::Less);
                    }
                    if iv.lo().cmp_val(iv.hi()) == Ordering::Equal {
                        return Ok(Ordering::Equal);
                    }
                    // hi == 0 but lo < 0: keep refining
                }
                None => {}
            },
        }
    }
    if let Some(sym) = expr.eval_symbolic(n, cfg) {
        if let Some(o) = crate::symbolic::certified_const_sign(&sym) {
            return Ok(o);
        }
    }
    Err(EvalError::PrecisionExhausted { n, bits: cfg.max_bits })
}

// --- individual scenarios ---

fn scenario_ex62(ctx: &mut Ctx) -> Result<(), RecurrenceError> {
    let s11 = RealConst::sqrt_int(11);
    let q = GPExpr::int_part(GPExpr::add(vec![
        GPExpr::mul(vec![con(s11.clone()), GPExpr::Var]),
        GPExpr::int(2),
    ]));
    let inv_s11 = RealConst::div(RealConst::integer(1), s11.clone())
        .map_err(|e| RecurrenceError::InvalidParameter(e.to_string()))?;
    let eps = BigRational::new(
        BigInt::from((ctx.th("eps") * 10.0) as i64),
        BigInt::from(10),
    );
    let target = ToralTarget::new(vec![inv_s11.clone()], eps)?;
    let r = simultaneous_smallness(&q, &target.alphas, &target.eps, ctx.n, &ctx.cfg)?;
    ctx.observe("smallness_count", json!(r.density.count));
    ctx.observe("density", json!(r.density.value));
    ctx.check(
        "no n brings q(n)/sqrt(11) within eps of an integer",
        r.density.count as f64 <= ctx.th("density_max"),
    );
    // exact orbit confinement: {q(n)/sqrt(11)} in [1/sqrt(11), 2/sqrt(11))
    let fr = GPExpr::frac_part(GPExpr::mul(vec![q.clone(), con(inv_s11.clone())]));
    let lower_gap = GPExpr::sub(fr.clone(), con(inv_s11.clone()));
    let upper_gap = GPExpr::sub(
        con(RealConst::mul(RealConst::integer(2), inv_s11)),
        fr,
    );
    let mut confined = true;
    for n in 1..=ctx.n {
        if certified_sign(&lower_gap, n, &ctx.cfg)? == Ordering::Less
            || certified_sign(&upper_gap, n, &ctx.cfg)? != Ordering::Greater
        {
            confined = false;
            ctx.observe("first_escape", json!(n));
            break;
        }
    }
    ctx.check("orbit confined to [1/sqrt11, 2/sqrt11)", confined);
    Ok(())
}

fn scenario_ex64(ctx: &mut Ctx) -> Result<(), RecurrenceError> {
    let bad = |e: crate::error::RealError| RecurrenceError::InvalidParameter(e.to_string());
    // alpha_1 = sqrt5/2, alpha_2 = sqrt33/5; both in (1, 4/3), rationally
    // independent together with 1
    let a1 = RealConst::mul(RealConst::sqrt_int(5), RealConst::ratio(1, 2));
    let a2 = RealConst::mul(RealConst::sqrt_int(33), RealConst::ratio(1, 5));
    let gate = |alpha: &RealConst| -> Result<GPExpr, RecurrenceError> {
        // [[alpha n] (2/alpha)] - (2n - 2): the 0/1 indicator of
        // {alpha n} < alpha/2
        let two_over = RealConst::div(RealConst::integer(2), alpha.clone()).map_err(bad)?;
        Ok(GPExpr::add(vec![
            GPExpr::int_part(GPExpr::mul(vec![
                GPExpr::int_part(GPExpr::mul(vec![con(alpha.clone()), GPExpr::Var])),
                con(two_over),
            ])),
            GPExpr::neg(GPExpr::add(vec![
                GPExpr::mul(vec![GPExpr::int(2), GPExpr::Var]),
                GPExpr::int(-2),
            ])),
        ]))
    };
    let q1 = gate(&a1)?;
    let q2 = gate(&a2)?;
    let q = GPExpr::add(vec![
        GPExpr::mul(vec![GPExpr::int(4), GPExpr::Var]),
        GPExpr::int(-4),
        GPExpr::mul(vec![
            GPExpr::int(5),
            GPExpr::int_part(GPExpr::mul(vec![
                con(RealConst::ratio(1, 2)),
                GPExpr::add(vec![q1, q2]),
            ])),
        ]),
    ]);
    let eps = rat(1, 10);
    let t1 = RealConst::mul(a1.clone(), RealConst::ratio(1, 4));
    let t2 = RealConst::mul(a2.clone(), RealConst::ratio(1, 4));
    let one = simultaneous_smallness(&q, &[t1.clone()], &eps, ctx.n, &ctx.cfg)?;
    ctx.observe("one_torus_density", json!(one.density.value));
    ctx.observe("one_torus_witnesses", json!(one.witnesses));
    ctx.check(
        "one-dimensional target is visited with positive density",
        one.density.value >= ctx.th("one_torus_density_min"),
    );
    let two = simultaneous_smallness(&q, &[t1, t2], &eps, ctx.n, &ctx.cfg)?;
    ctx.observe("two_torus_count", json!(two.density.count));
    ctx.check(
        "two-dimensional target is never approached within eps",
        two.density.count as f64 <= ctx.th("two_torus_count_max"),
    );
    // per-n floor certificates backing the emptiness
    let fa1 = a1.approx_f64() - 1.0;
    let fa2 = a2.approx_f64() - 1.0;
    ctx.observe(
        "certified_floor",
        json!((1.0f64 / 3.0).min(fa1.min(fa2)).min(1.0 - 0.75 * a2.approx_f64())),
    );
    Ok(())
}

enum Gate {
    A,
    B,
    C,
}

fn scenario_ex627(ctx: &mut Ctx, which: Gate) -> Result<(), RecurrenceError> {
    let alpha = RealConst::liouville(3).map_err(|e| RecurrenceError::InvalidParameter(e.to_string()))?;
    let alpha_rat = alpha.as_exact_rational().expect("truncation is rational");
    let beta = RealConst::sqrt_int(2);
    // v(n) = [1 - {[{alpha n} n] beta}]
    let v = GPExpr::int_part(GPExpr::sub(
        GPExpr::int(1),
        GPExpr::frac_part(GPExpr::mul(vec![
            GPExpr::int_part(GPExpr::mul(vec![
                GPExpr::frac_part(GPExpr::mul(vec![con(alpha.clone()), GPExpr::Var])),
                GPExpr::Var,
            ])),
            con(beta),
        ])),
    ));
    let vals = v.eval_range(1, ctx.n, &ctx.cfg).map_err(RecurrenceError::from)?;
    let mut gate_ok = true;
    let mut members = Vec::new();
    for (i, val) in vals.iter().enumerate() {
        let n = i as i64 + 1;
        let vn = val
            .as_integer()
            .and_then(|k| k.to_i64())
            .ok_or(RecurrenceError::NonIntegerValue(n))?;
        let fr = {
            let x = &alpha_rat * BigRational::from(BigInt::from(n));
            &x - x.floor()
        };
        let direct = fr < BigRational::new(BigInt::one(), BigInt::from(n));
        if (vn == 1) != direct || !(0..=1).contains(&vn) {
            gate_ok = false;
        }
        if direct && fr.is_positive() {
            members.push(n);
        }
    }
    ctx.check("gate value matches the direct fractional condition", gate_ok);
    let sparse_density = members.len() as f64 / ctx.n as f64;
    ctx.observe("sparse_set_head", json!(members.iter().take(12).collect::<Vec<_>>()));
    ctx.observe("sparse_set_count", json!(members.len()));
    ctx.observe("sparse_set_density", json!(sparse_density));
    ctx.check("sparse witness set is nonempty", !members.is_empty());
    match which {
        Gate::A => {
            ctx.check(
                "sparse set density below bound",
                sparse_density <= ctx.th("gate_density_max"),
            );
            // q1 = v(n) n is small off the sparse set
            let q1 = GPExpr::mul(vec![v.clone(), GPExpr::Var]);
            let small = count_abs_below(&q1, &rat(1, 1), 1, ctx.n, &ctx.cfg)?;
            let density = small as f64 / ctx.n as f64;
            ctx.observe("q1_small_density", json!(density));
            ctx.check(
                "|v(n) n| < 1 on most of the range (not adequate)",
                density >= ctx.th("small_density_min"),
            );
        }
        Gate::B => {
            // q2 = v n + (1 - v) [[sqrt2 n] sqrt2]
            let s2 = RealConst::sqrt_int(2);
            let inner = GPExpr::int_part(GPExpr::mul(vec![
                GPExpr::int_part(GPExpr::mul(vec![con(s2.clone()), GPExpr::Var])),
                con(s2),
            ]));
            let q2 = GPExpr::add(vec![
                GPExpr::mul(vec![v.clone(), GPExpr::Var]),
                GPExpr::mul(vec![GPExpr::sub(GPExpr::int(1), v.clone()), inner]),
            ]);
            let small = count_abs_below(&q2, &rat(1, 1), 1, ctx.n, &ctx.cfg)?;
            let density = small as f64 / ctx.n as f64;
            ctx.observe("q2_small_density", json!(density));
            ctx.check(
                "|q2(n)| < 1 is rare (adequate patch)",
                density <= ctx.th("small_density_max"),
            );
        }
        Gate::C => {
            // q3 = 2 n^2 - 1 + v(n): halves near integers exactly on the gate
            let q3 = GPExpr::add(vec![
                GPExpr::mul(vec![GPExpr::int(2), GPExpr::pow(GPExpr::Var, 2)]),
                GPExpr::int(-1),
                v.clone(),
            ]);
            let eps = BigRational::new(
                BigInt::from((ctx.th("eps") * 100.0).round() as i64),
                BigInt::from(100),
            );
            let r = simultaneous_smallness(&q3, &[RealConst::ratio(1, 2)], &eps, ctx.n, &ctx.cfg)?;
            ctx.observe("half_smallness_density", json!(r.density.value));
            ctx.observe("half_smallness_witnesses", json!(r.witnesses));
            ctx.check(
                "smallness density below bound",
                r.density.value <= ctx.th("density_max"),
            );
            ctx.check("smallness witnesses exist", r.density.count > 0);
        }
    }
    Ok(())
}

fn count_abs_below(
    q: &GPExpr,
    bound: &BigRational,
    lo: i64,
    hi: i64,
    cfg: &PrecisionConfig,
) -> Result<u64, RecurrenceError> {
    let vals = q.eval_range(lo, hi, cfg).map_err(RecurrenceError::from)?;
    Ok(vals.iter().filter(|v| dist::abs_below(v, bound)).count() as u64)
}

fn scenario_liouville_growth(ctx: &mut Ctx) -> Result<(), RecurrenceError> {
    let degree = ctx.th("degree") as u32;
    let alpha = RealConst::liouville(4).map_err(|e| RecurrenceError::InvalidParameter(e.to_string()))?;
    let alpha_rat = alpha.as_exact_rational().expect("truncation is rational");
    // q(n) = dist(alpha n, Z) n^degree, via the bracket formula
    let q = GPExpr::mul(vec![
        dist_to_int_expr(GPExpr::mul(vec![con(alpha.clone()), GPExpr::Var])),
        GPExpr::pow(GPExpr::Var, degree),
    ]);
    // formula consistency against the exact rational distance
    let mut formula_ok = true;
    for n in 1..=1000i64 {
        let d = rational_dist_to_int(&(&alpha_rat * BigRational::from(BigInt::from(n))));
        let v = q.eval(n, &ctx.cfg).map_err(RecurrenceError::from)?;
        let expect = d * num_traits::pow::pow(BigRational::from(BigInt::from(n)), degree as usize);
        if v.as_exact() != Some(&expect) {
            formula_ok = false;
            break;
        }
    }
    ctx.check("bracket norm formula matches exact distance", formula_ok);
    // exceptional set J = {n : dist(alpha n, Z) < n^(degree - 1/2 - degree)}
    // i.e. dist < n^(1/2 - degree); equivalently n^(2 degree - 1) dist^2 < 1
    let mut exceptional = Vec::new();
    let mut growth_ok = true;
    for n in 1..=ctx.n {
        let d = rational_dist_to_int(&(&alpha_rat * BigRational::from(BigInt::from(n))));
        let nn = BigRational::from(BigInt::from(n));
        let in_j = &d * &d * num_traits::pow::pow(nn.clone(), (2 * degree - 1) as usize)
            < BigRational::one();
        if in_j {
            exceptional.push(n);
        } else {
            // off J: |q(n)| = d n^degree >= sqrt(n)
            let q_sq = &d * &d * num_traits::pow::pow(nn.clone(), 2 * degree as usize);
            if q_sq < nn {
                growth_ok = false;
            }
        }
    }
    let density = exceptional.len() as f64 / ctx.n as f64;
    ctx.observe("exceptional_head", json!(exceptional.iter().take(12).collect::<Vec<_>>()));
    ctx.observe("exceptional_count", json!(exceptional.len()));
    ctx.observe("exceptional_density", json!(density));
    ctx.check("exceptional set nonempty", !exceptional.is_empty());
    ctx.check(
        "exceptional density below bound",
        density <= ctx.th("exceptional_density_max"),
    );
    ctx.check("off the exceptional set, |q(n)| >= sqrt(n)", growth_ok);
    let smalls = count_abs_below(&q, &rat(1, 1), 1, ctx.n, &ctx.cfg)?;
    let small_density = smalls as f64 / ctx.n as f64;
    ctx.observe("small_density", json!(small_density));
    ctx.check(
        "|q(n)| < 1 has tiny density",
        small_density <= ctx.th("small_density_max"),
    );
    Ok(())
}

fn scenario_always_odd(ctx: &mut Ctx) -> Result<(), RecurrenceError> {
    let bad = |e: crate::error::RealError| RecurrenceError::InvalidParameter(e.to_string());
    // alpha = sqrt2 + 1 > 1, c = 2 > alpha/(alpha-1) = 1 + 1/sqrt2
    let alpha = RealConst::add(RealConst::sqrt_int(2), RealConst::integer(1));
    let c_over_alpha = RealConst::div(RealConst::integer(2), alpha.clone()).map_err(bad)?;
    let q = GPExpr::int_part(GPExpr::mul(vec![
        GPExpr::int_part(GPExpr::mul(vec![con(alpha), GPExpr::Var])),
        con(c_over_alpha),
    ]));
    let r = simultaneous_smallness(&q, &[RealConst::ratio(1, 2)], &rat(1, 4), ctx.n, &ctx.cfg)?;
    ctx.observe("count", json!(r.density.count));
    ctx.check(
        "the set {n : dist(q(n)/2, Z) < 1/4} is empty",
        r.density.count as f64 <= ctx.th("count_max"),
    );
    Ok(())
}

fn scenario_prime_halfline(ctx: &mut Ctx) -> Result<(), RecurrenceError> {
    let bad = |e: crate::error::RealError| RecurrenceError::InvalidParameter(e.to_string());
    let s3 = RealConst::sqrt_int(3);
    let q = GPExpr::add(vec![
        GPExpr::mul(vec![con(s3.clone()), GPExpr::pow(GPExpr::Var, 2)]),
        GPExpr::mul(vec![
            con(s3.clone()),
            GPExpr::frac_part(GPExpr::mul(vec![GPExpr::Var, con(RealConst::sqrt_int(2))])),
        ]),
    ]);
    let lambda = RealConst::div(
        RealConst::integer(1),
        RealConst::mul(RealConst::integer(2), s3),
    )
    .map_err(bad)?;
    let fr = GPExpr::frac_part(GPExpr::mul(vec![q, con(lambda)]));
    // gap(n) = {q(n) lambda} - 1/2: >= 0 for odd primes, < 0 for p = 2
    let gap = GPExpr::sub(fr, con(RealConst::ratio(1, 2)));
    let table = primes::sieve(ctx.n as u64);
    let mut upper_ok = true;
    let mut exceptions = Vec::new();
    for p in table.primes() {
        let sign = certified_sign(&gap, p as i64, &ctx.cfg).map_err(RecurrenceError::from)?;
        if p == 2 {
            if sign != Ordering::Less {
                upper_ok = false;
            }
            exceptions.push(p);
        } else if sign == Ordering::Less {
            upper_ok = false;
            exceptions.push(p);
        }
    }
    ctx.observe("exceptions", json!(exceptions));
    ctx.check(
        "fractional orbit in [1/2, 1) at every prime except 2",
        upper_ok && exceptions == vec![2],
    );
    Ok(())
}

fn scenario_parity_quartic(ctx: &mut Ctx) -> Result<(), RecurrenceError> {
    let bad = |e: crate::error::RealError| RecurrenceError::InvalidParameter(e.to_string());
    let s2 = RealConst::sqrt_int(2);
    let half_s2 = RealConst::mul(s2.clone(), RealConst::ratio(1, 2));
    // sqrt2 n - [sqrt2 n] as an explicit difference
    let frac_part_lin = GPExpr::sub(
        GPExpr::mul(vec![con(s2.clone()), GPExpr::Var]),
        GPExpr::int_part(GPExpr::mul(vec![con(s2.clone()), GPExpr::Var])),
    );
    // n - 2[n/2]: the parity indicator
    let parity = GPExpr::sub(
        GPExpr::Var,
        GPExpr::mul(vec![
            GPExpr::int(2),
            GPExpr::int_part(GPExpr::mul(vec![con(RealConst::ratio(1, 2)), GPExpr::Var])),
        ]),
    );
    let q = GPExpr::add(vec![
        GPExpr::mul(vec![con(s2.clone()), GPExpr::pow(GPExpr::Var, 4)]),
        GPExpr::mul(vec![parity, con(half_s2.clone()), frac_part_lin.clone()]),
        GPExpr::mul(vec![con(half_s2), frac_part_lin]),
    ]);
    let lambda = RealConst::div(RealConst::integer(1), s2).map_err(bad)?;
    let pts = dist::frac_points(&q, Some(&lambda), 1, ctx.n, &ctx.cfg)
        .map_err(RecurrenceError::from)?;
    let hist = dist::histogram(&pts, 2);
    let mass = hist.counts[0] as f64 / pts.len() as f64;
    ctx.observe("mass_lower_half", json!(mass));
    ctx.check(
        "integer average puts ~3/4 of the mass in [0, 1/2)",
        mass >= ctx.th("mass_lo") && mass <= ctx.th("mass_hi"),
    );
    let prime_rep = primes::prime_seq_stats(&q, Some(&lambda), ctx.n as u64, 20, &ctx.cfg)
        .map_err(RecurrenceError::from)?;
    let dstar = prime_rep.star_discrepancy.unwrap_or(1.0);
    ctx.observe("prime_dstar", json!(dstar));
    ctx.observe("prime_points", json!(prime_rep.n_points));
    ctx.check(
        "prime orbit is uniformly distributed",
        dstar < ctx.th("prime_dstar_max"),
    );
    Ok(())
}

fn scenario_intro_piecewise(ctx: &mut Ctx) -> Result<(), RecurrenceError> {
    let bad = |e: crate::error::RealError| RecurrenceError::InvalidParameter(e.to_string());
    let s5 = RealConst::sqrt_int(5);
    let half = RealConst::ratio(1, 2);
    let coeff = RealConst::mul(RealConst::mul(s5.clone(), RealConst::Pi), half.clone());
    // B(n) = [ (sqrt5 pi / 2) n - [pi n] sqrt5/2 ] in {0, 1}
    let b = GPExpr::int_part(GPExpr::sub(
        GPExpr::mul(vec![con(coeff), GPExpr::Var]),
        GPExpr::mul(vec![
            GPExpr::int_part(GPExpr::mul(vec![con(RealConst::Pi), GPExpr::Var])),
            con(RealConst::mul(s5.clone(), half)),
        ]),
    ));
    let threshold = RealConst::div(RealConst::integer(2), s5).map_err(bad)?;
    // cond(n) = 2/sqrt5 - {pi n}: positive exactly on the sqrt2-branch
    let cond = GPExpr::sub(
        con(threshold),
        GPExpr::frac_part(GPExpr::mul(vec![con(RealConst::Pi), GPExpr::Var])),
    );
    let mut rule_ok = true;
    let mut first_break = None;
    for n in 1..=ctx.n {
        let gate = b
            .eval(n, &ctx.cfg)
            .map_err(RecurrenceError::from)?
            .as_integer()
            .and_then(|k| k.to_i64())
            .ok_or(RecurrenceError::NonIntegerValue(n))?;
        let below = certified_sign(&cond, n, &ctx.cfg).map_err(RecurrenceError::from)?
            == Ordering::Greater;
        let expected = if below { 0 } else { 1 };
        if gate != expected {
            rule_ok = false;
            first_break = Some(n);
            break;
        }
    }
    ctx.observe("first_break", json!(first_break));
    ctx.check(
        "gate equals 0 iff {pi n} < 2/sqrt5, so q(n) is sqrt2 n or sqrt3 n",
        rule_ok,
    );
    Ok(())
}

fn scenario_u_two_valued(ctx: &mut Ctx) -> Result<(), RecurrenceError> {
    let s2 = RealConst::sqrt_int(2);
    let u = sturmian_diff_expr(s2.clone());
    // step(n) = {n sqrt2} - (1 - {sqrt2}) = {n sqrt2} - (2 - sqrt2)
    let step = GPExpr::sub(
        GPExpr::frac_part(GPExpr::mul(vec![GPExpr::Var, con(s2.clone())])),
        con(RealConst::sub(RealConst::integer(2), s2)),
    );
    let vals = u.eval_range(-ctx.n, ctx.n, &ctx.cfg).map_err(RecurrenceError::from)?;
    let mut ok = true;
    let mut ones = 0u64;
    for (i, v) in vals.iter().enumerate() {
        let n = i as i64 - ctx.n;
        let uv = v
            .as_integer()
            .and_then(|k| k.to_i64())
            .ok_or(RecurrenceError::NonIntegerValue(n))?;
        if uv != 0 && uv != 1 {
            ok = false;
            break;
        }
        let high = certified_sign(&step, n, &ctx.cfg).map_err(RecurrenceError::from)?
            != Ordering::Less;
        if (uv == 1) != high {
            ok = false;
            break;
        }
        ones += uv as u64;
    }
    ctx.observe("ones_frequency", json!(ones as f64 / vals.len() as f64));
    ctx.check("u(n) is the indicator of {n sqrt2} >= 1 - {sqrt2}", ok);
    Ok(())
}

fn scenario_dist_to_z(ctx: &mut Ctx) -> Result<(), RecurrenceError> {
    let e = dist_to_int_expr(GPExpr::Var);
    let mut ok = true;
    for i in 0..=ctx.n.min(10_000) {
        let x = rat(i, 1000) - rat(5, 1);
        let v = e
            .eval_rational_arg(&x, &ctx.cfg)
            .map_err(RecurrenceError::from)?;
        if v.as_exact() != Some(&rational_dist_to_int(&x)) {
            ok = false;
            break;
        }
    }
    for (x, expect) in [(rat(3, 10), rat(3, 10)), (rat(7, 10), rat(3, 10)), (rat(1, 2), rat(1, 2))]
    {
        let v = e
            .eval_rational_arg(&x, &ctx.cfg)
            .map_err(RecurrenceError::from)?;
        if v.as_exact() != Some(&expect) {
            ok = false;
        }
    }
    ctx.check("bracket formula equals dist(x, Z) on the sample grid", ok);
    Ok(())
}

fn scenario_cube_triple(ctx: &mut Ctx) -> Result<(), RecurrenceError> {
    let sys = PolySystem::new(vec![
        ("a".into(), GPExpr::monomial(RealConst::sqrt_int(2), 1)),
        ("b".into(), GPExpr::monomial(RealConst::sqrt_int(3), 1)),
        ("c".into(), GPExpr::monomial(RealConst::sqrt_int(6), 2)),
    ])
    .map_err(|e| RecurrenceError::InvalidParameter(e.to_string()))?;
    let v1 = basic_gp(&parse_index("a", &sys).unwrap(), &sys).unwrap();
    let v2 = basic_gp(&parse_index("[b,a]", &sys).unwrap(), &sys).unwrap();
    let v3 = basic_gp(&parse_index("[[c,2a],3b]", &sys).unwrap(), &sys).unwrap();
    let window = ctx.th("window_len") as usize;
    let cells = ctx.th("cells") as usize;
    let rep = dist::wd_test_kd(
        &[(v1, None), (v2, None), (v3, None)],
        ctx.n,
        window,
        cells,
        &ctx.cfg,
    )
    .map_err(RecurrenceError::from)?;
    let full = rep.box_discrepancy.unwrap_or(1.0);
    let windowed = rep.max_window_discrepancy.unwrap_or(1.0);
    ctx.observe("box_discrepancy", json!(full));
    ctx.observe("max_window_box_discrepancy", json!(windowed));
    let bound = ctx.th("box_disc_max");
    ctx.check("full-range box discrepancy below bound", full < bound);
    ctx.check("windowed box discrepancy below bound", windowed < bound);
    Ok(())
}

fn scenario_nu_adequacy(ctx: &mut Ctx) -> Result<(), RecurrenceError> {
    let u = sturmian_diff_expr(RealConst::sqrt_int(2));
    let q = GPExpr::mul(vec![GPExpr::Var, u]);
    let d = dist::natural_density(&q, ctx.n, &ctx.cfg, |v| dist::abs_below(v, &rat(1, 1)))
        .map_err(RecurrenceError::from)?;
    let expect = 2.0 - std::f64::consts::SQRT_2;
    ctx.observe("density", json!(d.value));
    ctx.observe("expected", json!(expect));
    ctx.check(
        "density of |n u(n)| < 1 matches 2 - sqrt2",
        (d.value - expect).abs() <= ctx.th("tolerance"),
    );
    Ok(())
}

fn scenario_sqrt2_ud(ctx: &mut Ctx) -> Result<(), RecurrenceError> {
    let q = GPExpr::Var;
    let lambda = RealConst::sqrt_int(2);
    let rep = dist::ud_report(&q, Some(&lambda), 1, ctx.n, 3, 20, &ctx.cfg)
        .map_err(RecurrenceError::from)?;
    let dstar = rep.star_discrepancy.unwrap_or(1.0);
    ctx.observe("dstar", json!(dstar));
    ctx.observe("weyl_h1", json!(rep.weyl_sums[0].modulus));
    ctx.check("star discrepancy below bound", dstar < ctx.th("dstar_max"));
    // shrink-together trend across three decades
    let slack = ctx.th("trend_slack");
    let mut ds = Vec::new();
    let mut ws = Vec::new();
    for n in [1_000i64, 10_000, 100_000] {
        if n > ctx.n {
            break;
        }
        let r = dist::ud_report(&q, Some(&lambda), 1, n, 1, 10, &ctx.cfg)
            .map_err(RecurrenceError::from)?;
        ds.push(r.star_discrepancy.unwrap_or(1.0));
        ws.push(r.weyl_sums[0].modulus);
    }
    ctx.observe("dstar_ladder", json!(ds));
    ctx.observe("weyl_ladder", json!(ws));
    let trend = |xs: &[f64]| xs.windows(2).all(|w| w[1] <= slack * w[0]);
    ctx.check(
        "discrepancy and Weyl modulus shrink together along the ladder",
        ds.len() >= 2 && trend(&ds) && trend(&ws),
    );
    Ok(())
}
