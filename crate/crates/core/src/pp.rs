//! Piecewise-polynomial functions on [0,1]^l and the per-residue canonical
//! representation of bounded generalized polynomials over basic fractional
//! parts.
//!
//! Canonical forms are supplied as data (fixtures or user JSON documents,
//! schema `gpequi-cf/1`) and verified against direct evaluation; they are
//! never inferred.

use crate::dist::Density;
use crate::error::{EvalError, PpError};
use crate::gp::{parse_const, GPExpr, GPValue};
use crate::index::{basic_gp, parse_index, render_index, IndexSym, PolySystem};
use crate::real::{PrecisionConfig, RealConst};
use crate::value::{Resolved, Value};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Multivariate polynomial with symbolic real coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyND {
    pub dim: usize,
    /// (exponent vector, coefficient) pairs.
    pub terms: Vec<(Vec<u32>, RealConst)>,
}

impl PolyND {
    pub fn constant(dim: usize, c: RealConst) -> Self {
        PolyND { dim, terms: vec![(vec![0; dim], c)] }
    }

    pub fn zero(dim: usize) -> Self {
        PolyND { dim, terms: vec![] }
    }

    pub fn coordinate(dim: usize, axis: usize) -> Self {
        let mut exps = vec![0; dim];
        exps[axis] = 1;
        PolyND { dim, terms: vec![(exps, RealConst::integer(1))] }
    }

    /// Structurally zero: no terms, or every coefficient exactly zero.
    pub fn is_structurally_zero(&self) -> bool {
        self.terms
            .iter()
            .all(|(_, c)| c.as_exact_rational().map_or(false, |r| r.is_zero()))
    }

    pub fn eval_symbolic(&self, xs: &[RealConst]) -> RealConst {
        let mut acc = RealConst::integer(0);
        for (exps, coeff) in &self.terms {
            let mut t = coeff.clone();
            for (axis, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    t = RealConst::mul(t, xs[axis].clone());
                }
            }
            acc = RealConst::add(acc, t);
        }
        acc
    }

    pub fn eval_value(&self, xs: &[Value], p: u32) -> Result<Value, PpError> {
        if xs.len() != self.dim {
            return Err(PpError::Malformed(format!(
                "polynomial in {} variables evaluated at a {}-dimensional point",
                self.dim,
                xs.len()
            )));
        }
        let mut acc = Value::zero();
        for (exps, coeff) in &self.terms {
            let mut t = const_value(coeff, p)?;
            for (axis, &e) in exps.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&xs[axis].pow(e, p), p);
                }
            }
            acc = acc.add(&t, p);
        }
        Ok(acc)
    }
}

fn const_value(c: &RealConst, p: u32) -> Result<Value, PpError> {
    match c.as_exact_rational() {
        Some(r) => Ok(Value::Exact(r)),
        None => Ok(Value::Approx(
            c.eval_interval(p).map_err(EvalError::from)?,
        )),
    }
}

/// One piece: strict conditions `phi > 0`, nonstrict conditions `psi >= 0`,
/// and the polynomial variant on the piece.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub strict: Vec<PolyND>,
    pub nonstrict: Vec<PolyND>,
    pub variant: PolyND,
}

/// Piecewise-polynomial function on [0,1]^dim.
#[derive(Clone, Debug, PartialEq)]
pub struct PPFunction {
    pub dim: usize,
    pub pieces: Vec<Piece>,
}

fn gt_zero(v: &Value) -> Resolved<bool> {
    match v {
        Value::Exact(r) => Resolved::Done(r.is_positive()),
        Value::Approx(iv) => match iv.is_sign_positive() {
            Some(b) => Resolved::Done(b),
            None => Resolved::Unresolved,
        },
    }
}

fn ge_zero(v: &Value) -> Resolved<bool> {
    match v {
        Value::Exact(r) => Resolved::Done(!r.is_negative()),
        Value::Approx(iv) => {
            if iv.lo().sign() != num_bigint::Sign::Minus {
                Resolved::Done(true)
            } else if iv.hi().sign() == num_bigint::Sign::Minus {
                Resolved::Done(false)
            } else {
                Resolved::Unresolved
            }
        }
    }
}

impl PPFunction {
    pub fn single(variant: PolyND) -> Self {
        PPFunction { dim: variant.dim, pieces: vec![Piece { strict: vec![], nonstrict: vec![], variant }] }
    }

    /// Index of the piece containing `xs`, when decidable at precision `p`.
    fn match_piece(&self, xs: &[Value], p: u32) -> Resolved<Result<usize, PpError>> {
        let mut matched = Vec::new();
        for (i, piece) in self.pieces.iter().enumerate() {
            let mut ok = true;
            for cond in &piece.strict {
                let v = match cond.eval_value(xs, p) {
                    Ok(v) => v,
                    Err(e) => return Resolved::Done(Err(e)),
                };
                match gt_zero(&v) {
                    Resolved::Done(true) => {}
                    Resolved::Done(false) => {
                        ok = false;
                        break;
                    }
                    Resolved::Unresolved => return Resolved::Unresolved,
                    Resolved::Fail(e) => return Resolved::Fail(e),
                }
            }
            if !ok {
                continue;
            }
            for cond in &piece.nonstrict {
                let v = match cond.eval_value(xs, p) {
                    Ok(v) => v,
                    Err(e) => return Resolved::Done(Err(e)),
                };
                match ge_zero(&v) {
                    Resolved::Done(true) => {}
                    Resolved::Done(false) => {
                        ok = false;
                        break;
                    }
                    Resolved::Unresolved => return Resolved::Unresolved,
                    Resolved::Fail(e) => return Resolved::Fail(e),
                }
            }
            if ok {
                matched.push(i);
            }
        }
        Resolved::Done(match matched.len() {
            0 => Err(PpError::NoPieceMatched),
            1 => Ok(matched[0]),
            k => Err(PpError::MultiplePiecesMatched(k)),
        })
    }

    /// Evaluate at a point with certified piece selection; climbs the
    /// precision ladder when a condition's sign is ambiguous.
    pub fn eval_values(&self, xs: &[Value], cfg: &PrecisionConfig) -> Result<Value, PpError> {
        for p in cfg.ladder() {
            match self.match_piece(xs, p) {
                Resolved::Done(Ok(i)) => return self.pieces[i].variant.eval_value(xs, p),
                Resolved::Done(Err(e)) => return Err(e),
                Resolved::Unresolved => continue,
                Resolved::Fail(e) => return Err(EvalError::from(e).into()),
            }
        }
        Err(PpError::BoundaryAmbiguous)
    }

    /// Piece selection by exact monomial algebra, for sample points that sit
    /// exactly on a condition boundary.
    pub(crate) fn match_symbolic(&self, xs: &[RealConst]) -> Result<usize, PpError> {
        use std::cmp::Ordering as O;
        let mut matched = Vec::new();
        for (i, piece) in self.pieces.iter().enumerate() {
            let mut ok = true;
            for cond in &piece.strict {
                match crate::symbolic::certified_const_sign(&cond.eval_symbolic(xs)) {
                    Some(O::Greater) => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                    None => return Err(PpError::BoundaryAmbiguous),
                }
            }
            if !ok {
                continue;
            }
            for cond in &piece.nonstrict {
                match crate::symbolic::certified_const_sign(&cond.eval_symbolic(xs)) {
                    Some(O::Greater) | Some(O::Equal) => {}
                    Some(O::Less) => {
                        ok = false;
                        break;
                    }
                    None => return Err(PpError::BoundaryAmbiguous),
                }
            }
            if ok {
                matched.push(i);
            }
        }
        match matched.len() {
            0 => Err(PpError::NoPieceMatched),
            1 => Ok(matched[0]),
            k => Err(PpError::MultiplePiecesMatched(k)),
        }
    }

    /// Evaluate at an exact rational point in [0,1]^dim.
    pub fn eval_rational(&self, point: &[BigRational]) -> Result<Value, PpError> {
        let xs: Vec<Value> = point.iter().map(|r| Value::Exact(r.clone())).collect();
        let cfg = PrecisionConfig::default();
        match self.eval_values(&xs, &cfg) {
            Err(PpError::BoundaryAmbiguous) => {
                let sym: Vec<RealConst> = point
                    .iter()
                    .map(|r| RealConst::rational(r.clone()))
                    .collect();
                let i = self.match_symbolic(&sym)?;
                self.pieces[i].variant.eval_value(&xs, cfg.start_bits)
            }
            other => other,
        }
    }

    /// Sampling check that pieces cover [0,1]^dim disjointly: every sample
    /// point must match exactly one piece.
    pub fn check_partition(&self, samples: usize, seed: u64) -> Result<(), PpError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let point: Vec<BigRational> =
                (0..self.dim).map(|_| unit_sample(&mut rng)).collect();
            self.eval_rational(&point)?;
        }
        Ok(())
    }
}

/// Uniform dyadic rational in [0, 1).
fn unit_sample(rng: &mut ChaCha8Rng) -> BigRational {
    let x: u64 = rng.gen::<u64>() >> 11;
    BigRational::new(BigInt::from(x), BigInt::from(1u64) << 53)
}

/// Canonical representation data: a polynomial system, a divisibility scale
/// M, a progression modulus a, basic indices, and per-residue per-degree
/// pp-function coefficients.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub system: PolySystem,
    pub m_divisor: u32,
    pub modulus: u32,
    pub indices: Vec<IndexSym>,
    /// `variants[b][i]` is the degree-i coefficient on the residue class b.
    pub variants: Vec<Vec<PPFunction>>,
}

impl CanonicalForm {
    pub fn degree(&self) -> usize {
        self.variants.first().map_or(0, |v| v.len().saturating_sub(1))
    }

    fn check_shape(&self) -> Result<(), PpError> {
        if self.modulus == 0 || self.m_divisor == 0 {
            return Err(PpError::Malformed("modulus and M must be positive".into()));
        }
        if self.variants.len() != self.modulus as usize {
            return Err(PpError::Malformed(format!(
                "expected {} residue classes, found {}",
                self.modulus,
                self.variants.len()
            )));
        }
        let k = self.variants[0].len();
        if k == 0 || self.variants.iter().any(|v| v.len() != k) {
            return Err(PpError::Malformed("ragged degree table".into()));
        }
        let l = self.indices.len();
        for vs in &self.variants {
            for f in vs {
                if f.dim != l {
                    return Err(PpError::Malformed(format!(
                        "pp-function dimension {} != {} indices",
                        f.dim, l
                    )));
                }
            }
        }
        for idx in &self.indices {
            if !idx.is_valid(self.system.len()) {
                return Err(PpError::Malformed(format!("invalid index {}", idx)));
            }
        }
        Ok(())
    }

    /// Precompiles the fractional-part coordinate expressions.
    pub fn evaluator(&self) -> Result<CanonicalEvaluator<'_>, PpError> {
        self.check_shape()?;
        let scaled = self.system.scaled_by_inverse(self.m_divisor);
        let coords = self
            .indices
            .iter()
            .map(|idx| {
                basic_gp(idx, &scaled)
                    .map(GPExpr::frac_part)
                    .map_err(|e| PpError::Malformed(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CanonicalEvaluator { cf: self, coords })
    }
}

pub struct CanonicalEvaluator<'a> {
    cf: &'a CanonicalForm,
    coords: Vec<GPExpr>,
}

impl CanonicalEvaluator<'_> {
    /// Evaluate the canonical form at n:
    /// `sum_i f_i^(b)({v_a1}, ..., {v_al}) n^i` with `b = n mod modulus`.
    ///
    /// Piece selection is numeric up the precision ladder; sample points that
    /// land exactly on a condition boundary fall back to exact monomial
    /// algebra on the symbolic coordinates.
    pub fn realize(&self, n: i64, cfg: &PrecisionConfig) -> Result<GPValue, PpError> {
        let b = n.rem_euclid(self.cf.modulus as i64) as usize;
        let xs = self
            .coords
            .iter()
            .map(|c| c.eval(n, cfg))
            .collect::<Result<Vec<_>, _>>()?;
        let p = cfg.start_bits;
        let nv = Value::from_int(n);
        let mut acc = Value::zero();
        let mut sym_coords: Option<Vec<RealConst>> = None;
        for (i, f) in self.cf.variants[b].iter().enumerate() {
            let c = match f.eval_values(&xs, cfg) {
                Ok(v) => v,
                Err(PpError::BoundaryAmbiguous) => {
                    if sym_coords.is_none() {
                        sym_coords = Some(
                            self.coords
                                .iter()
                                .map(|c| {
                                    c.eval_symbolic(n, cfg).ok_or(PpError::BoundaryAmbiguous)
                                })
                                .collect::<Result<Vec<_>, _>>()?,
                        );
                    }
                    let idx = f.match_symbolic(sym_coords.as_ref().unwrap())?;
                    f.pieces[idx].variant.eval_value(&xs, p)?
                }
                Err(e) => return Err(e),
            };
            acc = acc.add(&c.mul(&nv.pow(i as u32, p), p), p);
        }
        Ok(acc)
    }
}

pub fn realize(cf: &CanonicalForm, n: i64, cfg: &PrecisionConfig) -> Result<GPValue, PpError> {
    cf.evaluator()?.realize(n, cfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct CanonicalReport {
    pub checked: u64,
    pub max_deviation: f64,
    /// Arguments where the claimed form certifiably disagrees with direct
    /// evaluation.
    pub violations: Vec<i64>,
    pub pass: bool,
}

/// Check a claimed canonical form against direct evaluation on `[lo, hi]`.
pub fn verify_canonical(
    q: &GPExpr,
    cf: &CanonicalForm,
    lo: i64,
    hi: i64,
    cfg: &PrecisionConfig,
) -> Result<CanonicalReport, PpError> {
    use rayon::prelude::*;
    let ev = cf.evaluator()?;
    let ns: Vec<i64> = (lo..=hi).collect();
    let rows: Vec<(i64, f64, bool)> = ns
        .par_chunks(2048)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&n| {
                    let qv = q.eval(n, cfg).map_err(PpError::from)?;
                    let rv = ev.realize(n, cfg)?;
                    let dev = qv.abs_diff_upper(&rv, cfg.start_bits);
                    let bad = qv.certified_nonequal(&rv, cfg.start_bits);
                    Ok((n, dev, bad))
                })
                .collect::<Result<Vec<_>, PpError>>()
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut max_deviation = 0.0f64;
    let mut violations = Vec::new();
    for (n, dev, bad) in rows {
        if bad {
            violations.push(n);
            max_deviation = max_deviation.max(dev);
        } else {
            // agreement within enclosure width
            max_deviation = max_deviation.max(dev.min(1e-12));
        }
    }
    Ok(CanonicalReport {
        checked: (hi - lo + 1) as u64,
        pass: violations.is_empty(),
        max_deviation,
        violations,
    })
}

/// A region of [0,1]^l cut out by polynomial inequalities.
#[derive(Clone, Debug)]
pub struct Region {
    pub strict: Vec<PolyND>,
    pub nonstrict: Vec<PolyND>,
}

impl Region {
    fn contains(&self, point: &[BigRational], p: u32) -> Result<bool, PpError> {
        let xs: Vec<Value> = point.iter().map(|r| Value::Exact(r.clone())).collect();
        for c in &self.strict {
            match gt_zero(&c.eval_value(&xs, p)?) {
                Resolved::Done(true) => {}
                Resolved::Done(false) => return Ok(false),
                _ => return Err(PpError::BoundaryAmbiguous),
            }
        }
        for c in &self.nonstrict {
            match ge_zero(&c.eval_value(&xs, p)?) {
                Resolved::Done(true) => {}
                Resolved::Done(false) => return Ok(false),
                _ => return Err(PpError::BoundaryAmbiguous),
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AdequacyVerdict {
    Adequate,
    NotAdequate,
    Undetermined,
}

/// Decision rule for the adequacy criterion: a positive-density region is
/// "bad" when some residue class has all higher-degree variants vanishing on
/// it. Vanishing is tested on region samples (the shipped variants are
/// simple enough for sampling to be exact).
pub fn adequacy_decide(
    cf: &CanonicalForm,
    regions: &[Region],
    densities: &[Density],
) -> Result<AdequacyVerdict, PpError> {
    if regions.len() != densities.len() {
        return Err(PpError::Malformed(
            "one density estimate required per region".into(),
        ));
    }
    cf.check_shape()?;
    let k = cf.degree();
    if k == 0 {
        // no higher-degree variants at all: every positive-density region is bad
        let any_positive = densities.iter().any(|d| !d.straddles_zero());
        return Ok(if any_positive {
            AdequacyVerdict::NotAdequate
        } else {
            AdequacyVerdict::Undetermined
        });
    }
    let l = cf.indices.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0xADE);
    let mut bad = vec![false; regions.len()];
    for (j, region) in regions.iter().enumerate() {
        // sample points inside the region
        let mut pts = Vec::new();
        let mut attempts = 0;
        while pts.len() < 64 && attempts < 20_000 {
            attempts += 1;
            let point: Vec<BigRational> = (0..l).map(|_| unit_sample(&mut rng)).collect();
            if region.contains(&point, 128)? {
                pts.push(point);
            }
        }
        if pts.is_empty() {
            // empty-looking region: cannot witness badness
            continue;
        }
        'residues: for b in 0..cf.modulus as usize {
            for i in 1..=k {
                let f = &cf.variants[b][i];
                if f.pieces.iter().all(|p| p.variant.is_structurally_zero()) {
                    continue; // identically zero everywhere
                }
                let mut nonzero_seen = false;
                for pt in &pts {
                    let v = f.eval_rational(pt)?;
                    if v.certified_nonequal(&Value::zero(), 128) {
                        nonzero_seen = true;
                        break;
                    }
                }
                if nonzero_seen {
                    // this residue has a usable higher-degree variant
                    continue 'residues;
                }
            }
            // all i >= 1 variants vanish on the region for residue b
            bad[j] = true;
            break;
        }
    }
    for (j, d) in densities.iter().enumerate() {
        if bad[j] && !d.straddles_zero() {
            return Ok(AdequacyVerdict::NotAdequate);
        }
    }
    if densities.iter().all(|d| d.straddles_zero()) {
        return Ok(AdequacyVerdict::Undetermined);
    }
    if bad
        .iter()
        .zip(densities)
        .any(|(&b, d)| b && d.straddles_zero())
    {
        return Ok(AdequacyVerdict::Undetermined);
    }
    Ok(AdequacyVerdict::Adequate)
}

// --- JSON document model (schema "gpequi-cf/1") ---

pub const CF_SCHEMA: &str = "gpequi-cf/1";

#[derive(Serialize, Deserialize)]
struct TermDoc {
    exps: Vec<u32>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct PolyDoc {
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
struct PieceDoc {
    #[serde(default)]
    strict: Vec<PolyDoc>,
    #[serde(default)]
    nonstrict: Vec<PolyDoc>,
    variant: PolyDoc,
}

#[derive(Serialize, Deserialize)]
struct PpDoc {
    pieces: Vec<PieceDoc>,
}

#[derive(Serialize, Deserialize)]
struct AtomDoc {
    name: String,
    poly: String,
}

#[derive(Serialize, Deserialize)]
struct CfDoc {
    schema: String,
    atoms: Vec<AtomDoc>,
    m: u32,
    a: u32,
    indices: Vec<String>,
    variants: Vec<Vec<PpDoc>>,
}

fn poly_from_doc(doc: &PolyDoc, dim: usize) -> Result<PolyND, PpError> {
    let mut terms = Vec::new();
    for t in &doc.terms {
        if t.exps.len() != dim {
            return Err(PpError::Malformed(format!(
                "term exponent arity {} != dimension {}",
                t.exps.len(),
                dim
            )));
        }
        let c = parse_const(&t.coeff)
            .map_err(|e| PpError::Malformed(format!("bad coefficient `{}`: {}", t.coeff, e)))?;
        terms.push((t.exps.clone(), c));
    }
    Ok(PolyND { dim, terms })
}

fn poly_to_doc(p: &PolyND) -> PolyDoc {
    PolyDoc {
        terms: p
            .terms
            .iter()
            .map(|(exps, c)| TermDoc { exps: exps.clone(), coeff: c.to_string() })
            .collect(),
    }
}

pub fn canonical_form_from_json(text: &str) -> Result<CanonicalForm, PpError> {
    let doc: CfDoc =
        serde_json::from_str(text).map_err(|e| PpError::Malformed(format!("json: {}", e)))?;
    if doc.schema != CF_SCHEMA {
        return Err(PpError::Malformed(format!(
            "unsupported schema `{}` (expected {})",
            doc.schema, CF_SCHEMA
        )));
    }
    let atoms = doc
        .atoms
        .iter()
        .map(|a| {
            crate::gp::parse(&a.poly)
                .map(|p| (a.name.clone(), p))
                .map_err(|e| PpError::Malformed(format!("atom `{}`: {}", a.name, e)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let system = PolySystem::new(atoms).map_err(|e| PpError::Malformed(e.to_string()))?;
    let indices = doc
        .indices
        .iter()
        .map(|s| parse_index(s, &system).map_err(|e| PpError::Malformed(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let dim = indices.len();
    let variants = doc
        .variants
        .iter()
        .map(|per_residue| {
            per_residue
                .iter()
                .map(|ppd| {
                    let pieces = ppd
                        .pieces
                        .iter()
                        .map(|pd| {
                            Ok(Piece {
                                strict: pd
                                    .strict
                                    .iter()
                                    .map(|p| poly_from_doc(p, dim))
                                    .collect::<Result<Vec<_>, _>>()?,
                                nonstrict: pd
                                    .nonstrict
                                    .iter()
                                    .map(|p| poly_from_doc(p, dim))
                                    .collect::<Result<Vec<_>, _>>()?,
                                variant: poly_from_doc(&pd.variant, dim)?,
                            })
                        })
                        .collect::<Result<Vec<_>, PpError>>()?;
                    Ok(PPFunction { dim, pieces })
                })
                .collect::<Result<Vec<_>, PpError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cf = CanonicalForm { system, m_divisor: doc.m, modulus: doc.a, indices, variants };
    cf.check_shape()?;
    Ok(cf)
}

pub fn canonical_form_to_json(cf: &CanonicalForm) -> String {
    let doc = CfDoc {
        schema: CF_SCHEMA.to_string(),
        atoms: (0..cf.system.len())
            .map(|i| AtomDoc {
                name: cf.system.atom_name(i).unwrap().to_string(),
                poly: cf.system.atom_poly(i).unwrap().render(),
            })
            .collect(),
        m: cf.m_divisor,
        a: cf.modulus,
        indices: cf.indices.iter().map(|i| render_index(i, &cf.system)).collect(),
        variants: cf
            .variants
            .iter()
            .map(|per_residue| {
                per_residue
                    .iter()
                    .map(|f| PpDoc {
                        pieces: f
                            .pieces
                            .iter()
                            .map(|p| PieceDoc {
                                strict: p.strict.iter().map(poly_to_doc).collect(),
                                nonstrict: p.nonstrict.iter().map(poly_to_doc).collect(),
                                variant: poly_to_doc(&p.variant),
                            })
                            .collect(),
                    })
                    .collect()
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("canonical form serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::parse;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// The two-variable example: xy where y >= x^3 and x >= y^3;
    /// x^2 + y - sqrt3 where y < x^3; 4 where x < y^3.
    fn example_pp() -> PPFunction {
        let x = || PolyND::coordinate(2, 0);
        let y = || PolyND::coordinate(2, 1);
        let cube = |p: PolyND| PolyND {
            dim: 2,
            terms: p
                .terms
                .iter()
                .map(|(e, c)| (e.iter().map(|&k| k * 3).collect(), c.clone()))
                .collect(),
        };
        let minus = |a: PolyND, b: PolyND| {
            let mut terms = a.terms;
            terms.extend(b.terms.into_iter().map(|(e, c)| (e, RealConst::neg(c))));
            PolyND { dim: 2, terms }
        };
        let xy = PolyND { dim: 2, terms: vec![(vec![1, 1], RealConst::integer(1))] };
        let variant2 = PolyND {
            dim: 2,
            terms: vec![
                (vec![2, 0], RealConst::integer(1)),
                (vec![0, 1], RealConst::integer(1)),
                (vec![0, 0], RealConst::neg(RealConst::sqrt_int(3))),
            ],
        };
        PPFunction {
            dim: 2,
            pieces: vec![
                Piece {
                    strict: vec![],
                    nonstrict: vec![minus(y(), cube(x())), minus(x(), cube(y()))],
                    variant: xy,
                },
                Piece {
                    strict: vec![minus(cube(x()), y())],
                    nonstrict: vec![],
                    variant: variant2,
                },
                Piece {
                    strict: vec![minus(cube(y()), x())],
                    nonstrict: vec![],
                    variant: PolyND::constant(2, RealConst::integer(4)),
                },
            ],
        }
    }

    #[test]
    fn example_pp_values() {
        let f = example_pp();
        // (0.5, 0.5) -> xy = 0.25
        let v = f.eval_rational(&[rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(v.as_exact().cloned(), Some(rat(1, 4)));
        // (0.9, 0.1): y < x^3 -> 0.81 + 0.1 - sqrt3
        let v = f.eval_rational(&[rat(9, 10), rat(1, 10)]).unwrap();
        let expect = 0.81 + 0.1 - 3f64.sqrt();
        assert!((v.to_f64() - expect).abs() < 1e-12);
        // a constant single-piece function returns its constant
        let g = PPFunction::single(PolyND::constant(2, RealConst::integer(4)));
        let v = g.eval_rational(&[rat(1, 3), rat(2, 3)]).unwrap();
        assert_eq!(v.as_exact().cloned(), Some(rat(4, 1)));
    }

    #[test]
    fn example_pp_partition_sound() {
        example_pp().check_partition(10_000, 42).unwrap();
    }

    fn sqrt2_system() -> PolySystem {
        PolySystem::new(vec![("a".into(), parse("sqrt(2)*n").unwrap())]).unwrap()
    }

    /// Canonical form of {sqrt2 n}: one residue class, identity variant.
    fn cf_frac_sqrt2() -> CanonicalForm {
        CanonicalForm {
            system: sqrt2_system(),
            m_divisor: 1,
            modulus: 1,
            indices: vec![IndexSym::atom(0)],
            variants: vec![vec![PPFunction::single(PolyND::coordinate(1, 0))]],
        }
    }

    /// Canonical form of u(n): 0 below the step at 2 - sqrt2, 1 at or above.
    fn cf_step() -> CanonicalForm {
        let step = RealConst::sub(RealConst::integer(2), RealConst::sqrt_int(2));
        let below = PolyND {
            dim: 1,
            terms: vec![
                (vec![0], step.clone()),
                (vec![1], RealConst::integer(-1)),
            ],
        };
        let at_or_above = PolyND {
            dim: 1,
            terms: vec![
                (vec![1], RealConst::integer(1)),
                (vec![0], RealConst::neg(step)),
            ],
        };
        CanonicalForm {
            system: sqrt2_system(),
            m_divisor: 1,
            modulus: 1,
            indices: vec![IndexSym::atom(0)],
            variants: vec![vec![PPFunction {
                dim: 1,
                pieces: vec![
                    Piece {
                        strict: vec![below],
                        nonstrict: vec![],
                        variant: PolyND::zero(1),
                    },
                    Piece {
                        strict: vec![],
                        nonstrict: vec![at_or_above],
                        variant: PolyND::constant(1, RealConst::integer(1)),
                    },
                ],
            }]],
        }
    }

    #[test]
    fn canonical_frac_sqrt2_verifies() {
        let q = parse("{sqrt(2)*n}").unwrap();
        let rep = verify_canonical(&q, &cf_frac_sqrt2(), -300, 300, &PrecisionConfig::default())
            .unwrap();
        assert!(rep.pass, "violations at {:?}", rep.violations);
        assert!(rep.max_deviation < 1e-12);
    }

    #[test]
    fn canonical_step_matches_sturmian_difference() {
        let q = crate::gp::sturmian_diff_expr(RealConst::sqrt_int(2));
        let rep =
            verify_canonical(&q, &cf_step(), -300, 300, &PrecisionConfig::default()).unwrap();
        assert!(rep.pass, "violations at {:?}", rep.violations);
    }

    #[test]
    fn corrupted_variant_fails_fast() {
        let mut cf = cf_step();
        // break the upper variant: 1 -> 2
        cf.variants[0][0].pieces[1].variant = PolyND::constant(1, RealConst::integer(2));
        let q = crate::gp::sturmian_diff_expr(RealConst::sqrt_int(2));
        let rep = verify_canonical(&q, &cf, -100, 100, &PrecisionConfig::default()).unwrap();
        assert!(!rep.pass);
        assert!(rep.violations.iter().any(|n| n.abs() <= 100));
        assert!(rep.max_deviation > 0.5);
    }

    #[test]
    fn json_round_trip() {
        let cf = cf_step();
        let text = canonical_form_to_json(&cf);
        let back = canonical_form_from_json(&text).unwrap();
        let q = crate::gp::sturmian_diff_expr(RealConst::sqrt_int(2));
        let rep =
            verify_canonical(&q, &back, -100, 100, &PrecisionConfig::default()).unwrap();
        assert!(rep.pass);
        assert!(canonical_form_from_json("{\"schema\":\"nope\"}").is_err());
    }

    #[test]
    fn adequacy_verdicts() {
        // canonical form of n*u(n): degree-1 coefficient is the step
        let step_cf = cf_step();
        let cf = CanonicalForm {
            system: step_cf.system.clone(),
            m_divisor: 1,
            modulus: 1,
            indices: step_cf.indices.clone(),
            variants: vec![vec![
                PPFunction::single(PolyND::zero(1)),
                step_cf.variants[0][0].clone(),
            ]],
        };
        let step = RealConst::sub(RealConst::integer(2), RealConst::sqrt_int(2));
        let low = Region {
            strict: vec![PolyND {
                dim: 1,
                terms: vec![(vec![0], step.clone()), (vec![1], RealConst::integer(-1))],
            }],
            nonstrict: vec![],
        };
        let high = Region {
            strict: vec![],
            nonstrict: vec![PolyND {
                dim: 1,
                terms: vec![(vec![1], RealConst::integer(1)), (vec![0], RealConst::neg(step))],
            }],
        };
        // visit densities: 1 - {sqrt2} and {sqrt2}, both firmly positive
        let d_low = Density { value: 0.586, radius: 0.01, count: 586, total: 1000 };
        let d_high = Density { value: 0.414, radius: 0.01, count: 414, total: 1000 };
        let v = adequacy_decide(&cf, &[low.clone(), high.clone()], &[d_low, d_high]).unwrap();
        // the low region has a vanishing degree-1 variant: not adequate
        assert_eq!(v, AdequacyVerdict::NotAdequate);

        // single-region form with nonzero top coefficient: adequate
        let cf2 = CanonicalForm {
            system: cf.system.clone(),
            m_divisor: 1,
            modulus: 1,
            indices: cf.indices.clone(),
            variants: vec![vec![
                PPFunction::single(PolyND::zero(1)),
                PPFunction::single(PolyND::zero(1)),
                PPFunction::single(PolyND::coordinate(1, 0)),
            ]],
        };
        let all = Region { strict: vec![], nonstrict: vec![] };
        let d = Density { value: 1.0, radius: 0.01, count: 1000, total: 1000 };
        assert_eq!(
            adequacy_decide(&cf2, &[all.clone()], &[d]).unwrap(),
            AdequacyVerdict::Adequate
        );

        // zero-straddling densities everywhere: undetermined
        let d0 = Density { value: 0.0, radius: 0.05, count: 0, total: 100 };
        assert_eq!(
            adequacy_decide(&cf, &[low, high], &[d0, d0]).unwrap(),
            AdequacyVerdict::Undetermined
        );
    }
}
