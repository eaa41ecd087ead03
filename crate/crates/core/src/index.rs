//! The well-ordered index set for basic generalized polynomials.
//!
//! Over an ordered finite atom set A, the index set is the smallest family
//! containing A and all `[gamma, m beta]` with `beta < gamma` and either
//! `gamma` an atom or `gamma = [lambda, k delta]` with `delta < beta`. The
//! order puts atoms first (by atom order) and compares brackets
//! lexicographically on `(beta, gamma, m)`. Each index realizes a basic
//! generalized polynomial `v_gamma` over a polynomial system.

use crate::error::IndexError;
use crate::gp::GPExpr;
use crate::real::PrecisionConfig;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IndexSym {
    Atom(u32),
    /// `[gamma, m beta]` with multiplicity m >= 1.
    Bracket(Box<IndexSym>, u32, Box<IndexSym>),
}

impl IndexSym {
    pub fn atom(id: u32) -> Self {
        IndexSym::Atom(id)
    }

    pub fn bracket(gamma: IndexSym, m: u32, beta: IndexSym) -> Self {
        IndexSym::Bracket(Box::new(gamma), m, Box::new(beta))
    }

    pub fn depth(&self) -> u32 {
        match self {
            IndexSym::Atom(_) => 0,
            IndexSym::Bracket(g, _, b) => 1 + g.depth().max(b.depth()),
        }
    }

    /// Structural membership test for the index set over `n_atoms` atoms.
    pub fn is_valid(&self, n_atoms: u32) -> bool {
        match self {
            IndexSym::Atom(a) => *a < n_atoms,
            IndexSym::Bracket(gamma, m, beta) => {
                if *m < 1 || !gamma.is_valid(n_atoms) || !beta.is_valid(n_atoms) {
                    return false;
                }
                if cmp_index(beta, gamma) != Ordering::Less {
                    return false;
                }
                match &**gamma {
                    IndexSym::Atom(_) => true,
                    IndexSym::Bracket(_, _, delta) => cmp_index(delta, beta) == Ordering::Less,
                }
            }
        }
    }

    /// Flatten `[[..[d0, m1 d1].., ms ds]]` into (head, [(d1, m1), ..]).
    fn chain(&self) -> (IndexSym, Vec<(IndexSym, u32)>) {
        match self {
            IndexSym::Atom(_) => (self.clone(), vec![]),
            IndexSym::Bracket(g, m, b) => {
                let (head, mut tail) = g.chain();
                tail.push(((**b).clone(), *m));
                (head, tail)
            }
        }
    }

    fn from_chain(head: IndexSym, tail: Vec<(IndexSym, u32)>) -> IndexSym {
        tail.into_iter()
            .fold(head, |acc, (b, m)| IndexSym::bracket(acc, m, b))
    }
}

/// Total order on indices: atoms below non-atoms, atoms by id, brackets
/// lexicographically on `(beta, gamma, m)`.
pub fn cmp_index(a: &IndexSym, b: &IndexSym) -> Ordering {
    match (a, b) {
        (IndexSym::Atom(x), IndexSym::Atom(y)) => x.cmp(y),
        (IndexSym::Atom(_), IndexSym::Bracket(..)) => Ordering::Less,
        (IndexSym::Bracket(..), IndexSym::Atom(_)) => Ordering::Greater,
        (IndexSym::Bracket(g1, m1, b1), IndexSym::Bracket(g2, m2, b2)) => cmp_index(b1, b2)
            .then_with(|| cmp_index(g1, g2))
            .then_with(|| m1.cmp(m2)),
    }
}

impl PartialOrd for IndexSym {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(cmp_index(self, other))
    }
}

impl Ord for IndexSym {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_index(self, other)
    }
}

/// An ordered system of one bracket-free real polynomial per atom.
///
/// Intended use assumes the polynomials are Q-linearly independent modulo
/// rational polynomials plus constants; that assumption is declared per
/// system, not machine-checked.
#[derive(Clone, Debug)]
pub struct PolySystem {
    atoms: Vec<(String, GPExpr)>,
}

impl PolySystem {
    pub fn new(atoms: Vec<(String, GPExpr)>) -> Result<Self, IndexError> {
        for (name, poly) in &atoms {
            if name.len() != 1 || !name.chars().next().unwrap().is_ascii_lowercase() {
                return Err(IndexError::InvalidIndex(format!(
                    "atom name `{}` must be a single lowercase letter",
                    name
                )));
            }
            if poly.has_brackets() {
                return Err(IndexError::InvalidIndex(format!(
                    "atom `{}` must map to a bracket-free polynomial",
                    name
                )));
            }
        }
        Ok(PolySystem { atoms })
    }

    pub fn len(&self) -> u32 {
        self.atoms.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom_name(&self, id: u32) -> Option<&str> {
        self.atoms.get(id as usize).map(|(n, _)| n.as_str())
    }

    pub fn atom_poly(&self, id: u32) -> Option<&GPExpr> {
        self.atoms.get(id as usize).map(|(_, p)| p)
    }

    pub fn atom_by_name(&self, name: &str) -> Option<u32> {
        self.atoms.iter().position(|(n, _)| n == name).map(|i| i as u32)
    }

    /// The system with every polynomial divided by `m` (the `M^-1 P` scaling
    /// used by canonical forms).
    pub fn scaled_by_inverse(&self, m: u32) -> PolySystem {
        if m <= 1 {
            return self.clone();
        }
        let inv = GPExpr::Const(crate::real::RealConst::ratio(1, m as i64));
        PolySystem {
            atoms: self
                .atoms
                .iter()
                .map(|(n, p)| (n.clone(), GPExpr::mul(vec![inv.clone(), p.clone()])))
                .collect(),
        }
    }
}

/// Recursive realization: `v_atom = p_atom`, `v_[g, m b] = v_g * {v_b}^m`.
pub fn basic_gp(gamma: &IndexSym, system: &PolySystem) -> Result<GPExpr, IndexError> {
    if !gamma.is_valid(system.len()) {
        return Err(IndexError::InvalidIndex(render_index_raw(gamma)));
    }
    basic_gp_unchecked(gamma, system)
}

fn basic_gp_unchecked(gamma: &IndexSym, system: &PolySystem) -> Result<GPExpr, IndexError> {
    match gamma {
        IndexSym::Atom(a) => system
            .atom_poly(*a)
            .cloned()
            .ok_or(IndexError::UnknownAtom(*a)),
        IndexSym::Bracket(g, m, b) => {
            let vg = basic_gp_unchecked(g, system)?;
            let vb = GPExpr::frac_part(basic_gp_unchecked(b, system)?);
            let frac_pow = GPExpr::pow(vb, *m);
            Ok(match vg {
                GPExpr::Mul(mut fs) => {
                    fs.push(frac_pow);
                    GPExpr::Mul(fs)
                }
                other => GPExpr::mul(vec![other, frac_pow]),
            })
        }
    }
}

/// The product law: for `a2 < a1` there is a unique index `a' > a1` with
/// `v_{a'} = v_{a1} * {v_{a2}}`. Implements the four placement cases
/// (append, multiplicity increment, interior insert, front insert).
pub fn mul_frac(a1: &IndexSym, a2: &IndexSym) -> Result<IndexSym, IndexError> {
    if cmp_index(a2, a1) != Ordering::Less {
        return Err(IndexError::PreconditionViolated(format!(
            "mul_frac requires a2 < a1, got {} vs {}",
            render_index_raw(a2),
            render_index_raw(a1)
        )));
    }
    if let IndexSym::Atom(_) = a1 {
        return Ok(IndexSym::bracket(a1.clone(), 1, a2.clone()));
    }
    let (head, mut tail) = a1.chain();
    // find the slot for a2 among d1 < d2 < ... < ds
    let mut placed = false;
    for i in 0..tail.len() {
        match cmp_index(a2, &tail[i].0) {
            Ordering::Equal => {
                tail[i].1 += 1;
                placed = true;
                break;
            }
            Ordering::Less => {
                tail.insert(i, (a2.clone(), 1));
                placed = true;
                break;
            }
            Ordering::Greater => continue,
        }
    }
    if !placed {
        tail.push((a2.clone(), 1));
    }
    Ok(IndexSym::from_chain(head, tail))
}

/// Index literal syntax: atoms are single letters; `[c,2a]` means the
/// bracket of `c` with multiplicity 2 over `a`; nesting as usual.
pub fn parse_index(text: &str, system: &PolySystem) -> Result<IndexSym, IndexError> {
    let mut chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    chars.reverse(); // treat as a stack
    let idx = parse_index_inner(&mut chars, system)?;
    if !chars.is_empty() {
        return Err(IndexError::InvalidIndex(format!(
            "trailing input in index literal `{}`",
            text
        )));
    }
    Ok(idx)
}

fn parse_index_inner(stack: &mut Vec<char>, system: &PolySystem) -> Result<IndexSym, IndexError> {
    match stack.pop() {
        Some('[') => {
            let gamma = parse_index_inner(stack, system)?;
            if stack.pop() != Some(',') {
                return Err(IndexError::InvalidIndex("expected `,` in bracket".into()));
            }
            let mut m: u32 = 0;
            while stack.last().map_or(false, |c| c.is_ascii_digit()) {
                m = m * 10 + stack.pop().unwrap().to_digit(10).unwrap();
            }
            if m == 0 {
                m = 1;
            }
            let beta = parse_index_inner(stack, system)?;
            if stack.pop() != Some(']') {
                return Err(IndexError::InvalidIndex("expected `]`".into()));
            }
            Ok(IndexSym::bracket(gamma, m, beta))
        }
        Some(c) if c.is_ascii_lowercase() => system
            .atom_by_name(&c.to_string())
            .map(IndexSym::Atom)
            .ok_or(IndexError::InvalidIndex(format!("unknown atom `{}`", c))),
        other => Err(IndexError::InvalidIndex(format!(
            "unexpected `{:?}` in index literal",
            other
        ))),
    }
}

pub fn render_index(idx: &IndexSym, system: &PolySystem) -> String {
    match idx {
        IndexSym::Atom(a) => system
            .atom_name(*a)
            .map(|s| s.to_string())
            .unwrap_or_else(|| format!("?{}", a)),
        IndexSym::Bracket(g, m, b) => {
            let ms = if *m == 1 { String::new() } else { m.to_string() };
            format!(
                "[{},{}{}]",
                render_index(g, system),
                ms,
                render_index(b, system)
            )
        }
    }
}

fn render_index_raw(idx: &IndexSym) -> String {
    match idx {
        IndexSym::Atom(a) => format!("#{}", a),
        IndexSym::Bracket(g, m, b) => {
            format!("[{},{}{}]", render_index_raw(g), m, render_index_raw(b))
        }
    }
}

/// Deterministic sampler of valid indices, used by the order-law and
/// realization property tests: grows a pool from the atoms by repeatedly
/// attempting bracket formation between random pool members.
pub fn random_valid_indices(
    n_atoms: u32,
    max_depth: u32,
    target: usize,
    seed: u64,
) -> Vec<IndexSym> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<IndexSym> = (0..n_atoms).map(IndexSym::Atom).collect();
    let mut seen: HashSet<IndexSym> = pool.iter().cloned().collect();
    let mut stale = 0usize;
    while pool.len() < target && stale < target * 50 {
        let gi = rng.gen_range(0..pool.len());
        let bi = rng.gen_range(0..pool.len());
        let m = rng.gen_range(1..=3u32);
        let gamma = pool[gi].clone();
        let beta = pool[bi].clone();
        let cand = IndexSym::bracket(gamma, m, beta);
        if cand.depth() <= max_depth && cand.is_valid(n_atoms) && !seen.contains(&cand) {
            seen.insert(cand.clone());
            pool.push(cand);
            stale = 0;
        } else {
            stale += 1;
        }
    }
    pool
}

impl fmt::Display for IndexSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_index_raw(self))
    }
}

/// Numeric check that `v_{mul_frac(a1,a2)} = v_{a1} * {v_{a2}}` pointwise.
pub fn check_mul_frac_realization(
    a1: &IndexSym,
    a2: &IndexSym,
    system: &PolySystem,
    sample_points: i64,
) -> Result<bool, IndexError> {
    let prod_idx = mul_frac(a1, a2)?;
    let lhs = basic_gp(&prod_idx, system)?;
    let rhs = GPExpr::mul(vec![
        basic_gp(a1, system)?,
        GPExpr::frac_part(basic_gp(a2, system)?),
    ]);
    let cfg = PrecisionConfig::default();
    for n in 1..=sample_points {
        let (Ok(a), Ok(b)) = (lhs.eval(n, &cfg), rhs.eval(n, &cfg)) else {
            return Ok(false);
        };
        if a.certified_nonequal(&b, 128) {
            return Ok(false);
        }
        // enclosures must also be tight enough to be meaningful
        if a.abs_diff_upper(&b, 128) > 1e-15 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::RealConst;

    /// a < b < c with p_a = sqrt2 n, p_b = sqrt3 n, p_c = sqrt6 n^2.
    fn sys_abc() -> PolySystem {
        PolySystem::new(vec![
            ("a".into(), GPExpr::monomial(RealConst::sqrt_int(2), 1)),
            ("b".into(), GPExpr::monomial(RealConst::sqrt_int(3), 1)),
            ("c".into(), GPExpr::monomial(RealConst::sqrt_int(6), 2)),
        ])
        .unwrap()
    }

    fn idx(text: &str) -> IndexSym {
        parse_index(text, &sys_abc()).unwrap()
    }

    #[test]
    fn ordering_examples() {
        // atoms below brackets
        for m in [1u32, 2, 5] {
            let c = idx("c");
            let bma = IndexSym::bracket(idx("b"), m, idx("a"));
            assert_eq!(cmp_index(&c, &bma), Ordering::Less);
        }
        // [b, m1 a] < [c, m2 a] since b < c
        let l = IndexSym::bracket(idx("b"), 7, idx("a"));
        let r = IndexSym::bracket(idx("c"), 1, idx("a"));
        assert_eq!(cmp_index(&l, &r), Ordering::Less);
        // [c, m1 a] < [c, m2 b] since a < b
        let l = IndexSym::bracket(idx("c"), 9, idx("a"));
        let r = IndexSym::bracket(idx("c"), 1, idx("b"));
        assert_eq!(cmp_index(&l, &r), Ordering::Less);
    }

    #[test]
    fn validity_examples() {
        assert!(idx("[b,a]").is_valid(3));
        // [a, b] with a < b is not a valid index
        let bad = IndexSym::bracket(idx("a"), 1, idx("b"));
        assert!(!bad.is_valid(3));
        // [[b,2a],[b,a]] is valid (multiplicity >= 2 on the inner a)
        assert!(idx("[[b,2a],[b,a]]").is_valid(3));
        // but with inner multiplicity 1 the outer beta equals gamma's prefix
        let inner = idx("[b,a]");
        let outer = IndexSym::bracket(inner.clone(), 1, inner);
        assert!(!outer.is_valid(3));
    }

    #[test]
    fn basic_gp_realizations() {
        let sys = sys_abc();
        let cfg = PrecisionConfig::default();
        // v_a = sqrt2 n
        let va = basic_gp(&idx("a"), &sys).unwrap();
        let direct = GPExpr::monomial(RealConst::sqrt_int(2), 1);
        for n in 1..20 {
            assert!(
                va.eval(n, &cfg)
                    .unwrap()
                    .abs_diff_upper(&direct.eval(n, &cfg).unwrap(), 128)
                    < 1e-20
            );
        }
        // v_[b,a] = sqrt3 n {sqrt2 n}
        let vba = basic_gp(&idx("[b,a]"), &sys).unwrap();
        let direct = GPExpr::parse("sqrt(3)*n*{sqrt(2)*n}").unwrap();
        for n in 1..20 {
            assert!(
                vba.eval(n, &cfg)
                    .unwrap()
                    .abs_diff_upper(&direct.eval(n, &cfg).unwrap(), 128)
                    < 1e-18
            );
        }
        // v_[[c,2a],3b] = sqrt6 n^2 {sqrt2 n}^2 {sqrt3 n}^3
        let v = basic_gp(&idx("[[c,2a],3b]"), &sys).unwrap();
        let direct = GPExpr::parse("sqrt(6)*n^2*{sqrt(2)*n}^2*{sqrt(3)*n}^3").unwrap();
        for n in 1..20 {
            assert!(
                v.eval(n, &cfg)
                    .unwrap()
                    .abs_diff_upper(&direct.eval(n, &cfg).unwrap(), 128)
                    < 1e-15
            );
        }
    }

    #[test]
    fn mul_frac_cases() {
        // atom base: v_a {v_x} -> [a, x]... requires x < a, so use b with a
        let r = mul_frac(&idx("b"), &idx("a")).unwrap();
        assert_eq!(r, idx("[b,a]"));
        // multiplicity increment: [[c,a],b] * {a} -> [[c,2a],b]
        let a1 = idx("[[c,a],b]");
        let r = mul_frac(&a1, &idx("a")).unwrap();
        assert_eq!(r, idx("[[c,2a],b]"));
        // append: [c,a] * {b} -> [[c,a],b]
        let r = mul_frac(&idx("[c,a]"), &idx("b")).unwrap();
        assert_eq!(r, idx("[[c,a],b]"));
        // precondition violated
        assert!(mul_frac(&idx("a"), &idx("b")).is_err());
        assert!(mul_frac(&idx("a"), &idx("a")).is_err());
    }

    #[test]
    fn mul_frac_monotone_and_valid() {
        let pool = random_valid_indices(3, 4, 300, 7);
        let mut checked = 0;
        for i in 0..pool.len() {
            for j in 0..pool.len() {
                if cmp_index(&pool[j], &pool[i]) == Ordering::Less {
                    let r = mul_frac(&pool[i], &pool[j]).unwrap();
                    assert!(r.is_valid(3), "invalid product index {}", r);
                    assert_eq!(
                        cmp_index(&r, &pool[i]),
                        Ordering::Greater,
                        "product {} not above {}",
                        r,
                        pool[i]
                    );
                    checked += 1;
                    if checked > 2000 {
                        return;
                    }
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn realization_soundness_sampled() {
        let sys = sys_abc();
        let pool = random_valid_indices(3, 3, 40, 11);
        let mut checked = 0;
        for i in 0..pool.len() {
            for j in 0..pool.len() {
                if cmp_index(&pool[j], &pool[i]) == Ordering::Less {
                    assert!(
                        check_mul_frac_realization(&pool[i], &pool[j], &sys, 12).unwrap(),
                        "realization mismatch for {} * {{{}}}",
                        pool[i],
                        pool[j]
                    );
                    checked += 1;
                    if checked >= 25 {
                        return;
                    }
                }
            }
        }
    }

    #[test]
    fn index_literal_round_trip() {
        let sys = sys_abc();
        for text in ["a", "[b,a]", "[c,2a]", "[[c,2a],3b]", "[[b,2a],[b,a]]"] {
            let i = parse_index(text, &sys).unwrap();
            let r = render_index(&i, &sys);
            assert_eq!(parse_index(&r, &sys).unwrap(), i);
        }
    }
}
