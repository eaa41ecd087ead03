//! Formal congruence algebra: sums of coefficient-weighted products of
//! operands and fractional parts of operands, read modulo 1.

use crate::error::RewriteError;
use crate::gp::GPExpr;
use crate::real::RealConst;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::fmt;

/// An operand: a formal variable, a concrete expression, or a nested sum.
#[derive(Clone, Debug, PartialEq)]
pub enum Operand {
    Var(usize),
    Expr(GPExpr),
    Sum(Box<TermSum>),
}

/// One multiplicative factor: the operand raw, or its fractional part.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Raw(Operand),
    Frac(Operand),
}

/// `coeff * prod(factors)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: RealConst,
    pub factors: Vec<Factor>,
}

/// A sum of terms, interpreted modulo 1 when used as a congruence side.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TermSum {
    pub terms: Vec<Term>,
}

impl Operand {
    pub fn to_gpexpr(&self, subst: &dyn Fn(usize) -> GPExpr) -> GPExpr {
        match self {
            Operand::Var(i) => subst(*i),
            Operand::Expr(e) => e.clone(),
            Operand::Sum(s) => s.to_gpexpr(subst),
        }
    }
}

impl Factor {
    pub fn to_gpexpr(&self, subst: &dyn Fn(usize) -> GPExpr) -> GPExpr {
        match self {
            Factor::Raw(op) => op.to_gpexpr(subst),
            Factor::Frac(op) => GPExpr::frac_part(op.to_gpexpr(subst)),
        }
    }

    /// Complexity contribution with formal variables weighted zero.
    fn complexity(&self) -> u32 {
        match self {
            Factor::Raw(Operand::Var(_)) => 0,
            Factor::Raw(Operand::Expr(e)) => e.complexity(),
            Factor::Raw(Operand::Sum(s)) => s.complexity(),
            Factor::Frac(Operand::Var(_)) => 1,
            Factor::Frac(Operand::Expr(e)) => e.complexity() + 1,
            Factor::Frac(Operand::Sum(s)) => s.complexity() + 1,
        }
    }
}

impl Term {
    pub fn new(coeff: RealConst, factors: Vec<Factor>) -> Self {
        Term { coeff, factors }
    }

    pub fn from_int(coeff: i64, factors: Vec<Factor>) -> Self {
        Term { coeff: RealConst::integer(coeff), factors }
    }

    pub fn to_gpexpr(&self, subst: &dyn Fn(usize) -> GPExpr) -> GPExpr {
        let mut fs = Vec::with_capacity(self.factors.len() + 1);
        let coeff_is_one = self
            .coeff
            .as_exact_rational()
            .map_or(false, |r| r == BigRational::from(BigInt::from(1)));
        if !coeff_is_one || self.factors.is_empty() {
            fs.push(GPExpr::Const(self.coeff.clone()));
        }
        for f in &self.factors {
            fs.push(f.to_gpexpr(subst));
        }
        GPExpr::mul(fs)
    }

    /// Products are additive in complexity; the constant coefficient is free.
    pub fn complexity(&self) -> u32 {
        self.factors.iter().map(|f| f.complexity()).sum()
    }
}

impl TermSum {
    pub fn new(terms: Vec<Term>) -> Self {
        TermSum { terms }
    }

    pub fn single(term: Term) -> Self {
        TermSum { terms: vec![term] }
    }

    pub fn to_gpexpr(&self, subst: &dyn Fn(usize) -> GPExpr) -> GPExpr {
        if self.terms.is_empty() {
            return GPExpr::int(0);
        }
        GPExpr::add(self.terms.iter().map(|t| t.to_gpexpr(subst)).collect())
    }

    pub fn complexity(&self) -> u32 {
        self.terms.iter().map(|t| t.complexity()).max().unwrap_or(0)
    }

    pub fn max_vars(&self) -> usize {
        fn op_vars(op: &Operand) -> usize {
            match op {
                Operand::Var(i) => i + 1,
                Operand::Expr(_) => 0,
                Operand::Sum(s) => s.max_vars(),
            }
        }
        self.terms
            .iter()
            .flat_map(|t| t.factors.iter())
            .map(|f| match f {
                Factor::Raw(op) | Factor::Frac(op) => op_vars(op),
            })
            .max()
            .unwrap_or(0)
    }
}

/// A guard on the fractional part of one formal variable.
#[derive(Clone, Debug, PartialEq)]
pub enum GuardCond {
    /// `lo <= {u_var} < hi`
    FracInCo { var: usize, lo: BigRational, hi: BigRational },
    /// `{u_var} = 0`
    FracZero { var: usize },
    /// `{u_var} > 0`
    FracPositive { var: usize },
}

impl GuardCond {
    pub fn holds(&self, frac: &BigRational) -> bool {
        use num_traits::Zero;
        match self {
            GuardCond::FracInCo { lo, hi, .. } => lo <= frac && frac < hi,
            GuardCond::FracZero { .. } => frac.is_zero(),
            GuardCond::FracPositive { .. } => frac > &BigRational::zero(),
        }
    }

    pub fn var(&self) -> usize {
        match self {
            GuardCond::FracInCo { var, .. } => *var,
            GuardCond::FracZero { var } => *var,
            GuardCond::FracPositive { var } => *var,
        }
    }
}

/// Guard branches partitioning the relevant domain, each with a result sum.
#[derive(Clone, Debug, PartialEq)]
pub struct GuardedSum {
    pub branches: Vec<(Vec<GuardCond>, TermSum)>,
}

impl GuardedSum {
    /// Select the branch whose guards hold for the given fractional parts.
    pub fn select(&self, fracs: &[BigRational]) -> Result<&TermSum, RewriteError> {
        for (guards, sum) in &self.branches {
            if guards.iter().all(|g| g.holds(&fracs[g.var()])) {
                return Ok(sum);
            }
        }
        Err(RewriteError::GuardViolated)
    }
}

/// Either side of a congruence.
#[derive(Clone, Debug, PartialEq)]
pub enum Side {
    Sum(TermSum),
    Guarded(GuardedSum),
}

/// A named congruence `lhs = rhs (mod 1)` in `vars` formal variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Identity {
    pub name: String,
    pub vars: usize,
    pub lhs: Side,
    pub rhs: Side,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} vars)", self.name, self.vars)
    }
}

// Shorthand constructors used all over the identity battery.
pub fn raw(i: usize) -> Factor {
    Factor::Raw(Operand::Var(i))
}

pub fn frac(i: usize) -> Factor {
    Factor::Frac(Operand::Var(i))
}
