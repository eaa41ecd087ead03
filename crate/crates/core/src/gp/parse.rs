//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := ('-')? term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' nat)?
//! base   := rational | const | 'n' | '(' expr ')' | '[' expr ']' | '{' expr '}'
//! const  := 'sqrt' '(' rational ')' | 'pi' | 'log' '(' rational ')'
//!         | 'liouville' '(' nat ')'
//! ```
//!
//! `[ ]` is the integer part, `{ }` the fractional part; whitespace is
//! insignificant; `*` is required (no juxtaposition). Division is accepted
//! only when the divisor folds to a constant, since generalized polynomials
//! are closed under products but not quotients.

use super::ast::GPExpr;
use crate::error::ParseError;
use crate::real::RealConst;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{pow::pow, Zero};

pub fn parse(text: &str) -> Result<GPExpr, ParseError> {
    let mut p = Parser::new(text);
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

/// Parse a constant expression (no variable, no brackets) into a RealConst.
pub fn parse_const(text: &str) -> Result<RealConst, ParseError> {
    let e = parse(text)?;
    fold_const(&e).ok_or(ParseError {
        pos: 0,
        msg: "expected a constant expression (no `n`, no brackets)".into(),
    })
}

/// Fold an expression tree with no variable and no integer/fractional parts
/// into a single constant.
pub fn fold_const(e: &GPExpr) -> Option<RealConst> {
    match e {
        GPExpr::Const(c) => Some(c.clone()),
        GPExpr::Var | GPExpr::IntPart(_) | GPExpr::FracPart(_) => None,
        GPExpr::Add(ts) => {
            let mut acc = RealConst::integer(0);
            for t in ts {
                acc = RealConst::add(acc, fold_const(t)?);
            }
            Some(acc)
        }
        GPExpr::Mul(fs) => {
            let mut acc = RealConst::integer(1);
            for f in fs {
                acc = RealConst::mul(acc, fold_const(f)?);
            }
            Some(acc)
        }
        GPExpr::Neg(x) => Some(RealConst::neg(fold_const(x)?)),
        GPExpr::Pow(x, k) => {
            let c = fold_const(x)?;
            let mut acc = RealConst::integer(1);
            for _ in 0..*k {
                acc = RealConst::mul(acc, c.clone());
            }
            Some(acc)
        }
    }
}

/// Render an expression; `parse(render(e))` is structurally identical to `e`.
pub fn render(e: &GPExpr) -> String {
    e.to_string()
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { bytes: text.as_bytes(), pos: 0 }
    }

    fn err(&self, msg: &str) -> ParseError {
        ParseError { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", b as char)))
        }
    }

    fn expr(&mut self) -> Result<GPExpr, ParseError> {
        let mut terms = Vec::new();
        let negate_first = self.eat(b'-');
        let first = self.term()?;
        terms.push(if negate_first { GPExpr::neg(first) } else { first });
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(GPExpr::neg(self.term()?));
            } else {
                break;
            }
        }
        Ok(GPExpr::add(terms))
    }

    fn term(&mut self) -> Result<GPExpr, ParseError> {
        let mut factors = vec![self.factor()?];
        loop {
            if self.eat(b'*') {
                factors.push(self.factor()?);
            } else if self.eat(b'/') {
                let at = self.pos;
                let divisor = self.factor()?;
                let c = fold_const(&divisor).ok_or(ParseError {
                    pos: at,
                    msg: "division is only allowed by a constant".into(),
                })?;
                let inv = RealConst::div(RealConst::integer(1), c).map_err(|e| ParseError {
                    pos: at,
                    msg: format!("bad divisor: {}", e),
                })?;
                // fold constant/constant in place to keep rationals tidy
                let last = factors.pop().unwrap();
                match fold_const(&last) {
                    Some(lc) => factors.push(GPExpr::Const(RealConst::mul(lc, inv))),
                    None => {
                        factors.push(last);
                        factors.push(GPExpr::Const(inv));
                    }
                }
            } else {
                break;
            }
        }
        Ok(GPExpr::mul(factors))
    }

    fn factor(&mut self) -> Result<GPExpr, ParseError> {
        let base = self.base()?;
        if self.eat(b'^') {
            let at = self.pos;
            let k = self.nat()?;
            if k == 0 {
                return Err(ParseError { pos: at, msg: "exponent must be >= 1".into() });
            }
            if k > 64 {
                return Err(ParseError { pos: at, msg: "exponent too large (max 64)".into() });
            }
            Ok(GPExpr::pow(base, k as u32))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<GPExpr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'[') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b']')?;
                Ok(GPExpr::int_part(e))
            }
            Some(b'{') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b'}')?;
                Ok(GPExpr::frac_part(e))
            }
            Some(c) if c.is_ascii_digit() => {
                let r = self.rational()?;
                Ok(GPExpr::Const(RealConst::rational(r)))
            }
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.err("expected a number, constant, `n`, or a bracketed expression")),
        }
    }

    fn ident(&mut self) -> Result<GPExpr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        match word {
            "n" => Ok(GPExpr::Var),
            "pi" => Ok(GPExpr::Const(RealConst::Pi)),
            "sqrt" => {
                self.expect(b'(')?;
                let at = self.pos;
                let r = self.signed_rational()?;
                self.expect(b')')?;
                RealConst::sqrt(r)
                    .map(GPExpr::Const)
                    .map_err(|e| ParseError { pos: at, msg: e.to_string() })
            }
            "log" => {
                self.expect(b'(')?;
                let at = self.pos;
                let r = self.signed_rational()?;
                self.expect(b')')?;
                RealConst::log(r)
                    .map(GPExpr::Const)
                    .map_err(|e| ParseError { pos: at, msg: e.to_string() })
            }
            "liouville" => {
                self.expect(b'(')?;
                let at = self.pos;
                let j = self.nat()?;
                self.expect(b')')?;
                RealConst::liouville(j as u32)
                    .map(GPExpr::Const)
                    .map_err(|e| ParseError { pos: at, msg: e.to_string() })
            }
            "" => Err(self.err("expected an identifier")),
            other => Err(ParseError {
                pos: start,
                msg: format!("unknown constant `{}`", other),
            }),
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| ParseError { pos: start, msg: "number too large".into() })
    }

    fn digits(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .unwrap())
    }

    /// `digits ('.' digits)? ('/' digits)?` — decimal or slash notation.
    fn rational(&mut self) -> Result<BigRational, ParseError> {
        let int_part = self.digits()?;
        let mut value = BigRational::from(int_part);
        if self.pos < self.bytes.len() && self.bytes[self.pos] == b'.' {
            self.pos += 1;
            let start = self.pos;
            let frac = self.digits()?;
            let places = self.pos - start;
            value += BigRational::new(frac, pow(BigInt::from(10), places));
        }
        // slash immediately after a literal is a rational literal, not the
        // general division operator (they agree semantically anyway)
        if self.pos < self.bytes.len() && self.bytes[self.pos] == b'/' {
            let save = self.pos;
            self.pos += 1;
            self.skip_ws();
            if self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                let den = self.digits()?;
                if den.is_zero() {
                    return Err(ParseError { pos: save + 1, msg: "zero denominator".into() });
                }
                value /= BigRational::from(den);
            } else {
                self.pos = save;
            }
        }
        Ok(value)
    }

    fn signed_rational(&mut self) -> Result<BigRational, ParseError> {
        self.skip_ws();
        let neg = self.eat(b'-');
        let r = self.rational()?;
        Ok(if neg { -r } else { r })
    }
}

impl GPExpr {
    pub fn parse(text: &str) -> Result<GPExpr, ParseError> {
        parse(text)
    }

    pub fn render(&self) -> String {
        render(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::PrecisionConfig;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_sturmian_difference() {
        let e = parse("[(n+1)*sqrt(2)] - [n*sqrt(2)] - [sqrt(2)]").unwrap();
        match &e {
            GPExpr::Add(ts) => {
                assert_eq!(ts.len(), 3);
                assert!(matches!(ts[0], GPExpr::IntPart(_)));
                assert!(matches!(ts[1], GPExpr::Neg(_)));
            }
            other => panic!("unexpected shape: {:?}", other),
        }
        let cfg = PrecisionConfig::default();
        assert_eq!(e.eval(2, &cfg).unwrap().as_integer(), Some(BigInt::from(1)));
    }

    #[test]
    fn parses_frac_of_var() {
        assert_eq!(parse("{n}").unwrap(), GPExpr::frac_part(GPExpr::Var));
    }

    #[test]
    fn parses_intro_product_shape() {
        let e = parse("sqrt(3)*n*([sqrt(17)*n + log(2)])").unwrap();
        match &e {
            GPExpr::Mul(fs) => {
                assert_eq!(fs.len(), 3);
                assert!(matches!(fs[2], GPExpr::IntPart(_)));
            }
            other => panic!("unexpected shape: {:?}", other),
        }
    }

    #[test]
    fn rational_literals() {
        let e = parse("0.25 + 1/3").unwrap();
        let v = e.eval(0, &PrecisionConfig::default()).unwrap();
        assert_eq!(v.as_exact().cloned(), Some(rat(7, 12)));
    }

    #[test]
    fn constant_division() {
        let c = parse_const("1/(2*sqrt(3))").unwrap();
        assert!((c.approx_f64() - 0.28867513459481287).abs() < 1e-14);
        assert!(parse("n/(n+1)").is_err());
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse("[n*sqrt(2)").unwrap_err();
        assert!(err.pos >= 9);
        let err = parse("snort(2)").unwrap_err();
        assert_eq!(err.pos, 0);
        assert!(err.msg.contains("snort"));
        assert!(parse("n^0").is_err());
    }

    #[test]
    fn render_round_trips() {
        for text in [
            "[(n+1)*sqrt(2)] - [n*sqrt(2)] - [sqrt(2)]",
            "{n}",
            "sqrt(3)*n*[sqrt(17)*n + log(2)]",
            "{sqrt(2)*n}^2*{sqrt(3)*n}^3",
            "2*n^2 - 1 + [1 - {[{liouville(3)*n}*n]*sqrt(2)}]",
            "-n + pi",
            "(n + 1)*(n - 1)",
        ] {
            let e = parse(text).unwrap();
            let r = render(&e);
            let e2 = parse(&r).unwrap_or_else(|err| panic!("re-parse of `{}` failed: {}", r, err));
            assert_eq!(e, e2, "round trip changed structure for `{}` -> `{}`", text, r);
        }
    }
}
