//! Generalized polynomials: parsing, representation, rigorous evaluation,
//! complexity, and the bounded-coefficient growth decomposition.

mod ast;
mod decompose;
mod parse;

pub use ast::{dist_to_int_expr, sturmian_diff_expr, ConstCache, GPExpr, GPValue};
pub use decompose::{poly_growth_decompose, GrowthDecomposition};
pub use parse::{fold_const, parse, parse_const, render};
