//! Algebra of generalized polynomials (expressions over real polynomials
//! closed under sums, products, integer and fractional parts), the
//! well-ordered index machinery for basic generalized polynomials, a mod-1
//! identity toolkit, and rigorously evaluated equidistribution / recurrence
//! statistics.

pub mod dist;
pub mod error;
pub mod gp;
pub mod index;
pub mod pp;
pub mod primes;
pub mod recurrence;
pub mod rewrite;
pub mod value;

mod real;
mod symbolic;

pub use error::{EvalError, IndexError, ParseError, PpError, RealError, RecurrenceError, RewriteError};
pub use gp::{GPExpr, GPValue};
pub use index::{IndexSym, PolySystem};
pub use real::{Dyadic, Interval, PrecisionConfig, RealConst};
pub use value::Value;
