//! Rigorous evaluation of the real constants appearing in generalized
//! polynomials: exact rationals where possible, adaptive-precision dyadic
//! interval enclosures otherwise.

mod constant;
mod dyadic;
mod interval;

pub use constant::{PrecisionConfig, RealConst};
pub use dyadic::Dyadic;
pub use interval::Interval;
