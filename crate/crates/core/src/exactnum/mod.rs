//! Exact rational and cyclotomic arithmetic, plus a high-precision numeric embedding
//! used only for cross-checks.

mod cyclo;
pub mod hp;
mod poly;
pub mod rational;
mod scalar;

pub use cyclo::{cos_pi, CycloContext, CycloElem};
pub use hp::{HpComplex, HpReal};
pub use poly::{cyclotomic_poly, euler_phi};
pub use rational::{format_rational, parse_rational, rat, Rational};
pub use scalar::{FieldScalar, Scalar};
