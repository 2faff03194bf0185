use std::fmt::Debug;

use num_traits::{One, Zero};

use super::cyclo::CycloElem;
use super::rational::{format_rational, Rational};

/// Coefficient ring for sparse chains and divisors. Zero values are never stored, so
/// implementors only need to recognise zero, not construct it.
pub trait Scalar: Clone + PartialEq + Debug + Send + Sync {
    fn is_zero(&self) -> bool;
    /// The zero of the same ring (same cyclotomic order).
    fn zero_like(&self) -> Self;
    fn add_assign_ref(&mut self, rhs: &Self);
    fn neg(&self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn scale(&self, q: &Rational) -> Self;
    fn to_json(&self) -> serde_json::Value;
}

/// A coefficient domain that is a field.
pub trait FieldScalar: Scalar {
    fn inv(&self) -> Option<Self>;
    fn is_one(&self) -> bool;
}

impl Scalar for Rational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Zero::zero()
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scale(&self, q: &Rational) -> Self {
        self * q
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }
}

impl FieldScalar for Rational {
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
}

impl Scalar for CycloElem {
    fn is_zero(&self) -> bool {
        CycloElem::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        CycloElem::zero(self.context())
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        CycloElem::add_assign_ref(self, rhs)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        CycloElem::mul_ref(self, rhs)
    }
    fn scale(&self, q: &Rational) -> Self {
        CycloElem::scale(self, q)
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("cyclotomic element serializes")
    }
}

impl FieldScalar for CycloElem {
    fn inv(&self) -> Option<Self> {
        self.invert().ok()
    }
    fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| One::is_one(&q))
    }
}
