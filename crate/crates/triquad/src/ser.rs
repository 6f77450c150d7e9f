//! Serialization helpers: big integers and rationals as decimal strings.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use serde::Serializer;

pub fn bigint<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

pub fn rational_str(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn small_rational_str(q: &Rational64) -> String {
    format!("{}/{}", q.numer(), q.denom())
}
