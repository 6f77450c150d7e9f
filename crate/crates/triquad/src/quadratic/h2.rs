//! 2-class numbers of the quadratic subfields from residue-symbol rules.

use num_bigint::BigInt;
use serde::Serialize;

use super::forms::{class_group_imaginary, class_group_real_bounded};
use super::QuadError;
use crate::arith::{self, SymbolValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    LemmaRule,
    FormOracle,
}

/// A 2-class number together with where it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassNumber2 {
    pub d: i64,
    pub value: u64,
    pub provenance: Provenance,
    /// Which rule produced the value (1..=6), for lemma-rule values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<u8>,
}

/// Shape of a quadratic radicand built from 2 and primes ≡ 1 (mod 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuadDescriptor {
    Two,
    Prime(u64),
    PrimePair(u64, u64),
    TwicePrime(u64),
    TwicePrimePair(u64, u64),
}

impl QuadDescriptor {
    pub fn radicand(&self) -> u64 {
        match *self {
            QuadDescriptor::Two => 2,
            QuadDescriptor::Prime(p) => p,
            QuadDescriptor::PrimePair(p, q) => p * q,
            QuadDescriptor::TwicePrime(p) => 2 * p,
            QuadDescriptor::TwicePrimePair(p, q) => 2 * p * q,
        }
    }
}

fn leg(a: i64, p: u64) -> SymbolValue {
    arith::legendre_u64(a, p).unwrap_or(SymbolValue::Zero)
}

fn lemma(value: u64, d: u64, rule: u8) -> Option<ClassNumber2> {
    Some(ClassNumber2 { d: d as i64, value, provenance: Provenance::LemmaRule, rule: Some(rule) })
}

/// 2-class number by the residue-symbol rules, when one of them applies.
pub fn h2_lemma(desc: QuadDescriptor) -> Option<ClassNumber2> {
    let d = desc.radicand();
    match desc {
        QuadDescriptor::Two => lemma(1, d, 1),
        QuadDescriptor::Prime(p) if p % 4 == 1 => lemma(1, d, 1),
        QuadDescriptor::PrimePair(p, q) if leg(p as i64, q).is_minus_one() => lemma(2, d, 2),
        QuadDescriptor::TwicePrime(p) if p % 8 == 5 => lemma(2, d, 3),
        QuadDescriptor::TwicePrime(p) if p % 8 == 1 => {
            let pb = BigInt::from(p);
            let a = arith::quartic_2_under_p(&pb).ok()?;
            let b = arith::quartic_p_under_2(&pb).ok()?;
            if a != b {
                lemma(2, d, 5)
            } else if a.is_minus_one() {
                lemma(4, d, 6)
            } else {
                None
            }
        }
        QuadDescriptor::TwicePrimePair(p, q) => {
            let minus = [leg(p as i64, q), leg(2, p), leg(2, q)]
                .iter()
                .filter(|s| s.is_minus_one())
                .count();
            if minus >= 2 {
                lemma(4, d, 4)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// 2-class number of Q(√d) from the form oracle.
pub fn h2_oracle(d: i64, bound: u64) -> Result<ClassNumber2, QuadError> {
    let value = if d < 0 {
        class_group_imaginary(d).1
    } else {
        class_group_real_bounded(d as u64, bound)?.1
    };
    Ok(ClassNumber2 { d, value, provenance: Provenance::FormOracle, rule: None })
}

/// Lemma value when a rule applies, otherwise the form oracle.
pub fn h2_value(desc: QuadDescriptor, bound: u64) -> Result<ClassNumber2, QuadError> {
    match h2_lemma(desc) {
        Some(v) => Ok(v),
        None => h2_oracle(desc.radicand() as i64, bound),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_examples() {
        assert_eq!(h2_lemma(QuadDescriptor::Prime(13)).unwrap().value, 1);
        assert_eq!(h2_lemma(QuadDescriptor::Two).unwrap().value, 1);
        assert_eq!(h2_lemma(QuadDescriptor::TwicePrime(13)).unwrap().value, 2);
        assert_eq!(h2_lemma(QuadDescriptor::PrimePair(5, 13)).unwrap().value, 2);
        assert_eq!(h2_lemma(QuadDescriptor::TwicePrimePair(41, 13)).unwrap().value, 4);
        assert!(h2_lemma(QuadDescriptor::PrimePair(5, 29)).is_none());
    }

    #[test]
    fn lemma_agrees_with_oracle_examples() {
        for desc in [
            QuadDescriptor::PrimePair(5, 13),
            QuadDescriptor::TwicePrime(13),
            QuadDescriptor::TwicePrime(17),
            QuadDescriptor::TwicePrimePair(41, 13),
        ] {
            let l = h2_lemma(desc).unwrap();
            let o = h2_oracle(desc.radicand() as i64, 1_000_000).unwrap();
            assert_eq!(l.value, o.value, "{desc:?}");
        }
    }
}
