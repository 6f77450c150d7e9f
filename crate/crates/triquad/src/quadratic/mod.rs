//! Real quadratic fields: fundamental units, norm signatures of prime pairs
//! and 2-class numbers.

pub mod cache;
pub mod forms;
pub mod h2;

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, is_squarefree, SymbolValue};

pub use forms::{class_group_imaginary, class_group_real, ORACLE_BOUND};
pub use h2::{h2_lemma, ClassNumber2, Provenance, QuadDescriptor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("{0} is not a squarefree integer greater than 1")]
    BadRadicand(i64),
    #[error("discriminant {disc} exceeds the form-oracle bound {bound}")]
    AboveOracleBound { disc: u64, bound: u64 },
    #[error("invalid prime pair ({0}, {1}): {2}")]
    BadPair(u64, u64, String),
}

/// Fundamental unit `(a + b√d)/denom` of the maximal order of Q(√d).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadUnit {
    pub d: u64,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub a: BigInt,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub b: BigInt,
    pub denom: u8,
    pub norm: i8,
}

impl QuadUnit {
    /// `a² − d·b² = norm·denom²`, `b > 0`, `a > 0`, and the denominator rule.
    pub fn satisfies_pell(&self) -> bool {
        if self.denom != 1 && self.denom != 2 {
            return false;
        }
        if self.denom == 2 && (self.d % 4 != 1 || (&self.a - &self.b).is_odd()) {
            return false;
        }
        if !self.b.is_positive() || !self.a.is_positive() || self.norm.abs() != 1 {
            return false;
        }
        let lhs = &self.a * &self.a - BigInt::from(self.d) * &self.b * &self.b;
        let den = BigInt::from(self.denom);
        lhs == BigInt::from(self.norm) * &den * &den
    }

    /// Integer coordinates `(x, y)` with ε = x + y√d, or `None` when the unit
    /// has half-integer coordinates.
    pub fn integer_coords(&self) -> Option<(BigInt, BigInt)> {
        if self.denom == 1 {
            Some((self.a.clone(), self.b.clone()))
        } else {
            None
        }
    }

    /// Number of decimal digits of the larger coordinate (diagnostics).
    pub fn digits(&self) -> usize {
        self.a.to_string().len()
    }
}

/// Norm signs of the units of the four pair-dependent quadratic subfields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct NormSignature {
    pub n1: i8,
    pub n2: i8,
    pub n3: i8,
    pub n4: i8,
}

impl NormSignature {
    pub fn as_array(&self) -> [i8; 4] {
        [self.n1, self.n2, self.n3, self.n4]
    }

    pub fn from_array(v: [i8; 4]) -> Self {
        NormSignature { n1: v[0], n2: v[1], n3: v[2], n4: v[3] }
    }

    /// Signature of the pair with the primes interchanged.
    pub fn swapped(&self) -> Self {
        NormSignature { n1: self.n2, n2: self.n1, n3: self.n3, n4: self.n4 }
    }
}

impl std::fmt::Display for NormSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{},{})", self.n1, self.n2, self.n3, self.n4)
    }
}

fn memo() -> &'static RwLock<HashMap<u64, QuadUnit>> {
    static MEMO: OnceLock<RwLock<HashMap<u64, QuadUnit>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Insert an externally supplied unit into the process-wide memo.
/// The unit must already have been verified by the caller.
pub(crate) fn memo_insert(u: QuadUnit) {
    memo().write().unwrap().entry(u.d).or_insert(u);
}

/// Snapshot of every unit currently memoized, sorted by radicand.
pub fn memo_snapshot() -> Vec<QuadUnit> {
    let mut v: Vec<QuadUnit> = memo().read().unwrap().values().cloned().collect();
    v.sort_by_key(|u| u.d);
    v
}

/// Fundamental unit of Q(√d), memoized process-wide.
pub fn fundamental_unit(d: u64) -> Result<QuadUnit, QuadError> {
    if d <= 1 || !is_squarefree(d) {
        return Err(QuadError::BadRadicand(d as i64));
    }
    if let Some(u) = memo().read().unwrap().get(&d) {
        return Ok(u.clone());
    }
    let u = cf_unit(d);
    debug_assert!(u.satisfies_pell());
    memo_insert(u.clone());
    Ok(u)
}

/// Continued-fraction expansion of (P0 + √d)/Q0 to the first return of
/// Q_k to Q0. With x0 = √d this is the classical Pell solution; with
/// x0 = (1+√d)/2 it gives the unit of the maximal order directly, via
/// Q0·N(p − q·x0) = (−1)^k·Q_k.
fn cf_unit(d: u64) -> QuadUnit {
    let sd = arith::isqrt(&BigInt::from(d));
    let sd: i128 = sd.try_into().expect("radicand too large");
    let d_i = d as i128;
    let (mut p_state, mut q_state) = if d % 4 == 1 { (1i128, 2i128) } else { (0i128, 1i128) };
    let q0 = q_state;
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut steps: u64 = 0;
    loop {
        let a = Integer::div_floor(&(p_state + sd), &q_state);
        let big_a = BigInt::from(a);
        let h_next = &big_a * &h + &h_prev;
        let k_next = &big_a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let p_next = a * q_state - p_state;
        let q_next = (d_i - p_next * p_next) / q_state;
        p_state = p_next;
        q_state = q_next;
        steps += 1;
        if q_state == q0 {
            break;
        }
    }
    let norm: i8 = if steps % 2 == 0 { 1 } else { -1 };
    if q0 == 1 {
        QuadUnit { d, a: h, b: k, denom: 1, norm }
    } else {
        let a = BigInt::from(2) * &h - &k;
        let b = k;
        if a.is_even() && b.is_even() {
            QuadUnit { d, a: a / 2, b: b / 2, denom: 1, norm }
        } else {
            QuadUnit { d, a, b, denom: 2, norm }
        }
    }
}

/// Validates a prime pair p1 ≠ p2, both ≡ 1 (mod 4).
pub fn check_pair(p1: u64, p2: u64) -> Result<(), QuadError> {
    let bad = |why: &str| Err(QuadError::BadPair(p1, p2, why.to_string()));
    if p1 == p2 {
        return bad("primes must be distinct");
    }
    for p in [p1, p2] {
        if !arith::is_prime_u64(p) {
            return bad(&format!("{p} is not prime"));
        }
        if p % 4 != 1 {
            return bad(&format!("{p} is not congruent to 1 mod 4"));
        }
    }
    if (2 * p1).checked_mul(p2).is_none() {
        return bad("primes too large");
    }
    Ok(())
}

/// Norms of ε_{2p1}, ε_{2p2}, ε_{p1p2}, ε_{2p1p2}.
pub fn norm_signature(p1: u64, p2: u64) -> Result<NormSignature, QuadError> {
    check_pair(p1, p2)?;
    let n = |d: u64| fundamental_unit(d).map(|u| u.norm);
    let sig = NormSignature { n1: n(2 * p1)?, n2: n(2 * p2)?, n3: n(p1 * p2)?, n4: n(2 * p1 * p2)? };
    if cfg!(debug_assertions) {
        for (shortcut, actual) in norm_shortcuts(p1, p2).into_iter().zip(sig.as_array()) {
            if let Some(s) = shortcut {
                debug_assert_eq!(s, actual, "norm shortcut disagrees for ({p1},{p2})");
            }
        }
    }
    Ok(sig)
}

/// Norm values forced by the residue-symbol criteria, where one applies.
pub fn norm_shortcuts(p1: u64, p2: u64) -> [Option<i8>; 4] {
    let two_p = |p: u64| -> Option<i8> {
        if p % 8 == 5 {
            return Some(-1);
        }
        let pb = BigInt::from(p);
        let a = arith::quartic_2_under_p(&pb).ok()?;
        let b = arith::quartic_p_under_2(&pb).ok()?;
        if a != b {
            Some(1)
        } else if a == SymbolValue::MinusOne {
            Some(-1)
        } else {
            None
        }
    };
    let leg = arith::legendre_u64(p1 as i64, p2).unwrap_or(SymbolValue::Zero);
    let l2 = |p: u64| arith::legendre_u64(2, p).unwrap_or(SymbolValue::Zero);
    let n3 = leg.is_minus_one().then_some(-1);
    let minus = [leg, l2(p1), l2(p2)].iter().filter(|s| s.is_minus_one()).count();
    let n4 = (minus >= 2).then_some(-1);
    [two_p(p1), two_p(p2), n3, n4]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: the unit with smallest y > 0 solving
    /// x² − d y² = ±1, or x² − d y² = ±4 when d ≡ 1 (mod 4), searched
    /// directly up to `limit`.
    fn brute_unit(d: u64, limit: u64) -> Option<(u64, u64, u8, i8)> {
        let is_sq = |n: u64| {
            let r = (n as f64).sqrt() as u64;
            (r.saturating_sub(2)..=r + 2).find(|x| x * x == n)
        };
        let k: i64 = if d % 4 == 1 { 4 } else { 1 };
        for y in 1..limit {
            for s in [-k, k] {
                let v = (d * y * y) as i64 + s;
                if v <= 0 {
                    continue;
                }
                if let Some(x) = is_sq(v as u64) {
                    let norm = s.signum() as i8;
                    if k == 1 || (x % 2 == 0 && y % 2 == 0) {
                        let (x, y) = if k == 1 { (x, y) } else { (x / 2, y / 2) };
                        return Some((x, y, 1, norm));
                    }
                    return Some((x, y, 2, norm));
                }
            }
        }
        None
    }

    fn tuple(u: &QuadUnit) -> (u64, u64, u8, i8) {
        (u64::try_from(&u.a).unwrap(), u64::try_from(&u.b).unwrap(), u.denom, u.norm)
    }

    #[test]
    fn spec_examples() {
        assert_eq!(tuple(&fundamental_unit(2).unwrap()), (1, 1, 1, -1));
        assert_eq!(tuple(&fundamental_unit(5).unwrap()), (1, 1, 2, -1));
        assert_eq!(tuple(&fundamental_unit(34).unwrap()), (35, 6, 1, 1));
        assert_eq!(tuple(&fundamental_unit(82).unwrap()), (9, 1, 1, -1));
        assert!(fundamental_unit(12).is_err());
        assert!(fundamental_unit(1).is_err());
    }

    #[test]
    fn agrees_with_brute_force_search() {
        let limit = 200_000u64;
        for d in (2..300u64).filter(|&d| is_squarefree(d)) {
            let u = fundamental_unit(d).unwrap();
            match brute_unit(d, limit) {
                Some(t) => assert_eq!(tuple(&u), t, "d={d}"),
                None => {
                    // The ±4 search runs over the doubled coordinate.
                    let scale = if d % 4 == 1 { 2 / u.denom as u64 } else { 1 };
                    assert!(&u.b * scale >= BigInt::from(limit), "d={d}")
                }
            }
        }
    }

    #[test]
    fn large_radicand_satisfies_pell() {
        let u = fundamental_unit(2 * 457 * 113).unwrap();
        assert!(u.satisfies_pell());
        assert!(u.digits() > 10);
    }

    #[test]
    fn signatures_from_table() {
        assert_eq!(norm_signature(41, 13).unwrap().as_array(), [-1, -1, -1, -1]);
        assert_eq!(norm_signature(97, 17).unwrap().as_array(), [1, 1, -1, 1]);
        assert_eq!(norm_signature(41, 73).unwrap().as_array(), [-1, 1, 1, 1]);
        assert!(norm_signature(41, 41).is_err());
        assert!(norm_signature(7, 13).is_err());
    }
}
