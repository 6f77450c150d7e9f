//! Integer and rational helpers, residue symbols and primality.
//!
//! Everything here is exact. The fixed-point interval type used for real
//! embeddings lives in [`interval`].

pub mod interval;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Errors raised by the residue-symbol helpers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("modulus {0} is not an odd prime")]
    NotOddPrime(BigInt),
    #[error("{0} is not congruent to 1 mod 8")]
    NotOneModEight(BigInt),
}

/// Value of a Legendre or quartic symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolValue {
    MinusOne,
    Zero,
    One,
}

impl SymbolValue {
    pub fn as_i8(self) -> i8 {
        match self {
            SymbolValue::MinusOne => -1,
            SymbolValue::Zero => 0,
            SymbolValue::One => 1,
        }
    }

    pub fn from_sign(s: i8) -> Self {
        match s.signum() {
            -1 => SymbolValue::MinusOne,
            0 => SymbolValue::Zero,
            _ => SymbolValue::One,
        }
    }

    pub fn is_minus_one(self) -> bool {
        self == SymbolValue::MinusOne
    }
}

impl Serialize for SymbolValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

/// Returns the nonnegative square root of `n` when `n` is a perfect square.
pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Square root of a rational that is a square in Q.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    let n = is_perfect_square(q.numer())?;
    let d = is_perfect_square(q.denom())?;
    Some(BigRational::new(n, d))
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    debug_assert!(!n.is_negative());
    n.sqrt()
}

/// Square-free test by trial division; inputs are desk-scale.
pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

const WITNESSES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin with the first 13 primes as bases. Deterministic below
/// 3.3·10^24; a strong probable-prime test above that.
pub fn is_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    for &w in &WITNESSES {
        let w = BigInt::from(w);
        if *n == w {
            return true;
        }
        if (n % &w).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for &w in &WITNESSES {
        let mut x = BigInt::from(w).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime_u64(n: u64) -> bool {
    is_prime(&BigInt::from(n))
}

/// Legendre symbol (a/p) by Euler's criterion.
pub fn legendre(a: &BigInt, p: &BigInt) -> Result<SymbolValue, ArithError> {
    if p.is_even() || !is_prime(p) {
        return Err(ArithError::NotOddPrime(p.clone()));
    }
    let r = a.mod_floor(p);
    if r.is_zero() {
        return Ok(SymbolValue::Zero);
    }
    let e = (p - 1u32) >> 1;
    let v = r.modpow(&e, p);
    Ok(if v.is_one() {
        SymbolValue::One
    } else {
        SymbolValue::MinusOne
    })
}

/// Legendre symbol for machine-sized arguments.
pub fn legendre_u64(a: i64, p: u64) -> Result<SymbolValue, ArithError> {
    legendre(&BigInt::from(a), &BigInt::from(p))
}

fn check_one_mod_eight(p: &BigInt) -> Result<(), ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotOddPrime(p.clone()));
    }
    if p.mod_floor(&BigInt::from(8)) != BigInt::one() {
        return Err(ArithError::NotOneModEight(p.clone()));
    }
    Ok(())
}

/// Quartic symbol (2/p)_4 = 2^((p-1)/4) mod p, for p ≡ 1 (mod 8).
pub fn quartic_2_under_p(p: &BigInt) -> Result<SymbolValue, ArithError> {
    check_one_mod_eight(p)?;
    let e = (p - 1u32) >> 2;
    let v = BigInt::from(2).modpow(&e, p);
    Ok(if v.is_one() {
        SymbolValue::One
    } else {
        debug_assert_eq!(v, p - 1u32);
        SymbolValue::MinusOne
    })
}

/// Quartic symbol (p/2)_4 := (-1)^((p-1)/8), for p ≡ 1 (mod 8).
pub fn quartic_p_under_2(p: &BigInt) -> Result<SymbolValue, ArithError> {
    check_one_mod_eight(p)?;
    let e: BigInt = (p - 1u32) >> 3;
    Ok(if e.is_even() {
        SymbolValue::One
    } else {
        SymbolValue::MinusOne
    })
}

/// Largest power of two dividing a positive integer.
pub fn two_part(n: u64) -> u64 {
    debug_assert!(n > 0);
    1u64 << n.trailing_zeros()
}

/// Exact base-2 logarithm of a power of two.
pub fn log2_exact(n: &BigInt) -> Option<u32> {
    if !n.is_positive() {
        return None;
    }
    let tz = n.trailing_zeros()? as u32;
    if n >> tz == BigInt::one() {
        Some(tz)
    } else {
        None
    }
}

pub fn to_i64(n: &BigInt) -> Option<i64> {
    n.to_i64()
}

/// Primes below `bound` in increasing order (simple sieve).
pub fn primes_below(bound: u64) -> Vec<u64> {
    if bound < 3 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < n {
        if sieve[i] {
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn perfect_squares() {
        assert_eq!(is_perfect_square(&b(0)), Some(b(0)));
        assert_eq!(is_perfect_square(&b(36)), Some(b(6)));
        assert_eq!(is_perfect_square(&b(35)), None);
        assert_eq!(is_perfect_square(&b(-4)), None);
        let big: BigInt = BigInt::from(10u32).pow(60u32) + 7;
        assert_eq!(is_perfect_square(&(&big * &big)), Some(big.clone()));
        assert_eq!(is_perfect_square(&(&big * &big + 1)), None);
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(&b(3), &b(7)).unwrap(), SymbolValue::MinusOne);
        assert_eq!(legendre(&b(5), &b(29)).unwrap(), SymbolValue::One);
        assert_eq!(legendre(&b(41), &b(13)).unwrap(), SymbolValue::MinusOne);
        assert_eq!(legendre(&b(26), &b(13)).unwrap(), SymbolValue::Zero);
        assert!(legendre(&b(3), &b(8)).is_err());
        assert!(legendre(&b(3), &b(15)).is_err());
    }

    #[test]
    fn legendre_agrees_with_square_table() {
        for p in primes_below(200).into_iter().skip(1) {
            let squares: Vec<u64> = (1..p).map(|x| x * x % p).collect();
            for a in 1..p {
                let expect = if squares.contains(&a) { 1 } else { -1 };
                assert_eq!(legendre_u64(a as i64, p).unwrap().as_i8(), expect);
            }
        }
    }

    #[test]
    fn quartic_symbols() {
        let q2 = |p: i64| quartic_2_under_p(&b(p)).unwrap().as_i8();
        let qp = |p: i64| quartic_p_under_2(&b(p)).unwrap().as_i8();
        assert_eq!(q2(17), -1);
        assert_eq!(q2(41), -1);
        assert_eq!(q2(73), 1);
        assert_eq!(qp(17), 1);
        assert_eq!(qp(41), -1);
        assert_eq!(qp(89), -1);
        assert!(quartic_2_under_p(&b(13)).is_err());
        assert!(quartic_p_under_2(&b(5)).is_err());
    }

    #[test]
    fn quartic_2_matches_fourth_power_search() {
        // 2 is a fourth power mod p iff x^4 ≡ 2 has a solution.
        for p in primes_below(3000).into_iter().filter(|p| p % 8 == 1) {
            let fourth = (1..p).any(|x| {
                let x2 = x * x % p;
                x2 * x2 % p == 2
            });
            assert_eq!(quartic_2_under_p(&b(p as i64)).unwrap() == SymbolValue::One, fourth, "p={p}");
        }
    }

    #[test]
    fn primality() {
        let sieve = primes_below(5000);
        for n in 0..5000u64 {
            assert_eq!(is_prime_u64(n), sieve.binary_search(&n).is_ok(), "n={n}");
        }
        // Strong pseudoprimes to several small bases.
        for c in [3215031751u64, 2152302898747, 3474749660383, 341550071728321] {
            assert!(!is_prime_u64(c));
        }
        assert!(is_prime_u64(1_000_000_007));
        assert!(is_prime(&(BigInt::from(2).pow(61) - 1)));
    }

    #[test]
    fn squarefree() {
        assert!(is_squarefree(1));
        assert!(is_squarefree(2 * 41 * 29));
        assert!(!is_squarefree(12));
        assert!(!is_squarefree(49));
        assert!(!is_squarefree(0));
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(two_part(24), 8);
        assert_eq!(log2_exact(&b(32)), Some(5));
        assert_eq!(log2_exact(&b(1)), Some(0));
        assert_eq!(log2_exact(&b(12)), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn squarefree_matches_square_divisors(n in 1u64..200_000) {
                let has_square = (2..).take_while(|k| k * k <= n).any(|k| n % (k * k) == 0);
                prop_assert_eq!(is_squarefree(n), !has_square);
            }

            #[test]
            fn legendre_is_multiplicative(a in 1i64..10_000, c in 1i64..10_000, i in 1usize..300) {
                let p = primes_below(2000)[i];
                let la = legendre_u64(a, p).unwrap().as_i8();
                let lc = legendre_u64(c, p).unwrap().as_i8();
                prop_assert_eq!(legendre_u64(a * c, p).unwrap().as_i8(), la * lc);
            }

            #[test]
            fn isqrt_brackets(n in 0u64..u64::MAX) {
                let r = isqrt(&BigInt::from(n));
                prop_assert!(&r * &r <= BigInt::from(n));
                prop_assert!((&r + 1) * (&r + 1) > BigInt::from(n));
            }
        }
    }
}
