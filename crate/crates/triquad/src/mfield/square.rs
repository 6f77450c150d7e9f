//! Square detection in K.
//!
//! For x = N/L (integer numerators N, denominator L) the element x·L² is an
//! algebraic integer, so any square root of it is one as well. If
//! `y = Σ c_r √r` is an algebraic integer then `8 c_r √r = Σ_σ χ_r(σ) σ(y)`
//! is one too, and since r is squarefree `8 c_r` is a rational integer.
//! Every candidate root is therefore pinned down by its eight real
//! embeddings up to the choice of sign at each one; the coefficients are
//! read off with bounded-denominator rounding and checked by exact squaring.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{FieldError, GaloisElement, MQElement, SubfieldId, MASKS};
use crate::arith::interval::Interval;

/// Starting precision (fractional bits) for the embeddings.
const START_PRECISION: u32 = 256;

/// Precision ceiling before giving up.
pub const MAX_SQUARE_PRECISION: u32 = 1 << 20;

/// Enclosures of |n_i|·√r_i for every slot, at `prec` fractional bits.
fn term_magnitudes(num: &[BigInt; 8], radicands: &[u64; 8], prec: u32) -> Vec<(BigInt, BigInt)> {
    (0..8)
        .map(|i| {
            let n = &num[i];
            if n.is_zero() {
                (BigInt::zero(), BigInt::zero())
            } else if radicands[i] == 1 {
                let v = n.abs() << prec;
                (v.clone(), v)
            } else {
                let s = (n * n * BigInt::from(radicands[i]) << (2 * prec)).sqrt();
                let s1 = &s + 1u32;
                (s, s1)
            }
        })
        .collect()
}

fn embed_from_terms(num: &[BigInt; 8], terms: &[(BigInt, BigInt)], sigma: GaloisElement, prec: u32) -> Interval {
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for i in 0..8 {
        if num[i].is_zero() {
            continue;
        }
        let (l, h) = &terms[i];
        if num[i].is_negative() != (sigma.sign_on(MASKS[i]) == -1) {
            lo -= h;
            hi -= l;
        } else {
            lo += l;
            hi += h;
        }
    }
    Interval::new(lo, hi, prec)
}

enum Attempt {
    Root(MQElement),
    Absent,
    Retry,
}

fn attempt(x: &MQElement, integral: &[BigInt; 8], prec: u32) -> Attempt {
    let ctx = x.ctx();
    let radicands = ctx.radicands();
    let terms = term_magnitudes(integral, radicands, prec);
    let mut roots = Vec::with_capacity(8);
    for sigma in GaloisElement::all() {
        let e = embed_from_terms(integral, &terms, sigma, prec);
        if e.is_negative() {
            return Attempt::Absent;
        }
        if e.contains_zero() {
            // A nonzero algebraic integer can have a tiny conjugate; sharpen.
            return Attempt::Retry;
        }
        roots.push(e.sqrt());
    }
    let sqrt_r: Vec<Interval> = radicands.iter().map(|&r| Interval::sqrt_int(&BigInt::from(r), prec)).collect();
    let mut ambiguous = false;
    // Identity root stays positive; the other seven signs range over 2⁷ patterns.
    for pattern in 0u32..128 {
        let sign = |g: usize| if g == 0 || (pattern >> (g - 1)) & 1 == 0 { 1 } else { -1 };
        let mut coeffs: [BigInt; 8] = Default::default();
        let mut ok = true;
        for i in 0..8 {
            let mut acc = Interval::zero(prec);
            for (g, root) in roots.iter().enumerate() {
                let s = sign(g) * GaloisElement(g as u8).sign_on(MASKS[i]);
                acc = if s == 1 { acc.add(root) } else { acc.sub(root) };
            }
            let scaled = if i == 0 { acc } else { acc.div(&sqrt_r[i]).expect("√r > 0") };
            let (a, b) = scaled.integer_range();
            if a > b {
                ok = false;
                break;
            }
            if a != b {
                ambiguous = true;
                ok = false;
                break;
            }
            coeffs[i] = a;
        }
        if !ok {
            continue;
        }
        let y = MQElement::from_parts(ctx, coeffs, BigInt::from(8) * x.denominator());
        if y.square() == *x {
            return Attempt::Root(y);
        }
    }
    if ambiguous {
        Attempt::Retry
    } else {
        Attempt::Absent
    }
}

/// A square root of `x` in K, if one exists. The returned root has
/// positive image under the identity embedding.
pub fn is_square(x: &MQElement) -> Result<Option<MQElement>, FieldError> {
    if x.is_zero() {
        return Err(FieldError::ZeroInput);
    }
    if x.is_rational() {
        if let Some(q) = crate::arith::rational_sqrt(&x.coeff(0)) {
            return Ok(Some(MQElement::one(x.ctx()).scale(&q)));
        }
    }
    let den = x.denominator();
    let integral: [BigInt; 8] = std::array::from_fn(|i| &x.numerators()[i] * den);
    let mut prec = START_PRECISION;
    while prec <= MAX_SQUARE_PRECISION {
        match attempt(x, &integral, prec) {
            Attempt::Root(y) => return Ok(Some(y)),
            Attempt::Absent => return Ok(None),
            Attempt::Retry => prec *= 2,
        }
    }
    Err(FieldError::PrecisionExhausted(MAX_SQUARE_PRECISION))
}

/// A square root of `x` lying in the subfield `sf`, if one exists.
pub fn is_square_in_subfield(x: &MQElement, sf: SubfieldId) -> Result<Option<MQElement>, FieldError> {
    let slots = sf.basis_slots();
    if !x.supported_on(&slots) {
        return Err(FieldError::OutsideSubfield(sf.name(x.ctx())));
    }
    Ok(is_square(x)?.filter(|y| y.supported_on(&slots)))
}
