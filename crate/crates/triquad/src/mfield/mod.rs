//! Exact arithmetic in K = Q(√2, √p1, √p2).
//!
//! Elements are stored as eight integer numerators over one common positive
//! denominator, in the fixed basis
//! `1, √2, √p1, √p2, √2p1, √2p2, √p1p2, √2p1p2`.
//! Each basis vector is identified with a 3-bit mask over the primes
//! `(2, p1, p2)`; the product of two basis vectors is the vector of the
//! xor of their masks times the primes in the intersection.

mod square;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::interval::Interval;
use crate::quadratic::QuadUnit;

pub use square::MAX_SQUARE_PRECISION;

/// Basis masks in storage order (bit 0: √2, bit 1: √p1, bit 2: √p2).
pub const MASKS: [u8; 8] = [0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111];

pub fn index_of_mask(m: u8) -> usize {
    MASKS.iter().position(|&x| x == m).expect("mask in range")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("elements belong to different fields")]
    CtxMismatch,
    #[error("zero has no square root test or inverse")]
    ZeroInput,
    #[error("element has coefficients outside the subfield {0}")]
    OutsideSubfield(String),
    #[error("{0} is not a radicand of the field")]
    NotRadicand(u64),
    #[error("square detection did not settle by {0} bits")]
    PrecisionExhausted(u32),
    #[error("invalid field: {0}")]
    BadField(String),
}

/// The field K for a fixed pair of primes.
#[derive(Debug)]
pub struct FieldCtx {
    p1: u64,
    p2: u64,
    radicands: [u64; 8],
    table: [[(usize, BigInt); 8]; 8],
}

impl PartialEq for FieldCtx {
    fn eq(&self, o: &Self) -> bool {
        self.p1 == o.p1 && self.p2 == o.p2
    }
}

impl FieldCtx {
    pub fn new(p1: u64, p2: u64) -> Result<Arc<FieldCtx>, FieldError> {
        let primes = [2u64, p1, p2];
        if p1 == p2 || p1 < 3 || p2 < 3 || !crate::arith::is_prime_u64(p1) || !crate::arith::is_prime_u64(p2) {
            return Err(FieldError::BadField(format!("({p1},{p2}) are not distinct odd primes")));
        }
        let value = |m: u8| -> u64 { (0..3).filter(|b| m >> b & 1 == 1).map(|b| primes[b]).product() };
        let radicands: [u64; 8] = std::array::from_fn(|i| value(MASKS[i]));
        let table = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let (a, b) = (MASKS[i], MASKS[j]);
                (index_of_mask(a ^ b), BigInt::from(value(a & b)))
            })
        });
        Ok(Arc::new(FieldCtx { p1, p2, radicands, table }))
    }

    pub fn p1(&self) -> u64 {
        self.p1
    }

    pub fn p2(&self) -> u64 {
        self.p2
    }

    pub fn radicands(&self) -> &[u64; 8] {
        &self.radicands
    }

    /// Storage slot of √d.
    pub fn slot_of(&self, d: u64) -> Option<usize> {
        self.radicands.iter().position(|&r| r == d)
    }
}

/// An automorphism of K, stored as the set of primes whose roots it negates
/// (bit 0: √2, bit 1: √p1, bit 2: √p2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaloisElement(pub u8);

impl GaloisElement {
    pub const ID: GaloisElement = GaloisElement(0);
    pub const TAU1: GaloisElement = GaloisElement(0b001);
    pub const TAU2: GaloisElement = GaloisElement(0b010);
    pub const TAU3: GaloisElement = GaloisElement(0b100);

    pub fn all() -> impl Iterator<Item = GaloisElement> {
        (0u8..8).map(GaloisElement)
    }

    pub fn compose(self, o: GaloisElement) -> GaloisElement {
        GaloisElement(self.0 ^ o.0)
    }

    /// Sign of the image of basis vector `mask`.
    pub fn sign_on(self, mask: u8) -> i32 {
        if (self.0 & mask).count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Sign triple (s2, sp1, sp2).
    pub fn signs(self) -> (i8, i8, i8) {
        let s = |b: u8| if self.0 >> b & 1 == 1 { -1 } else { 1 };
        (s(0), s(1), s(2))
    }
}

impl fmt::Display for GaloisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "id");
        }
        let names: Vec<String> = (0..3).filter(|b| self.0 >> b & 1 == 1).map(|b| format!("τ{}", b + 1)).collect();
        write!(f, "{}", names.join(""))
    }
}

/// A proper subfield: one of the seven biquadratic fields k1..k7 or one of
/// the seven quadratic fields Q(√r) (identified by the mask of r).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubfieldId {
    Biquad(u8),
    Quadratic(u8),
}

impl SubfieldId {
    /// Nontrivial element generating the fixing group of a biquadratic field.
    pub fn biquad_generator(k: u8) -> GaloisElement {
        match k {
            1 => GaloisElement(0b100),
            2 => GaloisElement(0b010),
            3 => GaloisElement(0b110),
            4 => GaloisElement(0b001),
            5 => GaloisElement(0b011),
            6 => GaloisElement(0b101),
            7 => GaloisElement(0b111),
            _ => panic!("biquadratic subfield index {k} out of range"),
        }
    }

    pub fn fixing_group(&self) -> Vec<GaloisElement> {
        match *self {
            SubfieldId::Biquad(k) => vec![GaloisElement::ID, Self::biquad_generator(k)],
            SubfieldId::Quadratic(m) => GaloisElement::all().filter(|g| g.sign_on(m) == 1).collect(),
        }
    }

    /// Storage slots spanning the subfield: exactly the basis vectors fixed
    /// by the fixing group.
    pub fn basis_slots(&self) -> Vec<usize> {
        let group = self.fixing_group();
        (0..8).filter(|&i| group.iter().all(|g| g.sign_on(MASKS[i]) == 1)).collect()
    }

    pub fn name(&self, ctx: &FieldCtx) -> String {
        match *self {
            SubfieldId::Biquad(k) => format!("k{k}"),
            SubfieldId::Quadratic(m) => format!("Q(√{})", ctx.radicands[index_of_mask(m)]),
        }
    }

    pub fn quadratic_of(ctx: &FieldCtx, d: u64) -> Option<SubfieldId> {
        let slot = ctx.slot_of(d)?;
        (slot != 0).then_some(SubfieldId::Quadratic(MASKS[slot]))
    }
}

/// An element of K.
#[derive(Clone)]
pub struct MQElement {
    ctx: Arc<FieldCtx>,
    num: [BigInt; 8],
    den: BigInt,
}

impl PartialEq for MQElement {
    fn eq(&self, o: &Self) -> bool {
        *self.ctx == *o.ctx && self.den == o.den && self.num == o.num
    }
}

impl fmt::Debug for MQElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in 0..8 {
            if self.num[i].is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let c = self.coeff(i);
            if i == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})√{}", self.ctx.radicands[i])?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl MQElement {
    fn normalized(ctx: Arc<FieldCtx>, mut num: [BigInt; 8], mut den: BigInt) -> MQElement {
        assert!(!den.is_zero());
        if den.is_negative() {
            den = -den;
            for n in num.iter_mut() {
                *n = -&*n;
            }
        }
        let mut g = den.clone();
        for n in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(n);
        }
        if !g.is_one() {
            for n in num.iter_mut() {
                *n = &*n / &g;
            }
            den /= &g;
        }
        MQElement { ctx, num, den }
    }

    pub fn from_parts(ctx: &Arc<FieldCtx>, num: [BigInt; 8], den: BigInt) -> MQElement {
        Self::normalized(ctx.clone(), num, den)
    }

    pub fn from_rationals(ctx: &Arc<FieldCtx>, c: &[BigRational; 8]) -> MQElement {
        let den = c.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let num = std::array::from_fn(|i| c[i].numer() * (&den / c[i].denom()));
        Self::normalized(ctx.clone(), num, den)
    }

    pub fn zero(ctx: &Arc<FieldCtx>) -> MQElement {
        MQElement { ctx: ctx.clone(), num: Default::default(), den: BigInt::one() }
    }

    pub fn from_int(ctx: &Arc<FieldCtx>, n: BigInt) -> MQElement {
        let mut num: [BigInt; 8] = Default::default();
        num[0] = n;
        MQElement { ctx: ctx.clone(), num, den: BigInt::one() }
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> MQElement {
        Self::from_int(ctx, BigInt::one())
    }

    /// The basis vector in storage slot `i`.
    pub fn basis(ctx: &Arc<FieldCtx>, i: usize) -> MQElement {
        let mut num: [BigInt; 8] = Default::default();
        num[i] = BigInt::one();
        MQElement { ctx: ctx.clone(), num, den: BigInt::one() }
    }

    /// `√d` for a radicand d of the field.
    pub fn sqrt_of(ctx: &Arc<FieldCtx>, d: u64) -> Result<MQElement, FieldError> {
        ctx.slot_of(d).map(|i| Self::basis(ctx, i)).ok_or(FieldError::NotRadicand(d))
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn numerators(&self) -> &[BigInt; 8] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        BigRational::new(self.num[i].clone(), self.den.clone())
    }

    pub fn coeffs(&self) -> [BigRational; 8] {
        std::array::from_fn(|i| self.coeff(i))
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(Zero::is_zero)
    }

    /// Slots with a nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..8).filter(|&i| !self.num[i].is_zero()).collect()
    }

    /// Bit size of the largest numerator or the denominator.
    pub fn height_bits(&self) -> u64 {
        self.num.iter().map(|n| n.bits()).max().unwrap_or(0).max(self.den.bits())
    }

    fn same_ctx(&self, o: &MQElement) -> Result<(), FieldError> {
        if Arc::ptr_eq(&self.ctx, &o.ctx) || *self.ctx == *o.ctx {
            Ok(())
        } else {
            Err(FieldError::CtxMismatch)
        }
    }

    pub fn add(&self, o: &MQElement) -> Result<MQElement, FieldError> {
        self.same_ctx(o)?;
        let num = std::array::from_fn(|i| &self.num[i] * &o.den + &o.num[i] * &self.den);
        Ok(Self::normalized(self.ctx.clone(), num, &self.den * &o.den))
    }

    pub fn sub(&self, o: &MQElement) -> Result<MQElement, FieldError> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> MQElement {
        MQElement { ctx: self.ctx.clone(), num: std::array::from_fn(|i| -&self.num[i]), den: self.den.clone() }
    }

    pub fn scale(&self, q: &BigRational) -> MQElement {
        let num = std::array::from_fn(|i| &self.num[i] * q.numer());
        Self::normalized(self.ctx.clone(), num, &self.den * q.denom())
    }

    pub fn mul(&self, o: &MQElement) -> Result<MQElement, FieldError> {
        self.same_ctx(o)?;
        let mut num: [BigInt; 8] = Default::default();
        for i in 0..8 {
            if self.num[i].is_zero() {
                continue;
            }
            for j in 0..8 {
                if o.num[j].is_zero() {
                    continue;
                }
                let (k, f) = &self.ctx.table[i][j];
                let prod = &self.num[i] * &o.num[j];
                if f.is_one() {
                    num[*k] += prod;
                } else {
                    num[*k] += prod * f;
                }
            }
        }
        Ok(Self::normalized(self.ctx.clone(), num, &self.den * &o.den))
    }

    pub fn square(&self) -> MQElement {
        self.mul(self).expect("same field")
    }

    /// Integer power; negative exponents go through the inverse.
    pub fn pow(&self, e: i64) -> Result<MQElement, FieldError> {
        let mut base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = MQElement::one(&self.ctx);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        Ok(acc)
    }

    pub fn apply_galois(&self, g: GaloisElement) -> MQElement {
        let num = std::array::from_fn(|i| {
            if g.sign_on(MASKS[i]) == 1 {
                self.num[i].clone()
            } else {
                -&self.num[i]
            }
        });
        MQElement { ctx: self.ctx.clone(), num, den: self.den.clone() }
    }

    /// `x · g(x)`, an element of the subfield fixed by g.
    pub fn rel_norm(&self, g: GaloisElement) -> MQElement {
        assert!(g != GaloisElement::ID, "relative norm needs a nontrivial automorphism");
        let r = self.mul(&self.apply_galois(g)).expect("same field");
        debug_assert!(
            (0..8).all(|i| g.sign_on(MASKS[i]) == 1 || r.num[i].is_zero()),
            "relative norm left the fixed field"
        );
        r
    }

    /// Conjugate product `τ3(x)·τ2(N1)·τ1(N2)` and the absolute norm.
    fn norm_tower(&self) -> (MQElement, BigRational) {
        let c1 = self.apply_galois(GaloisElement::TAU3);
        let n1 = self.mul(&c1).unwrap();
        let c2 = n1.apply_galois(GaloisElement::TAU2);
        let n2 = n1.mul(&c2).unwrap();
        let c3 = n2.apply_galois(GaloisElement::TAU1);
        let n3 = n2.mul(&c3).unwrap();
        debug_assert!(n3.is_rational());
        let cof = c1.mul(&c2).unwrap().mul(&c3).unwrap();
        (cof, n3.coeff(0))
    }

    /// Absolute norm N_{K/Q}(x).
    pub fn norm(&self) -> BigRational {
        self.norm_tower().1
    }

    pub fn inverse(&self) -> Result<MQElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInput);
        }
        let (cof, n) = self.norm_tower();
        Ok(cof.scale(&n.recip()))
    }

    /// Value under the real embedding that sends each root to its
    /// σ-signed positive real root, enclosed at `prec` fractional bits.
    pub fn embed_real(&self, sigma: GaloisElement, prec: u32) -> Interval {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for i in 0..8 {
            let n = &self.num[i];
            if n.is_zero() {
                continue;
            }
            let neg = n.is_negative() != (sigma.sign_on(MASKS[i]) == -1);
            let r = self.ctx.radicands[i];
            let (l, h) = if r == 1 {
                let v = n.abs() << prec;
                (v.clone(), v)
            } else {
                // |n|√r·2^prec is irrational, so it lies strictly between
                // the integer square root and its successor.
                let s = (n * n * BigInt::from(r) << (2 * prec)).sqrt();
                let s1 = &s + 1u32;
                (s, s1)
            };
            if neg {
                lo -= h;
                hi -= l;
            } else {
                lo += l;
                hi += h;
            }
        }
        let lo = lo.div_floor(&self.den);
        let hi = hi.div_ceil(&self.den);
        Interval::new(lo, hi, prec)
    }

    /// Coefficients as reduced "num/den" strings in basis order.
    pub fn coeff_strings(&self) -> Vec<String> {
        (0..8).map(|i| crate::ser::rational_str(&self.coeff(i))).collect()
    }

    /// `true` when every coefficient outside `slots` is zero.
    pub fn supported_on(&self, slots: &[usize]) -> bool {
        (0..8).all(|i| slots.contains(&i) || self.num[i].is_zero())
    }

    pub fn is_square(&self) -> Result<Option<MQElement>, FieldError> {
        square::is_square(self)
    }

    pub fn is_square_in_subfield(&self, sf: SubfieldId) -> Result<Option<MQElement>, FieldError> {
        square::is_square_in_subfield(self, sf)
    }
}

impl Serialize for MQElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MQElement", 3)?;
        st.serialize_field("p1", &self.ctx.p1)?;
        st.serialize_field("p2", &self.ctx.p2)?;
        st.serialize_field("coeffs", &self.coeff_strings())?;
        st.end()
    }
}

/// The quadratic unit `(a + b√d)/denom` as an element of K.
pub fn embed_quad_unit(u: &QuadUnit, ctx: &Arc<FieldCtx>) -> Result<MQElement, FieldError> {
    let slot = ctx.slot_of(u.d).ok_or(FieldError::NotRadicand(u.d))?;
    let mut num: [BigInt; 8] = Default::default();
    num[0] = u.a.clone();
    num[slot] = u.b.clone();
    Ok(MQElement::from_parts(ctx, num, BigInt::from(u.denom)))
}
