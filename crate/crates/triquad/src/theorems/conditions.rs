//! Side conditions on unit coordinates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::word::{PairContext, UnitWord, E2, Q, R, T1, T2};
use super::TheoremError;
use crate::arith::{is_perfect_square, rational_sqrt};
use crate::mfield::{MQElement, SubfieldId};
use crate::quadratic::fundamental_unit;

/// `true` when `m(x + 1)` or `m(x − 1)` is the square of a rational.
pub fn shift_square(x: &BigRational, m: u64) -> bool {
    let m = BigRational::from_integer(BigInt::from(m));
    let one = BigRational::one();
    [x + &one, x - &one]
        .iter()
        .any(|s| !s.is_zero() && rational_sqrt(&(s * &m)).is_some())
}

/// Rational first coordinate of a quadratic unit.
fn first_coord(pc: &PairContext, slot: usize) -> BigRational {
    let u = &pc.units[slot];
    BigRational::new(u.a.clone(), BigInt::from(u.denom))
}

/// Parameters of `√ε_2p = (α1 + α2√2p)/√2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SqrtHalfParams {
    pub p: u64,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub alpha1: BigInt,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub alpha2: BigInt,
    pub u: u8,
}

impl SqrtHalfParams {
    /// `√ε_2p` as an element of K: `(α1/2)√2 + α2√p`.
    pub fn root(&self, pc: &PairContext) -> Result<MQElement, TheoremError> {
        let ctx = &pc.ctx;
        let s2 = MQElement::sqrt_of(ctx, 2)?.scale(&BigRational::new(self.alpha1.clone(), BigInt::from(2)));
        let sp = MQElement::sqrt_of(ctx, self.p)?.scale(&BigRational::from_integer(self.alpha2.clone()));
        Ok(s2.add(&sp)?)
    }
}

/// For p ≡ 1 (mod 8) with N(ε_2p) = +1, split ε_2p = β + α√2p as
/// α1² = β ± 1, 2pα2² = β ∓ 1 and read u off (α1² − 2pα2²)/2 = (−1)^u.
pub fn sqrt_half_params(p: u64) -> Result<SqrtHalfParams, TheoremError> {
    if p % 8 != 1 {
        return Err(TheoremError::Precondition(format!("{p} is not 1 mod 8")));
    }
    let u = fundamental_unit(2 * p)?;
    if u.norm != 1 {
        return Err(TheoremError::Precondition(format!("N(ε_{}) = -1", 2 * p)));
    }
    let (beta, alpha) = u.integer_coords().expect("2p ≡ 2 mod 4 has integer coordinates");
    let two_p = BigInt::from(2 * p);
    for s in [1i32, -1] {
        let Some(a1) = is_perfect_square(&(&beta + s)) else { continue };
        let rest = &beta - s;
        if &rest % &two_p != BigInt::zero() {
            continue;
        }
        let Some(a2) = is_perfect_square(&(&rest / &two_p)) else { continue };
        let diff: BigInt = (&a1 * &a1 - &two_p * &a2 * &a2) / 2;
        let uval = if diff == BigInt::one() {
            0
        } else if diff == -BigInt::one() {
            1
        } else {
            return Err(TheoremError::Inconsistency(format!("(α1² − 2pα2²)/2 = {diff} for p = {p}")));
        };
        if &a1 * &a2 != alpha || (&a1 * &a1 + &two_p * &a2 * &a2) != &beta * 2 {
            return Err(TheoremError::Inconsistency(format!("squaring check failed for p = {p}")));
        }
        return Ok(SqrtHalfParams { p, alpha1: a1, alpha2: a2, u: uval });
    }
    Err(TheoremError::Inconsistency(format!("neither β+1 nor β−1 is a square for ε_{}", 2 * p)))
}

/// Shape of `√ε_2p1p2` when N(ε_2p1p2) = +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TwoSquareForm {
    /// `(y1/2)√2 + y2√p1p2`
    F1,
    /// `y1√p2 + (y2/2)√2p1`
    F2,
    /// `y1√p1 + (y2/2)√2p2`
    F3,
}

impl TwoSquareForm {
    /// The biquadratic subfield containing the root.
    pub fn subfield(self) -> SubfieldId {
        match self {
            TwoSquareForm::F1 => SubfieldId::Biquad(3),
            TwoSquareForm::F2 => SubfieldId::Biquad(5),
            TwoSquareForm::F3 => SubfieldId::Biquad(6),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TwoSquare {
    pub form: TwoSquareForm,
    pub y1: BigInt,
    pub y2: BigInt,
    pub root: MQElement,
}

fn exact_quotient_square(n: &BigInt, m: u64) -> Option<BigInt> {
    let m = BigInt::from(m);
    if (n % &m).is_zero() {
        is_perfect_square(&(n / &m))
    } else {
        None
    }
}

/// Determine which of x±1, p1(x±1), 2p1(x±1) is a square, build the
/// corresponding root and check it squares to ε_2p1p2.
pub fn sqrt_2p1p2_form(pc: &PairContext) -> Result<TwoSquare, TheoremError> {
    if pc.norm(R) != 1 {
        return Err(TheoremError::Precondition(format!("N(ε_{}) = -1", 2 * pc.p1 * pc.p2)));
    }
    let (x, _) = pc.units[R].integer_coords().expect("integer coordinates");
    let (p1, p2) = (pc.p1, pc.p2);
    let mut found: Vec<(TwoSquareForm, BigInt, BigInt)> = Vec::new();
    for s in [1i32, -1] {
        let plus = &x + s;
        let minus = &x - s;
        // F1: x+s = y1², x−s = 2p1p2·y2².
        if let (Some(y1), Some(y2)) = (is_perfect_square(&plus), exact_quotient_square(&minus, 2 * p1 * p2)) {
            found.push((TwoSquareForm::F1, y1, y2));
        }
        // F2: x+s = p1·y2², x−s = 2p2·y1².
        if let (Some(y2), Some(y1)) = (exact_quotient_square(&plus, p1), exact_quotient_square(&minus, 2 * p2)) {
            found.push((TwoSquareForm::F2, y1, y2));
        }
        // F3: x+s = 2p1·y1², x−s = p2·y2².
        if let (Some(y1), Some(y2)) = (exact_quotient_square(&plus, 2 * p1), exact_quotient_square(&minus, p2)) {
            found.push((TwoSquareForm::F3, y1, y2));
        }
    }
    let mut forms: Vec<TwoSquareForm> = found.iter().map(|f| f.0).collect();
    forms.dedup();
    if forms.len() != 1 {
        return Err(TheoremError::Inconsistency(format!(
            "root forms of ε_{} fired {} times for ({p1},{p2})",
            2 * p1 * p2,
            forms.len()
        )));
    }
    let (form, y1, y2) = found.swap_remove(0);
    let ctx = &pc.ctx;
    let half = |n: &BigInt| BigRational::new(n.clone(), BigInt::from(2));
    let whole = |n: &BigInt| BigRational::from_integer(n.clone());
    let (a, b) = match form {
        TwoSquareForm::F1 => (MQElement::sqrt_of(ctx, 2)?.scale(&half(&y1)), MQElement::sqrt_of(ctx, p1 * p2)?.scale(&whole(&y2))),
        TwoSquareForm::F2 => (MQElement::sqrt_of(ctx, p2)?.scale(&whole(&y1)), MQElement::sqrt_of(ctx, 2 * p1)?.scale(&half(&y2))),
        TwoSquareForm::F3 => (MQElement::sqrt_of(ctx, p1)?.scale(&whole(&y1)), MQElement::sqrt_of(ctx, 2 * p2)?.scale(&half(&y2))),
    };
    let root = a.add(&b)?;
    if root.square() != pc.embedded[R] {
        return Err(TheoremError::Inconsistency(format!("constructed √ε_{} does not square back", 2 * p1 * p2)));
    }
    Ok(TwoSquare { form, y1, y2, root })
}

/// The named conditions the case analysis branches on.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Conditions {
    /// x±1 is a square, with ε_2p1p2 = x + y√2p1p2 (only when N(ε_2p1p2) = +1).
    #[serde(rename = "x±1 square", skip_serializing_if = "Option::is_none")]
    pub x_shift: Option<bool>,
    #[serde(rename = "p1(x±1) square", skip_serializing_if = "Option::is_none")]
    pub p1_x_shift: Option<bool>,
    #[serde(rename = "2p1(x±1) square", skip_serializing_if = "Option::is_none")]
    pub two_p1_x_shift: Option<bool>,
    #[serde(rename = "2p2(x±1) square", skip_serializing_if = "Option::is_none")]
    pub two_p2_x_shift: Option<bool>,
    /// ε_p1p2 = a' + b'√p1p2 (only when N(ε_p1p2) = +1).
    #[serde(rename = "2p1(a'±1) square", skip_serializing_if = "Option::is_none")]
    pub two_p1_a_shift: Option<bool>,
    #[serde(rename = "2p2(a'±1) square", skip_serializing_if = "Option::is_none")]
    pub two_p2_a_shift: Option<bool>,
    #[serde(rename = "ε2·εp1p2·ε2p1p2 square in k3")]
    pub s_in_k3: bool,
    #[serde(rename = "twosquare form", skip_serializing_if = "Option::is_none")]
    pub two_square: Option<TwoSquareForm>,
    /// The u parameter of √ε_2p1 and √ε_2p2 (called u and v).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<u8>,
}

/// `√(ε_2·ε_p1p2·ε_2p1p2)` as a word.
pub fn s_word() -> UnitWord {
    UnitWord::product(&[E2, Q, R]).sqrt()
}

pub fn evaluate(pc: &PairContext) -> Result<Conditions, TheoremError> {
    let mut c = Conditions::default();
    if pc.norm(R) == 1 {
        let x = first_coord(pc, R);
        c.x_shift = Some(shift_square(&x, 1));
        c.p1_x_shift = Some(shift_square(&x, pc.p1));
        c.two_p1_x_shift = Some(shift_square(&x, 2 * pc.p1));
        c.two_p2_x_shift = Some(shift_square(&x, 2 * pc.p2));
        c.two_square = Some(sqrt_2p1p2_form(pc)?.form);
    }
    if pc.norm(Q) == 1 {
        let a = first_coord(pc, Q);
        c.two_p1_a_shift = Some(shift_square(&a, 2 * pc.p1));
        c.two_p2_a_shift = Some(shift_square(&a, 2 * pc.p2));
    }
    let s = pc.realize(&UnitWord::product(&[E2, Q, R]))?.expect("integral word");
    c.s_in_k3 = s.is_square_in_subfield(SubfieldId::Biquad(3))?.is_some();
    if pc.p1 % 8 == 1 && pc.norm(T1) == 1 {
        c.u = Some(sqrt_half_params(pc.p1)?.u);
    }
    if pc.p2 % 8 == 1 && pc.norm(T2) == 1 {
        c.v = Some(sqrt_half_params(pc.p2)?.u);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_params_seventeen() {
        let h = sqrt_half_params(17).unwrap();
        assert_eq!((h.alpha1.clone(), h.alpha2.clone(), h.u), (BigInt::from(6), BigInt::one(), 0));
        let pc = PairContext::new(17, 13).unwrap();
        assert_eq!(h.root(&pc).unwrap().square(), pc.embedded[T1]);
        assert!(sqrt_half_params(41).is_err());
        assert!(sqrt_half_params(13).is_err());
    }

    #[test]
    fn half_params_by_brute_force() {
        // Oracle: search α1 directly against the unit coordinates.
        for p in [73u64, 89, 97, 113, 137, 233] {
            let u = fundamental_unit(2 * p).unwrap();
            if u.norm != 1 {
                continue;
            }
            let h = sqrt_half_params(p).unwrap();
            let (beta, alpha) = u.integer_coords().unwrap();
            assert_eq!(&h.alpha1 * &h.alpha2, alpha);
            let lhs = &h.alpha1 * &h.alpha1 + BigInt::from(2 * p) * &h.alpha2 * &h.alpha2;
            assert_eq!(lhs, &beta * 2);
        }
    }

    #[test]
    fn shift_squares() {
        assert!(shift_square(&BigRational::from_integer(35.into()), 1));
        assert!(!shift_square(&BigRational::from_integer(35.into()), 2));
        assert!(shift_square(&BigRational::from_integer(35.into()), 34));
        // 3/2: 2(3/2 + 1) = 5, 2(3/2 − 1) = 1.
        assert!(shift_square(&BigRational::new(3.into(), 2.into()), 2));
    }

    #[test]
    fn root_forms_match_square_detection() {
        for (p1, p2) in [(89u64, 73u64), (97, 17), (17, 13), (41, 73), (193, 97)] {
            let pc = PairContext::new(p1, p2).unwrap();
            if pc.norm(R) != 1 {
                continue;
            }
            let t = sqrt_2p1p2_form(&pc).unwrap();
            let generic = pc.embedded[R].is_square().unwrap().unwrap();
            assert!(generic == t.root || generic == t.root.neg());
            assert!(t.root.supported_on(&t.form.subfield().basis_slots()));
        }
    }

    #[test]
    fn conditions_evaluate() {
        let pc = PairContext::new(41, 29).unwrap();
        let c = evaluate(&pc).unwrap();
        assert!(c.s_in_k3);
        assert!(c.x_shift.is_none());
    }
}
