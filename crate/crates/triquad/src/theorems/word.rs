//! Unit words: products of rational powers of the seven quadratic units.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::TheoremError;
use crate::mfield::{embed_quad_unit, FieldCtx, MQElement};
use crate::quadratic::{fundamental_unit, QuadUnit};

/// Slot order of the base units: ε_2, ε_p1, ε_p2, ε_2p1, ε_2p2, ε_p1p2, ε_2p1p2.
pub const E2: usize = 0;
pub const P1: usize = 1;
pub const P2: usize = 2;
pub const T1: usize = 3;
pub const T2: usize = 4;
pub const Q: usize = 5;
pub const R: usize = 6;

pub type Exponents = [Rational64; 7];

/// Radicands of the base units in slot order.
pub fn base_radicands(p1: u64, p2: u64) -> [u64; 7] {
    [2, p1, p2, 2 * p1, 2 * p2, p1 * p2, 2 * p1 * p2]
}

/// `sign · Π ε_d^{e_d}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnitWord {
    pub sign: i8,
    pub exps: Exponents,
}

impl UnitWord {
    pub fn one() -> UnitWord {
        UnitWord { sign: 1, exps: [Rational64::zero(); 7] }
    }

    pub fn unit(slot: usize) -> UnitWord {
        let mut w = Self::one();
        w.exps[slot] = Rational64::one();
        w
    }

    pub fn product(slots: &[usize]) -> UnitWord {
        slots.iter().fold(Self::one(), |acc, &s| acc.mul(&Self::unit(s)))
    }

    pub fn mul(&self, o: &UnitWord) -> UnitWord {
        UnitWord { sign: self.sign * o.sign, exps: std::array::from_fn(|i| self.exps[i] + o.exps[i]) }
    }

    pub fn pow(&self, k: i64) -> UnitWord {
        let s = if k % 2 == 0 { 1 } else { self.sign };
        UnitWord { sign: s, exps: self.exps.map(|e| e * Rational64::from_integer(k)) }
    }

    pub fn sqrt(&self) -> UnitWord {
        assert_eq!(self.sign, 1, "square root of a negative word");
        let half = Rational64::new(1, 2);
        UnitWord { sign: 1, exps: self.exps.map(|e| e * half) }
    }

    pub fn is_integral(&self) -> bool {
        self.exps.iter().all(|e| e.is_integer())
    }

    /// Nesting depth of square roots (0 for integer exponents).
    pub fn depth(&self) -> u32 {
        let l = self.exps.iter().fold(1i64, |acc, e| acc.lcm(e.denom()));
        l.trailing_zeros()
    }

    pub fn render(&self, radicands: &[u64; 7]) -> String {
        let mut parts = Vec::new();
        for (i, e) in self.exps.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            if e.is_one() {
                parts.push(format!("ε{}", radicands[i]));
            } else if e.is_integer() {
                parts.push(format!("ε{}^{}", radicands[i], e));
            } else {
                parts.push(format!("ε{}^({})", radicands[i], e));
            }
        }
        let body = if parts.is_empty() { "1".to_string() } else { parts.join("·") };
        if self.sign < 0 {
            format!("-{body}")
        } else {
            body
        }
    }
}

/// A word bound to the radicands it refers to, for reports.
#[derive(Debug, Clone)]
pub struct NamedWord {
    pub word: UnitWord,
    pub radicands: [u64; 7],
}

impl fmt::Display for NamedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.word.render(&self.radicands))
    }
}

impl Serialize for NamedWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut exps = serde_json::Map::new();
        for (i, e) in self.word.exps.iter().enumerate() {
            if !e.is_zero() {
                exps.insert(self.radicands[i].to_string(), crate::ser::small_rational_str(e).into());
            }
        }
        let mut st = s.serialize_struct("UnitWord", 3)?;
        st.serialize_field("sign", &self.word.sign)?;
        st.serialize_field("exponents", &exps)?;
        st.serialize_field("display", &self.to_string())?;
        st.end()
    }
}

/// Everything computed once per (ordered) pair: the field, the seven
/// quadratic units and a cache of realized words.
pub struct PairContext {
    pub p1: u64,
    pub p2: u64,
    pub ctx: Arc<FieldCtx>,
    pub units: [QuadUnit; 7],
    pub embedded: [MQElement; 7],
    cache: Mutex<HashMap<Exponents, Option<MQElement>>>,
}

impl PairContext {
    pub fn new(p1: u64, p2: u64) -> Result<PairContext, TheoremError> {
        crate::quadratic::check_pair(p1, p2)?;
        let ctx = FieldCtx::new(p1, p2)?;
        let rads = base_radicands(p1, p2);
        let mut units = Vec::with_capacity(7);
        for d in rads {
            units.push(fundamental_unit(d)?);
        }
        let units: [QuadUnit; 7] = units.try_into().expect("seven units");
        let mut embedded = Vec::with_capacity(7);
        for u in &units {
            embedded.push(embed_quad_unit(u, &ctx)?);
        }
        let embedded: [MQElement; 7] = embedded.try_into().expect("seven units");
        Ok(PairContext { p1, p2, ctx, units, embedded, cache: Mutex::new(HashMap::new()) })
    }

    pub fn radicands(&self) -> [u64; 7] {
        base_radicands(self.p1, self.p2)
    }

    pub fn norm(&self, slot: usize) -> i8 {
        self.units[slot].norm
    }

    pub fn named(&self, w: &UnitWord) -> NamedWord {
        NamedWord { word: w.clone(), radicands: self.radicands() }
    }

    /// `ε^{-1} = N(ε)·ε'` for a quadratic unit.
    fn unit_power(&self, slot: usize, k: i64) -> MQElement {
        let e = &self.embedded[slot];
        if k >= 0 {
            return e.pow(k).expect("same field");
        }
        let u = &self.units[slot];
        let mut inv = crate::quadratic::QuadUnit { b: -u.b.clone(), ..u.clone() };
        if u.norm < 0 {
            inv.a = -inv.a;
            inv.b = -inv.b;
        }
        embed_quad_unit(&inv, &self.ctx).expect("radicand of the field").pow(-k).expect("same field")
    }

    /// The element of K a word stands for, or `None` when some square root
    /// along the way does not exist in K. Roots are taken positive under the
    /// identity embedding, which makes realization a homomorphism.
    pub fn realize(&self, w: &UnitWord) -> Result<Option<MQElement>, TheoremError> {
        let base = self.realize_positive(&w.exps)?;
        Ok(base.map(|x| if w.sign < 0 { x.neg() } else { x }))
    }

    fn realize_positive(&self, e: &Exponents) -> Result<Option<MQElement>, TheoremError> {
        if let Some(hit) = self.cache.lock().unwrap().get(e) {
            return Ok(hit.clone());
        }
        let mut acc = MQElement::one(&self.ctx);
        let mut frac2 = [Rational64::zero(); 7];
        let mut has_frac = false;
        for i in 0..7 {
            let fl = e[i].floor();
            if !fl.is_zero() {
                acc = acc.mul(&self.unit_power(i, fl.to_integer()))?;
            }
            let fr = e[i] - fl;
            if !fr.is_zero() {
                has_frac = true;
                frac2[i] = fr * Rational64::from_integer(2);
            }
        }
        let out = if has_frac {
            match self.realize_positive(&frac2)? {
                None => None,
                Some(inner) => inner.is_square()?.map(|r| acc.mul(&r).expect("same field")),
            }
        } else {
            Some(acc)
        };
        self.cache.lock().unwrap().insert(*e, out.clone());
        Ok(out)
    }

    /// Realize a word that the caller asserts exists in K.
    pub fn realize_required(&self, w: &UnitWord) -> Result<MQElement, TheoremError> {
        self.realize(w)?.ok_or_else(|| {
            TheoremError::Inconsistency(format!(
                "{} is not in K for ({},{})",
                w.render(&self.radicands()),
                self.p1,
                self.p2
            ))
        })
    }
}

/// `|det|` of the 7×7 exponent matrix, exactly.
pub fn exponent_det(words: &[UnitWord]) -> Rational64 {
    assert_eq!(words.len(), 7);
    let mut m: Vec<Vec<Rational64>> = words.iter().map(|w| w.exps.to_vec()).collect();
    let mut det = Rational64::one();
    for col in 0..7 {
        let Some(piv) = (col..7).find(|&r| !m[r][col].is_zero()) else {
            return Rational64::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..7 {
            let f = m[r][col] / m[col][col];
            if f.is_zero() {
                continue;
            }
            for c in col..7 {
                let v = m[col][c];
                m[r][c] -= f * v;
            }
        }
    }
    det.abs()
}

/// Whether every base unit is an integer combination of the words,
/// i.e. the words generate a group containing Π E_{k_i}.
pub fn contains_base(words: &[UnitWord]) -> bool {
    let n = 7;
    // Solve X·W = I for X and check integrality.
    let mut a: Vec<Vec<Rational64>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational64> = (0..n).map(|j| words[j].exps[i]).collect();
            row.extend((0..n).map(|j| if i == j { Rational64::one() } else { Rational64::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return false;
        };
        a.swap(piv, col);
        let p = a[col][col];
        for c in 0..2 * n {
            a[col][c] /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for c in 0..2 * n {
                    let v = a[col][c];
                    a[r][c] -= f * v;
                }
            }
        }
    }
    a.iter().all(|row| row[n..].iter().all(|x| x.is_integer()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mfield::GaloisElement;

    #[test]
    fn word_algebra() {
        let a1 = UnitWord::product(&[E2, P1, T1]).sqrt();
        assert_eq!(a1.depth(), 1);
        assert_eq!(a1.mul(&a1), UnitWord::product(&[E2, P1, T1]));
        assert_eq!(a1.render(&base_radicands(41, 13)), "ε2^(1/2)·ε41^(1/2)·ε82^(1/2)");
        let n = UnitWord::product(&[E2]).mul(&a1).sqrt();
        assert_eq!(n.depth(), 2);
    }

    #[test]
    fn realize_roots() {
        let pc = PairContext::new(41, 13).unwrap();
        let a1 = UnitWord::product(&[E2, P1, T1]).sqrt();
        let r = pc.realize(&a1).unwrap().unwrap();
        assert_eq!(r.square(), pc.realize(&UnitWord::product(&[E2, P1, T1])).unwrap().unwrap());
        assert!(pc.realize(&UnitWord::unit(E2).sqrt()).unwrap().is_none());
        let inv = pc.realize(&UnitWord::unit(R).pow(-1)).unwrap().unwrap();
        assert_eq!(inv.mul(&pc.embedded[R]).unwrap(), MQElement::one(&pc.ctx));
        assert!(r.embed_real(GaloisElement::ID, 64).is_positive());
    }

    #[test]
    fn determinants() {
        let mut ws: Vec<UnitWord> = (0..7).map(UnitWord::unit).collect();
        assert_eq!(exponent_det(&ws), Rational64::one());
        ws[3] = UnitWord::product(&[E2, P1, T1]).sqrt();
        assert_eq!(exponent_det(&ws), Rational64::new(1, 2));
        assert!(contains_base(&ws));
        ws[4] = UnitWord::product(&[E2, P1, T1]);
        assert_eq!(exponent_det(&ws), Rational64::zero());
        assert!(!contains_base(&ws));
    }
}
