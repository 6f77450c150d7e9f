//! Fundamental systems of units of the seven biquadratic subfields.
//!
//! Each field is handled twice: once by the closed-form rule for it (norm
//! signs, shift squares, one square test) and once by testing all seven
//! products of its three quadratic units for squareness. The two must give
//! the same group.

use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use super::conditions::{shift_square, sqrt_2p1p2_form, TwoSquareForm};
use super::word::{NamedWord, PairContext, UnitWord, E2, P1, P2, Q, R, T1, T2};
use super::TheoremError;
use crate::mfield::SubfieldId;
use num_bigint::BigInt;
use num_rational::BigRational;

/// Base-unit slots of k1..k7, in the order used by the rules.
pub fn subfield_slots(k: u8) -> [usize; 3] {
    match k {
        1 => [E2, P1, T1],
        2 => [E2, P2, T2],
        3 => [E2, Q, R],
        4 => [P1, P2, Q],
        5 => [P2, T1, R],
        6 => [P1, T2, R],
        7 => [T1, T2, Q],
        _ => panic!("subfield k{k} out of range"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BiquadFsu {
    pub subfield: String,
    pub units: Vec<NamedWord>,
    /// How the closed-form system was decided.
    pub rule: String,
    /// Products of the three quadratic units that are squares in the field.
    pub square_products: Vec<NamedWord>,
    /// Index of the quadratic units in the full unit group.
    pub q: u32,
}

fn word(slots: &[usize]) -> UnitWord {
    UnitWord::product(slots)
}

fn root(slots: &[usize]) -> UnitWord {
    UnitWord::product(slots).sqrt()
}

/// The closed-form system, when a rule covers the field.
fn rule_fsu(pc: &PairContext, k: u8) -> Result<Option<(Vec<UnitWord>, String)>, TheoremError> {
    let n = |s: usize| pc.norm(s);
    let sq_in = |slots: &[usize]| -> Result<bool, TheoremError> {
        let x = pc.realize_required(&word(slots))?;
        Ok(x.is_square_in_subfield(SubfieldId::Biquad(k))?.is_some())
    };
    let x_shift = |m: u64| -> bool {
        let u = &pc.units[R];
        shift_square(&BigRational::new(u.a.clone(), BigInt::from(u.denom)), m)
    };
    let out = match k {
        1 | 2 => {
            let (p, t) = if k == 1 { (P1, T1) } else { (P2, T2) };
            if n(t) == -1 {
                (vec![word(&[E2]), word(&[p]), root(&[E2, p, t])], format!("N(ε_2p{k}) = -1"))
            } else {
                (vec![word(&[E2]), word(&[p]), root(&[t])], format!("N(ε_2p{k}) = +1"))
            }
        }
        3 => match (n(Q), n(R)) {
            (-1, -1) => {
                if sq_in(&[E2, Q, R])? {
                    (vec![word(&[E2]), word(&[Q]), root(&[E2, Q, R])], "n3 = n4 = -1, square".into())
                } else {
                    (vec![word(&[E2]), word(&[Q]), word(&[R])], "n3 = n4 = -1, not square".into())
                }
            }
            (1, -1) => (vec![word(&[E2]), word(&[Q]), word(&[R])], "n3 = 1, n4 = -1".into()),
            (-1, 1) => {
                if x_shift(1) {
                    (vec![word(&[E2]), word(&[Q]), root(&[R])], "n3 = -1, n4 = 1, x±1 square".into())
                } else {
                    (vec![word(&[E2]), word(&[Q]), word(&[R])], "n3 = -1, n4 = 1, x±1 not square".into())
                }
            }
            _ => {
                if x_shift(1) {
                    (vec![word(&[E2]), word(&[Q]), root(&[R])], "n3 = n4 = 1, x±1 square".into())
                } else {
                    (vec![word(&[E2]), word(&[Q]), root(&[Q, R])], "n3 = n4 = 1, x±1 not square".into())
                }
            }
        },
        5 | 6 => {
            // k6 = Q(√p1, √2p2); k5 is the same with the primes exchanged.
            let (p, t, m) = if k == 6 { (P1, T2, 2 * pc.p1) } else { (P2, T1, 2 * pc.p2) };
            match (n(t), n(R)) {
                (-1, -1) => {
                    if sq_in(&[p, t, R])? {
                        (vec![word(&[p]), word(&[t]), root(&[p, t, R])], "both norms -1, square".into())
                    } else {
                        (vec![word(&[p]), word(&[t]), word(&[R])], "both norms -1, not square".into())
                    }
                }
                (1, -1) => (vec![word(&[p]), word(&[t]), word(&[R])], "N(ε_2p) = 1, n4 = -1".into()),
                (-1, 1) => {
                    if x_shift(m) {
                        (vec![word(&[p]), word(&[t]), root(&[R])], format!("{m}(x±1) square"))
                    } else {
                        (vec![word(&[p]), word(&[t]), word(&[R])], format!("{m}(x±1) not square"))
                    }
                }
                _ => {
                    if x_shift(m) {
                        (vec![word(&[p]), word(&[t]), root(&[R])], format!("{m}(x±1) square"))
                    } else {
                        (vec![word(&[p]), word(&[t]), root(&[t, R])], format!("{m}(x±1) not square"))
                    }
                }
            }
        }
        4 if n(P1) == -1 && n(P2) == -1 && n(Q) == -1 => {
            (vec![word(&[P1]), word(&[P2]), root(&[P1, P2, Q])], "all three norms -1".into())
        }
        _ => return Ok(None),
    };
    Ok(Some(out))
}

/// Subsets (as bit masks over the three slots) whose product is a square
/// in the subfield, with the realized roots checked.
fn square_subsets(pc: &PairContext, k: u8) -> Result<Vec<u8>, TheoremError> {
    let slots = subfield_slots(k);
    let mut out = Vec::new();
    for mask in 1u8..8 {
        let chosen: Vec<usize> = (0..3).filter(|b| mask >> b & 1 == 1).map(|b| slots[b]).collect();
        let x = pc.realize_required(&word(&chosen))?;
        if x.is_square_in_subfield(SubfieldId::Biquad(k))?.is_some() {
            out.push(mask);
        }
    }
    Ok(out)
}

/// System derived from the square subsets alone.
fn generic_fsu(k: u8, squares: &[u8]) -> Vec<UnitWord> {
    let slots = subfield_slots(k);
    let mut gens: Vec<UnitWord> = slots.iter().map(|&s| UnitWord::unit(s)).collect();
    // Gaussian elimination over F2 on the square subsets; each independent
    // subset replaces its highest slot by the square root of the product.
    let mut basis: Vec<u8> = Vec::new();
    for &m in squares {
        let mut v = m;
        for &b in &basis {
            if v ^ b < v {
                v ^= b;
            }
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    for v in basis {
        let chosen: Vec<usize> = (0..3).filter(|b| v >> b & 1 == 1).map(|b| slots[b]).collect();
        let top = (0..3).rev().find(|b| v >> b & 1 == 1).unwrap();
        gens[top] = root(&chosen);
    }
    gens
}

/// Whether two sets of three words generate the same group (exponents
/// restricted to the subfield's slots).
fn same_group(k: u8, a: &[UnitWord], b: &[UnitWord]) -> bool {
    let slots = subfield_slots(k);
    let mat = |ws: &[UnitWord]| -> Vec<Vec<Rational64>> { ws.iter().map(|w| slots.iter().map(|&s| w.exps[s]).collect()).collect() };
    let (ma, mb) = (mat(a), mat(b));
    contains3(&ma, &mb) && contains3(&mb, &ma)
}

/// Every row of `b` is an integer combination of the rows of `a`.
fn contains3(a: &[Vec<Rational64>], b: &[Vec<Rational64>]) -> bool {
    let inv = match inverse3(a) {
        Some(m) => m,
        None => return false,
    };
    b.iter().all(|row| {
        (0..3).all(|j| {
            let c: Rational64 = (0..3).map(|i| row[i] * inv[i][j]).sum();
            c.is_integer()
        })
    })
}

fn inverse3(m: &[Vec<Rational64>]) -> Option<Vec<Vec<Rational64>>> {
    let mut a: Vec<Vec<Rational64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..3).map(|j| Rational64::from_integer((i == j) as i64)));
            row
        })
        .collect();
    for col in 0..3 {
        let piv = (col..3).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        let p = a[col][col];
        for c in 0..6 {
            a[col][c] /= p;
        }
        for r in 0..3 {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for c in 0..6 {
                    let v = a[col][c];
                    a[r][c] -= f * v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[3..].to_vec()).collect())
}

/// Fundamental system of units of the biquadratic subfield k_k.
pub fn biquad_fsu(pc: &PairContext, k: u8) -> Result<BiquadFsu, TheoremError> {
    let squares = square_subsets(pc, k)?;
    let generic = generic_fsu(k, &squares);
    let (units, rule) = match rule_fsu(pc, k)? {
        Some((ws, rule)) => {
            if !same_group(k, &ws, &generic) {
                return Err(TheoremError::Inconsistency(format!(
                    "closed form for k{k} ({rule}) disagrees with the square search for ({},{})",
                    pc.p1, pc.p2
                )));
            }
            (ws, rule)
        }
        None => (generic, "square search".to_string()),
    };
    for w in &units {
        pc.realize_required(w)?;
    }
    let slots = subfield_slots(k);
    let square_products = squares
        .iter()
        .map(|&m| {
            let chosen: Vec<usize> = (0..3).filter(|b| m >> b & 1 == 1).map(|b| slots[b]).collect();
            pc.named(&word(&chosen))
        })
        .collect();
    let q = 1u32 << (units.iter().filter(|w| !w.is_integral()).count());
    // The root forms of ε_2p1p2 must sit in the subfield their shape names.
    if pc.norm(R) == 1 && [3u8, 5, 6].contains(&k) {
        let form = sqrt_2p1p2_form(pc)?.form;
        let here = match k {
            3 => TwoSquareForm::F1,
            5 => TwoSquareForm::F2,
            _ => TwoSquareForm::F3,
        };
        let root_r_here = squares.contains(&0b100);
        if (form == here) != root_r_here {
            return Err(TheoremError::Inconsistency(format!("√ε_2p1p2 placement in k{k} contradicts its shape")));
        }
    }
    Ok(BiquadFsu {
        subfield: format!("k{k}"),
        units: units.iter().map(|w| pc.named(w)).collect(),
        rule,
        square_products,
        q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn displays(f: &BiquadFsu) -> Vec<String> {
        f.units.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn k1_examples() {
        let pc = PairContext::new(41, 13).unwrap();
        let f = biquad_fsu(&pc, 1).unwrap();
        assert_eq!(displays(&f)[2], "ε2^(1/2)·ε41^(1/2)·ε82^(1/2)");
        let pc = PairContext::new(17, 13).unwrap();
        let f = biquad_fsu(&pc, 1).unwrap();
        assert_eq!(displays(&f), vec!["ε2", "ε17", "ε34^(1/2)"]);
    }

    #[test]
    fn k4_has_index_two_when_norms_are_negative() {
        for (p1, p2) in [(41u64, 13u64), (5, 13), (41, 29)] {
            let pc = PairContext::new(p1, p2).unwrap();
            if pc.norm(Q) != -1 {
                continue;
            }
            let f = biquad_fsu(&pc, 4).unwrap();
            assert_eq!(f.q, 2);
            assert_eq!(f.units[2].word, root(&[P1, P2, Q]));
        }
    }

    #[test]
    fn every_subfield_agrees_with_search() {
        for (p1, p2) in [(89u64, 73u64), (41, 13), (97, 17), (41, 73), (5, 13), (13, 29), (17, 5)] {
            let pc = PairContext::new(p1, p2).unwrap();
            for k in 1..=7 {
                let f = biquad_fsu(&pc, k).unwrap();
                assert!(f.q <= 4, "k{k} for ({p1},{p2})");
            }
        }
    }
}
