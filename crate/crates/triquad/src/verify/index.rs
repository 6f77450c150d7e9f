//! Independent certification of a claimed fundamental system of units.

use serde::Serialize;

use super::regulator::{regulator_ratio, RegulatorMatrix, MAX_PRECISION, MIN_PRECISION};
use super::VerifyError;
use crate::arith::to_i64;
use crate::mfield::MQElement;
use crate::theorems::{analyze_with, AnalyzeOptions, PairContext, UnitWord};

#[derive(Debug, Clone, Serialize)]
pub struct IndexCheck {
    pub pair: [u64; 2],
    pub case: String,
    #[serde(rename = "qK_claimed")]
    pub claimed: u64,
    #[serde(rename = "qK_regulator")]
    pub regulator: Option<i64>,
    /// Bits of precision at which the ratio was certified.
    pub precision: u32,
    /// Every generator has exact norm ±1.
    pub units_exact: bool,
    /// Every generator with a half exponent squares to its radicand word.
    pub squares_exact: bool,
    /// No product of the generators (up to sign) is a square in K.
    pub saturated: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Exact checks on one word: its realization is a unit, and a word with a
/// half exponent squares to the realization of its double.
pub fn exact_unit_check(pc: &PairContext, w: &UnitWord) -> Result<(bool, bool), VerifyError> {
    let x = pc.realize_required(w)?;
    let n = x.norm();
    let unit = n.is_integer() && (n.to_integer() == 1.into() || n.to_integer() == (-1).into());
    let square = if w.is_integral() {
        true
    } else {
        let double = pc.realize_required(&w.pow(2))?;
        x.square() == double
    };
    Ok((unit, square))
}

/// Whether `±Π g_i^{e_i}` is a non-square in K for every nonzero
/// 0/1 vector `e`. Products whose sign vector is not constant cannot be
/// squares (up to sign) and are skipped without multiplying.
pub fn is_two_saturated(units: &[MQElement], prec: u32) -> Result<bool, VerifyError> {
    Ok(find_square(units, prec)?.is_none())
}

/// A square `±Π g_i^{e_i}`, as the mask and the root, if one exists.
fn find_square(units: &[MQElement], prec: u32) -> Result<Option<(u32, MQElement)>, VerifyError> {
    let mut prec = prec;
    let m = loop {
        if let Some(m) = RegulatorMatrix::new(units, prec)? {
            break m;
        }
        prec *= 2;
        if prec > MAX_PRECISION * 4 {
            return Err(VerifyError::Inconclusive("signs of embeddings unresolved".into()));
        }
    };
    let n = units.len();
    let ctx = units[0].ctx();
    for mask in 1u32..(1 << n) {
        let sv: Vec<i8> = (0..8)
            .map(|s| (0..n).filter(|j| mask >> j & 1 == 1).map(|j| m.signs[s][j]).product())
            .collect();
        if !sv.iter().all(|&s| s == sv[0]) {
            continue;
        }
        let mut prod = MQElement::one(ctx);
        for (j, u) in units.iter().enumerate() {
            if mask >> j & 1 == 1 {
                prod = prod.mul(u)?;
            }
        }
        if sv[0] < 0 {
            prod = prod.neg();
        }
        if let Some(r) = prod.is_square()? {
            return Ok(Some((mask, r)));
        }
    }
    Ok(None)
}

/// Index of the quadratic units in E_K by repeated 2-saturation: while some
/// signed product of the current system is a square, swap one of its
/// factors for the root. Each step doubles the index.
pub fn saturation_index(pc: &PairContext) -> Result<u64, VerifyError> {
    let mut units = pc.embedded.to_vec();
    let mut q = 1u64;
    while let Some((mask, root)) = find_square(&units, MIN_PRECISION)? {
        let j = 31 - mask.leading_zeros() as usize;
        units[j] = root;
        q *= 2;
        if q > 1 << 12 {
            return Err(VerifyError::Inconclusive("saturation does not terminate".into()));
        }
    }
    Ok(q)
}

/// Regulator index of a word system over the quadratic units.
pub fn verify_index(pc: &PairContext, gens: &[UnitWord], max_prec: u32) -> Result<(i64, u32), VerifyError> {
    let claimed: Vec<MQElement> = gens.iter().map(|g| pc.realize_required(g)).collect::<Result<_, _>>()?;
    let (n, prec, _) = regulator_ratio(&pc.embedded, &claimed, max_prec)?;
    let n = to_i64(&n).ok_or_else(|| VerifyError::Inconclusive(format!("index {n} out of range")))?;
    Ok((n, prec))
}

/// Full certification of the dispatched system of one pair.
pub fn check_pair_index(p1: u64, p2: u64, opts: &AnalyzeOptions, max_prec: u32) -> IndexCheck {
    let mut out = IndexCheck {
        pair: [p1, p2],
        case: String::new(),
        claimed: 0,
        regulator: None,
        precision: 0,
        units_exact: false,
        squares_exact: false,
        saturated: false,
        pass: false,
        error: None,
    };
    let run = |out: &mut IndexCheck| -> Result<(), VerifyError> {
        let report = analyze_with(p1, p2, opts)?;
        out.case = report.case.to_string();
        out.claimed = report.q_k;
        let [a, b] = report.canonical_pair;
        let pc = PairContext::new(a, b)?;
        let words: Vec<UnitWord> = report.generators.iter().map(|g| g.word.clone()).collect();
        let mut units = true;
        let mut squares = true;
        for w in &words {
            let (u, s) = exact_unit_check(&pc, w)?;
            units &= u;
            squares &= s;
        }
        out.units_exact = units;
        out.squares_exact = squares;
        let (n, prec) = verify_index(&pc, &words, max_prec)?;
        out.regulator = Some(n);
        out.precision = prec;
        let elems: Vec<MQElement> = words.iter().map(|w| pc.realize_required(w)).collect::<Result<_, _>>()?;
        out.saturated = is_two_saturated(&elems, MIN_PRECISION)?;
        out.pass = units && squares && out.saturated && n as u64 == out.claimed && n.count_ones() == 1;
        Ok(())
    };
    if let Err(e) = run(&mut out) {
        out.error = Some(e.to_string());
    }
    out
}

/// The reference pairs followed by every pair below `bound` not already
/// among them.
pub fn index_pairs(bound: u64) -> Vec<(u64, u64)> {
    let mut v: Vec<(u64, u64)> = super::TABLE1.iter().map(|r| (r.0, r.1)).collect();
    for (p, q) in super::pairs_below(bound) {
        if !v.iter().any(|&(a, b)| (a, b) == (p, q) || (a, b) == (q, p)) {
            v.push((p, q));
        }
    }
    v
}

/// `check_pair_index` over many pairs, in input order.
pub fn run_index(pairs: &[(u64, u64)], opts: &AnalyzeOptions, max_prec: u32) -> Vec<IndexCheck> {
    use rayon::prelude::*;
    pairs.par_iter().map(|&(p, q)| check_pair_index(p, q, opts, max_prec)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theorems::word::{E2, P1, P2, Q, R, T1, T2};

    #[test]
    fn quadratic_units_have_index_one() {
        let pc = PairContext::new(41, 13).unwrap();
        let words: Vec<UnitWord> = [E2, P1, P2, T1, T2, Q, R].iter().map(|&s| UnitWord::unit(s)).collect();
        assert_eq!(verify_index(&pc, &words, MAX_PRECISION).unwrap().0, 1);
        assert!(!is_two_saturated(&pc.embedded, MIN_PRECISION).unwrap());
        assert_eq!(saturation_index(&pc).unwrap(), 16);
    }

    #[test]
    fn reference_indices() {
        let opts = AnalyzeOptions::default();
        for (p1, p2, q) in [(41, 13, 16), (193, 97, 32)] {
            let c = check_pair_index(p1, p2, &opts, MAX_PRECISION);
            assert!(c.pass, "{c:?}");
            assert_eq!(c.regulator, Some(q));
        }
    }

    #[test]
    fn permuting_and_negating_generators() {
        let r = analyze_with(41, 29, &AnalyzeOptions::default()).unwrap();
        let pc = PairContext::new(41, 29).unwrap();
        let mut words: Vec<UnitWord> = r.generators.iter().map(|g| g.word.clone()).collect();
        let base = verify_index(&pc, &words, MAX_PRECISION).unwrap().0;
        words.swap(0, 6);
        words.swap(2, 4);
        words[1].sign = -words[1].sign;
        assert_eq!(verify_index(&pc, &words, MAX_PRECISION).unwrap().0, base);
    }
}
