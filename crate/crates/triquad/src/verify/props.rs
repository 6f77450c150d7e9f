//! Consequences of the main theorems checked on ranges of pairs.

use rayon::prelude::*;

use super::{pairs_below, Check, VerifyError};
use crate::arith::legendre_u64;
use crate::mfield::SubfieldId;
use crate::theorems::cases::{item_in_order, synthesize_fsu};
use crate::theorems::conditions::evaluate;
use crate::theorems::word::{PairContext, UnitWord, E2, P1, P2, Q, R, T1, T2};
use crate::theorems::{analyze_with, AnalyzeOptions};

fn square_in(pc: &PairContext, slots: &[usize], k: u8) -> Result<bool, VerifyError> {
    let x = pc.realize_required(&UnitWord::product(slots))?;
    Ok(x.is_square_in_subfield(SubfieldId::Biquad(k))?.is_some())
}

fn minus_one(a: u64, p: u64) -> bool {
    legendre_u64(a as i64, p).map(|s| s.is_minus_one()).unwrap_or(false)
}

/// Ordered pairs (p1, p2) with p1 ≡ 1 (mod 8) and p2 ≡ 1 (mod 4), both below `bound`.
fn ordered_one_mod_eight(bound: u64) -> Vec<(u64, u64)> {
    let mut v = Vec::new();
    for (p, q) in pairs_below(bound) {
        if p % 8 == 1 {
            v.push((p, q));
        }
        if q % 8 == 1 {
            v.push((q, p));
        }
    }
    v
}

/// p1 ≡ 1, p2 ≡ 5 (mod 8), (p1/p2) = −1, all norms −1: the k3 and k6
/// roots exist and q(K) = 2⁴·q(k5).
pub fn proposition(bound: u64, opts: &AnalyzeOptions) -> Result<Check, VerifyError> {
    let mut c = Check::new("k3, k6 roots present and q(K) = 16·q(k5)", format!("pairs below {bound}"));
    let cands: Vec<(u64, u64)> = ordered_one_mod_eight(bound)
        .into_iter()
        .filter(|&(p1, p2)| p2 % 8 == 5 && minus_one(p1, p2))
        .collect();
    let rows: Vec<Result<Option<(u64, u64, bool, bool, bool, u64)>, VerifyError>> = cands
        .par_iter()
        .map(|&(p1, p2)| {
            let pc = PairContext::new(p1, p2)?;
            if (0..4).any(|i| pc.norm([T1, T2, Q, R][i]) != -1) {
                return Ok(None);
            }
            let k3 = square_in(&pc, &[E2, Q, R], 3)?;
            let k6 = square_in(&pc, &[P1, T2, R], 6)?;
            let k5 = square_in(&pc, &[P2, T1, R], 5)?;
            let q = analyze_with(p1, p2, opts)?.q_k;
            Ok(Some((p1, p2, k3, k6, k5, q)))
        })
        .collect();
    for row in rows {
        if let Some((p1, p2, k3, k6, k5, q)) = row? {
            let expected = if k5 { 32 } else { 16 };
            c.record(k3 && k6 && q == expected, || format!("({p1},{p2}): k3 {k3}, k6 {k6}, k5 {k5}, qK {q}"));
        }
    }
    Ok(c)
}

/// Signature (−1,1,1,1), 2p1(x±1) square and 2p1(a'±1) not square give
/// q(K) = 2⁴ and q(L) = 2⁵. With `require_a_shift` false the condition on
/// a' is dropped.
pub fn final_corollary(bound: u64, opts: &AnalyzeOptions, require_a_shift: bool) -> Result<Check, VerifyError> {
    let (name, scope) = if require_a_shift {
        ("(-1,1,1,1), 2p1(x±1) square, 2p1(a'±1) not square ⟹ qK = 16, qL = 32", format!("pairs below {bound}"))
    } else {
        ("(-1,1,1,1), 2p1(x±1) square ⟹ qK = 16, qL = 32", format!("pairs below {bound}, no condition on a'"))
    };
    let mut c = Check::new(name, scope);
    let rows: Vec<Result<Option<(u64, u64, u64, u64)>, VerifyError>> = ordered_one_mod_eight(bound)
        .par_iter()
        .map(|&(p1, p2)| {
            let pc = PairContext::new(p1, p2)?;
            if [T1, T2, Q, R].map(|s| pc.norm(s)) != [-1, 1, 1, 1] {
                return Ok(None);
            }
            let cond = evaluate(&pc)?;
            if cond.two_p1_x_shift != Some(true) || (require_a_shift && cond.two_p1_a_shift != Some(false)) {
                return Ok(None);
            }
            let r = analyze_with(p1, p2, opts)?;
            Ok(Some((p1, p2, r.q_k, r.q_l)))
        })
        .collect();
    for row in rows {
        if let Some((p1, p2, qk, ql)) = row? {
            c.record(qk == 16 && ql == 32, || format!("({p1},{p2}): qK {qk}, qL {ql}"));
        }
    }
    Ok(c)
}

/// N(ε_p1p2) = +1 forces 2p1(a'±1) to be a square, with ε_p1p2 = a' + b'√p1p2.
pub fn a_shift_always_square(bound: u64) -> Result<Check, VerifyError> {
    let mut c = Check::new("N(ε_p1p2) = 1 ⟹ 2p1(a'±1) and 2p2(a'±1) squares", format!("pairs below {bound}"));
    let rows: Vec<Result<Option<(u64, u64, bool)>, VerifyError>> = pairs_below(bound)
        .par_iter()
        .map(|&(p1, p2)| {
            let pc = PairContext::new(p1, p2)?;
            if pc.norm(Q) != 1 {
                return Ok(None);
            }
            let cond = evaluate(&pc)?;
            Ok(Some((p1, p2, cond.two_p1_a_shift == Some(true) && cond.two_p2_a_shift == Some(true))))
        })
        .collect();
    for row in rows {
        if let Some((p1, p2, ok)) = row? {
            c.record(ok, || format!("({p1},{p2})"));
        }
    }
    Ok(c)
}

/// p1 ≡ 1, p2 ≡ 5 (mod 8): without C1, C2, C3 the exponent δ is 0.
///
/// With `covered` true only pairs the theorems classify in the given order
/// are tested; otherwise only the others, signature (1,−1,·,·), where the
/// case is read off the swapped pair.
pub fn delta_corollary(bound: u64, opts: &AnalyzeOptions, covered: bool) -> Result<Check, VerifyError> {
    let scope = format!("p1 ≡ 1, p2 ≡ 5 mod 8, below {bound}, {}", if covered { "classified in this order" } else { "signature (1,-1,·,·)" });
    let mut c = Check::new("no C1/C2/C3 ⟹ δ = 0", scope);
    let cands: Vec<(u64, u64)> = ordered_one_mod_eight(bound).into_iter().filter(|&(_, p2)| p2 % 8 == 5).collect();
    let rows: Vec<Result<Option<(u64, u64, bool, u8)>, VerifyError>> = cands
        .par_iter()
        .map(|&(p1, p2)| {
            if item_in_order(p1, p2)?.is_some() != covered {
                return Ok(None);
            }
            let pc = PairContext::new(p1, p2)?;
            let n = [T1, T2, Q, R].map(|s| pc.norm(s));
            let cond = evaluate(&pc)?;
            let xs = cond.x_shift;
            let c1 = n.iter().all(|&v| v == n[0]);
            let c2 = n == [1, 1, -1, 1] && xs == Some(true);
            let c3 = n == [-1, 1, 1, 1] && xs == Some(false);
            let r = analyze_with(p1, p2, opts)?;
            Ok(Some((p1, p2, c1 || c2 || c3, r.delta)))
        })
        .collect();
    for row in rows {
        let Some((p1, p2, any, delta)) = row? else { continue };
        if !any {
            c.record(delta == 0, || format!("({p1},{p2}): δ = {delta}"));
        }
    }
    Ok(c)
}

/// p1 ≡ p2 ≡ 5 (mod 8): δ = 1 exactly when N(ε_p1p2) = −1 and the k3 root exists.
pub fn five_five_delta(bound: u64, opts: &AnalyzeOptions) -> Result<Check, VerifyError> {
    let mut c = Check::new("δ = 1 ⟺ N(ε_p1p2) = -1 and k3 root", format!("p1 ≡ p2 ≡ 5 mod 8, below {bound}"));
    let cands: Vec<(u64, u64)> = pairs_below(bound).into_iter().filter(|&(p, q)| p % 8 == 5 && q % 8 == 5).collect();
    let rows: Vec<Result<(u64, u64, bool, u8, bool), VerifyError>> = cands
        .par_iter()
        .map(|&(p1, p2)| {
            let pc = PairContext::new(p1, p2)?;
            let expect = pc.norm(Q) == -1 && square_in(&pc, &[E2, Q, R], 3)?;
            let r = analyze_with(p1, p2, opts)?;
            Ok((p1, p2, expect, r.delta, r.h2_l.is_some()))
        })
        .collect();
    for row in rows {
        let (p1, p2, expect, delta, has_l) = row?;
        c.record((delta == 1) == expect && has_l, || format!("({p1},{p2}): δ = {delta}, predicted {expect}, h2L {has_l}"));
    }
    Ok(c)
}

/// p1 ≡ p2 ≡ 5 (mod 8), (p1/p2) = −1: the k3, k5, k6, k7 root tests agree.
pub fn root_equivalence(bound: u64) -> Result<Check, VerifyError> {
    let mut c = Check::new("k3, k5, k6, k7 root tests agree", format!("p1 ≡ p2 ≡ 5 mod 8, (p1/p2) = -1, below {bound}"));
    let cands: Vec<(u64, u64)> = pairs_below(bound)
        .into_iter()
        .filter(|&(p, q)| p % 8 == 5 && q % 8 == 5 && minus_one(p, q))
        .collect();
    let rows: Vec<Result<(u64, u64, [bool; 4]), VerifyError>> = cands
        .par_iter()
        .map(|&(p1, p2)| {
            let pc = PairContext::new(p1, p2)?;
            Ok((
                p1,
                p2,
                [
                    square_in(&pc, &[E2, Q, R], 3)?,
                    square_in(&pc, &[P2, T1, R], 5)?,
                    square_in(&pc, &[P1, T2, R], 6)?,
                    square_in(&pc, &[T1, T2, Q], 7)?,
                ],
            ))
        })
        .collect();
    for row in rows {
        let (p1, p2, v) = row?;
        c.record(v.iter().all(|&b| b == v[0]), || format!("({p1},{p2}): {v:?}"));
    }
    Ok(c)
}

/// When both orderings of a pair satisfy a theorem's hypotheses, both
/// generator systems give the same q(K).
pub fn ordering_independence(bound: u64) -> Result<Check, VerifyError> {
    let mut c = Check::new("both admissible orderings give the same qK", format!("p1 ≡ p2 ≡ 1 mod 8, below {bound}"));
    let cands: Vec<(u64, u64)> = pairs_below(bound).into_iter().filter(|&(p, q)| p % 8 == 1 && q % 8 == 1).collect();
    let rows: Vec<Result<Option<(u64, u64, u32, u32)>, VerifyError>> = cands
        .par_iter()
        .map(|&(p, q)| {
            let (Some((t1, i1)), Some((t2, i2))) = (item_in_order(p, q)?, item_in_order(q, p)?) else {
                return Ok(None);
            };
            let pa = PairContext::new(p, q)?;
            let pb = PairContext::new(q, p)?;
            let sa = synthesize_fsu(&pa, t1, i1, false, &evaluate(&pa)?)?;
            let sb = synthesize_fsu(&pb, t2, i2, true, &evaluate(&pb)?)?;
            Ok(Some((p, q, sa.q_exp, sb.q_exp)))
        })
        .collect();
    for row in rows {
        if let Some((p, q, a, b)) = row? {
            c.record(a == b, || format!("({p},{q}): 2^{a} against 2^{b}"));
        }
    }
    Ok(c)
}
