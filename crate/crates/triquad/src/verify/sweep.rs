//! Lemma-level properties swept over ranges of primes and radicands.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::{pairs_below, primes_1mod4, Check, VerifyError};
use crate::arith::{self, is_squarefree, legendre_u64, SymbolValue};
use crate::quadratic::{class_group_imaginary, fundamental_unit, h2_lemma, QuadDescriptor};
use crate::quadratic::forms::{class_group_real_bounded, field_discriminant};
use crate::theorems::conditions::shift_square;
use crate::theorems::word::{PairContext, UnitWord, E2, P1, P2, Q, R};
use crate::theorems::{sqrt_2p1p2_form, sqrt_half_params};

/// Ranges for the sweeps.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepBounds {
    /// Primes for the single-prime norm rules.
    pub norm_primes: u64,
    /// Primes for the pair norm rules and the quartic-symbol rules.
    pub norm_pairs: u64,
    /// Largest radicand for the shift-square rule.
    pub shift_radicand: u64,
    pub half_params: u64,
    /// Primes for the square-membership checks.
    pub membership: u64,
    /// Largest discriminant for the 2-class number rules.
    pub h2_disc: u64,
}

impl SweepBounds {
    pub fn uniform(b: u64) -> SweepBounds {
        SweepBounds { norm_primes: b, norm_pairs: b, shift_radicand: b, half_params: b, membership: b, h2_disc: b }
    }

    /// Ranges of the acceptance suite.
    pub fn acceptance() -> SweepBounds {
        SweepBounds { norm_primes: 2000, norm_pairs: 500, shift_radicand: 5000, half_params: 2000, membership: 300, h2_disc: 5000 }
    }
}

fn leg(a: u64, p: u64) -> SymbolValue {
    legendre_u64(a as i64, p).unwrap_or(SymbolValue::Zero)
}

fn norm(d: u64) -> Result<i8, VerifyError> {
    Ok(fundamental_unit(d)?.norm)
}

/// The norm rules for units of Q(√p), Q(√2p), Q(√pp') and Q(√2pp').
pub fn norm_rules(prime_bound: u64, pair_bound: u64) -> Result<Vec<Check>, VerifyError> {
    let mut c1 = Check::new("N(ε_p) = -1", format!("p ≡ 1 mod 4, p < {prime_bound}"));
    let mut c2 = Check::new("N(ε_2p) = -1 for p ≡ 5 mod 8", format!("p < {prime_bound}"));
    for p in primes_1mod4(prime_bound) {
        let n = norm(p)?;
        c1.record(n == -1, || format!("N(ε_{p}) = {n}"));
        if p % 8 == 5 {
            let n = norm(2 * p)?;
            c2.record(n == -1, || format!("N(ε_{}) = {n}", 2 * p));
        }
    }
    let mut c3 = Check::new("(p/p') = -1 ⟹ N(ε_pp') = -1", format!("pairs below {pair_bound}"));
    let mut c4 = Check::new("two symbols -1 ⟹ N(ε_2pp') = -1", format!("pairs below {pair_bound}"));
    let pairs = pairs_below(pair_bound);
    let rows: Vec<Result<(u64, u64, i8, i8), VerifyError>> = pairs
        .par_iter()
        .map(|&(p, q)| Ok((p, q, norm(p * q)?, norm(2 * p * q)?)))
        .collect();
    for row in rows {
        let (p, q, n3, n4) = row?;
        let l = leg(p, q);
        if l.is_minus_one() {
            c3.record(n3 == -1, || format!("N(ε_{}) = {n3}", p * q));
        }
        let minus = [l, leg(2, p), leg(2, q)].iter().filter(|s| s.is_minus_one()).count();
        if minus >= 2 {
            c4.record(n4 == -1, || format!("N(ε_{}) = {n4}", 2 * p * q));
        }
    }
    let mut c5 = Check::new("(2/p)_4 ≠ (p/2)_4 ⟹ N(ε_2p) = 1", format!("p ≡ 1 mod 8, p < {pair_bound}"));
    let mut c6 = Check::new("(2/p)_4 = (p/2)_4 = -1 ⟹ N(ε_2p) = -1", format!("p ≡ 1 mod 8, p < {pair_bound}"));
    for p in primes_1mod4(pair_bound).into_iter().filter(|p| p % 8 == 1) {
        let pb = BigInt::from(p);
        let a = arith::quartic_2_under_p(&pb).expect("p ≡ 1 mod 8");
        let b = arith::quartic_p_under_2(&pb).expect("p ≡ 1 mod 8");
        let n = norm(2 * p)?;
        if a != b {
            c5.record(n == 1, || format!("N(ε_{}) = {n}", 2 * p));
        } else if a.is_minus_one() {
            c6.record(n == -1, || format!("N(ε_{}) = {n}", 2 * p));
        }
    }
    Ok(vec![c1, c2, c3, c4, c5, c6])
}

/// For N(ε_d) = +1, none of 2(x±1), 2d(x±1) is a rational square.
pub fn shift_rule(dmax: u64) -> Result<Check, VerifyError> {
    let mut c = Check::new("N(ε_d) = 1 ⟹ 2(x±1), 2d(x±1) not squares", format!("squarefree 1 < d ≤ {dmax}"));
    let ds: Vec<u64> = (2..=dmax).filter(|&d| is_squarefree(d)).collect();
    let rows: Vec<Result<Option<(u64, bool, bool)>, VerifyError>> = ds
        .par_iter()
        .map(|&d| {
            let u = fundamental_unit(d)?;
            if u.norm != 1 {
                return Ok(None);
            }
            let x = BigRational::new(u.a.clone(), BigInt::from(u.denom));
            Ok(Some((d, shift_square(&x, 2), shift_square(&x, 2 * d))))
        })
        .collect();
    for row in rows {
        if let Some((d, a, b)) = row? {
            c.record(!a && !b, || format!("d = {d}: 2(x±1) square {a}, 2d(x±1) square {b}"));
        }
    }
    Ok(c)
}

/// The α1, α2, u identities for every p ≡ 1 (mod 8) with N(ε_2p) = +1.
pub fn half_params_rule(bound: u64) -> Result<Check, VerifyError> {
    let mut c = Check::new("√ε_2p = (α1 + α2√2p)/√2", format!("p ≡ 1 mod 8, p < {bound}, N(ε_2p) = 1"));
    for p in primes_1mod4(bound).into_iter().filter(|p| p % 8 == 1) {
        let u = fundamental_unit(2 * p)?;
        if u.norm != 1 {
            continue;
        }
        let h = sqrt_half_params(p)?;
        let (beta, alpha) = u.integer_coords().expect("integer coordinates");
        let a1sq = &h.alpha1 * &h.alpha1;
        let a2sq = BigInt::from(2 * p) * &h.alpha2 * &h.alpha2;
        let sign = if h.u == 0 { BigInt::from(1) } else { BigInt::from(-1) };
        let ok_prod = &h.alpha1 * &h.alpha2 == alpha;
        let ok_u = &a1sq - &a2sq == &sign * 2;
        // ((α1 + α2√2p)/√2)² = (α1² + 2pα2²)/2 + α1α2√2p.
        let ok_sq = &a1sq + &a2sq == &beta * 2;
        c.record(ok_prod && ok_u && ok_sq, || format!("p = {p}: product {ok_prod}, u {ok_u}, square {ok_sq}"));
    }
    Ok(c)
}

/// Square roots forced by negative norms, and the root-form trichotomy.
pub fn membership_rules(bound: u64) -> Result<Vec<Check>, VerifyError> {
    let scope = format!("pairs below {bound}");
    let mut c1 = Check::new("N(ε_2p1p2) = -1 ⟹ √(ε2εp1εp2ε2p1p2) ∈ K", scope.clone());
    let mut c2 = Check::new("N(ε_p1p2) = -1 ⟹ √(εp1εp2εp1p2) ∈ K", scope.clone());
    let mut c3 = Check::new("N(ε_2p1p2) = 1 ⟹ exactly one root form", scope);
    type Row = (u64, u64, Option<bool>, Option<bool>, Option<Result<(), String>>);
    let rows: Vec<Result<Row, VerifyError>> = pairs_below(bound)
        .par_iter()
        .map(|&(p, q)| {
            let pc = PairContext::new(p, q)?;
            let r1 = if pc.norm(R) == -1 {
                let w = UnitWord::product(&[E2, P1, P2, R]).sqrt();
                Some(exact_root(&pc, &w)?)
            } else {
                None
            };
            let r2 = if pc.norm(Q) == -1 {
                let w = UnitWord::product(&[P1, P2, Q]).sqrt();
                Some(exact_root(&pc, &w)?)
            } else {
                None
            };
            let r3 = (pc.norm(R) == 1).then(|| sqrt_2p1p2_form(&pc).map(|_| ()).map_err(|e| e.to_string()));
            Ok((p, q, r1, r2, r3))
        })
        .collect();
    for row in rows {
        let (p, q, r1, r2, r3) = row?;
        if let Some(ok) = r1 {
            c1.record(ok, || format!("({p},{q})"));
        }
        if let Some(ok) = r2 {
            c2.record(ok, || format!("({p},{q})"));
        }
        if let Some(r) = r3 {
            c3.record(r.is_ok(), || format!("({p},{q}): {}", r.unwrap_err()));
        }
    }
    Ok(vec![c1, c2, c3])
}

/// The root exists and squares back to the integral word exactly.
fn exact_root(pc: &PairContext, w: &UnitWord) -> Result<bool, VerifyError> {
    let Some(root) = pc.realize(w)? else {
        return Ok(false);
    };
    let sq = pc.realize_required(&w.pow(2))?;
    Ok(root.square() == sq)
}

/// Every applicable residue-symbol rule for h2 agrees with the form
/// oracle, for fundamental discriminants up to `disc_bound`.
pub fn h2_rules(disc_bound: u64) -> Result<Check, VerifyError> {
    let mut c = Check::new("h2 rules agree with the form oracle", format!("discriminant ≤ {disc_bound}"));
    let ps = primes_1mod4(disc_bound);
    let mut descs = vec![QuadDescriptor::Two];
    for (i, &p) in ps.iter().enumerate() {
        descs.push(QuadDescriptor::Prime(p));
        descs.push(QuadDescriptor::TwicePrime(p));
        for &q in &ps[i + 1..] {
            if p * q > disc_bound {
                break;
            }
            descs.push(QuadDescriptor::PrimePair(p, q));
            descs.push(QuadDescriptor::TwicePrimePair(p, q));
        }
    }
    let rows: Vec<Result<Option<(u64, u64, u64)>, VerifyError>> = descs
        .par_iter()
        .map(|&desc| {
            let d = desc.radicand();
            if field_discriminant(d as i64) as u64 > disc_bound {
                return Ok(None);
            }
            let Some(l) = h2_lemma(desc) else {
                return Ok(None);
            };
            let (_, h2) = class_group_real_bounded(d, disc_bound)?;
            Ok(Some((d, l.value, h2)))
        })
        .collect();
    for row in rows {
        if let Some((d, l, o)) = row? {
            c.record(l == o, || format!("h2({d}): rule {l}, oracle {o}"));
        }
    }
    // The imaginary values used for h2(L): h2(−p) = h2(−2p) = 2 for p ≡ 5 mod 8.
    let mut ci = Check::new("h2(-p) = h2(-2p) = 2 for p ≡ 5 mod 8", format!("discriminant ≤ {disc_bound}"));
    for &p in ps.iter().filter(|p| *p % 8 == 5 && 8 * *p <= disc_bound) {
        let a = class_group_imaginary(-(p as i64)).1;
        let b = class_group_imaginary(-2 * p as i64).1;
        ci.record(a == 2 && b == 2, || format!("p = {p}: {a}, {b}"));
    }
    c.tested += ci.tested;
    c.violations.extend(ci.violations);
    Ok(c)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub bounds: SweepBounds,
    pub checks: Vec<Check>,
}

impl SweepReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }

    pub fn violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations.len()).sum()
    }
}

pub fn sweep_properties(bounds: SweepBounds) -> Result<SweepReport, VerifyError> {
    let mut checks = norm_rules(bounds.norm_primes, bounds.norm_pairs)?;
    checks.push(shift_rule(bounds.shift_radicand)?);
    checks.push(half_params_rule(bounds.half_params)?);
    checks.extend(membership_rules(bounds.membership)?);
    checks.push(h2_rules(bounds.h2_disc)?);
    Ok(SweepReport { bounds, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_is_clean() {
        let r = sweep_properties(SweepBounds::uniform(150)).unwrap();
        for c in &r.checks {
            assert!(c.pass(), "{}: {:?}", c.name, c.violations);
        }
        assert!(r.checks.iter().all(|c| c.tested > 0), "{:?}", r.checks.iter().map(|c| (&c.name, c.tested)).collect::<Vec<_>>());
    }

    #[test]
    fn shift_rule_small() {
        let c = shift_rule(200).unwrap();
        assert!(c.pass() && c.tested > 50);
    }
}
