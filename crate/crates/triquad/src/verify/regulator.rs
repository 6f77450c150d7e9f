//! Regulators of unit systems from interval log-embeddings.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::VerifyError;
use crate::arith::interval::Interval;
use crate::mfield::{GaloisElement, MQElement};

/// Lowest rung of the precision ladder.
pub const MIN_PRECISION: u32 = 256;

/// Default top of the precision ladder.
pub const MAX_PRECISION: u32 = 4096;

/// `ln|σ(x)|` and the sign of `σ(x)` for all eight embeddings of a unit.
///
/// A unit has one of |σ(x)|, |σ(x⁻¹)| at least 1; that one is evaluated so
/// the fixed-point error stays relative. `None` when `prec` is too low to
/// separate an embedding from zero.
pub fn log_embeddings(x: &MQElement, inv: &MQElement, prec: u32) -> Option<Vec<(Interval, i8)>> {
    let one = BigInt::one() << prec;
    let mut out = Vec::with_capacity(8);
    for sigma in GaloisElement::all() {
        let a = x.embed_real(sigma, prec);
        let b = inv.embed_real(sigma, prec);
        let (chosen, flip) = if a.abs().lo_raw() >= b.abs().lo_raw() { (a, false) } else { (b, true) };
        if chosen.contains_zero() || chosen.abs().hi_raw() < &one {
            return None;
        }
        let sign = if chosen.is_positive() { 1 } else { -1 };
        let l = chosen.abs().ln(prec)?;
        out.push((if flip { l.neg() } else { l }, sign));
    }
    Some(out)
}

/// Log-embedding matrix of a unit system: `rows[σ][j] = ln|σ(g_j)|`.
#[derive(Debug, Clone)]
pub struct RegulatorMatrix {
    pub rows: Vec<Vec<Interval>>,
    pub signs: Vec<Vec<i8>>,
    pub prec: u32,
}

impl RegulatorMatrix {
    pub fn new(units: &[MQElement], prec: u32) -> Result<Option<RegulatorMatrix>, VerifyError> {
        let mut cols = Vec::with_capacity(units.len());
        for u in units {
            let inv = u.inverse()?;
            match log_embeddings(u, &inv, prec) {
                Some(c) => cols.push(c),
                None => return Ok(None),
            }
        }
        let rows = (0..8).map(|s| cols.iter().map(|c| c[s].0.clone()).collect()).collect();
        let signs = (0..8).map(|s| cols.iter().map(|c| c[s].1).collect()).collect();
        Ok(Some(RegulatorMatrix { rows, signs, prec }))
    }

    /// `|det|` of the square matrix left after dropping embedding `dropped`.
    pub fn regulator(&self, dropped: usize) -> Interval {
        let m: Vec<Vec<Interval>> = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != dropped)
            .map(|(_, r)| r.clone())
            .collect();
        det(m, self.prec).abs()
    }
}

/// Upper bound on `|det|` as the product of the rows' L1 norms.
fn hadamard(m: &[Vec<Interval>], prec: u32) -> Interval {
    let mut acc = Interval::from_int(&BigInt::one(), prec);
    for row in m {
        let mut s = BigInt::zero();
        for e in row {
            s += e.abs().hi_raw();
        }
        acc = acc.mul(&Interval::new(s.clone(), s, prec));
    }
    let h = acc.hi_raw().clone();
    Interval::new(-h.clone(), h, prec)
}

/// Interval Gaussian elimination with partial pivoting. When no pivot is
/// bounded away from zero the Hadamard enclosure is returned instead.
pub fn det(mut m: Vec<Vec<Interval>>, prec: u32) -> Interval {
    let n = m.len();
    let bound = hadamard(&m, prec);
    let mut acc = Interval::from_int(&BigInt::one(), prec);
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !m[r][col].contains_zero())
            .max_by(|&a, &b| m[a][col].mid_f64().abs().total_cmp(&m[b][col].mid_f64().abs()));
        let Some(p) = pivot else {
            return bound;
        };
        if p != col {
            m.swap(p, col);
            acc = acc.neg();
        }
        let piv = m[col][col].clone();
        acc = acc.mul(&piv);
        for r in col + 1..n {
            let f = m[r][col].div(&piv).expect("pivot excludes zero");
            for c in col..n {
                let t = f.mul(&m[col][c]);
                m[r][c] = m[r][c].sub(&t);
            }
        }
    }
    acc
}

/// Regulator of a unit system, raising precision until every embedding is
/// resolved and the enclosure is tighter than `rel_width` of its value.
pub fn regulator(units: &[MQElement], max_prec: u32) -> Result<Interval, VerifyError> {
    let mut prec = MIN_PRECISION;
    let mut last = None;
    while prec <= max_prec {
        if let Some(m) = RegulatorMatrix::new(units, prec)? {
            let r = m.regulator(0);
            if r.contains_zero() || r.width_f64() < 1e-20 * r.mid_f64() {
                return Ok(r);
            }
            last = Some(r);
        }
        prec *= 2;
    }
    last.ok_or_else(|| VerifyError::Inconclusive(format!("embeddings unresolved at {max_prec} bits")))
}

/// Certified `R(base)/R(claimed)`: the unique integer in an enclosure of
/// width below 1/4, with the precision reached.
pub fn regulator_ratio(base: &[MQElement], claimed: &[MQElement], max_prec: u32) -> Result<(BigInt, u32, Interval), VerifyError> {
    let mut prec = MIN_PRECISION;
    let mut last = None;
    while prec <= max_prec {
        let (Some(mb), Some(mc)) = (RegulatorMatrix::new(base, prec)?, RegulatorMatrix::new(claimed, prec)?) else {
            prec *= 2;
            continue;
        };
        let rb = mb.regulator(0);
        let rc = mc.regulator(0);
        if let Some(q) = rb.div(&rc) {
            if q.width_f64() < 0.25 {
                if let Some(n) = q.unique_integer() {
                    return Ok((n, prec, q));
                }
            }
            last = Some(q);
        }
        prec *= 2;
    }
    Err(VerifyError::Inconclusive(match last {
        Some(q) => format!("regulator ratio {q:?} not certified at {max_prec} bits"),
        None => format!("claimed system degenerate up to {max_prec} bits"),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theorems::PairContext;

    fn units(p1: u64, p2: u64) -> Vec<MQElement> {
        PairContext::new(p1, p2).unwrap().embedded.to_vec()
    }

    #[test]
    fn independent_units_have_positive_regulator() {
        let u = units(41, 13);
        let r = regulator(&u, MAX_PRECISION).unwrap();
        assert!(r.is_positive());
    }

    #[test]
    fn duplicate_generator_is_singular() {
        let mut u = units(41, 13);
        u[6] = u[5].clone();
        let m = RegulatorMatrix::new(&u, 256).unwrap().unwrap();
        assert!(m.regulator(0).contains_zero());
    }

    #[test]
    fn sign_does_not_matter() {
        let u = units(41, 29);
        let mut v = u.clone();
        v[3] = v[3].neg();
        let a = RegulatorMatrix::new(&u, 512).unwrap().unwrap().regulator(0);
        let b = RegulatorMatrix::new(&v, 512).unwrap().unwrap().regulator(0);
        assert_eq!(a, b);
    }

    #[test]
    fn dropped_row_is_irrelevant() {
        // Rows of the full log matrix sum to zero, so every 7×7 minor agrees.
        let u = units(89, 73);
        let m = RegulatorMatrix::new(&u, 512).unwrap().unwrap();
        let r0 = m.regulator(0);
        for d in 1..8 {
            let r = m.regulator(d);
            let rel = (r.mid_f64() - r0.mid_f64()).abs() / r0.mid_f64();
            assert!(rel < 1e-30, "row {d}");
        }
    }

    #[test]
    fn ratio_of_a_system_with_itself() {
        let u = units(97, 17);
        let (n, _, _) = regulator_ratio(&u, &u, MAX_PRECISION).unwrap();
        assert_eq!(n, BigInt::one());
    }

    #[test]
    fn sign_rows_match_embeddings() {
        let c = crate::mfield::FieldCtx::new(41, 13).unwrap();
        let e2 = crate::mfield::MQElement::sqrt_of(&c, 2).unwrap().add(&MQElement::one(&c)).unwrap();
        let m = RegulatorMatrix::new(&[e2], 128).unwrap().unwrap();
        // 1 + √2 is positive exactly where √2 is.
        for (s, g) in GaloisElement::all().enumerate() {
            assert_eq!(m.signs[s][0], if g.sign_on(1) == 1 { 1 } else { -1 });
        }
    }
}
