//! Fixed-point interval arithmetic on big integers.
//!
//! An [`Interval`] at precision `p` is the closed set `[lo/2^p, hi/2^p]`.
//! Every operation rounds outward, so the exact real value is never lost.

use std::fmt;
use std::sync::{OnceLock, RwLock};
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]@{}", self.lo_f64(), self.hi_f64(), self.prec)
    }
}

fn floor_shr(x: &BigInt, s: u32) -> BigInt {
    x.div_floor(&(BigInt::one() << s))
}

fn ceil_shr(x: &BigInt, s: u32) -> BigInt {
    x.div_ceil(&(BigInt::one() << s))
}

fn ceil_sqrt(n: &BigInt) -> BigInt {
    let s = n.sqrt();
    if &s * &s == *n {
        s
    } else {
        s + 1u32
    }
}

impl Interval {
    pub fn new(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi, prec }
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        let v = n << prec;
        Interval { lo: v.clone(), hi: v, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Interval { lo: BigInt::zero(), hi: BigInt::zero(), prec }
    }

    /// Enclosure of `num/den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(den.is_positive());
        let n = num << prec;
        Interval { lo: n.div_floor(den), hi: n.div_ceil(den), prec }
    }

    /// Enclosure of `√n` for an integer `n ≥ 0`.
    pub fn sqrt_int(n: &BigInt, prec: u32) -> Self {
        assert!(!n.is_negative());
        let scaled = n << (2 * prec);
        Interval { lo: scaled.sqrt(), hi: ceil_sqrt(&scaled), prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn lo_raw(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_raw(&self) -> &BigInt {
        &self.hi
    }

    pub fn lo_f64(&self) -> f64 {
        raw_to_f64(&self.lo, self.prec)
    }

    pub fn hi_f64(&self) -> f64 {
        raw_to_f64(&self.hi, self.prec)
    }

    pub fn mid_f64(&self) -> f64 {
        raw_to_f64(&((&self.lo + &self.hi) >> 1u32), self.prec)
    }

    /// Width as a float (for diagnostics and tolerance checks).
    pub fn width_f64(&self) -> f64 {
        raw_to_f64(&(&self.hi - &self.lo), self.prec)
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Membership of a float, allowing for its own rounding error.
    pub fn contains_f64(&self, x: f64) -> bool {
        let slack = 4.0 * f64::EPSILON * x.abs().max(1.0);
        self.lo_f64() - slack <= x && x <= self.hi_f64() + slack
    }

    /// Integers `n` with `lo ≤ n ≤ hi`, as the pair `(ceil lo, floor hi)`.
    pub fn integer_range(&self) -> (BigInt, BigInt) {
        (ceil_shr(&self.lo, self.prec), floor_shr(&self.hi, self.prec))
    }

    /// The unique integer in the interval, if there is exactly one.
    pub fn unique_integer(&self) -> Option<BigInt> {
        let (a, b) = self.integer_range();
        if a == b {
            Some(a)
        } else {
            None
        }
    }

    /// Change precision, rounding outward.
    pub fn with_prec(&self, prec: u32) -> Self {
        if prec >= self.prec {
            let s = prec - self.prec;
            Interval { lo: &self.lo << s, hi: &self.hi << s, prec }
        } else {
            let s = self.prec - prec;
            Interval { lo: floor_shr(&self.lo, s), hi: ceil_shr(&self.hi, s), prec }
        }
    }

    fn check(&self, other: &Interval) {
        assert_eq!(self.prec, other.prec, "interval precision mismatch");
    }

    pub fn add(&self, o: &Interval) -> Interval {
        self.check(o);
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, prec: self.prec }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        self.check(o);
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo, prec: self.prec }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    pub fn abs(&self) -> Interval {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = if -&self.lo > self.hi { -&self.lo } else { self.hi.clone() };
            Interval { lo: BigInt::zero(), hi: m, prec: self.prec }
        } else if self.hi.is_negative() || (self.hi.is_zero() && self.lo.is_negative()) {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        self.check(o);
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mn = c.iter().min().unwrap();
        let mx = c.iter().max().unwrap();
        Interval { lo: floor_shr(mn, self.prec), hi: ceil_shr(mx, self.prec), prec: self.prec }
    }

    pub fn mul_int(&self, k: &BigInt) -> Interval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Interval { lo: a, hi: b, prec: self.prec }
        } else {
            Interval { lo: b, hi: a, prec: self.prec }
        }
    }

    /// Division; `None` when the divisor contains zero.
    pub fn div(&self, o: &Interval) -> Option<Interval> {
        self.check(o);
        if o.contains_zero() {
            return None;
        }
        let p = self.prec;
        let nums = [&self.lo << p, &self.hi << p];
        let dens = [&o.lo, &o.hi];
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for n in &nums {
            for d in &dens {
                let (f, c) = if d.is_positive() {
                    (n.div_floor(d), n.div_ceil(d))
                } else {
                    let (nn, dd) = (-n, -*d);
                    (nn.div_floor(&dd), nn.div_ceil(&dd))
                };
                if lo.as_ref().map_or(true, |l| &f < l) {
                    lo = Some(f);
                }
                if hi.as_ref().map_or(true, |h| &c > h) {
                    hi = Some(c);
                }
            }
        }
        Some(Interval { lo: lo.unwrap(), hi: hi.unwrap(), prec: p })
    }

    /// Enclosure of the square root of the nonnegative part of the interval.
    ///
    /// A negative lower end is clamped at zero: callers only use the result
    /// when the underlying value is known or assumed nonnegative.
    pub fn sqrt(&self) -> Interval {
        let lo = if self.lo.is_negative() { BigInt::zero() } else { self.lo.clone() };
        let hi = if self.hi.is_negative() { BigInt::zero() } else { self.hi.clone() };
        Interval {
            lo: (lo << self.prec).sqrt(),
            hi: ceil_sqrt(&(hi << self.prec)),
            prec: self.prec,
        }
    }

    /// Enclosure of the natural logarithm at precision `w`.
    /// `None` unless the interval is strictly positive.
    pub fn ln(&self, w: u32) -> Option<Interval> {
        if !self.lo.is_positive() {
            return None;
        }
        let lo = ln_approx(&self.lo, self.prec, w);
        let hi = ln_approx(&self.hi, self.prec, w);
        Some(Interval { lo: lo - 2u32, hi: hi + 2u32, prec: w })
    }
}

fn raw_to_f64(x: &BigInt, prec: u32) -> f64 {
    let bits = x.bits() as i64;
    if bits <= 1000 {
        x.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(prec as i32))
    } else {
        // Keep ~60 significant bits to avoid overflow in to_f64.
        let shift = (bits - 60) as u32;
        let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
        top * 2f64.powi(shift as i32 - prec as i32)
    }
}

const GUARD: u32 = 64;

fn atanh_series(t: &BigInt, wp: u32) -> BigInt {
    // Σ t^(2j+1)/(2j+1) with t < 1/2 in fixed point at wp bits.
    let t2 = (t * t) >> wp;
    let mut pow = t.clone();
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    while !pow.is_zero() {
        sum += &pow / BigInt::from(2 * j + 1);
        pow = (&pow * &t2) >> wp;
        j += 1;
    }
    sum
}

fn ln2_fixed(wp: u32) -> BigInt {
    static CACHE: OnceLock<RwLock<HashMap<u32, BigInt>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().unwrap().get(&wp) {
        return v.clone();
    }
    let third = (BigInt::one() << wp) / 3u32;
    let v = atanh_series(&third, wp) << 1u32;
    cache.write().unwrap().insert(wp, v.clone());
    v
}

/// ln(n / 2^p) at precision w, with absolute error well below 2^-w.
///
/// Work at w+64 bits: n = 2^b·m with m in [1,2), ln m = 2 atanh((m-1)/(m+1)).
/// Each truncated step loses under one unit of the working precision and
/// there are O(w) of them, plus |k|·ulp from ln 2; with |k| < 2^40 the total
/// stays below 2^(64-2) working ulps, i.e. under 2^-w.
fn ln_approx(n: &BigInt, p: u32, w: u32) -> BigInt {
    debug_assert!(n.is_positive());
    let wp = w + GUARD;
    let b = n.bits() as i64 - 1;
    let k = b - p as i64;
    assert!(k.unsigned_abs() < (1u64 << 40));
    let m = if (wp as i64) >= b {
        n << (wp as i64 - b) as u32
    } else {
        n >> (b - wp as i64) as u32
    };
    let one = BigInt::one() << wp;
    let t = ((&m - &one) << wp) / (&m + &one);
    let lnm = atanh_series(&t, wp) << 1u32;
    let total = lnm + ln2_fixed(wp) * BigInt::from(k);
    floor_shr(&total, GUARD)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(x: i64, p: u32) -> Interval {
        Interval::from_int(&BigInt::from(x), p)
    }

    #[test]
    fn sqrt_two_encloses() {
        let s = Interval::sqrt_int(&BigInt::from(2), 128);
        assert!(s.contains_f64(std::f64::consts::SQRT_2));
        assert!(s.width_f64() < 1e-30);
        let sq = s.mul(&s);
        assert!(sq.lo_f64() <= 2.0 && 2.0 <= sq.hi_f64());
    }

    #[test]
    fn ln_values() {
        let two = iv(2, 64);
        let l = two.ln(200).unwrap();
        assert!(l.contains_f64(std::f64::consts::LN_2));
        assert!(l.width_f64() < 1e-55);
        let small = Interval::from_ratio(&BigInt::from(1), &BigInt::from(1000), 300);
        let l = small.ln(100).unwrap();
        assert!((l.mid_f64() + 1000f64.ln()).abs() < 1e-12);
        assert!(iv(0, 64).ln(64).is_none());
    }

    #[test]
    fn ln_of_huge_value() {
        // ln(10^500) = 500 ln 10.
        let n = BigInt::from(10u32).pow(500);
        let l = Interval::from_int(&n, 32).ln(128).unwrap();
        assert!((l.mid_f64() - 500.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn ln_matches_series_at_two_precisions() {
        let x = Interval::from_ratio(&BigInt::from(355), &BigInt::from(113), 256);
        let a = x.ln(120).unwrap();
        let b = x.ln(240).unwrap().with_prec(120);
        assert!(a.lo_raw() <= b.hi_raw() && b.lo_raw() <= a.hi_raw());
    }

    #[test]
    fn division_and_integers() {
        let a = iv(7, 40);
        let b = iv(-2, 40);
        let q = a.div(&b).unwrap();
        assert!(q.contains_f64(-3.5));
        assert!(a.div(&Interval::zero(40)).is_none());
        let x = Interval::from_ratio(&BigInt::from(10), &BigInt::from(3), 40);
        assert_eq!(x.integer_range(), (BigInt::from(4), BigInt::from(3)));
        assert_eq!(iv(-5, 10).unique_integer(), Some(BigInt::from(-5)));
    }

    #[test]
    fn precision_change_rounds_outward() {
        let x = Interval::from_ratio(&BigInt::from(1), &BigInt::from(3), 100);
        let y = x.with_prec(10);
        assert!(y.lo_f64() <= 1.0 / 3.0 && 1.0 / 3.0 <= y.hi_f64());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn encloses(x: &Interval, num: i128, den: i128) -> bool {
            // lo/2^p ≤ num/den ≤ hi/2^p, with den > 0.
            let p = BigInt::one() << x.prec();
            let n = BigInt::from(num) * &p;
            let d = BigInt::from(den);
            x.lo_raw() * &d <= n && n <= x.hi_raw() * &d
        }

        proptest! {
            #[test]
            fn arithmetic_encloses_exact_value(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
                let x = Interval::from_ratio(&BigInt::from(a), &BigInt::from(b), 64);
                let y = Interval::from_ratio(&BigInt::from(c), &BigInt::from(d), 64);
                let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
                prop_assert!(encloses(&x.add(&y), a * d + c * b, b * d));
                prop_assert!(encloses(&x.sub(&y), a * d - c * b, b * d));
                prop_assert!(encloses(&x.mul(&y), a * c, b * d));
                if c != 0 {
                    let q = x.div(&y).unwrap();
                    let (n, m) = if c > 0 { (a * d, b * c) } else { (-a * d, -b * c) };
                    prop_assert!(encloses(&q, n, m));
                }
            }

            #[test]
            fn sqrt_int_encloses(n in 0u64..1_000_000) {
                let r = Interval::sqrt_int(&BigInt::from(n), 80);
                let sq = r.mul(&r);
                prop_assert!(encloses(&sq, n as i128, 1));
            }
        }
    }
}
