//! Class numbers of quadratic fields from binary quadratic forms.
//!
//! Imaginary fields: count reduced positive definite forms. Real fields:
//! split the reduced indefinite forms into cycles of the reduction operator
//! (one cycle per narrow class), then pass from narrow to wide classes with
//! the norm of the fundamental unit.

use std::collections::HashSet;

use num_integer::Integer;

use super::{fundamental_unit, QuadError};
use crate::arith::{is_squarefree, two_part};

/// Default largest discriminant accepted by [`class_group_real`].
pub const ORACLE_BOUND: u64 = 1_000_000;

/// Discriminant of Q(√d).
pub fn field_discriminant(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Class number and its 2-part for Q(√d), d < 0 squarefree.
pub fn class_group_imaginary(d: i64) -> (u64, u64) {
    assert!(d < 0 && is_squarefree(d.unsigned_abs()), "d must be negative squarefree");
    let disc = field_discriminant(d);
    let n = disc.unsigned_abs() as i64;
    let mut h = 0u64;
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && c == a) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            h += 1;
        }
        a += 1;
    }
    (h, two_part(h))
}

type Form = (i64, i64, i64);

fn is_reduced(f: Form, sqrt_floor: i64, disc: i64) -> bool {
    // 0 < b < √D and √D − b < 2|a| < √D + b, decided exactly.
    let (a, b, _) = f;
    let two_a = 2 * a.abs();
    if b <= 0 || b > sqrt_floor {
        return false;
    }
    let left = (two_a + b) * (two_a + b) > disc;
    let right = two_a <= b || (two_a - b) * (two_a - b) < disc;
    left && right
}

/// The reduction step ρ(a,b,c) = (c, b', (b'² − D)/(4c)) with
/// b' ≡ −b (mod 2c) and √D − 2|c| < b' < √D.
fn rho(f: Form, sqrt_floor: i64, disc: i64) -> Form {
    let (_, b, c) = f;
    let m = 2 * c.abs();
    // Largest b' < √D with b' ≡ −b (mod m); √D is irrational so b' ≤ ⌊√D⌋.
    let r = (-b).rem_euclid(m);
    let mut bp = sqrt_floor - (sqrt_floor - r).rem_euclid(m);
    if bp > sqrt_floor {
        bp -= m;
    }
    let ap = (bp * bp - disc) / (4 * c);
    (c, bp, ap)
}

/// Wide class number and its 2-part for Q(√d), d > 1 squarefree.
pub fn class_group_real(d: u64) -> Result<(u64, u64), QuadError> {
    class_group_real_bounded(d, ORACLE_BOUND)
}

pub fn class_group_real_bounded(d: u64, bound: u64) -> Result<(u64, u64), QuadError> {
    if d <= 1 || !is_squarefree(d) {
        return Err(QuadError::BadRadicand(d as i64));
    }
    let disc = field_discriminant(d as i64) as u64;
    if disc > bound {
        return Err(QuadError::AboveOracleBound { disc, bound });
    }
    let disc = disc as i64;
    let s = isqrt_u64(disc as u64) as i64;
    let mut reduced: Vec<Form> = Vec::new();
    for b in 1..=s {
        if (b - disc).rem_euclid(2) != 0 {
            continue;
        }
        // a·c = (b² − D)/4 < 0.
        let ac = (disc - b * b) / 4;
        let mut a = 1i64;
        while a * a <= ac {
            if ac % a == 0 {
                for (x, y) in [(a, ac / a), (ac / a, a)] {
                    for sign in [1i64, -1] {
                        let f = (sign * x, b, -sign * y);
                        if f.0.gcd(&f.1).gcd(&f.2) == 1 && is_reduced(f, s, disc) {
                            reduced.push(f);
                        }
                    }
                }
            }
            a += 1;
        }
    }
    reduced.sort();
    reduced.dedup();
    let mut seen: HashSet<Form> = HashSet::new();
    let mut narrow = 0u64;
    for &f in &reduced {
        if seen.contains(&f) {
            continue;
        }
        narrow += 1;
        let mut g = f;
        loop {
            debug_assert!(is_reduced(g, s, disc), "ρ left the reduced set at {g:?}");
            seen.insert(g);
            g = rho(g, s, disc);
            if g == f {
                break;
            }
        }
    }
    let unit = fundamental_unit(d)?;
    let h = if unit.norm == 1 { narrow / 2 } else { narrow };
    Ok((h, two_part(h)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imaginary_examples() {
        assert_eq!(class_group_imaginary(-1), (1, 1));
        assert_eq!(class_group_imaginary(-5), (2, 2));
        assert_eq!(class_group_imaginary(-41), (8, 8));
        assert_eq!(class_group_imaginary(-23), (3, 1));
        assert_eq!(class_group_imaginary(-3), (1, 1));
    }

    #[test]
    fn real_examples() {
        assert_eq!(class_group_real(2).unwrap(), (1, 1));
        assert_eq!(class_group_real(65).unwrap(), (2, 2));
        assert_eq!(class_group_real(10).unwrap(), (2, 2));
        assert_eq!(class_group_real(79).unwrap(), (3, 1));
        assert!(class_group_real(300_000).is_err());
    }

    /// Kronecker symbol (D/n) for a fundamental discriminant D and n > 0.
    fn kronecker(disc: i64, n: i64) -> i64 {
        let mut result = 1;
        let mut n = n;
        while n % 2 == 0 {
            n /= 2;
            result *= match disc.rem_euclid(8) {
                1 | 7 => 1,
                3 | 5 => -1,
                _ => 0,
            };
        }
        // Jacobi symbol (D/n) for odd n.
        let mut a = disc.rem_euclid(n);
        let mut m = n;
        while a != 0 {
            while a % 2 == 0 {
                a /= 2;
                if m % 8 == 3 || m % 8 == 5 {
                    result = -result;
                }
            }
            std::mem::swap(&mut a, &mut m);
            if a % 4 == 3 && m % 4 == 3 {
                result = -result;
            }
            a %= m;
        }
        if m == 1 {
            result
        } else {
            0
        }
    }

    /// Dirichlet's analytic class number formula.
    fn analytic_h_real(d: u64) -> u64 {
        let disc = field_discriminant(d as i64);
        let u = fundamental_unit(d).unwrap();
        let a: f64 = u.a.to_string().parse().unwrap();
        let b: f64 = u.b.to_string().parse().unwrap();
        let eps = (a + b * (d as f64).sqrt()) / u.denom as f64;
        let mut sum = 0.0;
        for k in 1..disc {
            let chi = kronecker(disc, k) as f64;
            sum += chi * (std::f64::consts::PI * k as f64 / disc as f64).sin().ln();
        }
        (-sum / (2.0 * eps.ln())).round() as u64
    }

    fn analytic_h_imag(d: i64) -> u64 {
        let disc = field_discriminant(d);
        let n = disc.abs();
        let w = match disc {
            -4 => 4.0,
            -3 => 6.0,
            _ => 2.0,
        };
        let s: i64 = (1..n).map(|k| kronecker(disc, k) * k).sum();
        (-(s as f64) * w / (2.0 * n as f64)).round() as u64
    }

    #[test]
    fn real_matches_analytic_formula() {
        for d in (2..400u64).filter(|&d| is_squarefree(d)) {
            let u = fundamental_unit(d).unwrap();
            if u.b.bits() > 40 {
                continue; // keep ln ε well inside f64 range of exactness
            }
            assert_eq!(class_group_real(d).unwrap().0, analytic_h_real(d), "d={d}");
        }
    }

    #[test]
    fn imaginary_matches_analytic_formula() {
        for m in (1..600i64).filter(|&m| is_squarefree(m as u64)) {
            assert_eq!(class_group_imaginary(-m).0, analytic_h_imag(-m), "d=-{m}");
        }
    }
}
