//! Reduced positive-definite binary quadratic forms and Hurwitz class numbers.

use serde::Serialize;

use super::Rational;
use crate::error::{Error, Result};

/// Largest `N` accepted by [`class_relation_check`].
pub const RELATION_BUDGET: u64 = 1_000_000;

/// `a x² + b xy + c y²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn discriminant(&self) -> i128 {
        self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128
    }

    /// `|b| ≤ a ≤ c`, with `b ≥ 0` on the boundary `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        a > 0 && b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// `1/2` for multiples of `x² + y²`, `1/3` for multiples of `x² + xy + y²`,
    /// 1 otherwise: the inverse of the stabilizer order in `PSL(2,ℤ)`.
    pub fn weight(&self) -> Rational {
        if self.b == 0 && self.a == self.c {
            Rational::new(1, 2)
        } else if self.a == self.b && self.b == self.c {
            Rational::new(1, 3)
        } else {
            Rational::from_integer(1)
        }
    }

    /// Root `(-b + i√|D|)/(2a)` in the upper half plane.
    pub fn root(&self) -> (f64, f64) {
        let two_a = 2.0 * self.a as f64;
        (-(self.b as f64) / two_a, ((-self.discriminant()) as f64).sqrt() / two_a)
    }
}

/// All reduced forms of discriminant `D`, sorted by `(a, b, c)`.
pub fn reduced_forms(d: i64) -> Result<Vec<QuadForm>> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::InvalidDiscriminant(d));
    }
    let abs = d.unsigned_abs() as i128;
    let bmax = isqrt(abs / 3) as i64;
    let mut out = Vec::new();
    // b² ≡ D (mod 4) iff b ≡ D (mod 2)
    for b in (-bmax..=bmax).filter(|b| (b - d).rem_euclid(2) == 0) {
        let q = (b as i128 * b as i128 + abs) / 4;
        let mut a = b.abs().max(1) as i128;
        while a * a <= q {
            if q % a == 0 {
                let form = QuadForm { a: a as i64, b, c: (q / a) as i64 };
                if form.is_reduced() {
                    out.push(form);
                }
            }
            a += 1;
        }
    }
    out.sort();
    Ok(out)
}

fn isqrt(n: i128) -> i128 {
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Hurwitz class number `H(n)`: weighted count of reduced forms of
/// discriminant `-n`, with `H(0) = -1/12` and `H(n) = 0` unless `n ≡ 0, 3 (mod 4)`.
pub fn hurwitz(n: u64) -> Result<Rational> {
    if n == 0 {
        return Ok(Rational::new(-1, 12));
    }
    if matches!(n % 4, 1 | 2) {
        return Ok(Rational::from_integer(0));
    }
    let d = i64::try_from(n).map_err(|_| Error::Overflow(format!("discriminant -{n}")))?;
    Ok(reduced_forms(-d)?.iter().map(QuadForm::weight).sum())
}

/// `Σ_{t² ≤ 4N} H(4N - t²) - Σ_{d | N} max(d, N/d)`; zero for every `N ≥ 1`.
pub fn class_relation_check(n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if n > RELATION_BUDGET {
        return Err(Error::Budget { needed: format!("N = {n}"), limit: RELATION_BUDGET.to_string() });
    }
    let four_n = 4 * n;
    let mut lhs = Rational::from_integer(0);
    let tmax = isqrt(four_n as i128) as u64;
    for t in 0..=tmax {
        let h = hurwitz(four_n - t * t)?;
        lhs += if t == 0 { h } else { h * 2 };
    }
    let rhs: u64 = (1..=n)
        .take_while(|d| d * d <= n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| {
            let e = n / d;
            if d == e {
                e
            } else {
                2 * e
            }
        })
        .sum();
    Ok(lhs - Rational::from_integer(rhs as i128))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force over a box, independent of the reduction bounds.
    fn brute_forms(d: i64) -> Vec<QuadForm> {
        let bound = d.abs();
        let mut out = Vec::new();
        for a in 1..=bound {
            for b in -a..=a {
                let num = b * b - d;
                if num % (4 * a) == 0 {
                    let f = QuadForm { a, b, c: num / (4 * a) };
                    if f.is_reduced() {
                        out.push(f);
                    }
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn small_discriminants() {
        let f = |a, b, c| QuadForm { a, b, c };
        assert_eq!(reduced_forms(-3).unwrap(), vec![f(1, 1, 1)]);
        assert_eq!(reduced_forms(-4).unwrap(), vec![f(1, 0, 1)]);
        assert_eq!(reduced_forms(-23).unwrap(), vec![f(1, 1, 6), f(2, -1, 3), f(2, 1, 3)]);
        assert_eq!(reduced_forms(-12).unwrap(), vec![f(1, 0, 3), f(2, 2, 2)]);
        assert_eq!(reduced_forms(-16).unwrap(), vec![f(1, 0, 4), f(2, 0, 2)]);
    }

    #[test]
    fn matches_brute_force() {
        for n in 3..=400i64 {
            if matches!(n % 4, 0 | 3) {
                assert_eq!(reduced_forms(-n).unwrap(), brute_forms(-n), "D = -{n}");
            }
        }
    }

    #[test]
    fn rejects_bad_discriminants() {
        for d in [0, 5, -1, -2, -5, -6] {
            assert_eq!(reduced_forms(d), Err(Error::InvalidDiscriminant(d)));
        }
    }

    #[test]
    fn hurwitz_values() {
        let h = |n| hurwitz(n).unwrap();
        assert_eq!(h(0), Rational::new(-1, 12));
        assert_eq!(h(3), Rational::new(1, 3));
        assert_eq!(h(4), Rational::new(1, 2));
        assert_eq!(h(7), Rational::from_integer(1));
        assert_eq!(h(8), Rational::from_integer(1));
        assert_eq!(h(11), Rational::from_integer(1));
        assert_eq!(h(12), Rational::new(4, 3));
        assert_eq!(h(15), Rational::from_integer(2));
        assert_eq!(h(16), Rational::new(3, 2));
        assert_eq!(h(23), Rational::from_integer(3));
        assert_eq!(h(1), Rational::from_integer(0));
        assert_eq!(h(6), Rational::from_integer(0));
    }

    #[test]
    fn class_number_relation_holds() {
        for n in 1..=2000 {
            assert_eq!(class_relation_check(n).unwrap(), Rational::from_integer(0), "N = {n}");
        }
    }

    #[test]
    fn relation_budget() {
        assert!(class_relation_check(RELATION_BUDGET + 1).unwrap_err().is_budget());
        assert!(class_relation_check(0).is_err());
    }

    #[test]
    fn root_lies_in_closed_fundamental_domain() {
        for n in [3i64, 4, 23, 71, 1000, 9999] {
            if !matches!(n % 4, 0 | 3) {
                continue;
            }
            for f in reduced_forms(-n).unwrap() {
                let (x, y) = f.root();
                assert!(x.abs() <= 0.5 + 1e-15 && x * x + y * y >= 1.0 - 1e-12, "{f:?}");
                assert_eq!(f.discriminant(), -n as i128);
            }
        }
    }
}
