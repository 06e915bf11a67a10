use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};

/// Integer 2×2 matrix with positive determinant, acting on the upper half
/// plane by Möbius transformations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct IntMatrix2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntMatrix2 {
    pub const IDENTITY: IntMatrix2 = IntMatrix2 { a: 1, b: 0, c: 0, d: 1 };

    /// Rejects non-positive determinants and determinants beyond `i64`.
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let m = IntMatrix2 { a, b, c, d };
        let det = m.det();
        if det <= 0 {
            return Err(Error::InvalidArgument(format!("{m} has determinant {det} <= 0")));
        }
        if det > i64::MAX as i128 {
            return Err(Error::Overflow(format!("determinant of {m}")));
        }
        Ok(m)
    }

    pub fn det(&self) -> i128 {
        self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128
    }

    pub fn trace(&self) -> i128 {
        self.a as i128 + self.d as i128
    }

    /// `gcd(|a|, |b|, |c|, |d|)`.
    pub fn content(&self) -> i64 {
        self.a.gcd(&self.b).gcd(&self.c).gcd(&self.d)
    }

    pub fn checked_mul(&self, rhs: &IntMatrix2) -> Result<IntMatrix2> {
        let e = |x: i128, y: i128, z: i128, w: i128| -> Result<i64> {
            i64::try_from(x * y + z * w).map_err(|_| Error::Overflow(format!("product {self} · {rhs}")))
        };
        let (a, b, c, d) = (self.a as i128, self.b as i128, self.c as i128, self.d as i128);
        let (p, q, r, s) = (rhs.a as i128, rhs.b as i128, rhs.c as i128, rhs.d as i128);
        Ok(IntMatrix2 { a: e(a, p, b, r)?, b: e(a, q, b, s)?, c: e(c, p, d, r)?, d: e(c, q, d, s)? })
    }

    /// Exact division by a common factor of all entries.
    pub fn divide_by(&self, k: i64) -> IntMatrix2 {
        debug_assert!(k != 0 && self.content() % k == 0);
        IntMatrix2 { a: self.a / k, b: self.b / k, c: self.c / k, d: self.d / k }
    }

    /// `z ↦ (az + b)/(cz + d)` on `z = x + iy`.
    pub fn act(&self, x: f64, y: f64) -> (f64, f64) {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        // (az+b)/(cz+d) = (az+b)(c z̄ + d) / |cz+d|²
        let nr = a * x + b;
        let ni = a * y;
        let dr = c * x + d;
        let di = c * y;
        let den = dr * dr + di * di;
        ((nr * dr + ni * di) / den, (ni * dr - nr * di) / den)
    }

    pub fn hnf(&self) -> CosetClass {
        hnf(self)
    }

    pub fn classify(&self) -> (Classification, i64) {
        classify(self)
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Hermite normal form `[[α, β], [0, δ]]`, `α, δ > 0`, `0 ≤ β < δ`: the
/// canonical representative of the left coset `Γ·M`, `Γ = SL(2,ℤ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CosetClass {
    pub alpha: i64,
    pub beta: i64,
    pub delta: i64,
}

impl CosetClass {
    pub fn matrix(&self) -> IntMatrix2 {
        IntMatrix2 { a: self.alpha, b: self.beta, c: 0, d: self.delta }
    }

    pub fn det(&self) -> i128 {
        self.alpha as i128 * self.delta as i128
    }

    pub fn is_primitive(&self) -> bool {
        self.alpha.gcd(&self.beta).gcd(&self.delta) == 1
    }

    /// `(αz + β)/δ`.
    pub fn act(&self, x: f64, y: f64) -> (f64, f64) {
        let (a, d) = (self.alpha as f64, self.delta as f64);
        ((a * x + self.beta as f64) / d, a * y / d)
    }
}

/// Row reduction of `M` under left multiplication by `SL(2,ℤ)`.
pub fn hnf(m: &IntMatrix2) -> CosetClass {
    let (mut a, mut b, mut c, mut d) = (m.a as i128, m.b as i128, m.c as i128, m.d as i128);
    // Euclid on the first column; each step is a left multiplication by an
    // element of SL(2,ℤ): row1 -= q·row2, then (row1, row2) ← (row2, -row1).
    while c != 0 {
        let q = a / c;
        a -= q * c;
        b -= q * d;
        let (na, nb) = (c, d);
        c = -a;
        d = -b;
        a = na;
        b = nb;
    }
    if a < 0 {
        a = -a;
        b = -b;
        d = -d;
    }
    debug_assert!(a > 0 && d > 0, "positive determinant");
    CosetClass { alpha: a as i64, beta: b.rem_euclid(d) as i64, delta: d as i64 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Classification {
    /// `M` is a scalar matrix: it fixes every point, none isolated.
    ScalarActing,
    /// `tr² < 4 det`: exactly one fixed point in ℍ, isolated.
    Elliptic,
    /// `tr² = 4 det`: fixed point only at a cusp.
    Parabolic,
    /// `tr² > 4 det`: fixed points on the boundary.
    Hyperbolic,
}

/// Type of `M` (after dividing out its content) and the content itself.
pub fn classify(m: &IntMatrix2) -> (Classification, i64) {
    let g = m.content();
    let p = m.divide_by(g);
    if p.b == 0 && p.c == 0 && p.a == p.d && p.a.abs() == 1 {
        return (Classification::ScalarActing, g);
    }
    let t = p.trace();
    let disc = t * t - 4 * p.det();
    let class = match disc.signum() {
        -1 => Classification::Elliptic,
        0 => Classification::Parabolic,
        _ => Classification::Hyperbolic,
    };
    (class, g)
}

pub const MAX_HECKE_PRIME: u64 = 97;

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// Representatives `[[1, k], [0, p]]` (`0 ≤ k < p`) and `[[p, 0], [0, 1]]` of
/// the `p + 1` branches of `T_p`.
pub fn coset_reps(p: u64) -> Result<Vec<IntMatrix2>> {
    if !is_prime(p) || p > MAX_HECKE_PRIME {
        return Err(Error::NotPrime(p));
    }
    let p = p as i64;
    let mut reps: Vec<IntMatrix2> = (0..p).map(|k| IntMatrix2 { a: 1, b: k, c: 0, d: p }).collect();
    reps.push(IntMatrix2 { a: p, b: 0, c: 0, d: 1 });
    Ok(reps)
}
