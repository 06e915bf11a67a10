//! Isolated fixed points of `T_N` on `PSL(2,ℤ)\ℍ`.
//!
//! A matrix of determinant `N` with trace `t`, `t² < 4N`, fixes exactly one
//! point of `ℍ`. Up to `Γ`-conjugacy such matrices correspond to reduced forms
//! `[a, b, c]` of discriminant `t² − 4N` via
//! `[a, b, c] ↦ [[(t−b)/2, −c], [a, (t+b)/2]]`, and the fixed point is the
//! root `(−b + i√(4N − t²))/(2a)` of the form, already in the closed
//! fundamental domain.

use num_integer::Integer;
use serde::Serialize;

use super::decomposition::{power_decomposition, Method, PowerDecomposition};
use super::forms::{reduced_forms, QuadForm};
use super::matrix::{coset_reps, IntMatrix2};
use super::Rational;
use crate::error::{Error, Result};
use crate::exec::{try_map_tasks, Execution};

/// Guard on `N` so that `4N` and `t²` stay exact.
pub const MAX_FIXED_POINT_DET: u64 = 1 << 50;
/// Largest `p^n` for which [`fixed_point_measure`] enumerates fixed points.
pub const FIXED_POINT_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ContentFilter {
    All,
    /// Keeps matrices whose content is prime to `p` (the primitive part of `T_{p^j}`).
    PrimeToP(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticFixedPoint {
    pub det: u64,
    pub trace: i64,
    pub form: QuadForm,
    pub matrix: IntMatrix2,
    pub content: i64,
    /// Inverse stabilizer order: 1, 1/2 at `i`, 1/3 at `e^{2πi/3}`.
    pub weight: Rational,
    pub x: f64,
    pub y: f64,
}

impl EllipticFixedPoint {
    /// `-b / 2a`.
    pub fn x_exact(&self) -> Rational {
        Rational::new(-(self.form.b as i128), 2 * self.form.a as i128)
    }

    /// `(4N − t²) / 4a²`.
    pub fn y_squared_exact(&self) -> Rational {
        let a = self.form.a as i128;
        Rational::new(-self.form.discriminant(), 4 * a * a)
    }
}

/// Every elliptic fixed point of determinant `n`, ordered by trace, then form.
pub fn elliptic_fixed_points(n: u64, filter: ContentFilter) -> Result<Vec<EllipticFixedPoint>> {
    elliptic_fixed_points_with(n, filter, Execution::default())
}

pub fn elliptic_fixed_points_with(
    n: u64,
    filter: ContentFilter,
    execution: Execution,
) -> Result<Vec<EllipticFixedPoint>> {
    if n == 0 {
        return Err(Error::InvalidArgument("determinant must be positive".into()));
    }
    if n > MAX_FIXED_POINT_DET {
        return Err(Error::Overflow(format!("4·{n}")));
    }
    let four_n = 4 * n as i64;
    let mut tmax = (four_n as f64).sqrt() as i64;
    while tmax * tmax >= four_n {
        tmax -= 1;
    }
    while (tmax + 1) * (tmax + 1) < four_n {
        tmax += 1;
    }
    let tasks = (2 * tmax + 1) as usize;
    let per_trace = try_map_tasks(execution, tasks, |i| -> Result<Vec<EllipticFixedPoint>> {
        let t = i as i64 - tmax;
        let disc = t * t - four_n;
        let mut out = Vec::new();
        for form in reduced_forms(disc)? {
            let matrix = IntMatrix2 { a: (t - form.b) / 2, b: -form.c, c: form.a, d: (t + form.b) / 2 };
            debug_assert_eq!(matrix.det(), n as i128);
            let content = matrix.content();
            if let ContentFilter::PrimeToP(p) = filter {
                if content.gcd(&(p as i64)) != 1 {
                    continue;
                }
            }
            let (x, y) = form.root();
            out.push(EllipticFixedPoint { det: n, trace: t, form, matrix, content, weight: form.weight(), x, y });
        }
        Ok(out)
    })?;
    Ok(per_trace.into_iter().flatten().collect())
}

/// Fixed points of the primitive part of `T_{p^j}` inside `T_p^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelFixedPoints {
    pub level: u32,
    pub multiplicity: u64,
    pub points: Vec<EllipticFixedPoint>,
    /// `Σ weight` over `points` (one copy, not multiplied by the multiplicity).
    pub weighted: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointMeasure {
    pub decomposition: PowerDecomposition,
    /// Levels `j ≥ 1`; level 0 acts as the identity and has no isolated fixed point.
    pub levels: Vec<LevelFixedPoints>,
    /// `Σ_j m_{n,j} · Fix(T_{p^j}^prim) / (p+1)^n`.
    pub ratio: Rational,
}

impl FixedPointMeasure {
    /// Incidences counted with multiplicity but without orbifold weights.
    pub fn unweighted_count(&self) -> u64 {
        self.levels.iter().map(|l| l.multiplicity * l.points.len() as u64).sum()
    }

    pub fn weighted_total(&self) -> Rational {
        self.levels.iter().map(|l| l.weighted * Rational::from_integer(l.multiplicity as i128)).sum()
    }

    /// `(x, y, multiplicity·weight)` for every point.
    pub fn weighted_points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.levels.iter().flat_map(|l| {
            l.points.iter().map(move |pt| {
                let w = pt.weight * Rational::from_integer(l.multiplicity as i128);
                (pt.x, pt.y, *w.numer() as f64 / *w.denom() as f64)
            })
        })
    }
}

pub fn fixed_point_measure(p: u64, n: u32) -> Result<FixedPointMeasure> {
    coset_reps(p)?;
    match p.checked_pow(n) {
        Some(v) if v <= FIXED_POINT_BUDGET => {}
        _ => return Err(Error::Budget { needed: format!("{p}^{n}"), limit: FIXED_POINT_BUDGET.to_string() }),
    }
    let decomposition = power_decomposition(p, n, Method::Composed)?;
    let mut levels = Vec::new();
    for (&j, &m) in decomposition.multiplicities.iter().filter(|(&j, _)| j >= 1) {
        let points = elliptic_fixed_points(p.pow(j), ContentFilter::PrimeToP(p))?;
        let weighted = points.iter().map(|pt| pt.weight).sum();
        levels.push(LevelFixedPoints { level: j, multiplicity: m, points, weighted });
    }
    let mut out = FixedPointMeasure { decomposition, levels, ratio: Rational::from_integer(0) };
    out.ratio = out.weighted_total() / Rational::from_integer(out.decomposition.degree() as i128);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::forms::hurwitz;
    use crate::hecke::matrix::{classify, Classification};

    fn weighted(n: u64, filter: ContentFilter) -> Rational {
        elliptic_fixed_points(n, filter).unwrap().iter().map(|p| p.weight).sum()
    }

    #[test]
    fn total_matches_hurwitz_sum() {
        for n in 1..=60u64 {
            let want: Rational = (-(2 * n as i64 - 1)..=(2 * n as i64 - 1))
                .filter(|t| t * t < 4 * n as i64)
                .map(|t| hurwitz(4 * n - (t * t) as u64).unwrap())
                .sum();
            assert_eq!(weighted(n, ContentFilter::All), want, "N = {n}");
        }
    }

    #[test]
    fn primitive_counts_for_powers_of_two() {
        let want = [4, 9, 20, 42, 88, 180, 368, 744, 1504, 3024];
        for (j, &w) in want.iter().enumerate() {
            let n = 1u64 << (j + 1);
            assert_eq!(weighted(n, ContentFilter::PrimeToP(2)), Rational::from_integer(w), "j = {}", j + 1);
        }
        assert_eq!(weighted(4, ContentFilter::All), Rational::new(61, 6));
    }

    #[test]
    fn points_are_fixed_and_elliptic() {
        for n in [2u64, 5, 12, 37] {
            for pt in elliptic_fixed_points(n, ContentFilter::All).unwrap() {
                assert_eq!(pt.matrix.det(), n as i128);
                assert_eq!(pt.matrix.trace(), pt.trace as i128);
                assert_eq!(classify(&pt.matrix).0, Classification::Elliptic);
                let (fx, fy) = pt.matrix.act(pt.x, pt.y);
                assert!((fx - pt.x).abs() < 1e-9 && (fy - pt.y).abs() < 1e-9, "{pt:?}");
                let x = pt.x_exact();
                assert!((*x.numer() as f64 / *x.denom() as f64 - pt.x).abs() < 1e-15);
                let y2 = pt.y_squared_exact();
                assert!((*y2.numer() as f64 / *y2.denom() as f64 - pt.y * pt.y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn form_matrix_roundtrip() {
        // The matrix determines the form: a = c₂₁, b = d − a₁₁, c = −b₁₂.
        for pt in elliptic_fixed_points(30, ContentFilter::All).unwrap() {
            let m = pt.matrix;
            assert_eq!(QuadForm { a: m.c, b: m.d - m.a, c: -m.b }, pt.form);
            assert_eq!(m.a + m.d, pt.trace);
        }
    }

    #[test]
    fn frozen_measure_ratios() {
        let cases = [(1, (4, 3)), (2, (1, 1)), (3, (40, 27)), (5, (384, 243)), (7, (3616, 2187))];
        for (n, (num, den)) in cases {
            let m = fixed_point_measure(2, n).unwrap();
            assert_eq!(m.ratio, Rational::new(num, den), "n = {n}");
        }
    }

    #[test]
    fn weighted_points_sum_to_total() {
        let m = fixed_point_measure(3, 4).unwrap();
        let s: f64 = m.weighted_points().map(|(_, _, w)| w).sum();
        let t = m.weighted_total();
        assert!((s - *t.numer() as f64 / *t.denom() as f64).abs() < 1e-9);
        assert!(m.levels.iter().all(|l| l.level >= 1));
    }

    #[test]
    fn guards() {
        assert!(matches!(elliptic_fixed_points(MAX_FIXED_POINT_DET + 1, ContentFilter::All), Err(Error::Overflow(_))));
        assert!(fixed_point_measure(2, 21).unwrap_err().is_budget());
        assert_eq!(fixed_point_measure(6, 1), Err(Error::NotPrime(6)));
    }

    #[test]
    fn parallel_matches_sequential() {
        let a = elliptic_fixed_points_with(1000, ContentFilter::PrimeToP(5), Execution::Sequential).unwrap();
        let b = elliptic_fixed_points_with(1000, ContentFilter::PrimeToP(5), Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
