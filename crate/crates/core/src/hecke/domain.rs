//! The standard fundamental domain `F = {|x| ≤ 1/2, |z| ≥ 1}`, cells in it,
//! and Hecke orbits of a point.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use super::decomposition::{power_decomposition, primitive_degree, Method, PowerDecomposition};
use super::matrix::{coset_reps, CosetClass};
use crate::error::{Error, Result};
use crate::report::CellRow;

pub const MAX_REDUCTION_STEPS: usize = 10_000;
/// Largest number of orbit points [`hecke_orbit`] will produce.
pub const ORBIT_BUDGET: u64 = 10_000_000;

/// Maps `x + iy` into `F` by translations and `z ↦ −1/z`. The result is
/// canonical: `x ∈ [−1/2, 1/2)`, and on the unit circle `x ≤ 0`.
pub fn reduce_to_f(x: f64, y: f64) -> Result<(f64, f64)> {
    if !x.is_finite() || !y.is_finite() || y <= 1e-12 {
        return Err(Error::InvalidArgument(format!("({x}, {y}) is not in the upper half plane")));
    }
    let (mut x, mut y) = (x, y);
    for _ in 0..MAX_REDUCTION_STEPS {
        x -= (x + 0.5).floor();
        let r2 = x * x + y * y;
        if r2 < 1.0 - 1e-12 {
            x = -x / r2;
            y /= r2;
            continue;
        }
        if (r2 - 1.0).abs() <= 1e-12 && x > 0.0 {
            x = -x;
        }
        // Adding +0.0 turns a negative zero into +0.0.
        return Ok((x + 0.0, y));
    }
    Err(Error::NonTermination(MAX_REDUCTION_STEPS))
}

/// A region of `F` whose hyperbolic probability measure is known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FundDomainCell {
    /// `[x1, x2) × [y1, y2)` inside the strip `y ≥ 1`; `y2` may be `∞`.
    Rect {
        x1: f64,
        x2: f64,
        y1: f64,
        y2: f64,
    },
    /// The part of `F` below `y = 1`.
    BelowHeightOne,
    Whole,
}

impl FundDomainCell {
    pub fn rect(x1: f64, x2: f64, y1: f64, y2: f64) -> Result<Self> {
        if !(-0.5 <= x1 && x1 < x2 && x2 <= 0.5 && 1.0 <= y1 && y1 < y2) {
            return Err(Error::InvalidArgument(format!("cell [{x1}, {x2}) × [{y1}, {y2})")));
        }
        Ok(FundDomainCell::Rect { x1, x2, y1, y2 })
    }

    /// Assumes `(x, y)` already reduced into `F`.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            FundDomainCell::Rect { x1, x2, y1, y2 } => {
                // The right edge of the strip is closed for the last column.
                let right = if x2 >= 0.5 { x <= x2 } else { x < x2 };
                x1 <= x && right && y1 <= y && y < y2
            }
            FundDomainCell::BelowHeightOne => y < 1.0,
            FundDomainCell::Whole => true,
        }
    }

    /// Normalized so that `F` has measure 1 (`dx dy / y²` over `π/3`).
    pub fn measure(&self) -> f64 {
        match *self {
            FundDomainCell::Rect { x1, x2, y1, y2 } => 3.0 / PI * (x2 - x1) * (1.0 / y1 - 1.0 / y2),
            FundDomainCell::BelowHeightOne => 1.0 - 3.0 / PI,
            FundDomainCell::Whole => 1.0,
        }
    }
}

impl fmt::Display for FundDomainCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FundDomainCell::Rect { x1, x2, y1, y2 } => write!(f, "x[{x1},{x2})y[{y1},{y2})"),
            FundDomainCell::BelowHeightOne => write!(f, "y<1"),
            FundDomainCell::Whole => write!(f, "F"),
        }
    }
}

pub fn cell_measure(cell: &FundDomainCell) -> f64 {
    cell.measure()
}

/// `y ≥ 2`, four equal columns of `1 ≤ y < 2`, and the part below `y = 1`.
pub fn default_cells() -> Vec<FundDomainCell> {
    grid_cells(4, &[2.0]).expect("valid grid")
}

/// `x_slices` equal columns between consecutive `y` breaks (starting at 1),
/// one unsliced cell above the last break, and the part below `y = 1`.
pub fn grid_cells(x_slices: usize, y_breaks: &[f64]) -> Result<Vec<FundDomainCell>> {
    if x_slices == 0 {
        return Err(Error::InvalidArgument("at least one x slice".into()));
    }
    let mut ys = vec![1.0];
    for &y in y_breaks {
        if !y.is_finite() || y <= *ys.last().unwrap() {
            return Err(Error::InvalidArgument(format!("y breaks must increase from 1: {y_breaks:?}")));
        }
        ys.push(y);
    }
    let top = *ys.last().unwrap();
    let mut cells = vec![FundDomainCell::rect(-0.5, 0.5, top, f64::INFINITY)?];
    for w in ys.windows(2) {
        for k in 0..x_slices {
            let x1 = -0.5 + k as f64 / x_slices as f64;
            let x2 = if k + 1 == x_slices { 0.5 } else { -0.5 + (k + 1) as f64 / x_slices as f64 };
            cells.push(FundDomainCell::rect(x1, x2, w[0], w[1])?);
        }
    }
    cells.push(FundDomainCell::BelowHeightOne);
    Ok(cells)
}

fn check_partition(cells: &[FundDomainCell]) -> Result<()> {
    if cells.len() == 1 && cells[0] == FundDomainCell::Whole {
        return Ok(());
    }
    if cells.contains(&FundDomainCell::Whole) {
        return Err(Error::NotAPartition("the whole domain overlaps every other cell".into()));
    }
    if cells.iter().filter(|c| **c == FundDomainCell::BelowHeightOne).count() > 1 {
        return Err(Error::NotAPartition("repeated cell y<1".into()));
    }
    let rects: Vec<_> = cells
        .iter()
        .filter_map(|c| match *c {
            FundDomainCell::Rect { x1, x2, y1, y2 } => Some((x1, x2, y1, y2)),
            _ => None,
        })
        .collect();
    for (i, a) in rects.iter().enumerate() {
        for b in &rects[i + 1..] {
            if a.0 < b.1 && b.0 < a.1 && a.2 < b.3 && b.2 < a.3 {
                return Err(Error::NotAPartition(format!("{a:?} overlaps {b:?}")));
            }
        }
    }
    let total: f64 = cells.iter().map(FundDomainCell::measure).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotAPartition(format!("cells cover measure {total}")));
    }
    Ok(())
}

/// Compares `Σ weight / normalizer` in each cell with `s · measure`. Points
/// must already lie in `F`; every point must land in exactly one cell.
pub fn cell_report<I>(points: I, cells: &[FundDomainCell], normalizer: f64, s: f64) -> Result<Vec<CellRow>>
where
    I: IntoIterator<Item = (f64, f64, f64)>,
{
    check_partition(cells)?;
    if normalizer.is_nan() || normalizer <= 0.0 {
        return Err(Error::InvalidArgument(format!("normalizer {normalizer}")));
    }
    let mut sums = vec![crate::sum::CompensatedSum::new(); cells.len()];
    for (x, y, w) in points {
        let mut hit = cells.iter().enumerate().filter(|(_, c)| c.contains(x, y));
        match (hit.next(), hit.next()) {
            (Some((i, _)), None) => sums[i].add(w),
            (None, _) => return Err(Error::NotAPartition(format!("({x}, {y}) is in no cell"))),
            _ => return Err(Error::NotAPartition(format!("({x}, {y}) is in several cells"))),
        }
    }
    Ok(cells
        .iter()
        .zip(&sums)
        .map(|(c, acc)| {
            let measure = c.measure();
            let empirical = acc.value() / normalizer;
            let reference = s * measure;
            CellRow { cell: c.to_string(), measure, empirical, reference, residual: empirical - reference }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitPoint {
    pub level: u32,
    pub coset: CosetClass,
    pub x: f64,
    pub y: f64,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeckeOrbit {
    pub decomposition: PowerDecomposition,
    pub z0: (f64, f64),
    /// Reduced into `F`, ordered by level, then coset.
    pub points: Vec<OrbitPoint>,
}

impl HeckeOrbit {
    pub fn total_weight(&self) -> u64 {
        self.points.iter().map(|p| p.multiplicity).sum()
    }

    pub fn weighted_points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.points.iter().map(|p| (p.x, p.y, p.multiplicity as f64))
    }
}

/// The `(p+1)^n` images of `z0` under `T_p^n`, aggregated by primitive coset.
pub fn hecke_orbit(p: u64, n: u32, z0: (f64, f64)) -> Result<HeckeOrbit> {
    coset_reps(p)?;
    reduce_to_f(z0.0, z0.1)?;
    let top = p.checked_pow(n).map(|_| primitive_degree(p, n)).unwrap_or(u64::MAX);
    if top > ORBIT_BUDGET {
        return Err(Error::Budget { needed: format!("{top} cosets"), limit: ORBIT_BUDGET.to_string() });
    }
    let decomposition = power_decomposition(p, n, Method::Composed)?;
    let mut points = Vec::new();
    for (&j, &m) in &decomposition.multiplicities {
        for coset in primitive_cosets(p, j) {
            let (x, y) = coset.act(z0.0, z0.1);
            let (x, y) = reduce_to_f(x, y)?;
            points.push(OrbitPoint { level: j, coset, x, y, multiplicity: m });
        }
    }
    Ok(HeckeOrbit { decomposition, z0, points })
}

/// `[[p^k, β], [0, p^{j−k}]]` with `0 ≤ β < p^{j−k}` and content 1.
pub fn primitive_cosets(p: u64, j: u32) -> Vec<CosetClass> {
    let p = p as i64;
    let mut out = Vec::new();
    for k in 0..=j {
        let alpha = p.pow(k);
        let delta = p.pow(j - k);
        for beta in 0..delta {
            let c = CosetClass { alpha, beta, delta };
            if c.is_primitive() {
                out.push(c);
            }
        }
    }
    out
}
