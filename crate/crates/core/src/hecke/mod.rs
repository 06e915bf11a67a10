//! The Hecke correspondence `T_p` on `PSL(2,ℤ)\ℍ`.
//!
//! `Γ = PSL(2,ℤ)` has torsion, so this is an orbifold setting: fixed points
//! at `i` and at `e^{2πi/3}` are counted with weights `1/2` and `1/3`
//! (the Hurwitz convention). Every report says so in its notes.

pub mod decomposition;
pub mod domain;
pub mod fixed;
pub mod forms;
pub mod matrix;

use num_rational::Ratio;

pub use decomposition::{power_decomposition, power_decomposition_with, primitive_degree, Method, PowerDecomposition};
pub use domain::{
    cell_measure, cell_report, default_cells, grid_cells, hecke_orbit, primitive_cosets, reduce_to_f, FundDomainCell,
    HeckeOrbit, OrbitPoint,
};
pub use fixed::{
    elliptic_fixed_points, elliptic_fixed_points_with, fixed_point_measure, ContentFilter, EllipticFixedPoint,
    FixedPointMeasure, LevelFixedPoints,
};
pub use forms::{class_relation_check, hurwitz, reduced_forms, QuadForm};
pub use matrix::{classify, coset_reps, hnf, is_prime, Classification, CosetClass, IntMatrix2};

use crate::error::Result;
use crate::report::{HeckeExperiment, HeckeReport};

pub type Rational = Ratio<i128>;

pub const ORBIFOLD_NOTE: &str = "PSL(2,Z) has torsion: fixed points at i and e^(2 pi i/3) carry weights 1/2 and 1/3";

/// Fixed points of `T_p^n` against `2 · measure` in each cell.
pub fn fixed_point_report(p: u64, n: u32, cells: &[FundDomainCell]) -> Result<(HeckeReport, FixedPointMeasure)> {
    let m = fixed_point_measure(p, n)?;
    let degree = m.decomposition.degree();
    let rows = cell_report(m.weighted_points(), cells, degree as f64, 2.0)?;
    let mass = to_f64(m.ratio);
    let report = HeckeReport {
        kind: HeckeExperiment::FixedPoints,
        p,
        n,
        degree,
        decomposition: m.decomposition.multiplicities.clone(),
        ratio: m.ratio.to_string(),
        mass,
        unweighted_count: m.unweighted_count(),
        cells: rows,
        estimated_s: mass,
        notes: vec![ORBIFOLD_NOTE.to_string(), "level 0 acts trivially and is excluded".to_string()],
    };
    Ok((report, m))
}

/// Orbit of `z0` under `T_p^n` against `measure` in each cell.
pub fn orbit_report(p: u64, n: u32, z0: (f64, f64), cells: &[FundDomainCell]) -> Result<(HeckeReport, HeckeOrbit)> {
    let o = hecke_orbit(p, n, z0)?;
    let degree = o.decomposition.degree();
    let rows = cell_report(o.weighted_points(), cells, degree as f64, 1.0)?;
    let ratio = Rational::new(o.total_weight() as i128, degree as i128);
    let report = HeckeReport {
        kind: HeckeExperiment::Orbit,
        p,
        n,
        degree,
        decomposition: o.decomposition.multiplicities.clone(),
        ratio: ratio.to_string(),
        mass: to_f64(ratio),
        unweighted_count: o.points.len() as u64,
        cells: rows,
        estimated_s: to_f64(ratio),
        notes: vec![ORBIFOLD_NOTE.to_string()],
    };
    Ok((report, o))
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
