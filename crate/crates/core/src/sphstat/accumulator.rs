use serde::Serialize;

use super::harmonics::{index, RealHarmonics};
use crate::error::{Error, Result};
use crate::rotor::{characters_from_half_cos, SpherePoint, UnitQuaternion, MAX_CHARACTER_DEGREE};
use crate::sum::CompensatedSum;

/// Closed geodesic ball `B(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cap {
    pub center: SpherePoint,
    pub radius: f64,
}

impl Cap {
    pub fn new(center: SpherePoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= std::f64::consts::PI) {
            return Err(Error::InvalidArgument(format!("cap radius {radius} not in (0, π]")));
        }
        Ok(Cap { center, radius })
    }

    #[inline]
    pub fn contains(&self, v: &SpherePoint) -> bool {
        self.center.dot(v) >= self.radius.cos()
    }

    pub fn area(&self) -> f64 {
        cap_area(self.radius)
    }
}

/// Normalized measure `(1 - cos r)/2` of a cap of geodesic radius `r`.
pub fn cap_area(r: f64) -> f64 {
    (1.0 - r.cos()) / 2.0
}

/// Radii {0.25, 0.5, 1.0} around the north pole, `(1,0,0)` and `(1,1,1)/√3`.
pub fn default_caps() -> Vec<Cap> {
    let centers = [
        SpherePoint::NORTH,
        SpherePoint { ux: 1.0, uy: 0.0, uz: 0.0 },
        SpherePoint::normalized([1.0, 1.0, 1.0]).expect("nonzero"),
    ];
    centers.iter().flat_map(|&c| [0.25, 0.5, 1.0].map(|r| Cap { center: c, radius: r })).collect()
}

const MAX_BATCH: usize = 16;

/// Weighted empirical measure on the sphere, summarized by its Weyl sums
/// against real harmonics up to degree `lmax`, its mass in a fixed list of
/// caps and (optionally) character sums of group elements.
#[derive(Debug, Clone)]
pub struct SphericalAccumulator {
    harmonics: RealHarmonics,
    caps: Vec<Cap>,
    cap_cos: Vec<f64>,
    char_lmax: Option<usize>,
    total: CompensatedSum,
    count: u64,
    weyl: Vec<CompensatedSum>,
    cap_weights: Vec<CompensatedSum>,
    char_sums: Vec<CompensatedSum>,
    char_count: u64,
    scratch: Vec<f64>,
}

impl SphericalAccumulator {
    pub fn new(lmax: usize, caps: Vec<Cap>) -> Self {
        let harmonics = RealHarmonics::new(lmax);
        let len = harmonics.len();
        let cap_cos = caps.iter().map(|c| c.radius.cos()).collect();
        let cap_weights = vec![CompensatedSum::new(); caps.len()];
        SphericalAccumulator {
            harmonics,
            caps,
            cap_cos,
            char_lmax: None,
            total: CompensatedSum::new(),
            count: 0,
            weyl: vec![CompensatedSum::new(); len],
            cap_weights,
            char_sums: Vec::new(),
            char_count: 0,
            scratch: vec![0.0; len.max(MAX_CHARACTER_DEGREE + 1)],
        }
    }

    /// Also track sums of `χ_l` for `l ≤ char_lmax`.
    pub fn with_characters(mut self, char_lmax: usize) -> Self {
        assert!(char_lmax <= MAX_CHARACTER_DEGREE);
        self.char_lmax = Some(char_lmax);
        self.char_sums = vec![CompensatedSum::new(); char_lmax + 1];
        self
    }

    pub fn lmax(&self) -> usize {
        self.harmonics.lmax()
    }

    pub fn caps(&self) -> &[Cap] {
        &self.caps
    }

    pub fn char_lmax(&self) -> Option<usize> {
        self.char_lmax
    }

    pub fn accumulate(&mut self, v: &SpherePoint, weight: f64) {
        assert!(weight > 0.0, "weights must be positive");
        self.harmonics.eval(v, &mut self.scratch);
        for (s, &y) in self.weyl.iter_mut().zip(&self.scratch) {
            s.add(weight * y);
        }
        for ((cap, &cos_r), s) in self.caps.iter().zip(&self.cap_cos).zip(&mut self.cap_weights) {
            if cap.center.dot(v) >= cos_r {
                s.add(weight);
            }
        }
        self.total.add(weight);
        self.count += 1;
    }

    /// Adds `χ_l(q)` to the character sums. No-op unless characters are enabled.
    #[inline]
    pub fn accumulate_character(&mut self, q: &UnitQuaternion) {
        self.accumulate_character_half_cos(q.w.abs());
    }

    /// [`Self::accumulate_character`] given only `|w| = cos(θ/2)`.
    #[inline]
    pub fn accumulate_character_half_cos(&mut self, c: f64) {
        if let Some(lmax) = self.char_lmax {
            characters_from_half_cos(c, &mut self.scratch[..=lmax]);
            for (s, &c) in self.char_sums.iter_mut().zip(&self.scratch[..=lmax]) {
                s.add(c);
            }
            self.char_count += 1;
        }
    }

    /// Adds the characters of a small batch of elements given by their `|w|`.
    /// The batch is summed plainly before entering the compensated sums.
    #[inline]
    pub fn accumulate_character_batch(&mut self, cs: &[f64]) {
        let Some(lmax) = self.char_lmax else { return };
        let mut two_c = [0.0; MAX_BATCH];
        let mut u_prev = [0.0; MAX_BATCH];
        let mut u = [1.0; MAX_BATCH];
        for chunk in cs.chunks(MAX_BATCH) {
            let k = chunk.len();
            for (t, &c) in two_c.iter_mut().zip(chunk) {
                *t = 2.0 * c.min(1.0);
            }
            u_prev[..k].fill(0.0);
            u[..k].fill(1.0);
            for l in 0..=lmax {
                if l > 0 {
                    for _ in 0..2 {
                        for i in 0..k {
                            let next = two_c[i] * u[i] - u_prev[i];
                            u_prev[i] = u[i];
                            u[i] = next;
                        }
                    }
                }
                self.char_sums[l].add(u[..k].iter().sum());
            }
            self.char_count += k as u64;
        }
    }

    pub fn merge(&self, other: &SphericalAccumulator) -> Result<SphericalAccumulator> {
        let mut out = self.clone();
        out.merge_from(other)?;
        Ok(out)
    }

    pub fn merge_from(&mut self, other: &SphericalAccumulator) -> Result<()> {
        if self.lmax() != other.lmax() {
            return Err(Error::ConfigMismatch(format!("harmonic degree {} vs {}", self.lmax(), other.lmax())));
        }
        if self.caps != other.caps {
            return Err(Error::ConfigMismatch("cap lists differ".into()));
        }
        if self.char_lmax != other.char_lmax {
            return Err(Error::ConfigMismatch("character degrees differ".into()));
        }
        self.total.merge(&other.total);
        self.count += other.count;
        for (a, b) in self.weyl.iter_mut().zip(&other.weyl) {
            a.merge(b);
        }
        for (a, b) in self.cap_weights.iter_mut().zip(&other.cap_weights) {
            a.merge(b);
        }
        for (a, b) in self.char_sums.iter_mut().zip(&other.char_sums) {
            a.merge(b);
        }
        self.char_count += other.char_count;
        Ok(())
    }

    pub fn total_weight(&self) -> f64 {
        self.total.value()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn char_count(&self) -> u64 {
        self.char_count
    }

    pub fn weyl_sum(&self, l: usize, m: i64) -> f64 {
        self.weyl[index(l, m)].value()
    }

    /// Root-mean-square over `m` of the Weyl sums of the probability-normalized
    /// measure at degree `l`. Zero for all `l ≥ 1` under the uniform measure.
    pub fn weyl_rms(&self, l: usize) -> f64 {
        let total = self.total_weight();
        if total == 0.0 {
            return 0.0;
        }
        let li = l as i64;
        let ss: f64 = (-li..=li).map(|m| (self.weyl_sum(l, m) / total).powi(2)).sum();
        (ss / (2 * l + 1) as f64).sqrt()
    }

    pub fn cap_weight(&self, cap: usize) -> f64 {
        self.cap_weights[cap].value()
    }

    /// Cap weight divided by the experiment normalizer `d_n` (not by the mass).
    pub fn cap_fraction(&self, cap: usize, normalizer: f64) -> Result<f64> {
        if self.count == 0 || self.total_weight() <= 0.0 {
            return Err(Error::EmptyAccumulator);
        }
        let w = self.cap_weights.get(cap).ok_or_else(|| Error::InvalidArgument(format!("no cap with index {cap}")))?;
        Ok(w.value() / normalizer)
    }

    /// Average of `χ_l` over the accumulated group elements.
    pub fn char_average(&self, l: usize) -> Option<f64> {
        if self.char_count == 0 {
            return None;
        }
        self.char_sums.get(l).map(|s| s.value() / self.char_count as f64)
    }

    /// True when the measure is supported on a single antipodal pair `{u, -u}`
    /// (a point mass included). Uses the addition theorem at degree 2:
    /// `Σ_m (S_2m / total)² = 5` exactly in that case and less otherwise.
    pub fn is_single_axis(&self) -> bool {
        if self.lmax() < 2 || self.count == 0 {
            return false;
        }
        let total = self.total_weight();
        let s: f64 = (-2..=2).map(|m| (self.weyl_sum(2, m) / total).powi(2)).sum();
        s >= 5.0 * (1.0 - 1e-9)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn octahedron() -> Vec<SpherePoint> {
        let mut v = Vec::new();
        for i in 0..3 {
            for s in [1.0, -1.0] {
                let mut a = [0.0; 3];
                a[i] = s;
                v.push(SpherePoint::normalized(a).unwrap());
            }
        }
        v
    }

    /// Spherical Fibonacci lattice, a low-discrepancy point set.
    fn fibonacci(n: usize) -> Vec<SpherePoint> {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        (0..n)
            .map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = 2.0 * PI * (i as f64 / golden).fract();
                SpherePoint { ux: r * phi.cos(), uy: r * phi.sin(), uz: z }
            })
            .collect()
    }

    #[test]
    fn cap_areas() {
        assert!((cap_area(PI) - 1.0).abs() < 1e-15);
        assert!((cap_area(PI / 2.0) - 0.5).abs() < 1e-15);
        // (1 - cos 0.5)/2
        assert!((cap_area(0.5) - 0.061_208_719_054_813_6).abs() < 1e-15);
    }

    #[test]
    fn cap_area_matches_quadrature() {
        // ∫_0^r sin θ dθ / 2 by Simpson's rule.
        for r in [0.1, 0.5, 1.3, 2.9] {
            let n = 2000;
            let h = r / n as f64;
            let f = |t: f64| t.sin() / 2.0;
            let mut s = f(0.0) + f(r);
            for i in 1..n {
                s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            assert!((s * h / 3.0 - cap_area(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_radius_validation() {
        assert!(Cap::new(SpherePoint::NORTH, 0.0).is_err());
        assert!(Cap::new(SpherePoint::NORTH, 4.0).is_err());
        assert!(Cap::new(SpherePoint::NORTH, PI).is_ok());
    }

    #[test]
    fn north_pole_dirac() {
        let mut acc = SphericalAccumulator::new(2, vec![]);
        acc.accumulate(&SpherePoint::NORTH, 1.0);
        assert!((acc.weyl_sum(1, 0) - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(acc.weyl_sum(0, 0), acc.total_weight());
        assert!(acc.is_single_axis());
    }

    #[test]
    fn antipodal_pair_cancels_odd_degrees() {
        let mut acc = SphericalAccumulator::new(7, vec![]);
        let u = SpherePoint::normalized([0.3, -0.8, 0.2]).unwrap();
        acc.accumulate(&u, 1.0);
        acc.accumulate(&-u, 1.0);
        for l in (1..=7).step_by(2) {
            for m in -(l as i64)..=l as i64 {
                assert!(acc.weyl_sum(l, m).abs() < 1e-14);
            }
        }
        assert!(acc.is_single_axis());
    }

    #[test]
    fn rotated_octahedron_has_no_degree_one_component() {
        let r = UnitQuaternion::new(0.4, -0.1, 0.7, 0.3).unwrap();
        let mut acc = SphericalAccumulator::new(3, vec![]);
        for v in octahedron() {
            acc.accumulate(&r.act(&v), 1.0);
        }
        for m in -1..=1 {
            assert!(acc.weyl_sum(1, m).abs() < 1e-12);
        }
        assert!(!acc.is_single_axis());
    }

    #[test]
    fn merge_identity_counts_and_commutativity() {
        let caps = default_caps();
        let pts = fibonacci(8);
        let mut a = SphericalAccumulator::new(4, caps.clone());
        let mut b = SphericalAccumulator::new(4, caps.clone());
        for v in &pts[..3] {
            a.accumulate(v, 1.0);
        }
        for v in &pts[3..] {
            b.accumulate(v, 0.5);
        }
        let empty = SphericalAccumulator::new(4, caps.clone());
        let e_a = empty.merge(&a).unwrap();
        assert_eq!(e_a.count(), a.count());
        assert_eq!(e_a.weyl_sum(3, -2), a.weyl_sum(3, -2));
        let ab = a.merge(&b).unwrap();
        let ba = b.merge(&a).unwrap();
        assert_eq!(ab.count(), 8);
        for l in 0..=4usize {
            for m in -(l as i64)..=l as i64 {
                assert!((ab.weyl_sum(l, m) - ba.weyl_sum(l, m)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn merge_matches_single_pass() {
        let pts = fibonacci(5000);
        let mut whole = SphericalAccumulator::new(6, default_caps());
        for v in &pts {
            whole.accumulate(v, 1.0);
        }
        let mut merged = SphericalAccumulator::new(6, default_caps());
        for chunk in pts.chunks(377) {
            let mut part = SphericalAccumulator::new(6, default_caps());
            for v in chunk {
                part.accumulate(v, 1.0);
            }
            merged.merge_from(&part).unwrap();
        }
        for l in 0..=6usize {
            for m in -(l as i64)..=l as i64 {
                assert!((whole.weyl_sum(l, m) - merged.weyl_sum(l, m)).abs() < 1e-9);
            }
        }
        for c in 0..whole.caps().len() {
            assert!((whole.cap_weight(c) - merged.cap_weight(c)).abs() < 1e-9);
        }
    }

    #[test]
    fn merge_rejects_mismatched_configuration() {
        let a = SphericalAccumulator::new(4, vec![]);
        assert!(a.merge(&SphericalAccumulator::new(5, vec![])).is_err());
        assert!(a.merge(&SphericalAccumulator::new(4, default_caps())).is_err());
        assert!(a.merge(&SphericalAccumulator::new(4, vec![]).with_characters(2)).is_err());
    }

    #[test]
    fn cap_fraction_of_a_half_turn_axis() {
        let half = UnitQuaternion::new(0.0, 0.0, 0.0, 1.0).unwrap();
        let caps = vec![
            Cap::new(SpherePoint::NORTH, 0.1).unwrap(),
            Cap::new(SpherePoint { ux: 1.0, uy: 0.0, uz: 0.0 }, 0.1).unwrap(),
        ];
        let mut acc = SphericalAccumulator::new(2, caps);
        if let Some(pts) = half.fixed_point_set(1e-9).unwrap().isolated_points() {
            for p in pts {
                acc.accumulate(&p, 1.0);
            }
        }
        assert_eq!(acc.cap_fraction(0, 1.0).unwrap(), 1.0);
        assert_eq!(acc.cap_fraction(1, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn empty_accumulator_has_no_cap_fraction() {
        let acc = SphericalAccumulator::new(2, default_caps());
        assert_eq!(acc.cap_fraction(0, 1.0), Err(Error::EmptyAccumulator));
    }

    #[test]
    fn low_discrepancy_cloud_fills_caps_by_area() {
        let pts = fibonacci(1_000_000);
        let mut acc = SphericalAccumulator::new(0, default_caps());
        for v in &pts {
            acc.accumulate(v, 1.0);
        }
        for (i, cap) in acc.caps().to_vec().iter().enumerate() {
            let frac = acc.cap_fraction(i, pts.len() as f64).unwrap();
            assert!((frac / cap.area() - 1.0).abs() < 0.01, "cap {i}: {frac} vs {}", cap.area());
        }
    }

    #[test]
    fn character_sums() {
        let mut acc = SphericalAccumulator::new(0, vec![]).with_characters(3);
        acc.accumulate_character(&UnitQuaternion::IDENTITY);
        acc.accumulate_character(&UnitQuaternion::rz(PI));
        // χ_1: 3 and -1
        assert!((acc.char_average(1).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(acc.char_average(0), Some(1.0));
        assert_eq!(SphericalAccumulator::new(0, vec![]).char_average(1), None);
    }
}
