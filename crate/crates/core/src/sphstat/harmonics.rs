//! Real spherical harmonics, orthonormal against the uniform probability
//! measure on the sphere (so `Y_00 ≡ 1` and `Y_10 = √3·cos θ`).
//!
//! Associated Legendre functions carry the Condon–Shortley phase. The
//! recurrence runs on `q_l^m = N_lm P_l^m(cos θ) / sin^m θ`, with the
//! `sin^m θ · (cos mφ, sin mφ)` factor taken from `(x + iy)^m` so no angles
//! are ever formed.

use crate::rotor::SpherePoint;

pub const MAX_DEGREE: usize = 64;

/// Flat index of `(l, m)`, `-l ≤ m ≤ l`.
#[inline]
pub fn index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealHarmonics {
    lmax: usize,
    /// `-sqrt((2m+1)/(2m))`, the diagonal step.
    diag: Vec<f64>,
    /// Three-term coefficients `a_lm`, `b_lm` at `index(l, m)` for `m ≥ 0`.
    a: Vec<f64>,
    b: Vec<f64>,
}

impl RealHarmonics {
    pub fn new(lmax: usize) -> Self {
        assert!(lmax <= MAX_DEGREE, "degree {lmax} above {MAX_DEGREE}");
        let size = (lmax + 1) * (lmax + 1);
        let mut diag = vec![0.0; lmax + 1];
        let mut a = vec![0.0; size];
        let mut b = vec![0.0; size];
        for (m, d) in diag.iter_mut().enumerate().skip(1) {
            *d = -(((2 * m + 1) as f64) / ((2 * m) as f64)).sqrt();
        }
        for m in 0..=lmax {
            for l in (m + 2)..=lmax {
                let (lf, mf) = (l as f64, m as f64);
                a[index(l, m as i64)] = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let l1 = lf - 1.0;
                b[index(l, m as i64)] = ((l1 * l1 - mf * mf) / (4.0 * l1 * l1 - 1.0)).sqrt();
            }
        }
        RealHarmonics { lmax, diag, a, b }
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn len(&self) -> usize {
        (self.lmax + 1) * (self.lmax + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Writes `Y_lm(v)` to `out[index(l, m)]`.
    pub fn eval(&self, v: &SpherePoint, out: &mut [f64]) {
        debug_assert!(out.len() >= self.len());
        let x = v.uz;
        let sqrt2 = std::f64::consts::SQRT_2;
        // (ux + i uy)^m = sin^m θ · e^{imφ}
        let (mut re, mut im) = (1.0, 0.0);
        let mut qmm = 1.0;
        for m in 0..=self.lmax {
            if m > 0 {
                let (r, i) = (re * v.ux - im * v.uy, re * v.uy + im * v.ux);
                re = r;
                im = i;
                qmm *= self.diag[m];
            }
            let mut q_prev = qmm;
            self.store(out, m, m, q_prev, re, im, sqrt2);
            if m < self.lmax {
                let mut q = x * ((2 * m + 3) as f64).sqrt() * qmm;
                self.store(out, m + 1, m, q, re, im, sqrt2);
                for l in (m + 2)..=self.lmax {
                    let k = index(l, m as i64);
                    let next = self.a[k] * (x * q - self.b[k] * q_prev);
                    q_prev = q;
                    q = next;
                    self.store(out, l, m, q, re, im, sqrt2);
                }
            }
        }
    }

    #[inline(always)]
    #[allow(clippy::too_many_arguments)]
    fn store(&self, out: &mut [f64], l: usize, m: usize, q: f64, re: f64, im: f64, sqrt2: f64) {
        if m == 0 {
            out[index(l, 0)] = q;
        } else {
            out[index(l, m as i64)] = sqrt2 * q * re;
            out[index(l, -(m as i64))] = sqrt2 * q * im;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn eval(l: usize, v: &SpherePoint) -> Vec<f64> {
        let h = RealHarmonics::new(l);
        let mut out = vec![0.0; h.len()];
        h.eval(v, &mut out);
        out
    }

    fn point(theta: f64, phi: f64) -> SpherePoint {
        SpherePoint { ux: theta.sin() * phi.cos(), uy: theta.sin() * phi.sin(), uz: theta.cos() }
    }

    #[test]
    fn low_degree_closed_forms() {
        for &(theta, phi) in &[(0.3, 1.1), (2.0, -2.5), (PI / 2.0, 0.7), (0.0, 0.0)] {
            let v = point(theta, phi);
            let y = eval(2, &v);
            let (x, yv, z) = (v.ux, v.uy, v.uz);
            let s3 = 3f64.sqrt();
            let s15 = 15f64.sqrt();
            assert!((y[index(0, 0)] - 1.0).abs() < 1e-14);
            assert!((y[index(1, 0)] - s3 * z).abs() < 1e-14);
            assert!((y[index(1, 1)] + s3 * x).abs() < 1e-14);
            assert!((y[index(1, -1)] + s3 * yv).abs() < 1e-14);
            assert!((y[index(2, 0)] - 5f64.sqrt() * (3.0 * z * z - 1.0) / 2.0).abs() < 1e-13);
            assert!((y[index(2, 1)] + s15 * x * z).abs() < 1e-13);
            assert!((y[index(2, -1)] + s15 * yv * z).abs() < 1e-13);
            assert!((y[index(2, 2)] - s15 / 2.0 * (x * x - yv * yv)).abs() < 1e-13);
            assert!((y[index(2, -2)] - s15 * x * yv).abs() < 1e-13);
        }
    }

    #[test]
    fn north_pole_y10_is_sqrt3() {
        let y = eval(1, &SpherePoint::NORTH);
        assert!((y[index(1, 0)] - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn addition_theorem() {
        // Σ_m Y_lm(v)² = 2l + 1 for every v.
        let y = eval(20, &point(1.234, 0.567));
        for l in 0..=20 {
            let s: f64 = (-(l as i64)..=l as i64).map(|m| y[index(l, m)].powi(2)).sum();
            assert!((s - (2 * l + 1) as f64).abs() < 1e-9 * (2 * l + 1) as f64, "l={l}: {s}");
        }
    }

    #[test]
    fn orthonormal_under_quadrature() {
        // Midpoint rule in cos θ, trapezoid rule in φ (exact for
        // trigonometric polynomials of degree below the node count).
        let lmax = 6;
        let h = RealHarmonics::new(lmax);
        let n = h.len();
        let mut gram = vec![0.0; n * n];
        let (nz, nphi) = (8000, 32);
        let mut y = vec![0.0; n];
        for i in 0..nz {
            let z = -1.0 + (i as f64 + 0.5) * 2.0 / nz as f64;
            let s = (1.0 - z * z).sqrt();
            for j in 0..nphi {
                let phi = 2.0 * PI * j as f64 / nphi as f64;
                h.eval(&SpherePoint { ux: s * phi.cos(), uy: s * phi.sin(), uz: z }, &mut y);
                let w = 1.0 / (nz * nphi) as f64;
                for a in 0..n {
                    for b in 0..n {
                        gram[a * n + b] += w * y[a] * y[b];
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a * n + b] - want).abs() < 1e-5, "({a},{b}) = {}", gram[a * n + b]);
            }
        }
    }

    #[test]
    fn parity() {
        let v = point(0.77, 2.9);
        let (a, b) = (eval(12, &v), eval(12, &-v));
        for l in 0..=12usize {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            for m in -(l as i64)..=l as i64 {
                assert!((b[index(l, m)] - sign * a[index(l, m)]).abs() < 1e-11);
            }
        }
    }
}
