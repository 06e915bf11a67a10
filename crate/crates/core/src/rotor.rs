//! Rotations of the sphere as unit quaternions.
//!
//! `SO(3) = Sp(1)/{±1}`: a unit quaternion `q` and its negative describe the
//! same rotation. Every product is renormalized and brought to a canonical
//! sign so that results do not depend on the order in which long products
//! were associated.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Mul, Neg};

use serde::Serialize;

use crate::error::{Error, Result};

/// Rotation angle at or below which a rotation is treated as the identity.
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-9;

/// Maximum degree accepted by [`character`].
pub const MAX_CHARACTER_DEGREE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitQuaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Normalizes `(w, x, y, z)` and applies the canonical sign rule.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n < 1e-300 {
            return Err(Error::InvalidArgument(format!("quaternion ({w}, {x}, {y}, {z}) cannot be normalized")));
        }
        Ok(UnitQuaternion { w: w / n, x: x / n, y: y / n, z: z / n }.canonical())
    }

    /// Rotation by `angle` (right-handed) about `axis`.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if n < 1e-300 {
            return Err(Error::InvalidArgument("zero rotation axis".into()));
        }
        let (s, c) = (angle / 2.0).sin_cos();
        UnitQuaternion::new(c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n)
    }

    pub fn rx(angle: f64) -> Self {
        Self::from_axis_angle([1.0, 0.0, 0.0], angle).expect("unit axis")
    }

    pub fn ry(angle: f64) -> Self {
        Self::from_axis_angle([0.0, 1.0, 0.0], angle).expect("unit axis")
    }

    pub fn rz(angle: f64) -> Self {
        Self::from_axis_angle([0.0, 0.0, 1.0], angle).expect("unit axis")
    }

    pub fn conj(&self) -> Self {
        UnitQuaternion { w: self.w, x: -self.x, y: -self.y, z: -self.z }.canonical()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Picks the representative with `w > 0`, or on `w = 0` the one whose
    /// first nonzero component is positive.
    #[inline]
    pub fn canonical(self) -> Self {
        let flip = if self.w != 0.0 {
            self.w < 0.0
        } else if self.x != 0.0 {
            self.x < 0.0
        } else if self.y != 0.0 {
            self.y < 0.0
        } else {
            self.z < 0.0
        };
        if flip {
            -self
        } else {
            self
        }
    }

    /// Hamilton product without renormalization or sign fixing.
    #[inline(always)]
    fn hamilton(a: &Self, b: &Self) -> Self {
        UnitQuaternion {
            w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        }
    }

    /// `self` acting after `other`, i.e. `act(self·other, v) = act(self, act(other, v))`.
    #[inline]
    pub fn compose(&self, other: &Self) -> Self {
        let p = Self::hamilton(self, other);
        // The product of unit quaternions has |p|² = 1 + ε with ε a few ulps,
        // so (3 − |p|²)/2 equals 1/|p| up to O(ε²): no sqrt or division.
        let n2 = p.norm_sqr();
        debug_assert!((n2 - 1.0).abs() < 1e-12, "operands must be unit quaternions");
        let inv = 0.5 * (3.0 - n2);
        if p.w != 0.0 {
            // Branch-free sign fix; the sign of w is close to a coin flip.
            let s = inv.copysign(p.w);
            UnitQuaternion { w: p.w * s, x: p.x * s, y: p.y * s, z: p.z * s }
        } else {
            UnitQuaternion { w: 0.0, x: p.x * inv, y: p.y * inv, z: p.z * inv }.canonical()
        }
    }

    /// Rotates `v` by conjugation `q v q*`.
    pub fn act(&self, v: &SpherePoint) -> SpherePoint {
        let u = [self.x, self.y, self.z];
        let p = [v.ux, v.uy, v.uz];
        // v' = v + 2w (u × v) + 2 u × (u × v)
        let t = cross(&u, &p).map(|c| 2.0 * c);
        let ut = cross(&u, &t);
        let r = [p[0] + self.w * t[0] + ut[0], p[1] + self.w * t[1] + ut[1], p[2] + self.w * t[2] + ut[2]];
        SpherePoint::normalized(r).expect("rotation preserves norm")
    }

    /// SO(3) rotation angle in `[0, π]`.
    pub fn rotation_angle(&self) -> f64 {
        // atan2 keeps full precision near the identity, where acos(|w|) does not.
        let v = (self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        2.0 * v.atan2(self.w.abs())
    }

    /// `x² + y² + z² = sin²(θ/2)`.
    #[inline]
    pub fn vector_norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn fixed_point_set(&self, identity_tol: f64) -> Result<FixedPointSet> {
        if self.rotation_angle() <= identity_tol {
            return Ok(FixedPointSet::AllOfSphere);
        }
        let n = (self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        if n < 1e-300 {
            return Err(Error::Internal(format!(
                "rotation angle {} above tolerance but axis norm {n}",
                self.rotation_angle()
            )));
        }
        let u = SpherePoint { ux: self.x / n, uy: self.y / n, uz: self.z / n };
        Ok(FixedPointSet::IsolatedPair(u, -u))
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;

    fn mul(self, rhs: UnitQuaternion) -> UnitQuaternion {
        self.compose(&rhs)
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;

    fn neg(self) -> UnitQuaternion {
        UnitQuaternion { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
    }
}

impl fmt::Display for UnitQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.w, self.x, self.y, self.z)
    }
}

pub fn compose(q1: &UnitQuaternion, q2: &UnitQuaternion) -> UnitQuaternion {
    q1.compose(q2)
}

pub fn act(q: &UnitQuaternion, v: &SpherePoint) -> SpherePoint {
    q.act(v)
}

/// `sin²(tol/2)`: a rotation angle is at most `tol ∈ [0, π]` exactly when
/// [`UnitQuaternion::vector_norm_sqr`] is at most this value. Saves a
/// transcendental call per word in hot loops.
pub fn identity_threshold(tol: f64) -> f64 {
    if tol < 0.0 {
        -1.0
    } else if tol >= PI {
        f64::INFINITY
    } else {
        (tol / 2.0).sin().powi(2)
    }
}

pub fn rotation_angle(q: &UnitQuaternion) -> f64 {
    q.rotation_angle()
}

pub fn fixed_point_set(q: &UnitQuaternion, identity_tol: f64) -> Result<FixedPointSet> {
    q.fixed_point_set(identity_tol)
}

/// A point of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpherePoint {
    pub ux: f64,
    pub uy: f64,
    pub uz: f64,
}

impl SpherePoint {
    pub const NORTH: SpherePoint = SpherePoint { ux: 0.0, uy: 0.0, uz: 1.0 };

    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !n.is_finite() || n < 1e-300 {
            return Err(Error::InvalidArgument(format!("{v:?} is not a direction")));
        }
        Ok(SpherePoint { ux: v[0] / n, uy: v[1] / n, uz: v[2] / n })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.ux, self.uy, self.uz]
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.ux * other.ux + self.uy * other.uy + self.uz * other.uz
    }

    /// Great-circle distance in `[0, π]`.
    pub fn geodesic_distance(&self, other: &SpherePoint) -> f64 {
        let c = cross(&self.as_array(), &other.as_array());
        let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        s.atan2(self.dot(other))
    }
}

impl Neg for SpherePoint {
    type Output = SpherePoint;

    fn neg(self) -> SpherePoint {
        SpherePoint { ux: -self.ux, uy: -self.uy, uz: -self.uz }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixedPointSet {
    /// The identity rotation: every point is fixed, none is isolated.
    AllOfSphere,
    /// The two poles of the rotation axis, each of multiplicity one.
    IsolatedPair(SpherePoint, SpherePoint),
}

impl FixedPointSet {
    pub fn isolated_points(&self) -> Option<[SpherePoint; 2]> {
        match self {
            FixedPointSet::AllOfSphere => None,
            FixedPointSet::IsolatedPair(a, b) => Some([*a, *b]),
        }
    }

    pub fn isolated_count(&self) -> usize {
        match self {
            FixedPointSet::AllOfSphere => 0,
            FixedPointSet::IsolatedPair(..) => 2,
        }
    }
}

/// Character of the `(2l+1)`-dimensional irreducible representation of SO(3),
/// `χ_l(θ) = sin((2l+1)θ/2) / sin(θ/2)`.
pub fn character(q: &UnitQuaternion, l: usize) -> f64 {
    assert!(l <= MAX_CHARACTER_DEGREE, "character degree {l} above {MAX_CHARACTER_DEGREE}");
    let mut out = [0.0; MAX_CHARACTER_DEGREE + 1];
    characters_into(q, &mut out[..=l]);
    out[l]
}

/// Fills `out[l] = χ_l(q)` for `l = 0..out.len()`.
///
/// With `c = cos(θ/2) = |w|`, `χ_l = U_{2l}(c)` (Chebyshev polynomials of the
/// second kind), so no trigonometric calls are needed.
#[inline]
pub fn characters_into(q: &UnitQuaternion, out: &mut [f64]) {
    characters_from_half_cos(q.w.abs(), out);
}

/// [`characters_into`] from `c = cos(θ/2) = |w|` alone.
#[inline]
pub fn characters_from_half_cos(c: f64, out: &mut [f64]) {
    let two_c = 2.0 * c.min(1.0);
    let (mut u_prev, mut u) = (0.0, 1.0); // U_{-1}, U_0
    for (l, slot) in out.iter_mut().enumerate() {
        if l > 0 {
            for _ in 0..2 {
                let next = two_c * u - u_prev;
                u_prev = u;
                u = next;
            }
        }
        *slot = u;
    }
}

/// Closed-form character on a rotation angle; slower than [`character`].
pub fn character_of_angle(theta: f64, l: usize) -> f64 {
    let half = theta / 2.0;
    if half.sin().abs() < 1e-12 {
        return (2 * l + 1) as f64;
    }
    ((2 * l + 1) as f64 * half).sin() / half.sin()
}

#[inline]
fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Angle used in tests as a generic irrational rotation.
pub const GOLDEN_TURN: f64 = 2.0 * PI * 0.618_033_988_749_894_8;
