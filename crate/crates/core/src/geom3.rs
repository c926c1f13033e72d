//! Vectors, oriented axis lines, cylindrical coordinates about an axis, and
//! rigid motions.
//!
//! Angles are radians and right-handed about the oriented axis direction.
//! They are never reduced modulo 2π on input.

use std::f64::consts::TAU;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative factor of the geometric tolerance.
pub const EPS_REL: f64 = 1e-9;

/// Allowed deviation of an axis direction from unit length.
pub const AXIS_NORM_TOL: f64 = 1e-12;

/// Orthonormality drift that triggers re-orthonormalization.
pub const DRIFT_TOL: f64 = 1e-12;

/// Compositions after which a motion is re-orthonormalized regardless of drift.
pub const RENORM_PERIOD: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Points and displacement vectors share one representation.
pub type Point3 = Vec3;

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self * (1.0 / self.norm())
    }

    pub fn dist(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_abs_diff(self, o: Vec3) -> f64 {
        (self.x - o.x)
            .abs()
            .max((self.y - o.y).abs())
            .max((self.z - o.z).abs())
    }

    pub fn lerp(self, o: Vec3, t: f64) -> Vec3 {
        self + (o - self) * t
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Scale-aware tolerance: `1e-9 * max(1, bounding-box diagonal)` of `points`.
pub fn tolerance_for<I: IntoIterator<Item = Point3>>(points: I) -> f64 {
    let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = -lo;
    let mut any = false;
    for p in points {
        any = true;
        lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
        hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
    }
    let diag = if any { (hi - lo).norm() } else { 0.0 };
    EPS_REL * diag.max(1.0)
}

/// An oriented line: every point `origin + s * direction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisLine {
    origin: Point3,
    direction: Vec3,
    // Right-handed frame (e1, e2, direction) used for cylindrical angles.
    e1: Vec3,
    e2: Vec3,
}

impl AxisLine {
    pub fn new(origin: Point3, direction: Vec3) -> Result<Self> {
        if !origin.is_finite() || !direction.is_finite() {
            return Err(Error::NonFinite("axis"));
        }
        let n = direction.norm();
        if (n - 1.0).abs() > AXIS_NORM_TOL {
            return Err(Error::InvalidAxis(n));
        }
        // Pick the coordinate axis least aligned with the direction; ties go
        // to x, then y, so that the z-axis gets the frame (x, y, z).
        let (ax, ay, az) = (direction.x.abs(), direction.y.abs(), direction.z.abs());
        let helper = if ax <= ay && ax <= az {
            Vec3::X
        } else if ay <= az {
            Vec3::Y
        } else {
            Vec3::Z
        };
        let e1 = (helper - direction * helper.dot(direction)).normalized();
        let e2 = direction.cross(e1);
        Ok(AxisLine {
            origin,
            direction,
            e1,
            e2,
        })
    }

    /// Line through `from` and `to`, oriented from `from` towards `to`.
    pub fn through(from: Point3, to: Point3) -> Result<Self> {
        let d = to - from;
        let n = d.norm();
        if n.is_nan() || n <= 0.0 {
            return Err(Error::InvalidAxis(n));
        }
        AxisLine::new(from, d * (1.0 / n))
    }

    pub fn z_axis() -> Self {
        AxisLine::new(Vec3::ZERO, Vec3::Z).expect("unit axis")
    }

    pub fn origin(&self) -> Point3 {
        self.origin
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    /// The frame `(e1, e2)` spanning the plane normal to the axis.
    pub fn frame(&self) -> (Vec3, Vec3) {
        (self.e1, self.e2)
    }

    /// Signed height along the axis and in-plane coordinates of `p`.
    pub fn local(&self, p: Point3) -> (f64, f64, f64) {
        let r = p - self.origin;
        (r.dot(self.e1), r.dot(self.e2), r.dot(self.direction))
    }

    pub fn distance_to(&self, p: Point3) -> f64 {
        let (a, b, _) = self.local(p);
        a.hypot(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylCoord {
    pub radius: f64,
    /// In `[0, 2π)`; `0` when the radius is zero.
    pub angle: f64,
    pub height: f64,
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

pub fn to_cylindrical(axis: &AxisLine, p: Point3) -> CylCoord {
    let (a, b, h) = axis.local(p);
    let radius = a.hypot(b);
    let angle = if radius == 0.0 {
        0.0
    } else {
        wrap_angle(b.atan2(a))
    };
    CylCoord {
        radius,
        angle,
        height: h,
    }
}

pub fn from_cylindrical(axis: &AxisLine, c: CylCoord) -> Point3 {
    let (e1, e2) = axis.frame();
    let (s, co) = c.angle.sin_cos();
    axis.origin() + axis.direction() * c.height + e1 * (c.radius * co) + e2 * (c.radius * s)
}

type Mat3 = [[f64; 3]; 3];

const IDENTITY3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

fn mat_vec(a: &Mat3, v: Vec3) -> Vec3 {
    Vec3::new(
        a[0][0] * v.x + a[0][1] * v.y + a[0][2] * v.z,
        a[1][0] * v.x + a[1][1] * v.y + a[1][2] * v.z,
        a[2][0] * v.x + a[2][1] * v.y + a[2][2] * v.z,
    )
}

fn transpose(a: &Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t[j][i] = *v;
        }
    }
    t
}

/// A proper rigid motion `p ↦ R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    rotation: Mat3,
    translation: Vec3,
    since_renorm: u32,
}

impl Default for RigidMotion {
    fn default() -> Self {
        RigidMotion::IDENTITY
    }
}

impl RigidMotion {
    pub const IDENTITY: RigidMotion = RigidMotion {
        rotation: IDENTITY3,
        translation: Vec3::ZERO,
        since_renorm: 0,
    };

    pub fn translation(t: Vec3) -> Self {
        RigidMotion {
            translation: t,
            ..RigidMotion::IDENTITY
        }
    }

    pub fn rotation_matrix(&self) -> [[f64; 3]; 3] {
        self.rotation
    }

    pub fn translation_vector(&self) -> Vec3 {
        self.translation
    }

    pub fn is_identity(&self) -> bool {
        self.rotation == IDENTITY3 && self.translation == Vec3::ZERO
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        mat_vec(&self.rotation, p) + self.translation
    }

    /// Applies only the linear part (for direction vectors).
    pub fn apply_vector(&self, v: Vec3) -> Vec3 {
        mat_vec(&self.rotation, v)
    }

    pub fn inverse(&self) -> RigidMotion {
        let rt = transpose(&self.rotation);
        RigidMotion {
            rotation: rt,
            translation: -mat_vec(&rt, self.translation),
            since_renorm: self.since_renorm,
        }
    }

    /// `‖RᵀR − I‖∞`.
    pub fn orthonormality_drift(&self) -> f64 {
        let rtr = mat_mul(&transpose(&self.rotation), &self.rotation);
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((rtr[i][j] - IDENTITY3[i][j]).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        let r = &self.rotation;
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    }

    /// Gram-Schmidt on the rows, third row rebuilt as a cross product so the
    /// determinant stays +1.
    pub fn orthonormalize(&mut self) {
        let r = &self.rotation;
        let r0 = Vec3::from(r[0]).normalized();
        let r1 = Vec3::from(r[1]);
        let r1 = (r1 - r0 * r1.dot(r0)).normalized();
        let r2 = r0.cross(r1);
        self.rotation = [r0.into(), r1.into(), r2.into()];
        self.since_renorm = 0;
    }
}

/// Rotation by `phi` about `axis`, right-handed about its direction.
pub fn rotate_about_axis(axis: &AxisLine, phi: f64) -> RigidMotion {
    let d = axis.direction();
    let (s, c) = phi.sin_cos();
    let k = 1.0 - c;
    let rotation = [
        [c + k * d.x * d.x, k * d.x * d.y - s * d.z, k * d.x * d.z + s * d.y],
        [k * d.y * d.x + s * d.z, c + k * d.y * d.y, k * d.y * d.z - s * d.x],
        [k * d.z * d.x - s * d.y, k * d.z * d.y + s * d.x, c + k * d.z * d.z],
    ];
    let o = axis.origin();
    let translation = o - mat_vec(&rotation, o);
    RigidMotion {
        rotation,
        translation,
        since_renorm: 0,
    }
}

/// `outer ∘ inner`: applies `inner` first.
pub fn compose(outer: &RigidMotion, inner: &RigidMotion) -> RigidMotion {
    let mut out = RigidMotion {
        rotation: mat_mul(&outer.rotation, &inner.rotation),
        translation: mat_vec(&outer.rotation, inner.translation) + outer.translation,
        since_renorm: outer.since_renorm.max(inner.since_renorm) + 1,
    };
    if out.since_renorm >= RENORM_PERIOD || out.orthonormality_drift() > DRIFT_TOL {
        out.orthonormalize();
    }
    out
}
