//! Rotation geometry: unit quaternions, shortest-arc interpolation and the
//! two direction charts of the receive hemisphere.
//!
//! Conventions: Hamilton product, scalar-first storage, right-handed frames.
//! The array lies in the x/y plane with broadside along +z. A direction with
//! azimuth θ and elevation ψ has unit vector
//! `(cos ψ sin θ, sin ψ, cos ψ cos θ)`, so its UV coordinates are simply the
//! x and y components of that vector.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A plain 3-vector used for direction unit vectors.
pub type Vec3 = [f64; 3];

fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Orientation or rotation, stored canonicalized so that `q` and `-q` compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitQuaternion {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Normalizes and canonicalizes the given components.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::ZeroQuaternion);
        }
        Ok(Self::canonical(w / n, x / n, y / n, z / n))
    }

    /// Rotation by `angle` radians about `axis` (need not be unit length).
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self> {
        let n = dot3(axis, axis).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidArgument("rotation axis has zero length".into()));
        }
        let (s, c) = (angle / 2.0).sin_cos();
        Self::new(c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n)
    }

    // w >= 0; when w == 0 the first nonzero vector component is made positive.
    fn canonical(w: f64, x: f64, y: f64, z: f64) -> Self {
        let flip = if w != 0.0 {
            w < 0.0
        } else if x != 0.0 {
            x < 0.0
        } else if y != 0.0 {
            y < 0.0
        } else {
            z < 0.0
        };
        if flip {
            UnitQuaternion { w: -w, x: -x, y: -y, z: -z }
        } else {
            UnitQuaternion { w, x, y, z }
        }
    }

    fn renormalized(w: f64, x: f64, y: f64, z: f64) -> Self {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        Self::canonical(w / n, x / n, y / n, z / n)
    }

    pub fn w(&self) -> f64 {
        self.w
    }
    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    /// `[w, x, y, z]`.
    pub fn components(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conjugate(&self) -> Self {
        Self::canonical(self.w, -self.x, -self.y, -self.z)
    }

    fn dot(&self, other: &Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    fn product(a: &Self, b: &Self) -> [f64; 4] {
        [
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        ]
    }

    /// Hamilton product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        let [w, x, y, z] = Self::product(self, other);
        Self::renormalized(w, x, y, z)
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        let v = (self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        2.0 * v.atan2(self.w.abs())
    }

    /// Angle of the relative rotation between two orientations, in `[0, π]`.
    pub fn angle_to(&self, other: &Self) -> f64 {
        self.conjugate().compose(other).angle()
    }

    /// Unit rotation axis, or `None` for the identity.
    pub fn axis(&self) -> Option<Vec3> {
        let v = (self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        (v > 0.0).then(|| [self.x / v, self.y / v, self.z / v])
    }

    /// Active rotation of a vector: `q v q*`.
    pub fn rotate_vector(&self, v: Vec3) -> Vec3 {
        let u = [self.x, self.y, self.z];
        let t = cross3(u, v);
        let t = [2.0 * t[0], 2.0 * t[1], 2.0 * t[2]];
        let c = cross3(u, t);
        [
            v[0] + self.w * t[0] + c[0],
            v[1] + self.w * t[1] + c[1],
            v[2] + self.w * t[2] + c[2],
        ]
    }

    /// Row-major 3×3 rotation matrix.
    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ]
    }

    /// Fractional power `q^a` along the shortest arc from the identity.
    pub fn powf(&self, a: f64) -> Result<Self> {
        slerp(&Self::IDENTITY, self, a)
    }
}

impl Default for UnitQuaternion {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// Hamilton product `q · p`.
pub fn compose(q: &UnitQuaternion, p: &UnitQuaternion) -> UnitQuaternion {
    q.compose(p)
}

/// Active rotation of static objects (the access point) when the headset
/// rotates from `q_from` to `q_to`: `q_from · q_to*`.
pub fn active_rotation(q_from: &UnitQuaternion, q_to: &UnitQuaternion) -> UnitQuaternion {
    q_from.compose(&q_to.conjugate())
}

/// Shortest-arc spherical linear interpolation with constant angular speed in `a`.
///
/// Fails with [`Error::DegenerateSlerp`] when the endpoints are exactly π
/// apart, where the shortest arc is not unique.
pub fn slerp(q: &UnitQuaternion, p: &UnitQuaternion, a: f64) -> Result<UnitQuaternion> {
    let mut d = q.dot(p);
    let mut pc = p.components();
    if d < 0.0 {
        d = -d;
        pc = pc.map(|c| -c);
    }
    if d < 1e-12 {
        return Err(Error::DegenerateSlerp);
    }
    let qc = q.components();
    let d = d.min(1.0);
    let theta = d.acos();
    let (s0, s1) = if theta < 1e-9 {
        (1.0 - a, a)
    } else {
        let st = theta.sin();
        (((1.0 - a) * theta).sin() / st, (a * theta).sin() / st)
    };
    let r: [f64; 4] = std::array::from_fn(|i| s0 * qc[i] + s1 * pc[i]);
    Ok(UnitQuaternion::renormalized(r[0], r[1], r[2], r[3]))
}

/// A direction as azimuth/elevation, in radians. Broadside is `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalDirection {
    pub azimuth: f64,
    pub elevation: f64,
}

impl SphericalDirection {
    pub const BROADSIDE: SphericalDirection = SphericalDirection {
        azimuth: 0.0,
        elevation: 0.0,
    };

    /// Wraps azimuth into `[-π, π)` and clamps elevation into `[-π/2, π/2]`.
    pub fn new(azimuth: f64, elevation: f64) -> Self {
        let mut az = (azimuth + PI).rem_euclid(2.0 * PI) - PI;
        if az >= PI {
            az -= 2.0 * PI;
        }
        SphericalDirection {
            azimuth: az,
            elevation: elevation.clamp(-PI / 2.0, PI / 2.0),
        }
    }

    pub fn from_degrees(azimuth_deg: f64, elevation_deg: f64) -> Self {
        Self::new(azimuth_deg.to_radians(), elevation_deg.to_radians())
    }

    pub fn to_vector(&self) -> Vec3 {
        let (st, ct) = self.azimuth.sin_cos();
        let (sp, cp) = self.elevation.sin_cos();
        [cp * st, sp, cp * ct]
    }

    /// Direction of an arbitrary (not necessarily unit) nonzero vector.
    pub fn from_vector(v: Vec3) -> Self {
        let n = dot3(v, v).sqrt();
        let y = (v[1] / n).clamp(-1.0, 1.0);
        Self::new(v[0].atan2(v[2]), y.asin())
    }

    /// True when the direction lies behind the array plane.
    pub fn is_behind(&self) -> bool {
        self.to_vector()[2] < 0.0
    }
}

/// A direction in UV coordinates: `u = cos ψ sin θ`, `v = sin ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct UvPoint {
    pub u: f64,
    pub v: f64,
}

impl UvPoint {
    pub const fn new(u: f64, v: f64) -> Self {
        UvPoint { u, v }
    }

    pub fn distance(&self, other: &UvPoint) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }

    pub fn norm_sq(&self) -> f64 {
        self.u * self.u + self.v * self.v
    }

    pub fn is_visible(&self) -> bool {
        self.norm_sq() <= 1.0
    }

    /// Swap of the two axes (x↔y mirror of the array).
    pub fn transposed(&self) -> UvPoint {
        UvPoint { u: self.v, v: self.u }
    }

    pub fn lerp(&self, other: &UvPoint, t: f64) -> UvPoint {
        UvPoint {
            u: self.u + (other.u - self.u) * t,
            v: self.v + (other.v - self.v) * t,
        }
    }
}

pub fn direction_to_uv(d: &SphericalDirection) -> UvPoint {
    let v = d.to_vector();
    UvPoint { u: v[0], v: v[1] }
}

/// Inverse of [`direction_to_uv`] onto the front hemisphere.
pub fn uv_to_direction(p: &UvPoint) -> Result<SphericalDirection> {
    let r2 = p.norm_sq();
    if r2 > 1.0 || !r2.is_finite() {
        return Err(Error::OutsideVisibleRegion { u: p.u, v: p.v });
    }
    let w = (1.0 - r2).max(0.0).sqrt();
    Ok(SphericalDirection {
        azimuth: p.u.atan2(w),
        elevation: p.v.clamp(-1.0, 1.0).asin(),
    })
}

/// Result of rotating a direction; `behind` is set when it left the front hemisphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedDirection {
    pub direction: SphericalDirection,
    pub behind: bool,
}

pub fn apply_rotation(q: &UnitQuaternion, d: &SphericalDirection) -> RotatedDirection {
    let r = q.rotate_vector(d.to_vector());
    RotatedDirection {
        direction: SphericalDirection::from_vector(r),
        behind: r[2] < 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yaw(deg: f64) -> UnitQuaternion {
        UnitQuaternion::from_axis_angle([0.0, 1.0, 0.0], deg.to_radians()).unwrap()
    }

    fn assert_q_close(a: &UnitQuaternion, b: &UnitQuaternion, tol: f64) {
        let (ac, bc) = (a.components(), b.components());
        for i in 0..4 {
            assert!((ac[i] - bc[i]).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn compose_identity_and_inverse() {
        let p = UnitQuaternion::new(0.3, -0.2, 0.8, 0.1).unwrap();
        assert_q_close(&compose(&UnitQuaternion::IDENTITY, &p), &p, 1e-15);
        assert_q_close(&compose(&p, &p.conjugate()), &UnitQuaternion::IDENTITY, 1e-15);
    }

    #[test]
    fn compose_single_axis_adds() {
        assert_q_close(&compose(&yaw(90.0), &yaw(90.0)), &yaw(180.0), 1e-15);
    }

    #[test]
    fn canonicalization_identifies_negation() {
        let a = UnitQuaternion::new(0.5, 0.5, -0.5, 0.5).unwrap();
        let b = UnitQuaternion::new(-0.5, -0.5, 0.5, -0.5).unwrap();
        assert_eq!(a, b);
        let c = UnitQuaternion::new(0.0, -1.0, 0.0, 0.0).unwrap();
        assert_eq!(c.components(), [0.0, 1.0, 0.0, 0.0]);
        assert!(UnitQuaternion::new(0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn active_rotation_examples() {
        let q = yaw(17.0);
        assert_q_close(&active_rotation(&q, &q), &UnitQuaternion::IDENTITY, 1e-15);
        let r = active_rotation(&UnitQuaternion::IDENTITY, &yaw(30.0));
        assert_q_close(&r, &yaw(-30.0), 1e-15);
    }

    #[test]
    fn slerp_endpoints_and_bisection() {
        let p = yaw(90.0);
        let q = UnitQuaternion::IDENTITY;
        assert_q_close(&slerp(&q, &p, 0.0).unwrap(), &q, 1e-12);
        assert_q_close(&slerp(&q, &p, 1.0).unwrap(), &p, 1e-12);
        assert_q_close(&slerp(&q, &p, 0.5).unwrap(), &yaw(45.0), 1e-12);
    }

    #[test]
    fn slerp_antipodal_is_degenerate() {
        let p = yaw(180.0);
        assert!(matches!(
            slerp(&UnitQuaternion::IDENTITY, &p, 0.5),
            Err(Error::DegenerateSlerp)
        ));
    }

    #[test]
    fn uv_examples() {
        let p = direction_to_uv(&SphericalDirection::BROADSIDE);
        assert_eq!((p.u, p.v), (0.0, 0.0));
        let p = direction_to_uv(&SphericalDirection::from_degrees(90.0, 0.0));
        assert!((p.u - 1.0).abs() < 1e-15 && p.v.abs() < 1e-15);
        let p = direction_to_uv(&SphericalDirection::from_degrees(15.0, 60.0));
        assert!((p.u - 0.12941).abs() < 1e-5);
        assert!((p.v - 0.86603).abs() < 1e-5);
        assert!(uv_to_direction(&UvPoint::new(0.8, 0.7)).is_err());
    }

    #[test]
    fn apply_rotation_examples() {
        let d = SphericalDirection::from_degrees(20.0, -10.0);
        let r = apply_rotation(&UnitQuaternion::IDENTITY, &d);
        assert!((r.direction.azimuth - d.azimuth).abs() < 1e-15);
        assert!((r.direction.elevation - d.elevation).abs() < 1e-15);
        assert!(!r.behind);

        // Rotation about the elevation axis moves broadside by 90° in azimuth.
        let r = apply_rotation(&yaw(90.0), &SphericalDirection::BROADSIDE);
        assert!((r.direction.azimuth - PI / 2.0).abs() < 1e-12);
        assert!(r.direction.elevation.abs() < 1e-12);

        let r = apply_rotation(&yaw(150.0), &SphericalDirection::BROADSIDE);
        assert!(r.behind);
    }

    #[test]
    fn azimuth_wraps_half_open() {
        let d = SphericalDirection::new(PI, 0.0);
        assert_eq!(d.azimuth, -PI);
        let d = SphericalDirection::new(3.0 * PI / 2.0, 0.0);
        assert!((d.azimuth + PI / 2.0).abs() < 1e-15);
    }
}
