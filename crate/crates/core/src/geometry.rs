//! Small fixed-size linear algebra: 3-vectors, unit quaternions and poses.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vector3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Vector3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn splat(v: T) -> Self {
        Self::new(v, v, v)
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction. Returns `None` for (near) zero vectors.
    pub fn try_normalize(self) -> Option<Self> {
        let n = self.norm();
        if n > T::epsilon() && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn normalize(self) -> Self {
        self.try_normalize().unwrap_or_else(Self::zero)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn component_min(self, o: Self) -> Self {
        Self::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn component_max(self, o: Self) -> Self {
        Self::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self) * t
    }

    pub fn cast<U: Scalar>(self) -> Vector3<U> {
        Vector3::new(
            U::of(self.x.to_f64_lossless()),
            U::of(self.y.to_f64_lossless()),
            U::of(self.z.to_f64_lossless()),
        )
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

impl<T: Scalar> Add for Vector3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> AddAssign for Vector3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Vector3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> Mul<T> for Vector3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Scalar> Div<T> for Vector3<T> {
    type Output = Self;
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

impl<T: Scalar> Neg for Vector3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Rotation quaternion `w + xi + yj + zk`. Constructors always return unit quaternions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Default for Quaternion<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Scalar> Quaternion<T> {
    pub fn identity() -> Self {
        Self {
            w: T::one(),
            x: T::zero(),
            y: T::zero(),
            z: T::zero(),
        }
    }

    /// Rotation of `angle` radians about `axis`. A zero axis yields the identity.
    pub fn from_axis_angle(axis: Vector3<T>, angle: T) -> Self {
        let Some(a) = axis.try_normalize() else {
            return Self::identity();
        };
        let half = angle / T::of(2.0);
        let s = half.sin();
        Self {
            w: half.cos(),
            x: a.x * s,
            y: a.y * s,
            z: a.z * s,
        }
    }

    /// Yaw about +Z followed by pitch about the rotated +Y.
    pub fn from_yaw_pitch(yaw: T, pitch: T) -> Self {
        let z = Vector3::new(T::zero(), T::zero(), T::one());
        let y = Vector3::new(T::zero(), T::one(), T::zero());
        Self::from_axis_angle(z, yaw) * Self::from_axis_angle(y, pitch)
    }

    pub fn norm(self) -> T {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalize(self) -> Self {
        let n = self.norm();
        Self {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    pub fn is_unit(self, tol: T) -> bool {
        (self.norm() - T::one()).abs() <= tol
    }

    pub fn conjugate(self) -> Self {
        Self {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn rotate(self, v: Vector3<T>) -> Vector3<T> {
        // v' = v + 2w (q × v) + 2 q × (q × v)
        let q = Vector3::new(self.x, self.y, self.z);
        let two = T::of(2.0);
        let t = q.cross(v) * two;
        v + t * self.w + q.cross(t)
    }
}

impl<T: Scalar> Mul for Quaternion<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }
}

/// Rigid transform with uniform scale: `p ↦ translation + rotation · (scale · p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose<T> {
    pub translation: Vector3<T>,
    pub rotation: Quaternion<T>,
    pub scale: T,
}

impl<T: Scalar> Default for Pose<T> {
    fn default() -> Self {
        Self {
            translation: Vector3::zero(),
            rotation: Quaternion::identity(),
            scale: T::one(),
        }
    }
}

impl<T: Scalar> Pose<T> {
    pub fn new(translation: Vector3<T>, rotation: Quaternion<T>, scale: T) -> Self {
        Self {
            translation,
            rotation,
            scale,
        }
    }

    pub fn at(translation: Vector3<T>) -> Self {
        Self {
            translation,
            ..Self::default()
        }
    }

    pub fn transform_point(&self, p: Vector3<T>) -> Vector3<T> {
        self.translation + self.rotation.rotate(p * self.scale)
    }

    /// Directions ignore translation and (positive) scale.
    pub fn transform_direction(&self, d: Vector3<T>) -> Vector3<T> {
        self.rotation.rotate(d)
    }

    pub fn is_valid(&self) -> bool {
        self.rotation.is_unit(T::of(1e-6)) && self.scale > T::zero() && self.translation.is_finite()
    }
}
