//! Rigid camera-to-world transforms with twist-parameterized updates.
//!
//! Twists are 6-vectors `[w, v]` with the rotation part first: a pure
//! translation is `(0, 0, 0, vx, vy, vz)`. Updates are left-multiplicative,
//! `pose' = exp(delta) * pose`, so translation components of the twist move
//! the camera in world frame.

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

pub type Twist = [f64; 6];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vector3<f64>,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn from_parts(tx: f64, ty: f64, tz: f64, qx: f64, qy: f64, qz: f64, qw: f64) -> Self {
        Self {
            rotation: UnitQuaternion::from_quaternion(Quaternion::new(qw, qx, qy, qz)),
            translation: Vector3::new(tx, ty, tz),
        }
    }

    /// Camera-frame point to world frame.
    #[inline]
    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// Camera-frame direction to world frame.
    #[inline]
    pub fn rotate(&self, d: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * d
    }

    pub fn inverse(&self) -> Self {
        let rot_inv = self.rotation.inverse();
        Self {
            rotation: rot_inv,
            translation: -(rot_inv * self.translation),
        }
    }

    /// Composition `self * other` (apply `other` first, then `self`).
    pub fn compose(&self, other: &Pose) -> Self {
        Self {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn renormalized(mut self) -> Self {
        self.rotation = UnitQuaternion::from_quaternion(self.rotation.into_inner().normalize());
        self
    }

    /// Rotation angle (radians) and translation distance to another pose.
    pub fn delta_to(&self, other: &Pose) -> (f64, f64) {
        let dq = self.rotation.inverse() * other.rotation;
        (dq.angle(), (self.translation - other.translation).norm())
    }
}

fn skew(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Exact SE(3) exponential of a twist `[w, v]`.
pub fn se3_exp(delta: &Twist) -> Pose {
    let w = Vector3::new(delta[0], delta[1], delta[2]);
    let v = Vector3::new(delta[3], delta[4], delta[5]);
    let theta2 = w.norm_squared();
    let rotation = UnitQuaternion::from_scaled_axis(w);
    // V = I + c1 [w]x + c2 [w]x^2 with series fallback near zero.
    let (c1, c2) = if theta2 < 1e-12 {
        (0.5 - theta2 / 24.0, 1.0 / 6.0 - theta2 / 120.0)
    } else {
        let theta = theta2.sqrt();
        (
            (1.0 - theta.cos()) / theta2,
            (theta - theta.sin()) / (theta2 * theta),
        )
    };
    let wx = skew(&w);
    let v_mat = Matrix3::identity() + c1 * wx + c2 * (wx * wx);
    Pose {
        rotation,
        translation: v_mat * v,
    }
}

/// Left-multiplicative twist update `exp(delta) * pose`, renormalized.
pub fn se3_apply_twist(pose: &Pose, delta: &Twist) -> Pose {
    se3_exp(delta).compose(pose).renormalized()
}

/// Spherical-linear interpolation between poses (rotation slerp, translation lerp).
pub fn interpolate_pose(a: &Pose, b: &Pose, s: f64) -> Pose {
    let rotation = a.rotation.slerp(&b.rotation, s);
    Pose {
        rotation,
        translation: a.translation.lerp(&b.translation, s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_twist_is_identity_update() {
        let pose = Pose::from_parts(1.0, 2.0, 3.0, 0.1, 0.2, 0.3, 0.9);
        let updated = se3_apply_twist(&pose, &[0.0; 6]);
        assert_relative_eq!(
            updated.translation,
            pose.translation,
            epsilon = 1e-15
        );
        assert!(updated.rotation.angle_to(&pose.rotation) < 1e-12);
    }

    #[test]
    fn pure_translation_twist_shifts_world_frame() {
        let pose = Pose::from_parts(0.5, 0.0, 0.0, 0.0, 0.0, 0.382, 0.924);
        let updated = se3_apply_twist(&pose, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.1]);
        assert_relative_eq!(
            updated.translation,
            pose.translation + Vector3::new(0.0, 0.0, 0.1),
            epsilon = 1e-12
        );
        assert!(updated.rotation.angle_to(&pose.rotation) < 1e-12);
    }

    #[test]
    fn rotation_twist_matches_quaternion_construction() {
        // Rodrigues oracle: rotation of pi/2 about z as a quaternion directly.
        let angle = FRAC_PI_2;
        let updated = se3_apply_twist(&Pose::identity(), &[0.0, 0.0, angle, 0.0, 0.0, 0.0]);
        let expect = UnitQuaternion::from_quaternion(Quaternion::new(
            (angle / 2.0).cos(),
            0.0,
            0.0,
            (angle / 2.0).sin(),
        ));
        assert!(updated.rotation.angle_to(&expect) < 1e-12);
        assert_relative_eq!(updated.translation, Vector3::zeros(), epsilon = 1e-15);
    }

    #[test]
    fn exp_translation_couples_with_rotation() {
        // For a screw motion the V matrix matters: check against numerical
        // integration of the twist flow.
        let delta: Twist = [0.0, 0.0, 0.3, 0.2, 0.0, 0.0];
        let pose = se3_exp(&delta);
        // integrate dx/dt = w x x + v from 0 with unit time, small steps
        let w = Vector3::new(0.0, 0.0, 0.3);
        let v = Vector3::new(0.2, 0.0, 0.0);
        let mut x = Vector3::zeros();
        let n = 200_000;
        let dt = 1.0 / n as f64;
        for _ in 0..n {
            let dx = w.cross(&x) + v;
            x += dx * dt;
        }
        assert_relative_eq!(pose.translation, x, epsilon = 1e-5);
    }

    #[test]
    fn compose_and_inverse_round_trip() {
        let a = Pose::from_parts(1.0, -2.0, 0.5, 0.1, -0.2, 0.3, 0.95).renormalized();
        let b = a.inverse().compose(&a);
        assert!(b.translation.norm() < 1e-12);
        assert!(b.rotation.angle() < 1e-12);
    }

    #[test]
    fn interpolation_hits_endpoints_and_midpoint() {
        let a = Pose::identity();
        let rot_b = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), FRAC_PI_2);
        let b = Pose::new(rot_b, Vector3::new(2.0, 0.0, 0.0));
        let mid = interpolate_pose(&a, &b, 0.5);
        assert_relative_eq!(mid.translation, Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-12);
        // quaternion slerp oracle for the midpoint of a 90 degree pair: 45 degrees
        assert!((mid.rotation.angle() - FRAC_PI_2 / 2.0).abs() < 1e-12);
        assert!(interpolate_pose(&a, &b, 0.0).rotation.angle() < 1e-15);
        assert!((interpolate_pose(&a, &b, 1.0).rotation.angle_to(&rot_b)) < 1e-15);
    }
}
