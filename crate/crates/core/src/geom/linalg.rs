//! Minimal 3D linear algebra: vectors, unit quaternions, 3x3 matrices.
//!
//! Hand-rolled so that every arithmetic path is explicit and deterministic;
//! the solver's byte-reproducibility contract leaves no room for backend
//! surprises.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const fn vec3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3 { x, y, z }
}

impl Vec3 {
    pub const ZERO: Vec3 = vec3(0.0, 0.0, 0.0);
    pub const X: Vec3 = vec3(1.0, 0.0, 0.0);
    pub const Y: Vec3 = vec3(0.0, 1.0, 0.0);
    pub const Z: Vec3 = vec3(0.0, 0.0, 1.0);

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        vec3(
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

    /// Unit vector in the same direction; `None` when shorter than `eps`.
    pub fn normalized(self, eps: f64) -> Option<Vec3> {
        let n = self.norm();
        if n <= eps {
            None
        } else {
            Some(self / n)
        }
    }

    pub fn min_by_component(self, o: Vec3) -> Vec3 {
        vec3(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max_by_component(self, o: Vec3) -> Vec3 {
        vec3(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    /// XY components, dropping z.
    pub fn xy(self) -> (f64, f64) {
        (self.x, self.y)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        vec3(self.x + o.x, self.y + o.y, self.z + o.z)
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
        vec3(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        vec3(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        vec3(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        vec3(self.x / s, self.y / s, self.z / s)
    }
}

/// Unit quaternion (w, x, y, z) representing a rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Quat {
        let axis = axis.normalized(1e-300).unwrap_or(Vec3::Z);
        let (s, c) = (angle * 0.5).sin_cos();
        Quat {
            w: c,
            x: axis.x * s,
            y: axis.y * s,
            z: axis.z * s,
        }
    }

    /// Rotation about +z by `angle`.
    pub fn yaw(angle: f64) -> Quat {
        Quat::from_axis_angle(Vec3::Z, angle)
    }

    /// Recover (axis, angle) with angle in [0, pi]. Identity yields +z, 0.
    pub fn to_axis_angle(self) -> (Vec3, f64) {
        let v = vec3(self.x, self.y, self.z);
        let s = v.norm();
        if s < 1e-12 {
            return (Vec3::Z, 0.0);
        }
        let angle = 2.0 * s.atan2(self.w);
        let (axis, angle) = if angle < 0.0 { (-(v / s), -angle) } else { (v / s, angle) };
        (axis, angle)
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(self) -> Quat {
        let n = self.norm();
        Quat {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    pub fn conjugate(self) -> Quat {
        Quat {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Quaternion dot product (4-vector inner product).
    pub fn dot(self, o: Quat) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn rotate(self, v: Vec3) -> Vec3 {
        // q v q* expanded via the rotation-matrix-free form.
        let u = vec3(self.x, self.y, self.z);
        let s = self.w;
        u * (2.0 * u.dot(v)) + v * (s * s - u.dot(u)) + u.cross(v) * (2.0 * s)
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        Quat {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }
}

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3 {
    pub rows: [[f64; 3]; 3],
}

impl Mat3 {
    pub const ZERO: Mat3 = Mat3 {
        rows: [[0.0; 3]; 3],
    };
    pub const IDENTITY: Mat3 = Mat3 {
        rows: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Outer product v * v^T.
    pub fn outer(v: Vec3) -> Mat3 {
        let a = [v.x, v.y, v.z];
        let mut rows = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                rows[i][j] = a[i] * a[j];
            }
        }
        Mat3 { rows }
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let a = [v.x, v.y, v.z];
        let mut out = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i] += self.rows[i][j] * a[j];
            }
        }
        vec3(out[0], out[1], out[2])
    }

    pub fn matmul(&self, o: &Mat3) -> Mat3 {
        let mut rows = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    rows[i][j] += self.rows[i][k] * o.rows[k][j];
                }
            }
        }
        Mat3 { rows }
    }

    pub fn sub(&self, o: &Mat3) -> Mat3 {
        let mut rows = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                rows[i][j] = self.rows[i][j] - o.rows[i][j];
            }
        }
        Mat3 { rows }
    }

    pub fn max_abs_diff(&self, o: &Mat3) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.rows[i][j] - o.rows[i][j]).abs());
            }
        }
        m
    }

    pub fn is_zero(&self, eps: f64) -> bool {
        self.rows
            .iter()
            .all(|r| r.iter().all(|v| v.abs() <= eps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn assert_close(a: Vec3, b: Vec3, eps: f64) {
        assert!((a - b).norm() <= eps, "{a:?} vs {b:?}");
    }

    #[test]
    fn quat_rotation_basics() {
        let q = Quat::yaw(FRAC_PI_2);
        assert_close(q.rotate(Vec3::X), Vec3::Y, 1e-12);
        assert_close(q.rotate(Vec3::Y), -Vec3::X, 1e-12);
        assert_close(q.rotate(Vec3::Z), Vec3::Z, 1e-12);
    }

    #[test]
    fn quat_axis_angle_round_trip() {
        let axis = vec3(1.0, 2.0, -0.5).normalized(0.0).unwrap();
        let q = Quat::from_axis_angle(axis, 1.3);
        let (a2, ang) = q.to_axis_angle();
        assert_close(a2, axis, 1e-12);
        assert!((ang - 1.3).abs() < 1e-12);
    }

    #[test]
    fn quat_composition_matches_sequential_rotation() {
        let q1 = Quat::from_axis_angle(Vec3::X, 0.7);
        let q2 = Quat::from_axis_angle(Vec3::Z, -1.1);
        let v = vec3(0.3, -2.0, 0.9);
        assert_close((q2 * q1).rotate(v), q2.rotate(q1.rotate(v)), 1e-12);
    }

    #[test]
    fn quat_half_turn() {
        let q = Quat::yaw(PI);
        assert_close(q.rotate(Vec3::X), -Vec3::X, 1e-12);
    }

    #[test]
    fn projection_matrix_via_outer() {
        // Project out z: P = I - zz^T.
        let p = Mat3::IDENTITY.sub(&Mat3::outer(Vec3::Z));
        assert_close(p.apply(vec3(1.0, 2.0, 3.0)), vec3(1.0, 2.0, 0.0), 1e-15);
        // Idempotent.
        assert!(p.matmul(&p).max_abs_diff(&p) < 1e-15);
    }
}
