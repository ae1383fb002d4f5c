//! Geometric kernel: poses, planes, triangle meshes with BVH queries, and
//! exact 2D polygon algebra for rectilinear shapes.

pub mod bvh;
pub mod linalg;
pub mod pathing;
pub mod poly2;
pub mod region;
pub mod tri;
pub mod trimesh;

pub use bvh::{collide, min_mesh_distance, WorldBvh};
pub use linalg::{vec3, Mat3, Quat, Vec3};
pub use poly2::{vec2, Polygon2D, Vec2};
pub use region::Region;
pub use trimesh::TriMesh;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Geometric equality tolerance (positions, normals, quaternion norms).
pub const GEOM_EPS: f64 = 1e-9;
/// Area comparison tolerance in square meters.
pub const AREA_EPS: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("mesh is empty")]
    EmptyMesh,
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),
    #[error("polygon is not rectilinear (axis-aligned edges required)")]
    NotRectilinear,
    #[error("no path between the requested rooms")]
    Disconnected,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Rigid pose: translation plus unit-quaternion orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec3,
    pub orientation: Quat,
}

impl Pose {
    pub const IDENTITY: Pose = Pose {
        position: Vec3::ZERO,
        orientation: Quat::IDENTITY,
    };

    pub fn new(position: Vec3, orientation: Quat) -> Pose {
        let orientation = orientation.normalized();
        Pose {
            position,
            orientation,
        }
    }

    pub fn translation(position: Vec3) -> Pose {
        Pose {
            position,
            orientation: Quat::IDENTITY,
        }
    }

    /// Map a point from local to world coordinates.
    pub fn apply(&self, local: Vec3) -> Vec3 {
        self.orientation.rotate(local) + self.position
    }

    /// Rotate a direction from local to world coordinates.
    pub fn apply_dir(&self, local: Vec3) -> Vec3 {
        self.orientation.rotate(local)
    }

    /// The quaternion norm must stay within `GEOM_EPS` of one.
    pub fn is_valid(&self) -> bool {
        (self.orientation.norm() - 1.0).abs() <= GEOM_EPS
    }
}

/// A tagged planar surface bounded by a convex polygon.
///
/// `owner`/`tag`/`index` identify the surface for relation assignments
/// ("the third wall of room 2", "shelf row 1 of object 7"). The boundary is
/// stored as a coplanar CCW ring (seen from the normal side).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub point: Vec3,
    pub normal: Vec3,
    pub owner: crate::semantics::EntId,
    /// Surface class, e.g. "top", "front", "wall", "floor", "shelf".
    pub tag: String,
    /// Distinguishes multiple planes of the same class on one owner.
    pub index: u32,
    /// Coplanar boundary ring, counter-clockwise seen from the normal side.
    pub boundary: Vec<Vec3>,
}

impl Plane {
    pub fn is_valid(&self) -> bool {
        (self.normal.norm() - 1.0).abs() <= GEOM_EPS
    }

    /// Signed distance of `p` from the plane along the normal.
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        (p - self.point).dot(self.normal)
    }

    /// Area of the bounded region.
    pub fn boundary_area(&self) -> f64 {
        // Fan triangulation of the convex ring.
        let mut area = 0.0;
        for i in 1..self.boundary.len().saturating_sub(1) {
            let a = self.boundary[0];
            let b = self.boundary[i];
            let c = self.boundary[i + 1];
            area += 0.5 * (b - a).cross(c - a).norm();
        }
        area
    }
}

/// Orthogonal projection of `p` onto `plane`.
pub fn project_point_to_plane(p: Vec3, plane: &Plane) -> Vec3 {
    p - plane.normal * plane.signed_distance(p)
}

/// Reflect a pose across a plane.
///
/// The position reflects as p' = p - 2((p - q) . n) n; the orientation
/// reflects in axis-angle form as (theta, e) -> (-theta, e - 2(e . n) n).
pub fn reflect_pose(pose: &Pose, plane: &Plane) -> Pose {
    let n = plane.normal;
    let position = pose.position - n * (2.0 * plane.signed_distance(pose.position));
    let (axis, angle) = pose.orientation.to_axis_angle();
    let axis = axis - n * (2.0 * axis.dot(n));
    Pose {
        position,
        orientation: Quat::from_axis_angle(axis, -angle),
    }
}

/// Reflect a free point across a plane.
pub fn reflect_point(p: Vec3, plane: &Plane) -> Vec3 {
    p - plane.normal * (2.0 * plane.signed_distance(p))
}
