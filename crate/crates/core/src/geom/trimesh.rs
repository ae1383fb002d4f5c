//! Triangle-soup meshes.

use super::linalg::Vec3;
use super::tri::Tri;
use super::{GeomError, Pose};
use serde::{Deserialize, Serialize};

/// An indexed triangle soup. Degenerate (zero-area) triangles are removed at
/// construction; indices are validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<TriMesh, GeomError> {
        let n = vertices.len() as u32;
        let mut kept = Vec::with_capacity(triangles.len());
        for t in triangles {
            if t.iter().any(|&i| i >= n) {
                return Err(GeomError::InvalidArgument(format!(
                    "triangle index out of range: {t:?}"
                )));
            }
            let [a, b, c] = [
                vertices[t[0] as usize],
                vertices[t[1] as usize],
                vertices[t[2] as usize],
            ];
            if (b - a).cross(c - a).norm() > 1e-12 {
                kept.push(t);
            }
        }
        Ok(TriMesh {
            vertices,
            triangles: kept,
        })
    }

    /// Axis-aligned cuboid spanning `min..max`, 12 triangles with outward
    /// winding.
    pub fn cuboid(min: Vec3, max: Vec3) -> TriMesh {
        let v = |x: f64, y: f64, z: f64| Vec3 { x, y, z };
        let corners = [
            v(min.x, min.y, min.z),
            v(max.x, min.y, min.z),
            v(max.x, max.y, min.z),
            v(min.x, max.y, min.z),
            v(min.x, min.y, max.z),
            v(max.x, min.y, max.z),
            v(max.x, max.y, max.z),
            v(min.x, max.y, max.z),
        ];
        // Each face as two triangles, outward-facing.
        let faces: [[u32; 4]; 6] = [
            [0, 3, 2, 1], // bottom (-z)
            [4, 5, 6, 7], // top (+z)
            [0, 1, 5, 4], // -y
            [2, 3, 7, 6], // +y
            [1, 2, 6, 5], // +x
            [3, 0, 4, 7], // -x
        ];
        let mut triangles = Vec::with_capacity(12);
        for f in faces {
            triangles.push([f[0], f[1], f[2]]);
            triangles.push([f[0], f[2], f[3]]);
        }
        TriMesh::new(corners.to_vec(), triangles).expect("cuboid is well-formed")
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Triangles in world space under `pose`.
    pub fn world_triangles(&self, pose: &Pose) -> Vec<Tri> {
        self.world_triangles_subset(pose, None)
    }

    /// World-space triangles; `subset` restricts to the given triangle
    /// indices (used for tagged sub-surface queries).
    pub fn world_triangles_subset(&self, pose: &Pose, subset: Option<&[u32]>) -> Vec<Tri> {
        let world = |t: &[u32; 3]| {
            [
                pose.apply(self.vertices[t[0] as usize]),
                pose.apply(self.vertices[t[1] as usize]),
                pose.apply(self.vertices[t[2] as usize]),
            ]
        };
        match subset {
            None => self.triangles.iter().map(world).collect(),
            Some(ids) => ids
                .iter()
                .filter_map(|&i| self.triangles.get(i as usize))
                .map(world)
                .collect(),
        }
    }

    /// Local-frame bounding box as (min, max).
    pub fn local_aabb(&self) -> Option<(Vec3, Vec3)> {
        let mut it = self.vertices.iter();
        let first = *it.next()?;
        let mut min = first;
        let mut max = first;
        for &v in it {
            min = min.min_by_component(v);
            max = max.max_by_component(v);
        }
        Some((min, max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::vec3;

    #[test]
    fn cuboid_has_twelve_triangles() {
        let m = TriMesh::cuboid(vec3(0.0, 0.0, 0.0), vec3(1.0, 2.0, 3.0));
        assert_eq!(m.triangle_count(), 12);
        let (min, max) = m.local_aabb().unwrap();
        assert_eq!(min, vec3(0.0, 0.0, 0.0));
        assert_eq!(max, vec3(1.0, 2.0, 3.0));
    }

    #[test]
    fn degenerate_triangles_are_dropped() {
        let verts = vec![vec3(0.0, 0.0, 0.0), vec3(1.0, 0.0, 0.0), vec3(2.0, 0.0, 0.0)];
        let m = TriMesh::new(verts, vec![[0, 1, 2]]).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn out_of_range_index_is_an_error() {
        let verts = vec![vec3(0.0, 0.0, 0.0), vec3(1.0, 0.0, 0.0)];
        assert!(TriMesh::new(verts, vec![[0, 1, 7]]).is_err());
    }
}
