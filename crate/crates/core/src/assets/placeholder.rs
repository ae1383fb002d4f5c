//! Placeholder proxies: low-poly solids with tagged planar surfaces.

use crate::geom::{vec3, GeomError, TriMesh, Vec3};
use serde::{Deserialize, Serialize};

/// A tagged planar surface in the object's local frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedPlane {
    /// Surface class ("base", "top", "front", "back", "side", "shelf").
    pub class: String,
    /// Distinguishes multiple planes of one class (side_0..3, shelf rows).
    pub index: u32,
    pub point: Vec3,
    pub normal: Vec3,
    /// CCW boundary ring seen from the normal side.
    pub boundary: Vec<Vec3>,
    /// Indices of the detailed-mesh triangles lying on this surface.
    pub tri_indices: Vec<u32>,
}

impl TaggedPlane {
    /// Usable support area of the surface.
    pub fn capacity(&self) -> f64 {
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

/// Solid convex part (axis-aligned in the local frame), used for
/// containment checks that surface crossings cannot see.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub min: Vec3,
    pub max: Vec3,
}

impl Part {
    pub fn contains(&self, p: Vec3, eps: f64) -> bool {
        p.x > self.min.x + eps
            && p.x < self.max.x - eps
            && p.y > self.min.y + eps
            && p.y < self.max.y - eps
            && p.z > self.min.z + eps
            && p.z < self.max.z - eps
    }
}

/// Level of detail used for collision and distance queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lod {
    /// Bounding-box mesh only (cheap; used until children are assigned).
    Coarse,
    /// The detailed placeholder mesh.
    Full,
}

/// Parametric low-poly proxy with tagged planes and semantic-free geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaceholderObject {
    pub mesh: TriMesh,
    /// 12-triangle bounding-box mesh for the coarse LOD.
    pub coarse_mesh: TriMesh,
    pub planes: Vec<TaggedPlane>,
    pub parts: Vec<Part>,
    pub bbox_min: Vec3,
    pub bbox_max: Vec3,
}

impl PlaceholderObject {
    pub fn extents(&self) -> Vec3 {
        self.bbox_max - self.bbox_min
    }

    pub fn bbox_center(&self) -> Vec3 {
        (self.bbox_min + self.bbox_max) * 0.5
    }

    pub fn bbox_volume(&self) -> f64 {
        let e = self.extents();
        e.x * e.y * e.z
    }

    /// Product of the two largest extents.
    pub fn bbox_area(&self) -> f64 {
        let e = self.extents();
        let mut v = [e.x, e.y, e.z];
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[1] * v[2]
    }

    /// Diagonal length of the bounding box.
    pub fn bbox_diagonal(&self) -> f64 {
        self.extents().norm()
    }

    pub fn active_mesh(&self, lod: Lod) -> &TriMesh {
        match lod {
            Lod::Coarse => &self.coarse_mesh,
            Lod::Full => &self.mesh,
        }
    }

    pub fn plane(&self, class: &str, index: u32) -> Option<&TaggedPlane> {
        self.planes
            .iter()
            .find(|p| p.class == class && p.index == index)
    }

    pub fn planes_of_class<'a>(
        &'a self,
        class: &'a str,
    ) -> impl Iterator<Item = &'a TaggedPlane> + 'a {
        self.planes.iter().filter(move |p| p.class == class)
    }
}

/// Face selector on an axis-aligned box part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    NegZ,
    PosZ,
    NegY,
    PosY,
    PosX,
    NegX,
}

impl Face {
    fn normal(self) -> Vec3 {
        match self {
            Face::NegZ => -Vec3::Z,
            Face::PosZ => Vec3::Z,
            Face::NegY => -Vec3::Y,
            Face::PosY => Vec3::Y,
            Face::PosX => Vec3::X,
            Face::NegX => -Vec3::X,
        }
    }

    /// Triangle offset of this face within a 12-triangle cuboid.
    fn tri_offset(self) -> u32 {
        match self {
            Face::NegZ => 0,
            Face::PosZ => 2,
            Face::NegY => 4,
            Face::PosY => 6,
            Face::PosX => 8,
            Face::NegX => 10,
        }
    }
}

/// Accumulates axis-aligned boxes and prism parts into one placeholder.
pub struct ProxyBuilder {
    boxes: Vec<(Vec3, Vec3)>,
    prisms: Vec<(Vec3, f64, f64, u32)>, // (base center, radius, height, segments)
    planes: Vec<TaggedPlane>,
}

impl ProxyBuilder {
    pub fn new() -> ProxyBuilder {
        ProxyBuilder {
            boxes: Vec::new(),
            prisms: Vec::new(),
            planes: Vec::new(),
        }
    }

    /// Add a box part; returns its index for face tagging.
    pub fn add_box(&mut self, min: Vec3, max: Vec3) -> usize {
        self.boxes.push((min, max));
        self.boxes.len() - 1
    }

    /// Tag a face of box `box_idx` as a relation plane.
    pub fn tag_face(&mut self, box_idx: usize, face: Face, class: &str, index: u32) {
        let (min, max) = self.boxes[box_idx];
        let c = (min + max) * 0.5;
        let normal = face.normal();
        let (point, boundary) = match face {
            Face::NegZ => (
                vec3(c.x, c.y, min.z),
                // CCW seen from below (-z side).
                vec![
                    vec3(min.x, min.y, min.z),
                    vec3(min.x, max.y, min.z),
                    vec3(max.x, max.y, min.z),
                    vec3(max.x, min.y, min.z),
                ],
            ),
            Face::PosZ => (
                vec3(c.x, c.y, max.z),
                vec![
                    vec3(min.x, min.y, max.z),
                    vec3(max.x, min.y, max.z),
                    vec3(max.x, max.y, max.z),
                    vec3(min.x, max.y, max.z),
                ],
            ),
            Face::NegY => (
                vec3(c.x, min.y, c.z),
                vec![
                    vec3(min.x, min.y, min.z),
                    vec3(max.x, min.y, min.z),
                    vec3(max.x, min.y, max.z),
                    vec3(min.x, min.y, max.z),
                ],
            ),
            Face::PosY => (
                vec3(c.x, max.y, c.z),
                vec![
                    vec3(max.x, max.y, min.z),
                    vec3(min.x, max.y, min.z),
                    vec3(min.x, max.y, max.z),
                    vec3(max.x, max.y, max.z),
                ],
            ),
            Face::PosX => (
                vec3(max.x, c.y, c.z),
                vec![
                    vec3(max.x, min.y, min.z),
                    vec3(max.x, max.y, min.z),
                    vec3(max.x, max.y, max.z),
                    vec3(max.x, min.y, max.z),
                ],
            ),
            Face::NegX => (
                vec3(min.x, c.y, c.z),
                vec![
                    vec3(min.x, max.y, min.z),
                    vec3(min.x, min.y, min.z),
                    vec3(min.x, min.y, max.z),
                    vec3(min.x, max.y, max.z),
                ],
            ),
        };
        let base = (box_idx * 12) as u32 + face.tri_offset();
        self.planes.push(TaggedPlane {
            class: class.to_string(),
            index,
            point,
            normal,
            boundary,
            tri_indices: vec![base, base + 1],
        });
    }

    /// Tag a free plane not backed by a single box face (e.g. the footprint
    /// spanned by four legs). `tri_indices` may reference any mesh triangles
    /// coplanar with it.
    pub fn tag_free_plane(
        &mut self,
        class: &str,
        index: u32,
        point: Vec3,
        normal: Vec3,
        boundary: Vec<Vec3>,
        tri_indices: Vec<u32>,
    ) {
        self.planes.push(TaggedPlane {
            class: class.to_string(),
            index,
            point,
            normal,
            boundary,
            tri_indices,
        });
    }

    /// Triangle index range a box face will occupy (for tag_free_plane).
    pub fn face_tris(&self, box_idx: usize, face: Face) -> Vec<u32> {
        let base = (box_idx * 12) as u32 + face.tri_offset();
        vec![base, base + 1]
    }

    /// Add a z-aligned regular prism (cylinder stand-in). Returns the
    /// triangle indices of its top fan and base fan.
    pub fn add_prism(&mut self, base_center: Vec3, radius: f64, height: f64, segments: u32) {
        self.prisms.push((base_center, radius, height, segments));
    }

    pub fn prism_polygon(base_center: Vec3, radius: f64, z: f64, segments: u32) -> Vec<Vec3> {
        (0..segments)
            .map(|k| {
                let a = (k as f64) * std::f64::consts::TAU / (segments as f64);
                vec3(
                    base_center.x + radius * a.cos(),
                    base_center.y + radius * a.sin(),
                    z,
                )
            })
            .collect()
    }

    pub fn build(self) -> Result<PlaceholderObject, GeomError> {
        let mut vertices: Vec<Vec3> = Vec::new();
        let mut triangles: Vec<[u32; 3]> = Vec::new();
        for &(min, max) in &self.boxes {
            let cu = TriMesh::cuboid(min, max);
            let off = vertices.len() as u32;
            vertices.extend(cu.vertices.iter().copied());
            triangles.extend(cu.triangles.iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
        }
        let mut planes = self.planes;
        let mut parts: Vec<Part> = self
            .boxes
            .iter()
            .map(|&(min, max)| Part { min, max })
            .collect();
        for &(bc, r, h, segs) in &self.prisms {
            let off = vertices.len() as u32;
            let bottom = Self::prism_polygon(bc, r, bc.z, segs);
            let top = Self::prism_polygon(bc, r, bc.z + h, segs);
            vertices.extend(bottom.iter().copied());
            vertices.extend(top.iter().copied());
            let tri_start = triangles.len() as u32;
            for k in 0..segs {
                let k2 = (k + 1) % segs;
                // Side quad (outward).
                triangles.push([off + k, off + k2, off + segs + k2]);
                triangles.push([off + k, off + segs + k2, off + segs + k]);
            }
            let base_start = triangles.len() as u32;
            for k in 1..segs - 1 {
                // Bottom fan (downward), top fan (upward).
                triangles.push([off, off + k + 1, off + k]);
            }
            let top_start = triangles.len() as u32;
            for k in 1..segs - 1 {
                triangles.push([off + segs, off + segs + k, off + segs + k + 1]);
            }
            let top_end = triangles.len() as u32;
            let _ = tri_start;
            planes.push(TaggedPlane {
                class: "base".into(),
                index: planes.iter().filter(|p| p.class == "base").count() as u32,
                point: bc,
                normal: -Vec3::Z,
                boundary: {
                    let mut b = bottom.clone();
                    b.reverse(); // CCW seen from below
                    b
                },
                tri_indices: (base_start..top_start).collect(),
            });
            planes.push(TaggedPlane {
                class: "top".into(),
                index: planes.iter().filter(|p| p.class == "top").count() as u32,
                point: vec3(bc.x, bc.y, bc.z + h),
                normal: Vec3::Z,
                boundary: top,
                tri_indices: (top_start..top_end).collect(),
            });
            parts.push(Part {
                min: vec3(bc.x - r, bc.y - r, bc.z),
                max: vec3(bc.x + r, bc.y + r, bc.z + h),
            });
        }
        let mesh = TriMesh::new(vertices, triangles)?;
        if mesh.is_empty() {
            return Err(GeomError::EmptyMesh);
        }
        let (bbox_min, bbox_max) = mesh.local_aabb().expect("non-empty mesh");
        let coarse_mesh = TriMesh::cuboid(bbox_min, bbox_max);
        Ok(PlaceholderObject {
            mesh,
            coarse_mesh,
            planes,
            parts,
            bbox_min,
            bbox_max,
        })
    }
}

impl Default for ProxyBuilder {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_box_proxy() {
        let mut b = ProxyBuilder::new();
        let ix = b.add_box(vec3(-0.5, -0.5, 0.0), vec3(0.5, 0.5, 1.0));
        b.tag_face(ix, Face::NegZ, "base", 0);
        b.tag_face(ix, Face::PosZ, "top", 0);
        let p = b.build().unwrap();
        assert_eq!(p.mesh.triangle_count(), 12);
        assert_eq!(p.planes.len(), 2);
        let base = p.plane("base", 0).unwrap();
        assert_eq!(base.normal, -Vec3::Z);
        assert_eq!(base.point.z, 0.0);
        assert!((base.capacity() - 1.0).abs() < 1e-12);
        assert!((p.bbox_volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tagged_face_triangles_are_coplanar_with_plane() {
        let mut b = ProxyBuilder::new();
        let ix = b.add_box(vec3(0.0, 0.0, 0.0), vec3(2.0, 1.0, 0.5));
        for (face, class) in [
            (Face::NegZ, "base"),
            (Face::PosZ, "top"),
            (Face::PosX, "front"),
            (Face::NegX, "back"),
        ] {
            b.tag_face(ix, face, class, 0);
        }
        let p = b.build().unwrap();
        for plane in &p.planes {
            for &ti in &plane.tri_indices {
                let t = p.mesh.triangles[ti as usize];
                for &vi in &t {
                    let v = p.mesh.vertices[vi as usize];
                    assert!(
                        (v - plane.point).dot(plane.normal).abs() < 1e-12,
                        "plane {} triangle not coplanar",
                        plane.class
                    );
                }
            }
        }
    }

    #[test]
    fn prism_planes_and_parts() {
        let mut b = ProxyBuilder::new();
        b.add_prism(vec3(0.0, 0.0, 0.0), 0.2, 0.6, 12);
        let p = b.build().unwrap();
        assert!(p.mesh.triangle_count() <= 200);
        let top = p.plane("top", 0).unwrap();
        assert_eq!(top.point.z, 0.6);
        assert_eq!(p.parts.len(), 1);
        assert!(p.parts[0].contains(vec3(0.0, 0.0, 0.3), 1e-9));
    }
}
