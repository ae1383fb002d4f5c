//! Cached geometric access to scene entities.
//!
//! Two of the solver's performance features live here. Plane hashing keeps a
//! registry of world-space planes keyed by (owner, class, index); BVH caching
//! reuses bounding-volume hierarchies until the owner mutates. With a feature
//! off the same quantities are recomputed on every call — identical values,
//! more work.

use crate::geom::bvh::WorldBvh;
use crate::geom::poly2::Vec2;
use crate::geom::{Plane, Vec3};
use crate::semantics::{EntId, SceneState};
use std::collections::BTreeMap;
use std::rc::Rc;

#[derive(Debug, Clone)]
pub struct GeomCache {
    pub bvh_enabled: bool,
    pub plane_enabled: bool,
    bvhs: BTreeMap<(EntId, Option<String>), Option<Rc<WorldBvh>>>,
    planes: BTreeMap<(EntId, String, u32), Option<Plane>>,
}

impl GeomCache {
    pub fn new(bvh_enabled: bool, plane_enabled: bool) -> GeomCache {
        GeomCache {
            bvh_enabled,
            plane_enabled,
            bvhs: BTreeMap::new(),
            planes: BTreeMap::new(),
        }
    }

    pub fn all_on() -> GeomCache {
        GeomCache::new(true, true)
    }

    /// Drop cached state for the given entities.
    pub fn invalidate(&mut self, ids: &[EntId]) {
        self.bvhs.retain(|k, _| !ids.contains(&k.0));
        self.planes.retain(|k, _| !ids.contains(&k.0));
    }

    pub fn clear(&mut self) {
        self.bvhs.clear();
        self.planes.clear();
    }

    fn build_bvh(scene: &SceneState, ent: EntId, class: Option<&str>) -> Option<Rc<WorldBvh>> {
        let tris = match ent {
            EntId::Room(id) => {
                let room = scene.room(id)?;
                let subset = match class {
                    None => None,
                    Some(c) => {
                        // Union of all plane triangle sets of this class.
                        let mut ids: Vec<u32> = Vec::new();
                        for p in room.planes() {
                            if p.tag == c {
                                if let Some(t) = room.plane_triangles(c, p.index) {
                                    ids.extend_from_slice(t);
                                }
                            }
                        }
                        if ids.is_empty() {
                            return None;
                        }
                        Some(ids)
                    }
                };
                room.mesh()
                    .world_triangles_subset(&crate::geom::Pose::IDENTITY, subset.as_deref())
            }
            EntId::Object(id) => {
                let obj = scene.object(id).ok()?;
                match (class, obj.lod) {
                    // Tagged sub-surfaces only exist at full detail; coarse
                    // placeholders answer with the whole bounding box.
                    (Some(c), crate::assets::Lod::Full) => {
                        let mut ids: Vec<u32> = Vec::new();
                        for p in obj.placeholder.planes_of_class(c) {
                            ids.extend_from_slice(&p.tri_indices);
                        }
                        if ids.is_empty() {
                            return None;
                        }
                        obj.placeholder
                            .mesh
                            .world_triangles_subset(&obj.pose, Some(&ids))
                    }
                    _ => obj.active_mesh().world_triangles(&obj.pose),
                }
            }
        };
        WorldBvh::build(tris).ok().map(Rc::new)
    }

    /// BVH for an entity's (sub-)mesh; `None` when there is no such surface.
    pub fn bvh(
        &mut self,
        scene: &SceneState,
        ent: EntId,
        class: Option<&str>,
    ) -> Option<Rc<WorldBvh>> {
        if !self.bvh_enabled {
            return Self::build_bvh(scene, ent, class);
        }
        let key = (ent, class.map(str::to_string));
        if let Some(hit) = self.bvhs.get(&key) {
            return hit.clone();
        }
        let built = Self::build_bvh(scene, ent, class);
        self.bvhs.insert(key, built.clone());
        built
    }

    /// World-space plane lookup with optional hashing.
    pub fn plane(
        &mut self,
        scene: &SceneState,
        ent: EntId,
        class: &str,
        index: u32,
    ) -> Option<Plane> {
        if !self.plane_enabled {
            return scene.plane(ent, class, index).ok();
        }
        let key = (ent, class.to_string(), index);
        if let Some(hit) = self.planes.get(&key) {
            return hit.clone();
        }
        let built = scene.plane(ent, class, index).ok();
        self.planes.insert(key, built.clone());
        built
    }
}

/// Entity-generic accessors used by the score operators.
pub fn centroid(scene: &SceneState, ent: EntId) -> Option<Vec3> {
    scene.centroid(ent).ok()
}

pub fn bbox_extents(scene: &SceneState, ent: EntId) -> Option<Vec3> {
    match ent {
        EntId::Object(id) => scene.object(id).ok().map(|o| o.placeholder.extents()),
        EntId::Room(id) => scene.room(id).map(|r| {
            let (min, max) = r.polygon.bbox();
            crate::geom::vec3(max.x - min.x, max.y - min.y, r.height)
        }),
    }
}

pub fn bbox_volume(scene: &SceneState, ent: EntId) -> Option<f64> {
    bbox_extents(scene, ent).map(|e| e.x * e.y * e.z)
}

/// Product of the two largest bounding-box extents.
pub fn bbox_area(scene: &SceneState, ent: EntId) -> Option<f64> {
    bbox_extents(scene, ent).map(|e| {
        let mut v = [e.x, e.y, e.z];
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[1] * v[2]
    })
}

pub fn bbox_diagonal(scene: &SceneState, ent: EntId) -> Option<f64> {
    bbox_extents(scene, ent).map(|e| e.norm())
}

/// Convex XY footprint ring (CCW).
pub fn footprint(scene: &SceneState, ent: EntId) -> Option<Vec<Vec2>> {
    match ent {
        EntId::Object(id) => scene.object(id).ok().map(|o| o.footprint()),
        EntId::Room(id) => scene.room(id).map(|r| r.polygon.exterior().to_vec()),
    }
}

/// Front-facing direction; rooms have none.
pub fn front_normal(scene: &SceneState, ent: EntId) -> Option<Vec3> {
    match ent {
        EntId::Object(id) => scene.object(id).ok().map(|o| o.front_normal()),
        EntId::Room(_) => None,
    }
}

/// The front plane (point + normal) used by accessibility; falls back to a
/// plane through the centroid facing the object's front.
pub fn front_plane(scene: &SceneState, ent: EntId) -> Option<(Vec3, Vec3)> {
    match ent {
        EntId::Object(id) => {
            let obj = scene.object(id).ok()?;
            match obj.world_plane("front", 0) {
                Some(p) => Some((p.point, p.normal)),
                None => Some((obj.centroid(), obj.front_normal())),
            }
        }
        EntId::Room(_) => None,
    }
}

/// Median planes of the oriented bounding box (used as reflection planes).
/// Returns (point, normal) triples along the entity's local axes.
pub fn median_planes(scene: &SceneState, ent: EntId) -> Vec<(Vec3, Vec3)> {
    match ent {
        EntId::Object(id) => match scene.object(id) {
            Ok(obj) => {
                let center = obj.centroid();
                [Vec3::X, Vec3::Y, Vec3::Z]
                    .iter()
                    .map(|&axis| (center, obj.pose.apply_dir(axis)))
                    .collect()
            }
            Err(_) => vec![],
        },
        EntId::Room(id) => match scene.room(id) {
            Some(room) => {
                let c = room.centroid();
                vec![(c, Vec3::X), (c, Vec3::Y), (c, Vec3::Z)]
            }
            None => vec![],
        },
    }
}
