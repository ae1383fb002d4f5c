//! Scene data model: tagged objects, rooms, the semantic-tag registry, and
//! relation instances with their predicates.

pub mod relations;

pub use relations::{
    check_stable_against, check_supported_by, filter_related, PlaneRef, RelationInstance,
    RelationKind,
};

use crate::assets::{Lod, PlaceholderObject, Stage};
use crate::geom::poly2::{convex_hull, vec2, Vec2};
use crate::geom::{vec3, Plane, Polygon2D, Pose, Region, TriMesh, Vec3};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SemError {
    #[error("unknown tag '{tag}'{}", suggestion.as_ref().map(|s| format!(" (did you mean '{s}'?)")).unwrap_or_default())]
    UnknownTag {
        tag: String,
        suggestion: Option<String>,
    },
    #[error("unknown entity {0:?}")]
    UnknownEntity(EntId),
    #[error("entity {owner:?} has no plane {class}#{index}")]
    MissingPlane {
        owner: EntId,
        class: String,
        index: u32,
    },
    #[error("invalid relation: {0}")]
    InvalidRelation(String),
}

/// Identity of anything constraints can reference: a placed object or a room.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum EntId {
    Room(u32),
    Object(u64),
}

/// Hierarchical semantic tags. Every tag reaches the root "object" through
/// its parent links; matching a query tag means the query is an ancestor (or
/// equal) of one of the entity's tags.
#[derive(Debug, Clone, PartialEq)]
pub struct TagRegistry {
    parents: BTreeMap<String, BTreeSet<String>>,
}

pub const ROOT_TAG: &str = "object";

pub const ROOM_KINDS: [&str; 11] = [
    "kitchen",
    "bedroom",
    "living-room",
    "closet",
    "hallway",
    "bathroom",
    "garage",
    "balcony",
    "dining-room",
    "utility",
    "staircase-room",
];

impl TagRegistry {
    pub fn new() -> TagRegistry {
        let mut parents = BTreeMap::new();
        parents.insert(ROOT_TAG.to_string(), BTreeSet::new());
        TagRegistry { parents }
    }

    /// Registry with rooms and the builtin asset catalog installed.
    pub fn builtin() -> TagRegistry {
        let mut reg = TagRegistry::new();
        reg.ensure("room");
        for kind in ROOM_KINDS {
            reg.ensure(kind);
            reg.add_parent(kind, "room");
        }
        crate::assets::Catalog::builtin().install_tags(&mut reg);
        reg
    }

    /// Insert `tag` if absent; new tags hang off the root until given more
    /// specific parents.
    pub fn ensure(&mut self, tag: &str) {
        if !self.parents.contains_key(tag) {
            let mut p = BTreeSet::new();
            if tag != ROOT_TAG {
                p.insert(ROOT_TAG.to_string());
            }
            self.parents.insert(tag.to_string(), p);
        }
    }

    pub fn add_parent(&mut self, tag: &str, parent: &str) {
        self.ensure(tag);
        self.ensure(parent);
        if tag != parent {
            self.parents
                .get_mut(tag)
                .expect("ensured above")
                .insert(parent.to_string());
        }
    }

    pub fn is_registered(&self, tag: &str) -> bool {
        self.parents.contains_key(tag)
    }

    /// All ancestors of `tag`, including itself.
    pub fn ancestors(&self, tag: &str) -> Result<BTreeSet<String>, SemError> {
        if !self.is_registered(tag) {
            return Err(self.unknown(tag));
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![tag.to_string()];
        while let Some(t) = stack.pop() {
            if seen.insert(t.clone()) {
                if let Some(ps) = self.parents.get(&t) {
                    stack.extend(ps.iter().cloned());
                }
            }
        }
        Ok(seen)
    }

    /// Is `query` an ancestor-or-equal of any member of `tags`?
    pub fn tag_matches(&self, tags: &BTreeSet<String>, query: &str) -> Result<bool, SemError> {
        if !self.is_registered(query) {
            return Err(self.unknown(query));
        }
        for t in tags {
            if !self.is_registered(t) {
                return Err(self.unknown(t));
            }
            if self.ancestors(t)?.contains(query) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Closest registered tag by edit distance, for diagnostics.
    pub fn suggest(&self, tag: &str) -> Option<String> {
        self.parents
            .keys()
            .map(|k| (edit_distance(tag, k), k))
            .filter(|(d, _)| *d <= 2)
            .min_by_key(|(d, k)| (*d, k.len()))
            .map(|(_, k)| k.clone())
    }

    fn unknown(&self, tag: &str) -> SemError {
        SemError::UnknownTag {
            tag: tag.to_string(),
            suggestion: self.suggest(tag),
        }
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.parents.keys().map(|s| s.as_str())
    }
}

impl Default for TagRegistry {
    fn default() -> Self {
        TagRegistry::new()
    }
}

fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut cur = vec![i + 1];
        for (j, cb) in b.iter().enumerate() {
            let cost = if ca == cb { 0 } else { 1 };
            cur.push((prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1));
        }
        prev = cur;
    }
    prev[b.len()]
}

/// A placed object instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub id: u64,
    pub kind: String,
    pub params: Vec<f64>,
    pub pose: Pose,
    pub placeholder: PlaceholderObject,
    pub tags: BTreeSet<String>,
    pub stage: Stage,
    pub lod: Lod,
    /// Home room (objects are solved per room).
    pub room: u32,
}

impl ObjectInstance {
    pub fn world_plane(&self, class: &str, index: u32) -> Option<Plane> {
        let tp = self.placeholder.plane(class, index)?;
        Some(Plane {
            point: self.pose.apply(tp.point),
            normal: self.pose.apply_dir(tp.normal),
            owner: EntId::Object(self.id),
            tag: tp.class.clone(),
            index: tp.index,
            boundary: tp.boundary.iter().map(|&v| self.pose.apply(v)).collect(),
        })
    }

    pub fn world_planes(&self) -> Vec<Plane> {
        self.placeholder
            .planes
            .iter()
            .map(|tp| Plane {
                point: self.pose.apply(tp.point),
                normal: self.pose.apply_dir(tp.normal),
                owner: EntId::Object(self.id),
                tag: tp.class.clone(),
                index: tp.index,
                boundary: tp.boundary.iter().map(|&v| self.pose.apply(v)).collect(),
            })
            .collect()
    }

    pub fn centroid(&self) -> Vec3 {
        self.pose.apply(self.placeholder.bbox_center())
    }

    /// Front direction: the front plane normal when tagged, else local +x.
    pub fn front_normal(&self) -> Vec3 {
        match self.placeholder.plane("front", 0) {
            Some(p) => self.pose.apply_dir(p.normal),
            None => self.pose.apply_dir(Vec3::X),
        }
    }

    /// Convex XY footprint (hull of the bounding box corners).
    pub fn footprint(&self) -> Vec<Vec2> {
        let (lo, hi) = (self.placeholder.bbox_min, self.placeholder.bbox_max);
        let mut pts = Vec::with_capacity(8);
        for &x in &[lo.x, hi.x] {
            for &y in &[lo.y, hi.y] {
                for &z in &[lo.z, hi.z] {
                    let w = self.pose.apply(vec3(x, y, z));
                    pts.push(vec2(w.x, w.y));
                }
            }
        }
        convex_hull(&pts)
    }

    /// World-space AABB of the bounding box (conservative for both LODs).
    pub fn world_aabb(&self) -> (Vec3, Vec3) {
        let (lo, hi) = (self.placeholder.bbox_min, self.placeholder.bbox_max);
        let mut min = vec3(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut max = vec3(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &x in &[lo.x, hi.x] {
            for &y in &[lo.y, hi.y] {
                for &z in &[lo.z, hi.z] {
                    let w = self.pose.apply(vec3(x, y, z));
                    min = min.min_by_component(w);
                    max = max.max_by_component(w);
                }
            }
        }
        (min, max)
    }

    pub fn active_mesh(&self) -> &TriMesh {
        self.placeholder.active_mesh(self.lod)
    }
}

/// A room surface set derived from a floorplan cell: floor, ceiling, and one
/// wall plane per boundary segment, all in world space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Room {
    pub id: u32,
    pub name: String,
    pub kind: String,
    pub floor_index: u32,
    pub polygon: Polygon2D,
    pub z: f64,
    pub height: f64,
    pub tags: BTreeSet<String>,
    planes: Vec<Plane>,
    mesh: TriMesh,
    plane_tris: BTreeMap<(String, u32), Vec<u32>>,
}

impl Room {
    pub fn new(
        id: u32,
        name: String,
        kind: &str,
        floor_index: u32,
        polygon: Polygon2D,
        z: f64,
        height: f64,
    ) -> Room {
        let owner = EntId::Room(id);
        let ring = polygon.exterior().to_vec();
        let mut planes = Vec::new();
        let mut vertices: Vec<Vec3> = Vec::new();
        let mut triangles: Vec<[u32; 3]> = Vec::new();
        let mut plane_tris: BTreeMap<(String, u32), Vec<u32>> = BTreeMap::new();

        // Floor: triangulated from the exact cell decomposition when the
        // polygon is rectilinear, else fanned (test fixtures only).
        let floor_rects: Vec<(f64, f64, f64, f64)> = match Region::from_polygon(&polygon) {
            Ok(region) if !region.is_empty() => region_runs(&region),
            _ => Vec::new(),
        };
        let mut floor_tris = Vec::new();
        if floor_rects.is_empty() {
            let base = vertices.len() as u32;
            for p in &ring {
                vertices.push(vec3(p.x, p.y, z));
            }
            for i in 1..ring.len() - 1 {
                floor_tris.push(triangles.len() as u32);
                triangles.push([base, base + i as u32, base + i as u32 + 1]);
            }
        } else {
            for (x0, y0, x1, y1) in floor_rects {
                let base = vertices.len() as u32;
                vertices.push(vec3(x0, y0, z));
                vertices.push(vec3(x1, y0, z));
                vertices.push(vec3(x1, y1, z));
                vertices.push(vec3(x0, y1, z));
                floor_tris.push(triangles.len() as u32);
                triangles.push([base, base + 1, base + 2]);
                floor_tris.push(triangles.len() as u32);
                triangles.push([base, base + 2, base + 3]);
            }
        }
        plane_tris.insert(("floor".into(), 0), floor_tris.clone());
        let centroid2 = ring_centroid(&ring);
        planes.push(Plane {
            point: vec3(centroid2.x, centroid2.y, z),
            normal: Vec3::Z,
            owner,
            tag: "floor".into(),
            index: 0,
            boundary: ring.iter().map(|p| vec3(p.x, p.y, z)).collect(),
        });

        // Walls: one plane per exterior edge, normal pointing into the room.
        let n = ring.len();
        for i in 0..n {
            let a = ring[i];
            let b = ring[(i + 1) % n];
            let dir = (b - a).normalized(1e-12).unwrap_or(vec2(1.0, 0.0));
            let inward = dir.perp(); // CCW ring: interior on the left
            let base = vertices.len() as u32;
            vertices.push(vec3(b.x, b.y, z));
            vertices.push(vec3(a.x, a.y, z));
            vertices.push(vec3(a.x, a.y, z + height));
            vertices.push(vec3(b.x, b.y, z + height));
            let t0 = triangles.len() as u32;
            triangles.push([base, base + 1, base + 2]);
            triangles.push([base, base + 2, base + 3]);
            plane_tris.insert(("wall".into(), i as u32), vec![t0, t0 + 1]);
            let mid = (a + b) * 0.5;
            planes.push(Plane {
                point: vec3(mid.x, mid.y, z + height * 0.5),
                normal: vec3(inward.x, inward.y, 0.0),
                owner,
                tag: "wall".into(),
                index: i as u32,
                boundary: vec![
                    vec3(b.x, b.y, z),
                    vec3(a.x, a.y, z),
                    vec3(a.x, a.y, z + height),
                    vec3(b.x, b.y, z + height),
                ],
            });
        }

        // Ceiling (no mesh; nothing collides with it).
        planes.push(Plane {
            point: vec3(centroid2.x, centroid2.y, z + height),
            normal: -Vec3::Z,
            owner,
            tag: "ceiling".into(),
            index: 0,
            boundary: {
                let mut b: Vec<Vec3> =
                    ring.iter().map(|p| vec3(p.x, p.y, z + height)).collect();
                b.reverse();
                b
            },
        });

        let mesh = TriMesh::new(vertices, triangles).expect("room mesh is well-formed");
        let mut tags = BTreeSet::new();
        tags.insert(kind.to_string());
        Room {
            id,
            name,
            kind: kind.to_string(),
            floor_index,
            polygon,
            z,
            height,
            tags,
            planes,
            mesh,
            plane_tris,
        }
    }

    pub fn plane(&self, class: &str, index: u32) -> Option<&Plane> {
        self.planes
            .iter()
            .find(|p| p.tag == class && p.index == index)
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn plane_triangles(&self, class: &str, index: u32) -> Option<&[u32]> {
        self.plane_tris
            .get(&(class.to_string(), index))
            .map(|v| v.as_slice())
    }

    pub fn centroid(&self) -> Vec3 {
        let c = ring_centroid(self.polygon.exterior());
        vec3(c.x, c.y, self.z + self.height * 0.5)
    }

    pub fn wall_count(&self) -> usize {
        self.polygon.exterior().len()
    }
}

fn ring_centroid(ring: &[Vec2]) -> Vec2 {
    // Area centroid of a simple ring.
    let n = ring.len();
    let mut a2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let p = ring[i];
        let q = ring[(i + 1) % n];
        let w = p.cross(q);
        a2 += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    if a2.abs() < 1e-12 {
        let mut m = vec2(0.0, 0.0);
        for p in ring {
            m = m + *p;
        }
        return m / (n.max(1) as f64);
    }
    vec2(cx / (3.0 * a2), cy / (3.0 * a2))
}

fn region_runs(region: &Region) -> Vec<(f64, f64, f64, f64)> {
    region.rects()
}

/// Mutable world state: rooms, object instances, relation instances.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneState {
    rooms: Vec<Room>,
    objects: BTreeMap<u64, ObjectInstance>,
    relations: Vec<RelationInstance>,
    next_id: u64,
    pub mutation_counter: u64,
}

impl SceneState {
    pub fn new(rooms: Vec<Room>) -> SceneState {
        SceneState {
            rooms,
            objects: BTreeMap::new(),
            relations: Vec::new(),
            next_id: 1,
            mutation_counter: 0,
        }
    }

    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }

    pub fn room(&self, id: u32) -> Option<&Room> {
        self.rooms.iter().find(|r| r.id == id)
    }

    pub fn objects(&self) -> impl Iterator<Item = &ObjectInstance> {
        self.objects.values()
    }

    pub fn object(&self, id: u64) -> Result<&ObjectInstance, SemError> {
        self.objects
            .get(&id)
            .ok_or(SemError::UnknownEntity(EntId::Object(id)))
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    /// All entity ids: rooms first, then objects, ascending.
    pub fn all_entities(&self) -> Vec<EntId> {
        let mut out: Vec<EntId> = self.rooms.iter().map(|r| EntId::Room(r.id)).collect();
        out.extend(self.objects.keys().map(|&id| EntId::Object(id)));
        out
    }

    pub fn tags_of(&self, ent: EntId) -> Result<&BTreeSet<String>, SemError> {
        match ent {
            EntId::Room(id) => self
                .room(id)
                .map(|r| &r.tags)
                .ok_or(SemError::UnknownEntity(ent)),
            EntId::Object(id) => self.object(id).map(|o| &o.tags),
        }
    }

    pub fn insert_object(&mut self, mut obj: ObjectInstance) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        obj.id = id;
        self.objects.insert(id, obj);
        self.mutation_counter += 1;
        id
    }

    /// Reinsert an object under its original id (undo path).
    pub fn restore_object(&mut self, obj: ObjectInstance, relations: Vec<RelationInstance>) {
        self.next_id = self.next_id.max(obj.id + 1);
        self.objects.insert(obj.id, obj);
        self.relations.extend(relations);
        self.mutation_counter += 1;
    }

    /// Remove `id` and every object transitively supported by it. Returns
    /// the removed objects with their relations, in removal order.
    pub fn remove_object_cascading(
        &mut self,
        id: u64,
    ) -> Vec<(ObjectInstance, Vec<RelationInstance>)> {
        let mut to_remove = vec![id];
        let mut queue = vec![id];
        while let Some(parent) = queue.pop() {
            for rel in &self.relations {
                if rel.parent.0 == EntId::Object(parent) && !to_remove.contains(&rel.child.0) {
                    to_remove.push(rel.child.0);
                    queue.push(rel.child.0);
                }
            }
        }
        let mut removed = Vec::new();
        for oid in to_remove {
            if let Some(obj) = self.objects.remove(&oid) {
                let mut kept = Vec::with_capacity(self.relations.len());
                let mut mine = Vec::new();
                for rel in self.relations.drain(..) {
                    if rel.child.0 == oid {
                        mine.push(rel);
                    } else {
                        kept.push(rel);
                    }
                }
                self.relations = kept;
                removed.push((obj, mine));
            }
        }
        self.mutation_counter += 1;
        removed
    }

    pub fn set_pose(&mut self, id: u64, pose: Pose) -> Result<Pose, SemError> {
        let obj = self
            .objects
            .get_mut(&id)
            .ok_or(SemError::UnknownEntity(EntId::Object(id)))?;
        let old = obj.pose;
        obj.pose = pose;
        self.mutation_counter += 1;
        Ok(old)
    }

    pub fn set_placeholder(
        &mut self,
        id: u64,
        params: Vec<f64>,
        placeholder: PlaceholderObject,
    ) -> Result<(Vec<f64>, PlaceholderObject), SemError> {
        let obj = self
            .objects
            .get_mut(&id)
            .ok_or(SemError::UnknownEntity(EntId::Object(id)))?;
        let old = (
            std::mem::replace(&mut obj.params, params),
            std::mem::replace(&mut obj.placeholder, placeholder),
        );
        self.mutation_counter += 1;
        Ok(old)
    }

    pub fn set_lod(&mut self, id: u64, lod: Lod) -> Result<Lod, SemError> {
        let obj = self
            .objects
            .get_mut(&id)
            .ok_or(SemError::UnknownEntity(EntId::Object(id)))?;
        let old = obj.lod;
        obj.lod = lod;
        self.mutation_counter += 1;
        Ok(old)
    }

    pub fn relations(&self) -> &[RelationInstance] {
        &self.relations
    }

    pub fn relations_of_child(&self, id: u64) -> Vec<&RelationInstance> {
        self.relations.iter().filter(|r| r.child.0 == id).collect()
    }

    pub fn add_relation(&mut self, rel: RelationInstance) -> Result<(), SemError> {
        rel.validate()?;
        self.relations.push(rel);
        self.mutation_counter += 1;
        Ok(())
    }

    /// Replace all relations of `child`; returns the previous set in order.
    pub fn replace_relations_of(
        &mut self,
        child: u64,
        new: Vec<RelationInstance>,
    ) -> Vec<RelationInstance> {
        let mut old = Vec::new();
        let mut kept = Vec::with_capacity(self.relations.len());
        for rel in self.relations.drain(..) {
            if rel.child.0 == child {
                old.push(rel);
            } else {
                kept.push(rel);
            }
        }
        self.relations = kept;
        self.relations.extend(new);
        self.mutation_counter += 1;
        old
    }

    /// World-space plane lookup.
    pub fn plane(&self, owner: EntId, class: &str, index: u32) -> Result<Plane, SemError> {
        match owner {
            EntId::Room(id) => self
                .room(id)
                .ok_or(SemError::UnknownEntity(owner))?
                .plane(class, index)
                .cloned(),
            EntId::Object(id) => self.object(id)?.world_plane(class, index),
        }
        .ok_or_else(|| SemError::MissingPlane {
            owner,
            class: class.to_string(),
            index,
        })
    }

    pub fn planes_of(&self, owner: EntId) -> Result<Vec<Plane>, SemError> {
        match owner {
            EntId::Room(id) => Ok(self
                .room(id)
                .ok_or(SemError::UnknownEntity(owner))?
                .planes()
                .to_vec()),
            EntId::Object(id) => Ok(self.object(id)?.world_planes()),
        }
    }

    pub fn centroid(&self, ent: EntId) -> Result<Vec3, SemError> {
        match ent {
            EntId::Room(id) => self
                .room(id)
                .map(|r| r.centroid())
                .ok_or(SemError::UnknownEntity(ent)),
            EntId::Object(id) => self.object(id).map(|o| o.centroid()),
        }
    }

    /// Structural equality ignoring the mutation counter.
    pub fn structurally_equal(&self, other: &SceneState) -> bool {
        self.objects == other.objects && self.relations == other.relations
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_ancestry() {
        let reg = TagRegistry::builtin();
        let tags = BTreeSet::from(["sofa".to_string()]);
        assert!(reg.tag_matches(&tags, "furniture").unwrap());
        assert!(reg.tag_matches(&tags, "seating").unwrap());
        assert!(reg.tag_matches(&tags, "sofa").unwrap());
        assert!(reg.tag_matches(&tags, ROOT_TAG).unwrap());
        assert!(!reg.tag_matches(&tags, "storage").unwrap());
    }

    #[test]
    fn unknown_tag_errors_with_suggestion() {
        let reg = TagRegistry::builtin();
        let tags = BTreeSet::from(["sofa".to_string()]);
        match reg.tag_matches(&tags, "sofaa") {
            Err(SemError::UnknownTag { suggestion, .. }) => {
                assert_eq!(suggestion.as_deref(), Some("sofa"));
            }
            other => panic!("expected unknown tag error, got {other:?}"),
        }
    }

    #[test]
    fn tag_matching_is_transitive() {
        let reg = TagRegistry::builtin();
        // chair -> seating -> furniture: matching holds along the chain.
        for (tag, query) in [("chair", "seating"), ("seating", "furniture"), ("chair", "furniture")]
        {
            let tags = BTreeSet::from([tag.to_string()]);
            assert!(reg.tag_matches(&tags, query).unwrap(), "{tag} vs {query}");
        }
    }

    #[test]
    fn room_planes_exist() {
        let poly = Polygon2D::rect(0.0, 0.0, 4.0, 3.0);
        let room = Room::new(0, "living-room_0".into(), "living-room", 0, poly, 0.0, 2.7);
        assert!(room.plane("floor", 0).is_some());
        assert!(room.plane("ceiling", 0).is_some());
        assert_eq!(room.wall_count(), 4);
        // Wall normals point inward.
        let w0 = room.plane("wall", 0).unwrap();
        let c = room.centroid();
        assert!(w0.normal.dot(c - w0.point) > 0.0);
        assert!(!room.mesh().is_empty());
    }

    #[test]
    fn mutation_counter_increases() {
        let mut scene = SceneState::new(vec![]);
        let c0 = scene.mutation_counter;
        let cat = crate::assets::Catalog::builtin();
        let ph = crate::assets::generate(cat, "cup", &[0.04, 0.1], 0).unwrap();
        let id = scene.insert_object(ObjectInstance {
            id: 0,
            kind: "cup".into(),
            params: vec![0.04, 0.1],
            pose: Pose::IDENTITY,
            placeholder: ph,
            tags: BTreeSet::from(["cup".to_string()]),
            stage: Stage::Small,
            lod: Lod::Full,
            room: 0,
        });
        assert!(scene.mutation_counter > c0);
        let c1 = scene.mutation_counter;
        scene.set_pose(id, Pose::translation(vec3(1.0, 0.0, 0.0))).unwrap();
        assert!(scene.mutation_counter > c1);
    }

    #[test]
    fn cascading_removal_keeps_no_dangling_relations() {
        let cat = crate::assets::Catalog::builtin();
        let mut scene = SceneState::new(vec![]);
        let table = crate::assets::generate(cat, "dining_table", &[1.6, 0.9, 0.75, 0.04], 0).unwrap();
        let cup = crate::assets::generate(cat, "cup", &[0.04, 0.1], 0).unwrap();
        let tid = scene.insert_object(ObjectInstance {
            id: 0,
            kind: "dining_table".into(),
            params: vec![1.6, 0.9, 0.75, 0.04],
            pose: Pose::IDENTITY,
            placeholder: table,
            tags: BTreeSet::from(["dining-table".to_string()]),
            stage: Stage::Large,
            lod: Lod::Full,
            room: 0,
        });
        let cid = scene.insert_object(ObjectInstance {
            id: 0,
            kind: "cup".into(),
            params: vec![0.04, 0.1],
            pose: Pose::translation(vec3(0.0, 0.0, 0.75)),
            placeholder: cup,
            tags: BTreeSet::from(["cup".to_string()]),
            stage: Stage::Small,
            lod: Lod::Full,
            room: 0,
        });
        scene
            .add_relation(RelationInstance::supported_by(
                (cid, PlaneRef::new("base", 0)),
                (EntId::Object(tid), PlaneRef::new("top", 0)),
            ))
            .unwrap();
        let removed = scene.remove_object_cascading(tid);
        assert_eq!(removed.len(), 2);
        assert!(scene.relations().is_empty());
        assert!(scene.object(cid).is_err());
        // Undo restores both.
        for (obj, rels) in removed.into_iter().rev() {
            scene.restore_object(obj, rels);
        }
        assert!(scene.object(cid).is_ok());
        assert_eq!(scene.relations().len(), 1);
    }
}
