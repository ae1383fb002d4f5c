//! Relation instances and their geometric predicates.
//!
//! StableAgainst: child surface parallel to the parent surface, exactly at
//! the declared margin, with the child's contact footprint fully on the
//! parent's bounded region (no overhang). SupportedBy: flush parallel
//! contact with the child's centroid over the convex hull of the
//! child-parent footprint intersection (zero torque under gravity).

use super::{EntId, SceneState, SemError};
use crate::geom::poly2::{
    clip_polygon_convex, convex_hull, convex_in_polygon, point_in_convex_eps, vec2, Vec2,
};
use crate::geom::{Plane, Polygon2D, Vec3};
use serde::{Deserialize, Serialize};

/// Surfaces parallel within 1 degree.
pub const PARALLEL_TOL_COS: f64 = 0.999_847_695_156_391_3;
/// Margin gap tolerance: 5 mm.
pub const GAP_TOL: f64 = 5e-3;
/// Footprint containment slack.
const FOOT_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationKind {
    StableAgainst,
    SupportedBy,
}

impl RelationKind {
    pub fn name(self) -> &'static str {
        match self {
            RelationKind::StableAgainst => "stable_against",
            RelationKind::SupportedBy => "supported_by",
        }
    }
}

/// Reference to one tagged plane of an owner: surface class plus index.
#[derive(
    Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct PlaneRef {
    pub class: String,
    pub index: u32,
}

impl PlaneRef {
    pub fn new(class: &str, index: u32) -> PlaneRef {
        PlaneRef {
            class: class.to_string(),
            index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationInstance {
    pub kind: RelationKind,
    pub child: (u64, PlaneRef),
    pub parent: (EntId, PlaneRef),
    pub margin: f64,
}

impl RelationInstance {
    pub fn stable_against(
        child: (u64, PlaneRef),
        parent: (EntId, PlaneRef),
        margin: f64,
    ) -> RelationInstance {
        RelationInstance {
            kind: RelationKind::StableAgainst,
            child,
            parent,
            margin,
        }
    }

    /// SupportedBy always has zero margin.
    pub fn supported_by(child: (u64, PlaneRef), parent: (EntId, PlaneRef)) -> RelationInstance {
        RelationInstance {
            kind: RelationKind::SupportedBy,
            child,
            parent,
            margin: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), SemError> {
        if EntId::Object(self.child.0) == self.parent.0 {
            return Err(SemError::InvalidRelation(
                "child and parent are the same entity".into(),
            ));
        }
        if self.margin < 0.0 {
            return Err(SemError::InvalidRelation("negative margin".into()));
        }
        if self.kind == RelationKind::SupportedBy && self.margin != 0.0 {
            return Err(SemError::InvalidRelation(
                "SupportedBy requires zero margin".into(),
            ));
        }
        Ok(())
    }
}

/// Orthonormal in-plane basis (u, v) for a unit normal, deterministic.
pub fn plane_basis(normal: Vec3) -> (Vec3, Vec3) {
    let reference = if normal.x.abs() <= normal.y.abs() && normal.x.abs() <= normal.z.abs() {
        Vec3::X
    } else if normal.y.abs() <= normal.z.abs() {
        Vec3::Y
    } else {
        Vec3::Z
    };
    let u = (reference - normal * reference.dot(normal))
        .normalized(1e-12)
        .expect("reference not parallel to normal");
    let v = normal.cross(u);
    (u, v)
}

fn to_plane_2d(plane: &Plane, basis: (Vec3, Vec3), p: Vec3) -> Vec2 {
    let d = p - plane.point;
    vec2(d.dot(basis.0), d.dot(basis.1))
}

/// Child contact footprint projected into the parent plane's 2D frame.
fn projected_footprint(parent: &Plane, basis: (Vec3, Vec3), child: &Plane) -> Vec<Vec2> {
    let pts: Vec<Vec2> = child
        .boundary
        .iter()
        .map(|&v| to_plane_2d(parent, basis, v))
        .collect();
    convex_hull(&pts)
}

fn parent_region(parent: &Plane, basis: (Vec3, Vec3)) -> Result<Polygon2D, SemError> {
    let ring: Vec<Vec2> = parent
        .boundary
        .iter()
        .map(|&v| to_plane_2d(parent, basis, v))
        .collect();
    Polygon2D::new(ring, vec![])
        .map_err(|e| SemError::InvalidRelation(format!("degenerate parent region: {e}")))
}

fn fetch_planes(
    scene: &SceneState,
    rel: &RelationInstance,
) -> Result<(Plane, Plane), SemError> {
    let child = scene.plane(
        EntId::Object(rel.child.0),
        &rel.child.1.class,
        rel.child.1.index,
    )?;
    let parent = scene.plane(rel.parent.0, &rel.parent.1.class, rel.parent.1.index)?;
    Ok((child, parent))
}

/// Anti-parallel surfaces at the declared margin, no overhang.
pub fn check_stable_against(scene: &SceneState, rel: &RelationInstance) -> Result<bool, SemError> {
    let (child, parent) = fetch_planes(scene, rel)?;
    if child.normal.dot(parent.normal) > -PARALLEL_TOL_COS {
        return Ok(false);
    }
    let gap = parent.signed_distance(child.point);
    if (gap - rel.margin).abs() > GAP_TOL {
        return Ok(false);
    }
    let basis = plane_basis(parent.normal);
    let footprint = projected_footprint(&parent, basis, &child);
    let region = parent_region(&parent, basis)?;
    Ok(convex_in_polygon(&footprint, &region, FOOT_EPS))
}

/// Flush parallel contact with the child's centroid above the footprint
/// intersection.
pub fn check_supported_by(scene: &SceneState, rel: &RelationInstance) -> Result<bool, SemError> {
    let (child, parent) = fetch_planes(scene, rel)?;
    if child.normal.dot(parent.normal) > -PARALLEL_TOL_COS {
        return Ok(false);
    }
    let gap = parent.signed_distance(child.point);
    if gap.abs() > GAP_TOL {
        return Ok(false);
    }
    let basis = plane_basis(parent.normal);
    let footprint = projected_footprint(&parent, basis, &child);
    if footprint.len() < 3 {
        return Ok(false);
    }
    let parent_ring: Vec<Vec2> = parent
        .boundary
        .iter()
        .map(|&v| to_plane_2d(&parent, basis, v))
        .collect();
    let intersection = clip_polygon_convex(&parent_ring, &footprint);
    let hull = convex_hull(&intersection);
    if hull.len() < 3 {
        return Ok(false);
    }
    let centroid = scene.centroid(EntId::Object(rel.child.0))?;
    let c2 = to_plane_2d(&parent, basis, centroid);
    Ok(point_in_convex_eps(&hull, c2, 1e-9))
}

/// Evaluate a relation instance's predicate.
pub fn check_relation(scene: &SceneState, rel: &RelationInstance) -> Result<bool, SemError> {
    match rel.kind {
        RelationKind::StableAgainst => check_stable_against(scene, rel),
        RelationKind::SupportedBy => check_supported_by(scene, rel),
    }
}

/// Members of `objects` that have a relation instance of `kind` to any member
/// of `targets` (margin matched exactly when given).
pub fn filter_related(
    scene: &SceneState,
    objects: &[EntId],
    targets: &[EntId],
    kind: RelationKind,
    margin: Option<f64>,
) -> Vec<EntId> {
    objects
        .iter()
        .copied()
        .filter(|ent| {
            let EntId::Object(id) = ent else {
                return false;
            };
            scene.relations().iter().any(|rel| {
                rel.child.0 == *id
                    && rel.kind == kind
                    && targets.contains(&rel.parent.0)
                    && margin.map_or(true, |m| (rel.margin - m).abs() <= 1e-9)
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets::{generate, Catalog, Lod};
    use crate::geom::{vec3, Polygon2D, Pose, Quat};
    use crate::semantics::{ObjectInstance, Room};
    use std::f64::consts::FRAC_PI_2;

    fn room_scene() -> SceneState {
        let poly = Polygon2D::rect(0.0, 0.0, 5.0, 4.0);
        let room = Room::new(0, "living-room_0".into(), "living-room", 0, poly, 0.0, 2.7);
        SceneState::new(vec![room])
    }

    fn add_kind(scene: &mut SceneState, kind: &str, params: &[f64], pose: Pose) -> u64 {
        let cat = Catalog::builtin();
        let spec = cat.spec(kind).unwrap();
        let ph = generate(cat, kind, params, 0).unwrap();
        scene.insert_object(ObjectInstance {
            id: 0,
            kind: kind.into(),
            params: params.to_vec(),
            pose,
            placeholder: ph,
            tags: spec.tags.iter().cloned().collect(),
            stage: spec.stage,
            lod: Lod::Full,
            room: 0,
        })
    }

    #[test]
    fn sofa_flush_on_floor_is_stable() {
        let mut scene = room_scene();
        let id = add_kind(
            &mut scene,
            "sofa",
            &[2.0, 0.9, 0.42, 0.85],
            Pose::translation(vec3(2.5, 2.0, 0.0)),
        );
        let rel = RelationInstance::stable_against(
            (id, PlaneRef::new("base", 0)),
            (EntId::Room(0), PlaneRef::new("floor", 0)),
            0.0,
        );
        assert!(check_stable_against(&scene, &rel).unwrap());
    }

    #[test]
    fn floating_sofa_is_not_stable() {
        let mut scene = room_scene();
        let id = add_kind(
            &mut scene,
            "sofa",
            &[2.0, 0.9, 0.42, 0.85],
            Pose::translation(vec3(2.5, 2.0, 0.2)),
        );
        let rel = RelationInstance::stable_against(
            (id, PlaneRef::new("base", 0)),
            (EntId::Room(0), PlaneRef::new("floor", 0)),
            0.0,
        );
        assert!(!check_stable_against(&scene, &rel).unwrap());
    }

    #[test]
    fn painting_margin_against_wall() {
        let mut scene = room_scene();
        // Wall 0 spans y=0 with inward normal +y; the painting's back plane
        // (local -x) must face it, so yaw by +90 degrees.
        let id = add_kind(
            &mut scene,
            "painting",
            &[0.8, 0.6, 0.03],
            Pose::new(vec3(2.5, 0.1, 1.4), Quat::yaw(FRAC_PI_2)),
        );
        let rel = RelationInstance::stable_against(
            (id, PlaneRef::new("back", 0)),
            (EntId::Room(0), PlaneRef::new("wall", 0)),
            0.10,
        );
        assert!(check_stable_against(&scene, &rel).unwrap());
        // Wrong margin fails.
        let rel0 = RelationInstance::stable_against(
            (id, PlaneRef::new("back", 0)),
            (EntId::Room(0), PlaneRef::new("wall", 0)),
            0.0,
        );
        assert!(!check_stable_against(&scene, &rel0).unwrap());
    }

    #[test]
    fn painting_overhanging_wall_edge_fails() {
        let mut scene = room_scene();
        // Centered past the wall's x-extent: footprint sticks out.
        let id = add_kind(
            &mut scene,
            "painting",
            &[0.8, 0.6, 0.03],
            Pose::new(vec3(4.9, 0.0, 1.4), Quat::yaw(FRAC_PI_2)),
        );
        let rel = RelationInstance::stable_against(
            (id, PlaneRef::new("back", 0)),
            (EntId::Room(0), PlaneRef::new("wall", 0)),
            0.0,
        );
        assert!(!check_stable_against(&scene, &rel).unwrap());
    }

    #[test]
    fn cup_on_table_supported_and_stable() {
        let mut scene = room_scene();
        let table = add_kind(
            &mut scene,
            "dining_table",
            &[1.6, 0.9, 0.75, 0.04],
            Pose::translation(vec3(2.5, 2.0, 0.0)),
        );
        let cup = add_kind(
            &mut scene,
            "cup",
            &[0.04, 0.1],
            Pose::translation(vec3(2.5, 2.0, 0.75)),
        );
        let sup = RelationInstance::supported_by(
            (cup, PlaneRef::new("base", 0)),
            (EntId::Object(table), PlaneRef::new("top", 0)),
        );
        assert!(check_supported_by(&scene, &sup).unwrap());
        let stable = RelationInstance::stable_against(
            (cup, PlaneRef::new("base", 0)),
            (EntId::Object(table), PlaneRef::new("top", 0)),
            0.0,
        );
        assert!(check_stable_against(&scene, &stable).unwrap());
    }

    #[test]
    fn teetering_cup_supported_but_not_stable() {
        let mut scene = room_scene();
        let table = add_kind(
            &mut scene,
            "dining_table",
            &[1.6, 0.9, 0.75, 0.04],
            Pose::translation(vec3(2.5, 2.0, 0.0)),
        );
        // Table top spans x in [1.7, 3.3]; cup radius 0.04 centered just
        // inside the edge overhangs but keeps its centroid over the top.
        let cup = add_kind(
            &mut scene,
            "cup",
            &[0.04, 0.1],
            Pose::translation(vec3(3.29, 2.0, 0.75)),
        );
        let sup = RelationInstance::supported_by(
            (cup, PlaneRef::new("base", 0)),
            (EntId::Object(table), PlaneRef::new("top", 0)),
        );
        let stable = RelationInstance::stable_against(
            (cup, PlaneRef::new("base", 0)),
            (EntId::Object(table), PlaneRef::new("top", 0)),
            0.0,
        );
        assert!(check_supported_by(&scene, &sup).unwrap());
        assert!(!check_stable_against(&scene, &stable).unwrap());
    }

    #[test]
    fn cup_past_edge_not_supported() {
        let mut scene = room_scene();
        let table = add_kind(
            &mut scene,
            "dining_table",
            &[1.6, 0.9, 0.75, 0.04],
            Pose::translation(vec3(2.5, 2.0, 0.0)),
        );
        let cup = add_kind(
            &mut scene,
            "cup",
            &[0.04, 0.1],
            Pose::translation(vec3(3.36, 2.0, 0.75)),
        );
        let sup = RelationInstance::supported_by(
            (cup, PlaneRef::new("base", 0)),
            (EntId::Object(table), PlaneRef::new("top", 0)),
        );
        assert!(!check_supported_by(&scene, &sup).unwrap());
    }

    #[test]
    fn supported_with_full_footprint_implies_stable_at_zero_margin() {
        let mut scene = room_scene();
        let table = add_kind(
            &mut scene,
            "dining_table",
            &[1.6, 0.9, 0.75, 0.04],
            Pose::translation(vec3(2.5, 2.0, 0.0)),
        );
        for (x, y) in [(2.5, 2.0), (2.0, 1.8), (3.0, 2.2), (3.2, 2.0)] {
            let cup = add_kind(&mut scene, "cup", &[0.04, 0.1], Pose::translation(vec3(x, y, 0.75)));
            let sup = RelationInstance::supported_by(
                (cup, PlaneRef::new("base", 0)),
                (EntId::Object(table), PlaneRef::new("top", 0)),
            );
            let stable = RelationInstance::stable_against(
                (cup, PlaneRef::new("base", 0)),
                (EntId::Object(table), PlaneRef::new("top", 0)),
                0.0,
            );
            let sup_ok = check_supported_by(&scene, &sup).unwrap();
            let stable_ok = check_stable_against(&scene, &stable).unwrap();
            if stable_ok {
                assert!(sup_ok, "non-overhanging stable placement must be supported");
            }
        }
    }

    #[test]
    fn predicates_are_pure() {
        let mut scene = room_scene();
        let id = add_kind(
            &mut scene,
            "sofa",
            &[2.0, 0.9, 0.42, 0.85],
            Pose::translation(vec3(2.5, 2.0, 0.0)),
        );
        let rel = RelationInstance::stable_against(
            (id, PlaneRef::new("base", 0)),
            (EntId::Room(0), PlaneRef::new("floor", 0)),
            0.0,
        );
        let first = check_stable_against(&scene, &rel).unwrap();
        for _ in 0..10 {
            assert_eq!(check_stable_against(&scene, &rel).unwrap(), first);
        }
    }

    #[test]
    fn missing_plane_is_an_error() {
        let mut scene = room_scene();
        let id = add_kind(
            &mut scene,
            "cup",
            &[0.04, 0.1],
            Pose::translation(vec3(1.0, 1.0, 0.0)),
        );
        let rel = RelationInstance::stable_against(
            (id, PlaneRef::new("front", 0)), // cups have no front plane
            (EntId::Room(0), PlaneRef::new("floor", 0)),
            0.0,
        );
        assert!(check_stable_against(&scene, &rel).is_err());
    }

    #[test]
    fn filter_related_margin_matching() {
        let mut scene = room_scene();
        let sofa = add_kind(
            &mut scene,
            "sofa",
            &[2.0, 0.9, 0.42, 0.85],
            Pose::translation(vec3(2.5, 2.0, 0.0)),
        );
        let chair = add_kind(
            &mut scene,
            "dining_chair",
            &[0.45, 0.45, 0.45, 0.9],
            Pose::translation(vec3(1.0, 1.0, 0.0)),
        );
        scene
            .add_relation(RelationInstance::stable_against(
                (sofa, PlaneRef::new("base", 0)),
                (EntId::Room(0), PlaneRef::new("floor", 0)),
                0.0,
            ))
            .unwrap();
        let objs = vec![EntId::Object(sofa), EntId::Object(chair)];
        let rooms = vec![EntId::Room(0)];
        let hit = filter_related(&scene, &objs, &rooms, RelationKind::StableAgainst, None);
        assert_eq!(hit, vec![EntId::Object(sofa)]);
        let miss = filter_related(
            &scene,
            &objs,
            &rooms,
            RelationKind::StableAgainst,
            Some(0.1),
        );
        assert!(miss.is_empty());
        assert!(filter_related(&scene, &objs, &[], RelationKind::StableAgainst, None).is_empty());
    }
}
