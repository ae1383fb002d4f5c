//! Constraint-program evaluation: score operators, hard/soft aggregation,
//! memoized incremental re-evaluation, and cardinality-bound extraction.

pub mod bounds;
pub mod evaluate;
pub mod geo;
pub mod ops;

pub use bounds::{extract_bounds, Bound, BoundContext, TargetRef};
pub use evaluate::{
    evaluate, EvalCache, EvalContext, HardViolation, MutationEffect, ScoreReport, Value,
};
pub use geo::GeomCache;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{op} needs at least {need} objects, got {got}")]
    InsufficientObjects {
        op: &'static str,
        need: usize,
        got: usize,
    },
    #[error("{0} requires a reference entity")]
    MissingReference(&'static str),
    #[error("unbound loop variable '{0}'")]
    UnboundVariable(String),
    #[error(transparent)]
    Semantics(#[from] crate::semantics::SemError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets::{generate, Catalog, Lod};
    use crate::cdsl::parse;
    use crate::geom::{vec3, Polygon2D, Pose, Quat};
    use crate::semantics::{
        EntId, ObjectInstance, PlaneRef, RelationInstance, Room, SceneState, TagRegistry,
    };
    use std::collections::BTreeSet;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn scene_with_room() -> SceneState {
        let poly = Polygon2D::rect(0.0, 0.0, 6.0, 5.0);
        let room = Room::new(0, "dining-room_0".into(), "dining-room", 0, poly, 0.0, 2.7);
        SceneState::new(vec![room])
    }

    fn add(scene: &mut SceneState, kind: &str, params: &[f64], pose: Pose) -> u64 {
        let cat = Catalog::builtin();
        let spec = cat.spec(kind).unwrap();
        let ph = generate(cat, kind, params, 0).unwrap();
        let id = scene.insert_object(ObjectInstance {
            id: 0,
            kind: kind.into(),
            params: params.to_vec(),
            pose,
            placeholder: ph,
            tags: spec.tags.iter().cloned().collect(),
            stage: spec.stage,
            lod: Lod::Full,
            room: 0,
        });
        scene
            .add_relation(RelationInstance::stable_against(
                (id, PlaneRef::new("base", 0)),
                (EntId::Room(0), PlaneRef::new("floor", 0)),
                0.0,
            ))
            .unwrap();
        id
    }

    fn eval_program(text: &str, scene: &SceneState) -> ScoreReport {
        let program = parse(text).unwrap();
        let registry = TagRegistry::builtin();
        let mut geo = GeomCache::all_on();
        let mut ctx = EvalContext {
            scene,
            registry: &registry,
            geo: &mut geo,
        };
        evaluate(&program, &mut ctx, None, false).unwrap()
    }

    #[test]
    fn empty_scene_trivial_hard_passes() {
        let scene = SceneState::new(vec![]);
        let report = eval_program("(hard any (<= 0.0 (count scene)))", &scene);
        assert!(report.hard_ok());
        assert_eq!(report.soft_loss, 0.0);
    }

    #[test]
    fn violated_count_constraint_is_listed() {
        let scene = scene_with_room();
        let report = eval_program(
            r#"(hard chairs (<= 2.0 (count (semantics scene "chair"))))"#,
            &scene,
        );
        assert_eq!(report.hard_violations.len(), 1);
        assert_eq!(report.hard_violations[0].name, "chairs");
    }

    #[test]
    fn count_area_volume_conventions() {
        let mut scene = scene_with_room();
        let report = eval_program(
            r#"(score v :weight 1.0 (volume (semantics scene "furniture")))"#,
            &scene,
        );
        assert_eq!(report.soft_loss, 0.0); // empty set
        add(
            &mut scene,
            "wardrobe",
            &[1.0, 0.6, 2.0],
            Pose::translation(vec3(1.0, 1.0, 0.0)),
        );
        let report = eval_program(
            r#"(score v :weight 1.0 (volume (semantics scene "wardrobe")))"#,
            &scene,
        );
        assert!((report.soft_loss - 1.0 * 0.6 * 2.0).abs() < 1e-9);
        // Area = product of the two largest extents (1.0 x 2.0).
        let report = eval_program(
            r#"(score a :weight 1.0 (area (semantics scene "wardrobe")))"#,
            &scene,
        );
        assert!((report.soft_loss - 2.0).abs() < 1e-9);
    }

    #[test]
    fn painting_area_uses_two_largest_axes() {
        let mut scene = scene_with_room();
        let cat = Catalog::builtin();
        let ph = generate(cat, "painting", &[1.0, 0.9, 0.02], 0).unwrap();
        scene.insert_object(ObjectInstance {
            id: 0,
            kind: "painting".into(),
            params: vec![1.0, 0.9, 0.02],
            pose: Pose::IDENTITY,
            placeholder: ph,
            tags: BTreeSet::from(["painting".to_string()]),
            stage: crate::assets::Stage::Medium,
            lod: Lod::Full,
            room: 0,
        });
        let report = eval_program(
            r#"(score a :weight 1.0 (area (semantics scene "painting")))"#,
            &scene,
        );
        assert!((report.soft_loss - 0.9).abs() < 1e-9);
    }

    #[test]
    fn focus_terms_hit_the_three_reference_angles() {
        // Facing exactly: 0; away: 1; perpendicular: 0.5.
        let mut scene = scene_with_room();
        let sofa = add(
            &mut scene,
            "sofa",
            &[2.0, 0.9, 0.42, 0.85],
            Pose::translation(vec3(2.0, 2.5, 0.0)),
        );
        // Mount the TV so its centroid is level with the sofa's, keeping the
        // direction vector horizontal.
        let sofa_c = scene.object(sofa).unwrap().centroid();
        let cat = Catalog::builtin();
        let tv_ph = generate(cat, "tv", &[1.2, 0.7, 0.06], 0).unwrap();
        let tv_center = tv_ph.bbox_center();
        scene.insert_object(ObjectInstance {
            id: 0,
            kind: "tv".into(),
            params: vec![1.2, 0.7, 0.06],
            pose: Pose::translation(vec3(5.0 - tv_center.x, 2.5, sofa_c.z - tv_center.z)),
            placeholder: tv_ph,
            tags: BTreeSet::from(["tv".to_string()]),
            stage: crate::assets::Stage::Medium,
            lod: Lod::Full,
            room: 0,
        });
        let text = r#"(score f :weight 1.0
            (focus_score (semantics scene "sofa") (semantics scene "tv")))"#;
        // Sofa front is +x, TV is at +x: facing.
        let facing = eval_program(text, &scene).soft_loss;
        assert!(facing < 1e-9, "facing loss {facing}");
        // Rotate the sofa to face -x: directly away.
        scene
            .set_pose(sofa, Pose::new(vec3(2.0, 2.5, 0.0), Quat::yaw(PI)))
            .unwrap();
        let away = eval_program(text, &scene).soft_loss;
        assert!((away - 1.0).abs() < 1e-9, "away loss {away}");
        scene
            .set_pose(sofa, Pose::new(vec3(2.0, 2.5, 0.0), Quat::yaw(FRAC_PI_2)))
            .unwrap();
        let perp = eval_program(text, &scene).soft_loss;
        assert!((perp - 0.5).abs() < 1e-9, "perpendicular loss {perp}");
    }

    #[test]
    fn rotation_asymmetry_zero_for_regular_polygons() {
        for n in 3..=8 {
            let mut scene = scene_with_room();
            let r = 1.5;
            for k in 0..n {
                let angle = TAU * (k as f64) / (n as f64);
                let (x, y) = (3.0 + r * angle.cos(), 2.5 + r * angle.sin());
                // Chair facing the center: front (+x local) rotated inward.
                add(
                    &mut scene,
                    "dining_chair",
                    &[0.45, 0.45, 0.45, 0.9],
                    Pose::new(vec3(x, y, 0.0), Quat::yaw(angle + PI)),
                );
            }
            let loss = eval_program(
                r#"(score r :weight 1.0 (rotation_asymmetry (semantics scene "chair")))"#,
                &scene,
            )
            .soft_loss;
            assert!(loss < 1e-9, "n={n} loss {loss}");
        }
    }

    #[test]
    fn rotation_asymmetry_positive_when_perturbed() {
        let mut scene = scene_with_room();
        let n = 5;
        let mut first = None;
        for k in 0..n {
            let angle = TAU * (k as f64) / (n as f64);
            let (x, y) = (3.0 + 1.5 * angle.cos(), 2.5 + 1.5 * angle.sin());
            let id = add(
                &mut scene,
                "dining_chair",
                &[0.45, 0.45, 0.45, 0.9],
                Pose::new(vec3(x, y, 0.0), Quat::yaw(angle + PI)),
            );
            first.get_or_insert(id);
        }
        // Displace one chair by 0.3 m.
        let id = first.unwrap();
        let old = scene.object(id).unwrap().pose;
        scene
            .set_pose(
                id,
                Pose::new(old.position + vec3(0.3, 0.0, 0.0), old.orientation),
            )
            .unwrap();
        let loss = eval_program(
            r#"(score r :weight 1.0 (rotation_asymmetry (semantics scene "chair")))"#,
            &scene,
        )
        .soft_loss;
        assert!(loss > 1e-6, "loss {loss}");
    }

    #[test]
    fn reflection_asymmetry_zero_for_mirrored_pairs() {
        let mut scene = scene_with_room();
        add(
            &mut scene,
            "dining_table",
            &[1.6, 0.9, 0.75, 0.04],
            Pose::translation(vec3(3.0, 2.5, 0.0)),
        );
        // Mirror pair across the table's local YZ median plane (x = 3).
        add(
            &mut scene,
            "dining_chair",
            &[0.45, 0.45, 0.45, 0.9],
            Pose::new(vec3(2.0, 2.5, 0.0), Quat::yaw(0.0)),
        );
        add(
            &mut scene,
            "dining_chair",
            &[0.45, 0.45, 0.45, 0.9],
            Pose::new(vec3(4.0, 2.5, 0.0), Quat::yaw(PI)),
        );
        let loss = eval_program(
            r#"(score m :weight 1.0
                (reflection_asymmetry (semantics scene "chair")
                                      (semantics scene "dining-table")))"#,
            &scene,
        )
        .soft_loss;
        assert!(loss < 1e-9, "loss {loss}");
    }

    #[test]
    fn reflection_asymmetry_in_unit_range_when_asymmetric() {
        let mut scene = scene_with_room();
        add(
            &mut scene,
            "dining_table",
            &[1.6, 0.9, 0.75, 0.04],
            Pose::translation(vec3(3.0, 2.5, 0.0)),
        );
        add(
            &mut scene,
            "dining_chair",
            &[0.45, 0.45, 0.45, 0.9],
            Pose::translation(vec3(2.0, 2.2, 0.0)),
        );
        add(
            &mut scene,
            "dining_chair",
            &[0.45, 0.45, 0.45, 0.9],
            Pose::new(vec3(4.3, 2.9, 0.0), Quat::yaw(1.0)),
        );
        let loss = eval_program(
            r#"(score m :weight 1.0
                (reflection_asymmetry (semantics scene "chair")
                                      (semantics scene "dining-table")))"#,
            &scene,
        )
        .soft_loss;
        assert!(loss > 0.0 && loss < 1.0, "loss {loss}");
    }

    #[test]
    fn angle_alignment_reference_values() {
        let mut scene = scene_with_room();
        // Chair near the east wall: nearest edge is x=6 with inward normal -x.
        let chair = add(
            &mut scene,
            "dining_chair",
            &[0.45, 0.45, 0.45, 0.9],
            Pose::translation(vec3(5.5, 2.5, 0.0)),
        );
        let text = r#"(score a :weight 1.0
            (angle_alignment_cost (semantics scene "chair") (semantics scene "room")))"#;
        // Facing +x against inward normal -x: theta = pi -> cost 1.
        let away = eval_program(text, &scene).soft_loss;
        assert!((away - 1.0).abs() < 1e-9, "{away}");
        scene
            .set_pose(chair, Pose::new(vec3(5.5, 2.5, 0.0), Quat::yaw(PI)))
            .unwrap();
        let aligned = eval_program(text, &scene).soft_loss;
        assert!(aligned < 1e-9, "{aligned}");
        scene
            .set_pose(chair, Pose::new(vec3(5.5, 2.5, 0.0), Quat::yaw(FRAC_PI_2)))
            .unwrap();
        let perp = eval_program(text, &scene).soft_loss;
        assert!((perp - 0.5).abs() < 1e-9, "{perp}");
    }

    #[test]
    fn accessibility_single_blocker_reference_value() {
        let mut scene = scene_with_room();
        let tv = add(
            &mut scene,
            "tv",
            &[1.2, 0.7, 0.06],
            Pose::translation(vec3(1.0, 2.5, 0.0)),
        );
        let pot = add(
            &mut scene,
            "plant_pot",
            &[0.2, 0.5],
            Pose::translation(vec3(2.5, 2.5, 0.0)),
        );
        let text = r#"(score acc :weight 1.0
            (accessibility_cost (semantics scene "tv") (semantics scene "plant") fast))"#;
        let got = eval_program(text, &scene).soft_loss;
        // Fast mode: probe = pot centroid, plane = tv front plane.
        let tv_obj = scene.object(tv).unwrap();
        let front = tv_obj.world_plane("front", 0).unwrap();
        let ac = tv_obj.centroid();
        let a_proj = ac - front.normal * (ac - front.point).dot(front.normal);
        let pot_c = scene.object(pot).unwrap().centroid();
        let d = pot_c - a_proj;
        let want = d.dot(front.normal) / d.norm_sq()
            * scene.object(pot).unwrap().placeholder.bbox_diagonal();
        assert!((got - want).abs() < 1e-12, "got {got} want {want}");
        // Empty blocker set: zero.
        let report = eval_program(
            r#"(score acc :weight 1.0
                (accessibility_cost (semantics scene "tv") (semantics scene "book") fast))"#,
            &scene,
        );
        assert_eq!(report.soft_loss, 0.0);
    }

    #[test]
    fn fast_and_slow_accessibility_agree_on_simple_scene() {
        let mut scene = scene_with_room();
        add(
            &mut scene,
            "tv",
            &[1.2, 0.7, 0.06],
            Pose::translation(vec3(1.0, 2.5, 0.0)),
        );
        add(
            &mut scene,
            "plant_pot",
            &[0.2, 0.5],
            Pose::translation(vec3(2.5, 2.5, 0.0)),
        );
        let fast = eval_program(
            r#"(score acc :weight 1.0
                (accessibility_cost (semantics scene "tv") (semantics scene "plant") fast))"#,
            &scene,
        )
        .soft_loss;
        let slow = eval_program(
            r#"(score acc :weight 1.0
                (accessibility_cost (semantics scene "tv") (semantics scene "plant") slow))"#,
            &scene,
        )
        .soft_loss;
        // Same blocker either way; the slow probe point is nearer.
        assert!(fast > 0.0 && slow > 0.0);
        assert!(slow >= fast);
    }

    #[test]
    fn freespace_reference_values() {
        let mut scene = scene_with_room();
        add(
            &mut scene,
            "coffee_table",
            &[1.0, 0.5, 0.45, 0.04],
            Pose::translation(vec3(2.0, 2.0, 0.0)),
        );
        let text = r#"(score f :weight 1.0
            (freespace_2d (semantics scene "coffee-table") (semantics scene "book")))"#;
        let got = eval_program(text, &scene).soft_loss;
        assert!((got - 0.5).abs() < 1e-9, "{got}");
        // Put a book footprint on it.
        let cat = Catalog::builtin();
        let ph = generate(cat, "book", &[0.2, 0.05, 0.25], 0).unwrap();
        scene.insert_object(ObjectInstance {
            id: 0,
            kind: "book".into(),
            params: vec![0.2, 0.05, 0.25],
            pose: Pose::translation(vec3(2.0, 2.0, 0.45)),
            placeholder: ph,
            tags: BTreeSet::from(["book".to_string()]),
            stage: crate::assets::Stage::Small,
            lod: Lod::Full,
            room: 0,
        });
        let got = eval_program(text, &scene).soft_loss;
        assert!((got - (0.5 - 0.2 * 0.05)).abs() < 1e-9, "{got}");
    }

    #[test]
    fn min_distance_uses_tagged_submeshes() {
        let mut scene = scene_with_room();
        // Sofa facing +x: back face at x = 0.55, the nearest wall surface to
        // the back sub-mesh is the west wall (the full sofa mesh is closer
        // to the south wall, which the tag filter must ignore).
        add(
            &mut scene,
            "sofa",
            &[2.0, 0.9, 0.42, 0.85],
            Pose::translation(vec3(1.0, 2.5, 0.0)),
        );
        let text = r#"(score d :weight 1.0
            (min_distance (semantics scene "sofa") (semantics scene "room") "back" "wall"))"#;
        let got = eval_program(text, &scene).soft_loss;
        assert!((got - 0.55).abs() < 1e-9, "{got}");
        let whole = eval_program(
            r#"(score d :weight 1.0
                (min_distance (semantics scene "sofa") (semantics scene "room") "back" "floor"))"#,
            &scene,
        )
        .soft_loss;
        // Back face bottom edge sits at seat height above the floor plane.
        assert!((whole - 0.42).abs() < 1e-9, "{whole}");
    }

    #[test]
    fn cached_matches_uncached_over_random_mutations() {
        use rand::{Rng, SeedableRng};
        let registry = TagRegistry::builtin();
        let program = parse(
            r#"
(def chairs (semantics scene "chair"))
(def tables (semantics scene "dining-table"))
(hard chair-count (in_range (count chairs) 0 10))
(score spacing :weight 1.0 (hinge (min_distance chairs tables) 0.2 1.0))
(score sym :weight 0.5 (rotation_asymmetry chairs))
(score vol :weight 0.1 (volume chairs))
"#,
        )
        .unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(123);
        for round in 0..20 {
            let mut scene = scene_with_room();
            add(
                &mut scene,
                "dining_table",
                &[1.6, 0.9, 0.75, 0.04],
                Pose::translation(vec3(3.0, 2.5, 0.0)),
            );
            let mut ids = Vec::new();
            for k in 0..4 {
                ids.push(add(
                    &mut scene,
                    "dining_chair",
                    &[0.45, 0.45, 0.45, 0.9],
                    Pose::translation(vec3(1.0 + k as f64, 1.0, 0.0)),
                ));
            }
            let mut cache = EvalCache::new();
            let mut geo_cached = GeomCache::all_on();
            for step in 0..25 {
                // Random pose mutation.
                let id = ids[rng.gen_range(0..ids.len())];
                let pose = Pose::new(
                    vec3(rng.gen_range(0.5..5.5), rng.gen_range(0.5..4.5), 0.0),
                    Quat::yaw(rng.gen_range(0.0..TAU)),
                );
                scene.set_pose(id, pose).unwrap();
                let effect = MutationEffect::Touched(vec![EntId::Object(id)]);
                cache.invalidate(&effect);
                geo_cached.invalidate(&[EntId::Object(id)]);

                let cached = {
                    let mut ctx = EvalContext {
                        scene: &scene,
                        registry: &registry,
                        geo: &mut geo_cached,
                    };
                    evaluate(&program, &mut ctx, Some(&mut cache), false).unwrap()
                };
                let fresh = {
                    let mut geo = GeomCache::new(false, false);
                    let mut ctx = EvalContext {
                        scene: &scene,
                        registry: &registry,
                        geo: &mut geo,
                    };
                    evaluate(&program, &mut ctx, None, false).unwrap()
                };
                assert_eq!(
                    cached.soft_loss.to_bits(),
                    fresh.soft_loss.to_bits(),
                    "round {round} step {step}"
                );
                assert_eq!(cached.hard_violations, fresh.hard_violations);
            }
        }
    }

    #[test]
    fn bounds_per_shelf_instance() {
        let mut scene = scene_with_room();
        for x in [1.0, 4.0] {
            add(
                &mut scene,
                "bookshelf",
                &[1.0, 0.3, 1.6, 3.0],
                Pose::translation(vec3(x, 1.0, 0.0)),
            );
        }
        let program = parse(
            r#"
(hard stocked
  (all s (semantics scene "shelf")
    (in_range (count (related_to (semantics scene "book") s
                      (supported_by "base" "shelf"))) 1 5)))
"#,
        )
        .unwrap();
        let registry = TagRegistry::builtin();
        let mut geo = GeomCache::all_on();
        let mut ctx = EvalContext {
            scene: &scene,
            registry: &registry,
            geo: &mut geo,
        };
        let bounds = extract_bounds(&program, &mut ctx, None).unwrap();
        // One bound per shelf.
        assert_eq!(bounds.len(), 2);
        for b in &bounds {
            assert_eq!(b.low, 1);
            assert_eq!(b.high, Some(5));
            assert_eq!(b.current, 0);
            assert!(!b.tight_above());
            assert!(b.tight_below());
            assert!(matches!(
                b.context.requirements[0].1,
                TargetRef::Entity(EntId::Object(_))
            ));
        }
    }

    #[test]
    fn bounds_state_sensitive_inequality() {
        let mut scene = scene_with_room();
        for k in 0..3 {
            add(
                &mut scene,
                "dining_chair",
                &[0.45, 0.45, 0.45, 0.9],
                Pose::translation(vec3(1.0 + k as f64, 1.0, 0.0)),
            );
        }
        // Strictly more chairs than tables: with 3 chairs, tables < 3.
        let program = parse(
            r#"
(hard more-chairs
  (< (count (semantics scene "dining-table")) (count (semantics scene "chair"))))
"#,
        )
        .unwrap();
        let registry = TagRegistry::builtin();
        let mut geo = GeomCache::all_on();
        let mut ctx = EvalContext {
            scene: &scene,
            registry: &registry,
            geo: &mut geo,
        };
        let bounds = extract_bounds(&program, &mut ctx, None).unwrap();
        let tables = bounds
            .iter()
            .find(|b| b.context.tags == vec!["dining-table".to_string()])
            .unwrap();
        assert_eq!(tables.high, Some(2));
        let chairs = bounds
            .iter()
            .find(|b| b.context.tags == vec!["chair".to_string()])
            .unwrap();
        assert_eq!(chairs.low, 1); // at least one more than 0 tables
    }

    #[test]
    fn scene_node_includes_rooms_and_objects() {
        let mut scene = scene_with_room();
        add(
            &mut scene,
            "sofa",
            &[2.0, 0.9, 0.42, 0.85],
            Pose::translation(vec3(2.0, 2.5, 0.0)),
        );
        let report = eval_program(r#"(score n :weight 1.0 (count scene))"#, &scene);
        assert_eq!(report.soft_loss, 2.0); // one room + one sofa
    }
}
