//! Score operators over scene entities.
//!
//! Conventions for degenerate inputs (empty sets, coincident centroids)
//! follow the evaluator contract: they yield zero contributions rather than
//! errors, so annealing over partially built scenes stays total.

use super::geo::{self, GeomCache};
use super::EvalError;
use crate::geom::poly2::{ring_signed_area, vec2, Vec2};
use crate::geom::{reflect_point, Plane, Quat, Vec3};
use crate::semantics::{EntId, SceneState};

/// Minimum distance between the (optionally tagged) sub-meshes of two entity
/// sets; pairs with identical entities are skipped. No valid pair: 0.
pub fn min_distance(
    scene: &SceneState,
    geo: &mut GeomCache,
    a: &[EntId],
    b: &[EntId],
    tag_a: Option<&str>,
    tag_b: Option<&str>,
) -> f64 {
    let mut best = f64::INFINITY;
    for &ea in a {
        let Some(bvh_a) = geo.bvh(scene, ea, tag_a) else {
            continue;
        };
        for &eb in b {
            if ea == eb {
                continue;
            }
            let Some(bvh_b) = geo.bvh(scene, eb, tag_b) else {
                continue;
            };
            best = best.min(bvh_a.distance(&bvh_b));
        }
    }
    if best.is_finite() {
        best
    } else {
        0.0
    }
}

/// Sum over objects of (1 - cos theta)/2, theta measured between the object's
/// front normal and the inward normal of the nearest edge of the reference
/// footprint (all in the XY plane). Each term lies in [0, 1].
pub fn angle_alignment_cost(scene: &SceneState, objs: &[EntId], reference: &[EntId]) -> f64 {
    // Gather reference edges with inward normals (CCW rings: interior left).
    let mut edges: Vec<(Vec2, Vec2, Vec2)> = Vec::new(); // (a, b, inward)
    for &r in reference {
        if let Some(ring) = geo::footprint(scene, r) {
            let n = ring.len();
            for i in 0..n {
                let a = ring[i];
                let b = ring[(i + 1) % n];
                if let Some(dir) = (b - a).normalized(1e-12) {
                    edges.push((a, b, dir.perp()));
                }
            }
        }
    }
    if edges.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for &o in objs {
        if reference.contains(&o) {
            continue;
        }
        let (Some(c), Some(f)) = (geo::centroid(scene, o), geo::front_normal(scene, o)) else {
            continue;
        };
        let c2 = vec2(c.x, c.y);
        let Some(front2) = vec2(f.x, f.y).normalized(1e-9) else {
            continue; // vertical front normal has no XY alignment
        };
        let nearest = edges
            .iter()
            .map(|(a, b, inward)| {
                (crate::geom::poly2::point_segment_distance(c2, *a, *b), inward)
            })
            .min_by(|x, y| x.0.partial_cmp(&y.0).unwrap())
            .map(|(_, inward)| *inward)
            .expect("edges non-empty");
        let cos = front2.dot(nearest).clamp(-1.0, 1.0);
        total += (1.0 - cos) * 0.5;
    }
    total
}

/// Continuous rotational asymmetry of a set of (position, front) pairs in the
/// XY plane: deviation from a regular polygon with rotationally symmetric
/// orientations. Zero for perfect symmetry.
pub fn rotation_asymmetry(scene: &SceneState, objs: &[EntId]) -> Result<f64, EvalError> {
    let n = objs.len();
    if n < 2 {
        return Err(EvalError::InsufficientObjects {
            op: "rotation_asymmetry",
            need: 2,
            got: n,
        });
    }
    let mut items: Vec<(Vec2, Vec2)> = Vec::with_capacity(n);
    for &o in objs {
        let Some(c) = geo::centroid(scene, o) else {
            continue;
        };
        let f = geo::front_normal(scene, o).unwrap_or(Vec3::X);
        items.push((vec2(c.x, c.y), vec2(f.x, f.y)));
    }
    let n = items.len();
    if n < 2 {
        return Err(EvalError::InsufficientObjects {
            op: "rotation_asymmetry",
            need: 2,
            got: n,
        });
    }
    let nf = n as f64;
    let center = items
        .iter()
        .fold(vec2(0.0, 0.0), |acc, (p, _)| acc + *p)
        / nf;
    let mut rel: Vec<(Vec2, Vec2)> = items
        .iter()
        .map(|(p, f)| (*p - center, *f))
        .collect();
    let max_norm = rel
        .iter()
        .map(|(p, _)| p.norm())
        .fold(0.0f64, f64::max);
    if max_norm < 1e-9 {
        // All objects coincide; no polygon to deviate from.
        return Ok(0.0);
    }
    // Canonical angular order around the centroid (the input is a set).
    rel.sort_by(|a, b| {
        let aa = a.0.y.atan2(a.0.x);
        let ab = b.0.y.atan2(b.0.x);
        aa.partial_cmp(&ab)
            .unwrap()
            .then(a.0.norm().partial_cmp(&b.0.norm()).unwrap())
    });

    let rot = |v: Vec2, angle: f64| -> Vec2 {
        let (s, c) = angle.sin_cos();
        vec2(v.x * c - v.y * s, v.x * s + v.y * c)
    };
    let spread = |vecs: &[Vec2], align_first: bool| -> f64 {
        let base = if align_first {
            let first = vecs[0];
            -first.y.atan2(first.x)
        } else {
            0.0
        };
        let folded: Vec<Vec2> = vecs
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let idx = (k + 1) as f64; // 1-based per the construction
                rot(rot(v, base), -std::f64::consts::TAU * idx / nf)
            })
            .collect();
        let mean = folded
            .iter()
            .fold(vec2(0.0, 0.0), |acc, &v| acc + v)
            / nf;
        folded.iter().map(|&v| (v - mean).dot(v - mean)).sum::<f64>() / nf
    };

    let positions: Vec<Vec2> = rel.iter().map(|(p, _)| *p / max_norm).collect();
    let location = spread(&positions, true);

    let fronts: Vec<Vec2> = rel
        .iter()
        .map(|(_, f)| f.normalized(1e-12).unwrap_or(vec2(1.0, 0.0)))
        .collect();
    let orientation = spread(&fronts, true);

    Ok((location + orientation) * 0.5)
}

/// Exact minimum-cost assignment on a square cost matrix (shortest augmenting
/// paths with potentials, the Jonker-Volgenant scheme). Returns row -> col.
pub fn solve_assignment(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = cost.len();
    if n == 0 {
        return (vec![], 0.0);
    }
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut assigned_row = vec![0usize; n + 1]; // column -> row (1-based, 0 = free)
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        assigned_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = assigned_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[assigned_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if assigned_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            assigned_row[j0] = assigned_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[assigned_row[j] - 1] = j - 1;
    }
    let total = (0..n).map(|i| cost[i][row_to_col[i]]).sum();
    (row_to_col, total)
}

fn reflect_quat(q: Quat, plane_normal: Vec3) -> Quat {
    let (axis, angle) = q.to_axis_angle();
    let axis = axis - plane_normal * (2.0 * axis.dot(plane_normal));
    Quat::from_axis_angle(axis, -angle)
}

/// Reflectional asymmetry of a set of posed objects relative to a reference:
/// reflect every object across a median plane of the reference's oriented
/// bounding box, optimally match originals to reflections, and fold the
/// volume-weighted positional + angular deviations into [0, 1). The best
/// (lowest) median plane wins.
pub fn reflection_asymmetry(
    scene: &SceneState,
    objs: &[EntId],
    reference: &[EntId],
) -> Result<f64, EvalError> {
    if objs.len() < 2 {
        return Err(EvalError::InsufficientObjects {
            op: "reflection_asymmetry",
            need: 2,
            got: objs.len(),
        });
    }
    struct Item {
        pos: Vec3,
        orient: Quat,
        volume: f64,
    }
    let items: Vec<Item> = objs
        .iter()
        .filter_map(|&e| {
            let pos = geo::centroid(scene, e)?;
            let orient = match e {
                EntId::Object(id) => scene.object(id).ok()?.pose.orientation,
                EntId::Room(_) => Quat::IDENTITY,
            };
            let volume = geo::bbox_volume(scene, e)?;
            Some(Item {
                pos,
                orient,
                volume,
            })
        })
        .collect();
    let n = items.len();
    if n < 2 {
        return Err(EvalError::InsufficientObjects {
            op: "reflection_asymmetry",
            need: 2,
            got: n,
        });
    }
    // Normalizer: mean pairwise distance between the original objects.
    let mut alpha = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                alpha += (items[i].pos - items[j].pos).norm();
            }
        }
    }
    alpha /= (n * (n - 1)) as f64;
    if alpha < 1e-12 {
        return Ok(0.0); // coincident set: symmetric by convention
    }

    let planes = if reference.is_empty() {
        vec![]
    } else {
        geo::median_planes(scene, reference[0])
    };
    if planes.is_empty() {
        return Err(EvalError::MissingReference("reflection_asymmetry"));
    }

    let mut best = f64::INFINITY;
    for (point, normal) in planes {
        let plane = Plane {
            point,
            normal,
            owner: EntId::Room(u32::MAX),
            tag: String::new(),
            index: 0,
            boundary: vec![],
        };
        let reflected: Vec<(Vec3, Quat)> = items
            .iter()
            .map(|it| (reflect_point(it.pos, &plane), reflect_quat(it.orient, normal)))
            .collect();
        let cost: Vec<Vec<f64>> = items
            .iter()
            .map(|it| {
                reflected
                    .iter()
                    .map(|(rp, rq)| {
                        let d_pos = (it.pos - *rp).norm();
                        let d_ang = 2.0 * it.orient.dot(*rq).abs().clamp(0.0, 1.0).acos();
                        it.volume * (d_pos + d_ang)
                    })
                    .collect()
            })
            .collect();
        let (_, total) = solve_assignment(&cost);
        let score = 1.0 - 1.0 / (1.0 + total / alpha);
        best = best.min(score);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessKind {
    /// Blocker chosen by centroid distance; its centroid is the probe point.
    Fast,
    /// Blocker chosen by mesh distance; the closest mesh point is the probe.
    Slow,
}

/// How much the set `blockers` obstructs the front of each object in `objs`:
/// sum of (probe - proj) . n / |probe - proj|^2, scaled by the blocker's
/// bounding-box diagonal. Terms can be negative for blockers behind the
/// plane; clamping is the program author's business (hinge).
pub fn accessibility_cost(
    scene: &SceneState,
    geo_cache: &mut GeomCache,
    objs: &[EntId],
    blockers: &[EntId],
    kind: AccessKind,
) -> f64 {
    if blockers.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for &a in objs {
        let Some((fp, fnm)) = geo::front_plane(scene, a) else {
            continue;
        };
        let Some(ac) = geo::centroid(scene, a) else {
            continue;
        };
        // Projection of the centroid onto the designated plane.
        let a_proj = ac - fnm * (ac - fp).dot(fnm);

        let mut chosen: Option<(EntId, Vec3, f64)> = None; // (blocker, probe, rank)
        match kind {
            AccessKind::Fast => {
                for &b in blockers {
                    if b == a {
                        continue;
                    }
                    let Some(bc) = geo::centroid(scene, b) else {
                        continue;
                    };
                    let d = (bc - a_proj).norm();
                    if chosen.as_ref().map_or(true, |(_, _, best)| d < *best) {
                        chosen = Some((b, bc, d));
                    }
                }
            }
            AccessKind::Slow => {
                let Some(bvh_a) = geo_cache.bvh(scene, a, None) else {
                    continue;
                };
                for &b in blockers {
                    if b == a {
                        continue;
                    }
                    let Some(bvh_b) = geo_cache.bvh(scene, b, None) else {
                        continue;
                    };
                    let (_, on_b, d) = bvh_a.closest_points(&bvh_b);
                    if chosen.as_ref().map_or(true, |(_, _, best)| d < *best) {
                        chosen = Some((b, on_b, d));
                    }
                }
            }
        }
        let Some((b, probe, _)) = chosen else {
            continue;
        };
        let d = probe - a_proj;
        let len_sq = d.norm_sq();
        if len_sq < 1e-18 {
            continue;
        }
        let diag = geo::bbox_diagonal(scene, b).unwrap_or(0.0);
        total += d.dot(fnm) / len_sq * diag;
    }
    total
}

/// Focus of `objs` on the nearest member of `targets`: sum over objects of
/// (1 - n_a . unit(b_c - a_c)) / 2, each term in [0, 1].
pub fn focus_score(scene: &SceneState, objs: &[EntId], targets: &[EntId]) -> f64 {
    if targets.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for &a in objs {
        let (Some(ac), Some(front)) = (geo::centroid(scene, a), geo::front_normal(scene, a))
        else {
            continue;
        };
        let mut nearest: Option<(f64, Vec3)> = None;
        for &b in targets {
            if b == a {
                continue;
            }
            let Some(bc) = geo::centroid(scene, b) else {
                continue;
            };
            let d = (bc - ac).norm();
            if nearest.map_or(true, |(best, _)| d < best) {
                nearest = Some((d, bc));
            }
        }
        let Some((dist, bc)) = nearest else {
            continue;
        };
        if dist < 1e-9 {
            continue; // coincident centroids contribute zero by convention
        }
        let dir = (bc - ac) / dist;
        total += (1.0 - front.dot(dir)) * 0.5;
    }
    total
}

/// Free area: sum of XY footprint areas of `surfaces` minus those of
/// `occupants` (the formula is signed; no clamping).
pub fn freespace_2d(scene: &SceneState, surfaces: &[EntId], occupants: &[EntId]) -> f64 {
    let area_of = |e: EntId| -> f64 {
        geo::footprint(scene, e)
            .map(|ring| ring_signed_area(&ring).abs())
            .unwrap_or(0.0)
    };
    let a: f64 = surfaces.iter().map(|&e| area_of(e)).sum();
    let b: f64 = occupants.iter().map(|&e| area_of(e)).sum();
    a - b
}

/// Sum of bounding-box volumes.
pub fn total_volume(scene: &SceneState, set: &[EntId]) -> f64 {
    set.iter()
        .filter_map(|&e| geo::bbox_volume(scene, e))
        .sum()
}

/// Sum of bounding-box areas (two largest extents each).
pub fn total_area(scene: &SceneState, set: &[EntId]) -> f64 {
    set.iter().filter_map(|&e| geo::bbox_area(scene, e)).sum()
}
