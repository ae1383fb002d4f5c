//! Postprocessing: doors on every realized graph edge, open walls between
//! designated room pairs, windows on exterior walls, staircase rectangles
//! aligned across consecutive floors.

use super::grid::{CellRect, CellSet, GRID};
use super::loss::entrance_point;
use super::pcfg::RoomKind;
use super::{FloorPlan, Opening, PlanConfig, PlanError};
use crate::rng::Stream;
use rand::Rng;

/// Room pairs that get an open wall instead of a door.
const OPEN_WALL_PAIRS: [(RoomKind, RoomKind); 1] = [(RoomKind::DiningRoom, RoomKind::LivingRoom)];

fn wants_open_wall(a: RoomKind, b: RoomKind) -> bool {
    OPEN_WALL_PAIRS
        .iter()
        .any(|&(x, y)| (a == x && b == y) || (a == y && b == x))
}

/// Rooms that can host windows.
fn can_have_window(kind: RoomKind) -> bool {
    !matches!(kind, RoomKind::Closet | RoomKind::Staircase)
}

pub fn postprocess(
    plan: &FloorPlan,
    seed: u64,
    config: &PlanConfig,
) -> Result<FloorPlan, PlanError> {
    let mut rng = crate::rng::stream(seed, "postprocess");
    let mut plan = plan.clone();

    for f in 0..plan.floors.len() {
        let mut openings = Vec::new();
        let floor = &plan.floors[f];
        let fg = &plan.graph.floors[f];

        // Doors or open walls on every graph edge.
        for &(a, b) in &fg.edges {
            let (Some(ra), Some(rb)) = (floor.room_of_node(a), floor.room_of_node(b)) else {
                return Err(PlanError::Invalid("edge references missing room".into()));
            };
            let Some(seg) = ra
                .cells
                .shared_wall_segments(&rb.cells)
                .into_iter()
                .max_by(|x, y| x.len().partial_cmp(&y.len()).unwrap())
            else {
                return Err(PlanError::Invalid(format!(
                    "no shared wall between {} and {}",
                    ra.name, rb.name
                )));
            };
            if wants_open_wall(ra.kind, rb.kind) {
                openings.push(Opening::OpenWall {
                    rooms: (ra.id, rb.id),
                    a: seg.a,
                    b: seg.b,
                });
                continue;
            }
            let center = clamp_center(seg.center(), seg.a, seg.b, config.door_width);
            // Doors open inward, away from the entrance side: toward the
            // room farther from the entrance waypoint.
            let entrance = entrance_point(&plan, floor);
            let ca = centroid(&ra.cells);
            let cb = centroid(&rb.cells);
            let da = (ca.0 - entrance.0).abs() + (ca.1 - entrance.1).abs();
            let db = (cb.0 - entrance.0).abs() + (cb.1 - entrance.1).abs();
            let open_into = if da >= db { ra } else { rb };
            let dir = if open_into.id == ra.id {
                (seg.inward.0 as f64, seg.inward.1 as f64)
            } else {
                (-seg.inward.0 as f64, -seg.inward.1 as f64)
            };
            openings.push(Opening::Door {
                room: ra.id,
                other: Some(rb.id),
                center,
                width: config.door_width,
                open_dir: dir,
            });
        }

        // Entrance door on the ground floor.
        if f == 0 {
            let er = floor
                .room(floor.entrance_room)
                .ok_or_else(|| PlanError::Invalid("missing entrance room".into()))?;
            let seg = er
                .cells
                .exterior_walls(&floor.contour)
                .into_iter()
                .max_by(|x, y| x.len().partial_cmp(&y.len()).unwrap())
                .ok_or_else(|| PlanError::Invalid("entrance room has no exterior wall".into()))?;
            let center = clamp_center(seg.center(), seg.a, seg.b, 1.0);
            openings.push(Opening::Door {
                room: er.id,
                other: None,
                center,
                width: 1.0,
                open_dir: (seg.inward.0 as f64, seg.inward.1 as f64),
            });
        }

        // Windows on long exterior walls.
        for room in &floor.rooms {
            if !can_have_window(room.kind) {
                continue;
            }
            for seg in room.cells.exterior_walls(&floor.contour) {
                if seg.len() < 1.5 {
                    continue;
                }
                let width = (seg.len() - 1.0).min(config.window_max_width);
                openings.push(Opening::Window {
                    room: room.id,
                    center: seg.center(),
                    width,
                    out_dir: (-seg.inward.0 as f64, -seg.inward.1 as f64),
                });
            }
        }
        plan.floors[f].openings = openings;
    }

    place_staircases(&mut plan, &mut rng)?;
    Ok(plan)
}

fn centroid(cells: &CellSet) -> (f64, f64) {
    let n = cells.len().max(1) as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for (i, j) in cells.iter() {
        sx += (i as f64 + 0.5) * GRID;
        sy += (j as f64 + 0.5) * GRID;
    }
    (sx / n, sy / n)
}

/// Clamp an opening center along its wall segment so the opening fits.
fn clamp_center(center: (f64, f64), a: (f64, f64), b: (f64, f64), width: f64) -> (f64, f64) {
    let vertical = (a.0 - b.0).abs() < 1e-12;
    if vertical {
        let lo = a.1.min(b.1) + width / 2.0;
        let hi = a.1.max(b.1) - width / 2.0;
        (center.0, center.1.clamp(lo.min(hi), hi.max(lo)))
    } else {
        let lo = a.0.min(b.0) + width / 2.0;
        let hi = a.0.max(b.0) - width / 2.0;
        (center.0.clamp(lo.min(hi), hi.max(lo)), center.1)
    }
}

/// Stair rectangles: 2x4 cells of treads inside the intersection of the
/// staircase rooms of consecutive floors, with a 2x2 clearance in front of
/// the bottom tread, not overlapping the flight below.
fn place_staircases(plan: &mut FloorPlan, rng: &mut Stream) -> Result<(), PlanError> {
    if plan.floors.len() < 2 {
        return Ok(());
    }
    let mut previous: Option<CellRect> = None;
    for f in 0..plan.floors.len() - 1 {
        let lower = &plan.floors[f];
        let upper = &plan.floors[f + 1];
        let stair_lower = lower
            .rooms
            .iter()
            .find(|r| r.kind == RoomKind::Staircase)
            .ok_or(PlanError::NoStairPlacement)?;
        let stair_upper = upper
            .rooms
            .iter()
            .find(|r| r.kind == RoomKind::Staircase)
            .ok_or(PlanError::NoStairPlacement)?;
        let shaft = stair_lower.cells.intersection(&stair_upper.cells);
        if shaft.is_empty() {
            return Err(PlanError::NoStairPlacement);
        }
        let Some(bb) = shaft.bbox() else {
            return Err(PlanError::NoStairPlacement);
        };
        // Enumerate every feasible (position, size, direction) and pick one
        // at random; sizes degrade from a full flight to a compact one.
        let mut feasible: Vec<(CellRect, (i32, i32))> = Vec::new();
        for &(w, h) in &[(2i32, 4i32), (4, 2), (2, 3), (3, 2)] {
            if !feasible.is_empty() {
                break; // prefer the larger flight sizes
            }
            for x0 in bb.x0..=(bb.x1 - w).max(bb.x0) {
                for y0 in bb.y0..=(bb.y1 - h).max(bb.y0) {
                    let rect = CellRect {
                        x0,
                        y0,
                        x1: x0 + w,
                        y1: y0 + h,
                    };
                    if rect.x1 > bb.x1 || rect.y1 > bb.y1 {
                        continue;
                    }
                    if !rect.cells().all(|c| shaft.contains(c)) {
                        continue;
                    }
                    if let Some(prev) = &previous {
                        if !rect.intersect(prev).is_empty() {
                            continue;
                        }
                    }
                    let dirs: &[(i32, i32)] = if w < h {
                        &[(0, 1), (0, -1)]
                    } else {
                        &[(1, 0), (-1, 0)]
                    };
                    for &dir in dirs {
                        // Clearance in front of the bottom tread, inside the
                        // lower staircase room.
                        let clearance = match dir {
                            (0, 1) => CellRect {
                                x0: rect.x0,
                                y0: rect.y0 - 2,
                                x1: rect.x0 + 2,
                                y1: rect.y0,
                            },
                            (0, -1) => CellRect {
                                x0: rect.x0,
                                y0: rect.y1,
                                x1: rect.x0 + 2,
                                y1: rect.y1 + 2,
                            },
                            (1, 0) => CellRect {
                                x0: rect.x0 - 2,
                                y0: rect.y0,
                                x1: rect.x0,
                                y1: rect.y0 + 2,
                            },
                            _ => CellRect {
                                x0: rect.x1,
                                y0: rect.y0,
                                x1: rect.x1 + 2,
                                y1: rect.y0 + 2,
                            },
                        };
                        if clearance.cells().all(|c| stair_lower.cells.contains(c)) {
                            feasible.push((rect, dir));
                        }
                    }
                }
            }
        }
        if feasible.is_empty() {
            return Err(PlanError::NoStairPlacement);
        }
        let (rect, dir) = feasible[rng.gen_range(0..feasible.len())];
        previous = Some(rect);
        let room_id = stair_lower.id;
        plan.floors[f].openings.push(Opening::Staircase {
            room: room_id,
            rect,
            up_dir: dir,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::anneal::anneal_plan;
    use crate::floorplan::init::init_plan;
    use crate::floorplan::loss::LossWeights;
    use crate::floorplan::pcfg::{sample_room_graph, PcfgConfig};

    fn make_plan(seed: u64, floors: u32) -> (FloorPlan, PlanConfig) {
        let config = PlanConfig::default();
        let graph = sample_room_graph(seed, &PcfgConfig::with_floors(floors)).unwrap();
        let plan = init_plan(&graph, seed, &config).unwrap();
        let (plan, _, _) = anneal_plan(&plan, 400, &LossWeights::tuned(), &config, seed);
        (plan, config)
    }

    #[test]
    fn every_edge_gets_exactly_one_opening() {
        for seed in [0, 3, 7] {
            let (plan, config) = make_plan(seed, 1);
            let post = postprocess(&plan, seed, &config).unwrap();
            let floor = &post.floors[0];
            let fg = &post.graph.floors[0];
            for &(a, b) in &fg.edges {
                let ra = floor.room_of_node(a).unwrap().id;
                let rb = floor.room_of_node(b).unwrap().id;
                let count = floor
                    .openings
                    .iter()
                    .filter(|o| match o {
                        Opening::Door {
                            room,
                            other: Some(other),
                            ..
                        } => {
                            (*room == ra && *other == rb) || (*room == rb && *other == ra)
                        }
                        Opening::OpenWall { rooms, .. } => {
                            (rooms.0 == ra && rooms.1 == rb) || (rooms.0 == rb && rooms.1 == ra)
                        }
                        _ => false,
                    })
                    .count();
                assert_eq!(count, 1, "edge {a}-{b} seed {seed}");
            }
            // Exactly one entrance door.
            let entrances = floor
                .openings
                .iter()
                .filter(|o| matches!(o, Opening::Door { other: None, .. }))
                .count();
            assert_eq!(entrances, 1);
        }
    }

    #[test]
    fn windows_respect_max_width() {
        let (plan, config) = make_plan(5, 1);
        let post = postprocess(&plan, 5, &config).unwrap();
        for o in &post.floors[0].openings {
            if let Opening::Window { width, .. } = o {
                assert!(*width <= config.window_max_width + 1e-9);
                assert!(*width > 0.0);
            }
        }
    }

    #[test]
    fn dining_living_pairs_become_open_walls() {
        // Scan seeds for a plan with a dining room; its edge to the living
        // room must be an open wall.
        for seed in 0..20 {
            let (plan, config) = make_plan(seed, 1);
            let fg = &plan.graph.floors[0];
            let pair = fg.edges.iter().find(|&&(a, b)| {
                let ka = fg.nodes[a].kind;
                let kb = fg.nodes[b].kind;
                wants_open_wall(ka, kb)
            });
            let Some(&(a, b)) = pair else { continue };
            let post = postprocess(&plan, seed, &config).unwrap();
            let floor = &post.floors[0];
            let ra = floor.room_of_node(a).unwrap().id;
            let rb = floor.room_of_node(b).unwrap().id;
            let found = floor.openings.iter().any(|o| {
                matches!(o, Opening::OpenWall { rooms, .. }
                    if (rooms.0 == ra && rooms.1 == rb) || (rooms.0 == rb && rooms.1 == ra))
            });
            assert!(found, "seed {seed}");
            return;
        }
        panic!("no dining-living pair in 20 seeds");
    }

    #[test]
    fn staircases_fit_and_do_not_stack() {
        let mut checked = 0;
        for seed in 0..30 {
            let config = PlanConfig::default();
            let Ok(graph) = sample_room_graph(seed, &PcfgConfig::with_floors(3)) else {
                continue;
            };
            let Ok(plan) = init_plan(&graph, seed, &config) else {
                continue;
            };
            let (plan, _, _) = anneal_plan(&plan, 600, &LossWeights::tuned(), &config, seed);
            let Ok(post) = postprocess(&plan, seed, &config) else {
                continue;
            };
            let mut rects = Vec::new();
            for floor in &post.floors {
                for o in &floor.openings {
                    if let Opening::Staircase { rect, room, .. } = o {
                        // Treads inside the staircase room on this floor.
                        let room = floor.room(*room).unwrap();
                        assert!(rect.cells().all(|c| room.cells.contains(c)));
                        rects.push(*rect);
                    }
                }
            }
            assert_eq!(rects.len(), post.floors.len() - 1);
            for w in rects.windows(2) {
                assert!(w[0].intersect(&w[1]).is_empty(), "flights overlap");
            }
            checked += 1;
            if checked >= 3 {
                return;
            }
        }
        panic!("no multistory plan postprocessed in 30 seeds");
    }
}
