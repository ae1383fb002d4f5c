//! Floorplan moves: wall extrusion (in/out), assignment swap, staircase
//! shift. Proposals that break hard validity are rejected before scoring.

use super::grid::{Cell, CellSet};
use super::pcfg::RoomKind;
use super::{FloorPlan, PlanConfig};
use crate::rng::Stream;
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub enum PlanMove {
    /// Transfer of cells between rooms on one floor: (floor, moves) where
    /// each entry reassigns a cell to a new room id.
    Transfer {
        floor: usize,
        cells: Vec<(Cell, u32, u32)>, // (cell, from room, to room)
    },
    /// Swap the cell sets of two rooms on one floor.
    Swap { floor: usize, rooms: (u32, u32) },
    /// Shift the staircase placeholder by one grid step.
    MoveStair { dx: i32, dy: i32 },
}

/// Apply a move in place. Returns the inverse move.
pub fn apply_move(plan: &mut FloorPlan, mv: &PlanMove) -> PlanMove {
    match mv {
        PlanMove::Transfer { floor, cells } => {
            let fl = &mut plan.floors[*floor];
            for &(cell, from, to) in cells {
                let from_idx = fl.rooms.iter().position(|r| r.id == from).unwrap();
                let to_idx = fl.rooms.iter().position(|r| r.id == to).unwrap();
                fl.rooms[from_idx].cells.remove(cell);
                fl.rooms[to_idx].cells.insert(cell);
            }
            PlanMove::Transfer {
                floor: *floor,
                cells: cells.iter().map(|&(c, a, b)| (c, b, a)).collect(),
            }
        }
        PlanMove::Swap { floor, rooms } => {
            let fl = &mut plan.floors[*floor];
            let ia = fl.rooms.iter().position(|r| r.id == rooms.0).unwrap();
            let ib = fl.rooms.iter().position(|r| r.id == rooms.1).unwrap();
            let tmp = fl.rooms[ia].cells.clone();
            fl.rooms[ia].cells = fl.rooms[ib].cells.clone();
            fl.rooms[ib].cells = tmp;
            mv.clone()
        }
        PlanMove::MoveStair { dx, dy } => {
            if let Some(sp) = plan.stair_placeholder.as_mut() {
                *sp = sp.shifted(*dx, *dy);
            }
            PlanMove::MoveStair { dx: -dx, dy: -dy }
        }
    }
}

/// Validity of the state a move produced, restricted to what the move could
/// have broken: the touched rooms, their incident graph edges, and the
/// staircase constraints when the placeholder shifted. Untouched rooms keep
/// their cells, so their connectivity, exteriority, and mutual walls are
/// unchanged by construction.
pub fn move_valid(plan: &FloorPlan, config: &PlanConfig, mv: &PlanMove) -> bool {
    let check_room = |f: usize, id: u32| -> bool {
        let floor = &plan.floors[f];
        let Some(room) = floor.room(id) else {
            return false;
        };
        if room.cells.is_empty() || !room.cells.is_connected() {
            return false;
        }
        if room.kind.needs_exterior() && room.cells.exterior_edge_count(&floor.contour) == 0 {
            return false;
        }
        if f == 0
            && id == floor.entrance_room
            && room.cells.exterior_edge_count(&floor.contour) == 0
        {
            return false;
        }
        if let Some(sp) = &plan.stair_placeholder {
            if room.kind == RoomKind::Staircase && room.cells.intersect_rect(sp).is_empty() {
                return false;
            }
        }
        true
    };
    let check_edges_touching = |f: usize, ids: &[u32]| -> bool {
        let floor = &plan.floors[f];
        let fg = &plan.graph.floors[f];
        for &(a, b) in &fg.edges {
            let (Some(ra), Some(rb)) = (floor.room_of_node(a), floor.room_of_node(b)) else {
                return false;
            };
            if !ids.contains(&ra.id) && !ids.contains(&rb.id) {
                continue;
            }
            let best = ra
                .cells
                .shared_wall_segments(&rb.cells)
                .iter()
                .map(|s| s.len())
                .fold(0.0f64, f64::max);
            if best + 1e-9 < config.door_width {
                return false;
            }
        }
        true
    };
    match mv {
        PlanMove::Transfer { floor, cells } => {
            let mut ids: Vec<u32> = cells.iter().flat_map(|&(_, a, b)| [a, b]).collect();
            ids.sort_unstable();
            ids.dedup();
            ids.iter().all(|&id| check_room(*floor, id)) && check_edges_touching(*floor, &ids)
        }
        PlanMove::Swap { floor, rooms } => {
            let ids = [rooms.0, rooms.1];
            ids.iter().all(|&id| check_room(*floor, id)) && check_edges_touching(*floor, &ids)
        }
        PlanMove::MoveStair { .. } => {
            let Some(sp) = &plan.stair_placeholder else {
                return false;
            };
            for floor in &plan.floors {
                if !sp.cells().all(|c| floor.contour.contains(c)) {
                    return false;
                }
                for room in &floor.rooms {
                    if room.kind == RoomKind::Staircase
                        && room.cells.intersect_rect(sp).is_empty()
                    {
                        return false;
                    }
                }
            }
            true
        }
    }
}

/// Propose one move; `None` when the dice landed on a degenerate choice
/// (rejection is a normal outcome).
pub fn propose_plan_move(plan: &FloorPlan, rng: &mut Stream) -> Option<PlanMove> {
    // Choose a floor, or the staircase placeholder when present.
    let options = plan.floors.len() + usize::from(plan.stair_placeholder.is_some());
    let pick = rng.gen_range(0..options);
    if pick == plan.floors.len() {
        let (dx, dy) = match rng.gen_range(0..4) {
            0 => (1, 0),
            1 => (-1, 0),
            2 => (0, 1),
            _ => (0, -1),
        };
        return Some(PlanMove::MoveStair { dx, dy });
    }
    let floor_idx = pick;
    let floor = &plan.floors[floor_idx];
    match rng.gen_range(0..3) {
        // Extrude a wall segment inwards: the room cedes a strip to its
        // neighbors across the wall.
        0 => {
            let room = &floor.rooms[rng.gen_range(0..floor.rooms.len())];
            let walls = room.cells.boundary_walls();
            if walls.is_empty() {
                return None;
            }
            let wall = walls[rng.gen_range(0..walls.len())];
            let mut cells = Vec::new();
            for cell in strip_cells(&room.cells, &wall) {
                // The vacated cell is claimed by the room just across it.
                let out = (cell.0 - wall.inward.0, cell.1 - wall.inward.1);
                let Some(claimer) = floor
                    .rooms
                    .iter()
                    .find(|r| r.cells.contains(out))
                    .map(|r| r.id)
                else {
                    return None; // exterior wall: would punch a hole
                };
                cells.push((cell, room.id, claimer));
            }
            if cells.is_empty() {
                return None;
            }
            Some(PlanMove::Transfer {
                floor: floor_idx,
                cells,
            })
        }
        // Extrude a wall segment outwards: the room claims the strip across
        // the wall from its neighbors.
        1 => {
            let room = &floor.rooms[rng.gen_range(0..floor.rooms.len())];
            let walls = room.cells.boundary_walls();
            if walls.is_empty() {
                return None;
            }
            let wall = walls[rng.gen_range(0..walls.len())];
            let mut cells = Vec::new();
            for cell in strip_cells(&room.cells, &wall) {
                let out = (cell.0 - wall.inward.0, cell.1 - wall.inward.1);
                let Some(donor) = floor
                    .rooms
                    .iter()
                    .find(|r| r.cells.contains(out))
                    .map(|r| r.id)
                else {
                    return None; // out of the contour
                };
                cells.push((out, donor, room.id));
            }
            if cells.is_empty() {
                return None;
            }
            Some(PlanMove::Transfer {
                floor: floor_idx,
                cells,
            })
        }
        // Swap assignments of two adjacent rooms.
        _ => {
            if floor.rooms.len() < 2 {
                return None;
            }
            let a = &floor.rooms[rng.gen_range(0..floor.rooms.len())];
            let neighbors: Vec<u32> = floor
                .rooms
                .iter()
                .filter(|r| r.id != a.id && r.cells.shared_edge_count(&a.cells) > 0)
                .map(|r| r.id)
                .collect();
            if neighbors.is_empty() {
                return None;
            }
            let b = neighbors[rng.gen_range(0..neighbors.len())];
            Some(PlanMove::Swap {
                floor: floor_idx,
                rooms: (a.id, b),
            })
        }
    }
}

/// Cells of `room` lining the given wall segment.
fn strip_cells(room: &CellSet, wall: &super::grid::WallSeg) -> Vec<Cell> {
    let mut out = Vec::new();
    if wall.is_vertical() {
        let x_line = (wall.a.0 / super::grid::GRID).round() as i32;
        let j0 = (wall.a.1.min(wall.b.1) / super::grid::GRID).round() as i32;
        let j1 = (wall.a.1.max(wall.b.1) / super::grid::GRID).round() as i32;
        // Inward +1 means the room is to the right of the wall line.
        let i = if wall.inward.0 > 0 { x_line } else { x_line - 1 };
        for j in j0..j1 {
            let c = (i, j);
            if room.contains(c) {
                out.push(c);
            }
        }
    } else {
        let y_line = (wall.a.1 / super::grid::GRID).round() as i32;
        let i0 = (wall.a.0.min(wall.b.0) / super::grid::GRID).round() as i32;
        let i1 = (wall.a.0.max(wall.b.0) / super::grid::GRID).round() as i32;
        let j = if wall.inward.1 > 0 { y_line } else { y_line - 1 };
        for i in i0..i1 {
            let c = (i, j);
            if room.contains(c) {
                out.push(c);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::grid::CellRect;
    use crate::floorplan::init::init_plan;
    use crate::floorplan::pcfg::{sample_room_graph, PcfgConfig};

    #[test]
    fn extrude_in_transfers_to_neighbor() {
        let graph = sample_room_graph(2, &PcfgConfig::with_floors(1)).unwrap();
        let config = PlanConfig::default();
        let mut plan = init_plan(&graph, 2, &config).unwrap();
        let mut rng = crate::rng::stream(9, "plan-moves");
        let mut applied = 0;
        for _ in 0..200 {
            let Some(mv) = propose_plan_move(&plan, &mut rng) else {
                continue;
            };
            let undo = apply_move(&mut plan, &mv);
            // Partition is preserved by construction.
            let total: usize = plan.floors[0].rooms.iter().map(|r| r.cells.len()).sum();
            assert_eq!(total, plan.floors[0].contour.len());
            if move_valid(&plan, &config, &mv) {
                applied += 1;
                plan.check_valid(&config).unwrap();
            } else {
                apply_move(&mut plan, &undo);
                plan.check_valid(&config).unwrap();
            }
        }
        assert!(applied > 0, "no valid moves in 200 proposals");
    }

    #[test]
    fn undo_restores_plan_exactly() {
        let graph = sample_room_graph(4, &PcfgConfig::with_floors(2)).unwrap();
        let config = PlanConfig::default();
        let mut plan = init_plan(&graph, 4, &config).unwrap();
        let reference = plan.clone();
        let mut rng = crate::rng::stream(10, "plan-moves");
        for _ in 0..100 {
            let Some(mv) = propose_plan_move(&plan, &mut rng) else {
                continue;
            };
            let undo = apply_move(&mut plan, &mv);
            apply_move(&mut plan, &undo);
            assert_eq!(plan, reference);
        }
    }

    #[test]
    fn stair_move_is_one_grid_step() {
        let rect = CellRect {
            x0: 2,
            y0: 3,
            x1: 6,
            y1: 9,
        };
        let shifted = rect.shifted(1, 0);
        assert_eq!(shifted.x0, 3);
        assert_eq!(shifted.y0, 3);
    }
}
