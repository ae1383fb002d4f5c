//! Plan initialization: contour synthesis, Mondrian subdivision, block
//! merging, staircase placeholder placement, and DFS room assignment.

use super::grid::{Cell, CellRect, CellSet, GRID};
use super::pcfg::{RoomGraph, RoomKind};
use super::{Floor, FloorPlan, PlanConfig, PlanError, PlanRoom};
use crate::rng::Stream;
use rand::seq::SliceRandom;
use rand::Rng;

/// Corner bevel profiles. Everything stays on the grid: the rectangular
/// profile removes a block, the 45-degree profile a stepped diagonal, and
/// the round profile a stepped quarter-disc.
#[derive(Debug, Clone, Copy)]
enum Bevel {
    Rect,
    Diag,
    Round,
}

fn contour_for_area(rng: &mut Stream, area_m2: f64) -> CellSet {
    let aspect = rng.gen_range(1.0..1.6);
    let w_m = (area_m2 * aspect).sqrt();
    let h_m = area_m2 / w_m;
    let w = ((w_m / GRID).round() as i32).max(6);
    let h = ((h_m / GRID).round() as i32).max(6);
    let mut cells = CellSet::from_rect(CellRect {
        x0: 0,
        y0: 0,
        x1: w,
        y1: h,
    });
    // Randomly bevel the corners.
    let max_b = (w.min(h) / 3).min(4).max(1);
    for corner in 0..4 {
        if !rng.gen_bool(0.6) {
            continue;
        }
        let b = rng.gen_range(1..=max_b);
        let profile = match rng.gen_range(0..3) {
            0 => Bevel::Rect,
            1 => Bevel::Diag,
            _ => Bevel::Round,
        };
        let c = rng.gen_range(1..=max_b);
        for i in 0..w {
            for j in 0..h {
                // Local coordinates from this corner.
                let (u, v) = match corner {
                    0 => (i, j),
                    1 => (w - 1 - i, j),
                    2 => (i, h - 1 - j),
                    _ => (w - 1 - i, h - 1 - j),
                };
                let cut = match profile {
                    Bevel::Rect => u < b && v < c,
                    Bevel::Diag => u + v < b,
                    Bevel::Round => {
                        let (uf, vf) = (u as f64 + 0.5, v as f64 + 0.5);
                        u < b && v < b && {
                            let du = b as f64 - uf;
                            let dv = b as f64 - vf;
                            du * du + dv * dv > (b as f64) * (b as f64)
                        }
                    }
                };
                if cut {
                    cells.remove((i, j));
                }
            }
        }
    }
    // Beveling can in principle disconnect degenerate contours; keep the
    // largest component.
    let comps = cells.components();
    comps
        .into_iter()
        .max_by_key(|c| c.len())
        .unwrap_or_default()
}

/// Mondrian subdivision of a contour into at least `target` blocks.
fn mondrian(
    rng: &mut Stream,
    contour: &CellSet,
    target: usize,
    aspect_limit: f64,
) -> Vec<CellSet> {
    let mut blocks = vec![contour.clone()];
    let mut stall = 0;
    while blocks.len() < target && stall < 200 {
        // Pick a block weighted by area.
        let total: usize = blocks.iter().map(|b| b.len()).sum();
        let mut pick = rng.gen_range(0..total.max(1));
        let mut idx = 0;
        for (k, b) in blocks.iter().enumerate() {
            if pick < b.len() {
                idx = k;
                break;
            }
            pick -= b.len();
        }
        let block = &blocks[idx];
        let Some(bbox) = block.bbox() else {
            stall += 1;
            continue;
        };
        let (w, h) = (bbox.x1 - bbox.x0, bbox.y1 - bbox.y0);
        if w < 2 && h < 2 {
            stall += 1;
            continue;
        }
        // Prefer splitting the longer axis.
        let split_x = if w >= 2 && h >= 2 {
            if rng.gen_bool(0.75) {
                w >= h
            } else {
                w < h
            }
        } else {
            w >= 2
        };
        let extent = if split_x { w } else { h };
        let lo = extent / 4;
        let hi = extent - extent / 4;
        if lo + 1 > hi {
            stall += 1;
            continue;
        }
        let cut = rng.gen_range(lo.max(1)..hi.max(lo.max(1) + 1));
        let line = if split_x { bbox.x0 + cut } else { bbox.y0 + cut };
        let (mut a, mut b) = (CellSet::new(), CellSet::new());
        for c in block.iter() {
            let v = if split_x { c.0 } else { c.1 };
            if v < line {
                a.insert(c);
            } else {
                b.insert(c);
            }
        }
        if a.is_empty() || b.is_empty() {
            stall += 1;
            continue;
        }
        // Children split further into connected components.
        let mut children: Vec<CellSet> = Vec::new();
        children.extend(a.components());
        children.extend(b.components());
        let ok = children.iter().all(|c| {
            let bb = c.bbox().expect("non-empty");
            let (cw, ch) = ((bb.x1 - bb.x0) as f64, (bb.y1 - bb.y0) as f64);
            let aspect = (cw / ch).max(ch / cw);
            aspect <= aspect_limit
        });
        if !ok {
            stall += 1;
            continue;
        }
        blocks.swap_remove(idx);
        blocks.extend(children);
        stall = 0;
    }
    blocks
}

/// Merge blocks down to exactly `count`, absorbing the smallest into the
/// neighbor it shares the longest wall with.
fn merge_blocks(blocks: &mut Vec<CellSet>, count: usize) {
    while blocks.len() > count {
        let smallest = blocks
            .iter()
            .enumerate()
            .min_by_key(|(_, b)| b.len())
            .map(|(i, _)| i)
            .expect("non-empty");
        let mut best: Option<(usize, usize)> = None; // (neighbor, shared edges)
        for (k, other) in blocks.iter().enumerate() {
            if k == smallest {
                continue;
            }
            let shared = blocks[smallest].shared_edge_count(other);
            if shared > 0 && best.map_or(true, |(_, s)| shared > s) {
                best = Some((k, shared));
            }
        }
        let Some((neighbor, _)) = best else {
            // Isolated fragment: merge into the largest block regardless (the
            // assignment validity checks will reject if this ever happens).
            let target = blocks
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != smallest)
                .max_by_key(|(_, b)| b.len())
                .map(|(i, _)| i)
                .expect("at least two blocks");
            let taken = blocks[smallest].clone();
            blocks[target].union_with(&taken);
            blocks.swap_remove(smallest);
            continue;
        };
        let taken = blocks[smallest].clone();
        blocks[neighbor].union_with(&taken);
        blocks.swap_remove(smallest);
    }
}

/// Depth-first assignment of graph nodes to blocks honoring adjacency,
/// exterior access (including the entrance), and the staircase placeholder.
fn assign_rooms(
    rng: &mut Stream,
    graph_nodes: &[(usize, RoomKind)],
    edges: &[(usize, usize)],
    blocks: &[CellSet],
    contour: &CellSet,
    placeholder: Option<&CellRect>,
    entrance_node: Option<usize>,
    door_width: f64,
) -> Option<Vec<usize>> {
    let n = graph_nodes.len();
    if blocks.len() != n {
        return None;
    }
    // Assignment order: staircase first, exterior rooms next, then larger
    // typical areas.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| {
        let kind = graph_nodes[i].1;
        let class = if kind == RoomKind::Staircase {
            0
        } else if kind.needs_exterior() {
            1
        } else {
            2
        };
        (class, (-kind.typical_area() * 10.0) as i64, i)
    });
    let mut assignment: Vec<Option<usize>> = vec![None; n]; // node -> block
    let mut used = vec![false; blocks.len()];
    let mut budget = 20_000usize;

    fn feasible(
        node: usize,
        block: usize,
        graph_nodes: &[(usize, RoomKind)],
        edges: &[(usize, usize)],
        blocks: &[CellSet],
        contour: &CellSet,
        placeholder: Option<&CellRect>,
        entrance_node: Option<usize>,
        assignment: &[Option<usize>],
        door_width: f64,
    ) -> bool {
        let kind = graph_nodes[node].1;
        if kind == RoomKind::Staircase {
            match placeholder {
                Some(sp) => {
                    if blocks[block].intersect_rect(sp).is_empty() {
                        return false;
                    }
                }
                None => {}
            }
        }
        let hosts_entrance = entrance_node == Some(graph_nodes[node].0);
        if (kind.needs_exterior() || hosts_entrance)
            && blocks[block].exterior_edge_count(contour) == 0
        {
            return false;
        }
        let gid = graph_nodes[node].0;
        for &(a, b) in edges {
            let other = if a == gid {
                b
            } else if b == gid {
                a
            } else {
                continue;
            };
            let Some(pos) = graph_nodes.iter().position(|(g, _)| *g == other) else {
                continue;
            };
            if let Some(ob) = assignment[pos] {
                let best = blocks[block]
                    .shared_wall_segments(&blocks[ob])
                    .iter()
                    .map(|s| s.len())
                    .fold(0.0f64, f64::max);
                if best + 1e-9 < door_width {
                    return false;
                }
            }
        }
        true
    }

    fn dfs(
        depth: usize,
        order: &[usize],
        graph_nodes: &[(usize, RoomKind)],
        edges: &[(usize, usize)],
        blocks: &[CellSet],
        contour: &CellSet,
        placeholder: Option<&CellRect>,
        entrance_node: Option<usize>,
        assignment: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        rng: &mut Stream,
        budget: &mut usize,
        door_width: f64,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        if *budget == 0 {
            return false;
        }
        let node = order[depth];
        let mut candidates: Vec<usize> = (0..blocks.len()).filter(|&b| !used[b]).collect();
        candidates.shuffle(rng);
        if graph_nodes[node].1 == RoomKind::Staircase {
            if let Some(sp) = placeholder {
                // Favor the block covering most of the placeholder so the
                // stairwell shaft starts out usable.
                candidates.sort_by_key(|&b| {
                    std::cmp::Reverse(blocks[b].intersect_rect(sp).len())
                });
            }
        }
        for block in candidates {
            *budget = budget.saturating_sub(1);
            if !feasible(
                node,
                block,
                graph_nodes,
                edges,
                blocks,
                contour,
                placeholder,
                entrance_node,
                assignment,
                door_width,
            ) {
                continue;
            }
            assignment[node] = Some(block);
            used[block] = true;
            if dfs(
                depth + 1,
                order,
                graph_nodes,
                edges,
                blocks,
                contour,
                placeholder,
                entrance_node,
                assignment,
                used,
                rng,
                budget,
                door_width,
            ) {
                return true;
            }
            assignment[node] = None;
            used[block] = false;
            if *budget == 0 {
                return false;
            }
        }
        false
    }

    if dfs(
        0,
        &order,
        graph_nodes,
        edges,
        blocks,
        contour,
        placeholder,
        entrance_node,
        &mut assignment,
        &mut used,
        rng,
        &mut budget,
        door_width,
    ) {
        Some(assignment.into_iter().map(|a| a.unwrap()).collect())
    } else {
        None
    }
}

/// Staircase placeholder: 4x6 cells (2 x 3 m), fitted inside the topmost
/// contour so it lies inside every floor under the subset chain.
fn place_placeholder(rng: &mut Stream, top: &CellSet) -> Option<CellRect> {
    let bbox = top.bbox()?;
    for _ in 0..200 {
        let (w, h) = if rng.gen_bool(0.5) { (4, 6) } else { (6, 4) };
        if bbox.x1 - bbox.x0 < w || bbox.y1 - bbox.y0 < h {
            continue;
        }
        let x0 = rng.gen_range(bbox.x0..=bbox.x1 - w);
        let y0 = rng.gen_range(bbox.y0..=bbox.y1 - h);
        let rect = CellRect {
            x0,
            y0,
            x1: x0 + w,
            y1: y0 + h,
        };
        if rect.cells().all(|c| top.contains(c)) {
            return Some(rect);
        }
    }
    None
}

/// Build an initial assigned plan for the graph.
pub fn init_plan(
    graph: &RoomGraph,
    seed: u64,
    config: &PlanConfig,
) -> Result<FloorPlan, PlanError> {
    let mut rng = crate::rng::stream(seed, "mondrian");
    for _attempt in 0..config.retry_cap.max(1) {
        if let Some(plan) = try_init(graph, &mut rng, config) {
            plan.check_valid(config)
                .map_err(|e| PlanError::Invalid(format!("fresh plan failed validity: {e}")))?;
            return Ok(plan);
        }
    }
    Err(PlanError::NoAssignment)
}

fn try_init(graph: &RoomGraph, rng: &mut Stream, config: &PlanConfig) -> Option<FloorPlan> {
    // Contours: ground floor sized by its rooms; upper floors trim the one
    // below toward their own target area.
    let mut contours: Vec<CellSet> = Vec::new();
    for (f, fg) in graph.floors.iter().enumerate() {
        let target: f64 = fg.nodes.iter().map(|n| n.kind.typical_area()).sum();
        if f == 0 {
            contours.push(contour_for_area(rng, target));
        } else {
            let mut c = contours[f - 1].clone();
            let mut guard = 0;
            while c.area() > 1.2 * target && guard < 40 {
                guard += 1;
                // Trim one exterior strip off a random side of the bbox.
                let Some(bb) = c.bbox() else { break };
                let side = rng.gen_range(0..4);
                let keep: Vec<Cell> = c
                    .iter()
                    .filter(|&(i, j)| match side {
                        0 => i != bb.x0,
                        1 => i != bb.x1 - 1,
                        2 => j != bb.y0,
                        _ => j != bb.y1 - 1,
                    })
                    .collect();
                if keep.len() < 24 {
                    break;
                }
                let trimmed = CellSet(keep.into_iter().collect());
                let comps = trimmed.components();
                if let Some(largest) = comps.into_iter().max_by_key(|c| c.len()) {
                    c = largest;
                } else {
                    break;
                }
            }
            contours.push(c);
        }
    }

    let placeholder = if graph.floors.len() > 1 {
        Some(place_placeholder(rng, contours.last()?)?)
    } else {
        None
    };

    let mut floors = Vec::new();
    let mut next_room_id = 0u32;
    for (f, fg) in graph.floors.iter().enumerate() {
        let contour = &contours[f];
        let n_rooms = fg.nodes.len();
        let target_blocks = (n_rooms * 3).div_ceil(2); // 1.5x more blocks
        let mut assigned: Option<(Vec<CellSet>, Vec<usize>)> = None;
        for _try in 0..12 {
            let mut blocks = mondrian(rng, contour, target_blocks, config.aspect_limit);
            if blocks.len() < n_rooms {
                continue;
            }
            merge_blocks(&mut blocks, n_rooms);
            if blocks.len() != n_rooms || blocks.iter().any(|b| !b.is_connected()) {
                continue;
            }
            let graph_nodes: Vec<(usize, RoomKind)> = fg
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| (i, n.kind))
                .collect();
            let entrance_node = (f == 0).then_some(fg.entrance);
            if let Some(assignment) = assign_rooms(
                rng,
                &graph_nodes,
                &fg.edges,
                &blocks,
                contour,
                placeholder.as_ref(),
                entrance_node,
                config.door_width,
            ) {
                assigned = Some((blocks, assignment));
                break;
            }
        }
        let (blocks, assignment) = assigned?;
        let rooms: Vec<PlanRoom> = fg
            .nodes
            .iter()
            .enumerate()
            .map(|(node, rn)| {
                let room = PlanRoom {
                    id: next_room_id + node as u32,
                    node,
                    kind: rn.kind,
                    name: rn.name.clone(),
                    cells: blocks[assignment[node]].clone(),
                };
                room
            })
            .collect();
        let entrance_room = rooms[fg.entrance].id;
        next_room_id += fg.nodes.len() as u32;
        floors.push(Floor {
            index: f as u32,
            contour: contour.clone(),
            rooms,
            entrance_room,
            openings: Vec::new(),
        });
    }
    Some(FloorPlan {
        floors,
        graph: graph.clone(),
        stair_placeholder: placeholder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::pcfg::{sample_room_graph, PcfgConfig};

    #[test]
    fn single_room_graph_is_trivial() {
        let graph = RoomGraph {
            floors: vec![super::super::pcfg::FloorGraph {
                nodes: vec![super::super::pcfg::RoomNode {
                    kind: RoomKind::LivingRoom,
                    name: "living-room_0_0".into(),
                }],
                edges: vec![],
                entrance: 0,
            }],
        };
        let plan = init_plan(&graph, 3, &PlanConfig::default()).unwrap();
        assert_eq!(plan.floors[0].rooms.len(), 1);
        assert_eq!(plan.floors[0].rooms[0].cells, plan.floors[0].contour);
    }

    #[test]
    fn sampled_graphs_yield_valid_plans() {
        let config = PlanConfig::default();
        let mut ok = 0;
        for seed in 0..12 {
            let graph = sample_room_graph(seed, &PcfgConfig::with_floors(1)).unwrap();
            if let Ok(plan) = init_plan(&graph, seed, &config) {
                plan.check_valid(&config).unwrap();
                ok += 1;
            }
        }
        assert!(ok >= 10, "only {ok}/12 initialized");
    }

    #[test]
    fn multistory_plan_nests_contours() {
        let config = PlanConfig::default();
        let graph = sample_room_graph(5, &PcfgConfig::with_floors(2)).unwrap();
        let plan = init_plan(&graph, 5, &config).unwrap();
        assert_eq!(plan.floors.len(), 2);
        assert!(plan.stair_placeholder.is_some());
        plan.check_valid(&config).unwrap();
    }

    #[test]
    fn all_cells_on_grid() {
        // Cell coordinates are integers by construction; verify the derived
        // polygons land on multiples of the grid pitch.
        let graph = sample_room_graph(9, &PcfgConfig::with_floors(1)).unwrap();
        let plan = init_plan(&graph, 9, &PlanConfig::default()).unwrap();
        for room in &plan.floors[0].rooms {
            for poly in room.cells.to_polygons() {
                for v in poly.exterior() {
                    let fx = v.x / GRID;
                    let fy = v.y / GRID;
                    assert!((fx - fx.round()).abs() < 1e-9);
                    assert!((fy - fy.round()).abs() < 1e-9);
                }
            }
        }
    }
}
