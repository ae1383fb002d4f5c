//! The twelve-term floorplan objective.
//!
//! Most terms decompose per room; [`LossCache`] memoizes per-room
//! quantities so a move only recomputes the rooms it touched. Morphology for
//! the narrow-passage term runs on an exact refined subgrid (the margin is a
//! rational multiple of the cell pitch), so cached and fresh evaluation
//! agree exactly.

use super::grid::{CellSet, GRID};
use super::pcfg::RoomKind;
use super::{Floor, FloorPlan, PlanConfig};
use crate::geom::pathing::{bfs_distances, Doorway, RoomGrid};
use crate::geom::poly2::{convex_hull, ring_signed_area, vec2, Vec2};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const TERM_COUNT: usize = 12;

pub const TERM_NAMES: [&str; TERM_COUNT] = [
    "shortest_path",
    "typical_area",
    "aspect_ratio",
    "convexity",
    "conciseness",
    "functional_area",
    "collinearity",
    "narrow_passages",
    "exterior_length",
    "exterior_corners",
    "staircase_occupancy",
    "staircase_iou",
];

/// Per-term weights, serialized as a name -> weight map.
#[derive(Debug, Clone, PartialEq)]
pub struct LossWeights {
    pub values: [f64; TERM_COUNT],
}

impl LossWeights {
    pub fn ones() -> LossWeights {
        LossWeights {
            values: [1.0; TERM_COUNT],
        }
    }

    /// Shipped default: collinearity counts raw wall lines and needs a small
    /// weight to sit at the same scale as the squared-ratio terms.
    pub fn tuned() -> LossWeights {
        LossWeights {
            values: [1.0, 0.5, 1.0, 2.0, 0.5, 2.0, 0.05, 1.0, 1.0, 0.5, 2.0, 1.0],
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        TERM_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| self.values[i])
    }
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights::tuned()
    }
}

impl Serialize for LossWeights {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(TERM_COUNT))?;
        for (name, v) in TERM_NAMES.iter().zip(self.values.iter()) {
            map.serialize_entry(name, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LossWeights {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<String, f64>::deserialize(d)?;
        let mut out = LossWeights::ones();
        for (k, v) in map {
            let Some(idx) = TERM_NAMES.iter().position(|n| *n == k) else {
                return Err(serde::de::Error::custom(format!("unknown loss term '{k}'")));
            };
            if !(v.is_finite() && v >= 0.0) {
                return Err(serde::de::Error::custom(format!("invalid weight for '{k}'")));
            }
            out.values[idx] = v;
        }
        Ok(out)
    }
}

/// Evaluated objective: per-floor raw terms plus the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FloorLoss {
    pub per_floor: Vec<[f64; TERM_COUNT]>,
    pub weights: LossWeights,
}

impl FloorLoss {
    pub fn term_totals(&self) -> [f64; TERM_COUNT] {
        let mut out = [0.0; TERM_COUNT];
        for floor in &self.per_floor {
            for (acc, v) in out.iter_mut().zip(floor.iter()) {
                *acc += v;
            }
        }
        out
    }

    pub fn total(&self) -> f64 {
        self.term_totals()
            .iter()
            .zip(self.weights.values.iter())
            .map(|(t, w)| t * w)
            .sum()
    }
}

/// Cached per-room quantities.
#[derive(Debug, Clone)]
struct RoomQuantities {
    area: f64,
    /// In-room shortest-path waypoint.
    target: (f64, f64),
    ar_term: f64,
    conv_term: f64,
    conc_term: f64,
    nar_term: f64,
    ext_len: f64,
    /// Ring vertices (grid corner coordinates).
    corners: BTreeSet<(i64, i64)>,
    walls_x: BTreeSet<i64>,
    walls_y: BTreeSet<i64>,
    /// Cells shared with the staircase placeholder.
    stair_inter: usize,
}

#[derive(Debug, Clone)]
struct FloorStatic {
    corners: BTreeSet<(i64, i64)>,
    area: f64,
}

/// Memo for per-room and per-edge quantities. Invalidate rooms a move
/// touches; contours are static over an annealing run.
#[derive(Debug, Default)]
pub struct LossCache {
    rooms: BTreeMap<u32, RoomQuantities>,
    doors: BTreeMap<(u32, u32), Option<(f64, f64)>>,
    floors: BTreeMap<u32, FloorStatic>,
}

impl LossCache {
    pub fn new() -> LossCache {
        LossCache::default()
    }

    pub fn invalidate_room(&mut self, id: u32) {
        self.rooms.remove(&id);
        self.doors.retain(|k, _| k.0 != id && k.1 != id);
    }

    /// Staircase placeholder moved: stair intersections are stale.
    pub fn invalidate_stairs(&mut self) {
        self.rooms.clear();
    }
}

/// Grid-corner vertices of a cell set: corner points where the boundary
/// turns (1 or 3 incident filled cells, or 2 diagonal ones).
fn corner_vertices(cells: &CellSet) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    let filled = |i: i32, j: i32| cells.contains((i, j));
    for (i, j) in cells.iter() {
        for (cx, cy) in [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)] {
            let a = filled(cx - 1, cy - 1);
            let b = filled(cx, cy - 1);
            let c = filled(cx - 1, cy);
            let d = filled(cx, cy);
            let count = usize::from(a) + usize::from(b) + usize::from(c) + usize::from(d);
            let is_vertex = match count {
                1 | 3 => true,
                2 => (a && d) || (b && c), // diagonal pinch
                _ => false,
            };
            if is_vertex {
                out.insert((cx as i64, cy as i64));
            }
        }
    }
    out
}

/// Area lost to a morphological opening with square half-width `margin`,
/// computed exactly on a refined subgrid.
fn opening_lost_area(cells: &CellSet, margin: f64) -> f64 {
    let Some(bb) = cells.bbox() else {
        return 0.0;
    };
    // Refine until the margin is an integer number of subcells.
    let mut n = 1u32;
    while n <= 16 {
        let g = GRID / n as f64;
        let k = margin / g;
        if (k - k.round()).abs() < 1e-9 {
            break;
        }
        n += 1;
    }
    let n = n.min(16);
    let g = GRID / n as f64;
    let k = (margin / g).round() as i32;
    let w = ((bb.x1 - bb.x0) as u32 * n) as i32;
    let h = ((bb.y1 - bb.y0) as u32 * n) as i32;
    let idx = |x: i32, y: i32| (y * w + x) as usize;
    let mut img = vec![false; (w * h) as usize];
    for (ci, cj) in cells.iter() {
        let bx = (ci - bb.x0) * n as i32;
        let by = (cj - bb.y0) * n as i32;
        for dy in 0..n as i32 {
            for dx in 0..n as i32 {
                img[idx(bx + dx, by + dy)] = true;
            }
        }
    }
    // Separable min filter (erosion), window fully inside and filled.
    let pass_min = |src: &[bool], horizontal: bool| -> Vec<bool> {
        let mut out = vec![false; src.len()];
        let (outer, inner) = if horizontal { (h, w) } else { (w, h) };
        for o in 0..outer {
            // Prefix counts of filled along the line.
            let get = |p: i32| -> bool {
                if horizontal {
                    src[idx(p, o)]
                } else {
                    src[idx(o, p)]
                }
            };
            let mut prefix = vec![0i32; inner as usize + 1];
            for p in 0..inner {
                prefix[p as usize + 1] = prefix[p as usize] + i32::from(get(p));
            }
            for p in 0..inner {
                let lo = p - k;
                let hi = p + k;
                let ok = lo >= 0
                    && hi < inner
                    && prefix[hi as usize + 1] - prefix[lo as usize] == (hi - lo + 1);
                if ok {
                    if horizontal {
                        out[idx(p, o)] = true;
                    } else {
                        out[idx(o, p)] = true;
                    }
                }
            }
        }
        out
    };
    let pass_max = |src: &[bool], horizontal: bool| -> Vec<bool> {
        let mut out = vec![false; src.len()];
        let (outer, inner) = if horizontal { (h, w) } else { (w, h) };
        for o in 0..outer {
            let get = |p: i32| -> bool {
                if horizontal {
                    src[idx(p, o)]
                } else {
                    src[idx(o, p)]
                }
            };
            let mut prefix = vec![0i32; inner as usize + 1];
            for p in 0..inner {
                prefix[p as usize + 1] = prefix[p as usize] + i32::from(get(p));
            }
            for p in 0..inner {
                let lo = (p - k).max(0);
                let hi = (p + k).min(inner - 1);
                if prefix[hi as usize + 1] - prefix[lo as usize] > 0 {
                    if horizontal {
                        out[idx(p, o)] = true;
                    } else {
                        out[idx(o, p)] = true;
                    }
                }
            }
        }
        out
    };
    let eroded = pass_min(&pass_min(&img, true), false);
    let dilated = pass_max(&pass_max(&eroded, true), false);
    let opened: usize = dilated
        .iter()
        .zip(img.iter())
        .filter(|(d, i)| **d && **i)
        .count();
    (cells.len() * (n * n) as usize - opened) as f64 * g * g
}

fn cellset_center(cells: &CellSet) -> (f64, f64) {
    let n = cells.len().max(1) as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for (i, j) in cells.iter() {
        sx += (i as f64 + 0.5) * GRID;
        sy += (j as f64 + 0.5) * GRID;
    }
    let centroid = (sx / n, sy / n);
    // Snap to the in-room cell nearest the centroid so the waypoint is
    // always inside (L-shaped rooms push centroids outside).
    let mut best: Option<(f64, f64, f64)> = None;
    for (i, j) in cells.iter() {
        let c = ((i as f64 + 0.5) * GRID, (j as f64 + 0.5) * GRID);
        let d = (c.0 - centroid.0).abs() + (c.1 - centroid.1).abs();
        if best.map(|(bd, _, _)| d < bd - 1e-12).unwrap_or(true) {
            best = Some((d, c.0, c.1));
        }
    }
    best.map(|(_, x, y)| (x, y)).unwrap_or(centroid)
}

fn room_quantities(
    room: &super::PlanRoom,
    contour: &CellSet,
    placeholder: Option<&super::grid::CellRect>,
    config: &PlanConfig,
) -> RoomQuantities {
    let cells = &room.cells;
    let area = cells.area();

    let ar_term = if room.kind.wants_square() {
        cells
            .bbox()
            .map(|bb| {
                let w = (bb.x1 - bb.x0) as f64;
                let h = (bb.y1 - bb.y0) as f64;
                let r = (w / h).max(h / w) - 1.0;
                r * r
            })
            .unwrap_or(0.0)
    } else {
        0.0
    };

    // Convexity from the hull of all cell corner points.
    let mut pts: Vec<Vec2> = Vec::with_capacity(cells.len() * 4);
    for (i, j) in cells.iter() {
        let (x0, y0) = (i as f64 * GRID, j as f64 * GRID);
        pts.push(vec2(x0, y0));
        pts.push(vec2(x0 + GRID, y0));
        pts.push(vec2(x0, y0 + GRID));
        pts.push(vec2(x0 + GRID, y0 + GRID));
    }
    let hull = convex_hull(&pts);
    let conv_term = if hull.len() >= 3 && area > 0.0 {
        let r = ring_signed_area(&hull) / area - 1.0;
        r * r
    } else {
        0.0
    };

    let walls = cells.boundary_walls();
    let conc = walls.len() as f64 - 4.0;
    let mut walls_x = BTreeSet::new();
    let mut walls_y = BTreeSet::new();
    for wall in &walls {
        if wall.is_vertical() {
            walls_x.insert((wall.a.0 / GRID).round() as i64);
        } else {
            walls_y.insert((wall.a.1 / GRID).round() as i64);
        }
    }

    let nar_term = opening_lost_area(cells, config.narrow_margin);

    let ext_len: f64 = cells
        .exterior_walls(contour)
        .iter()
        .map(|w| w.len())
        .sum();

    let stair_inter = placeholder
        .map(|sp| cells.intersect_rect(sp).len())
        .unwrap_or(0);

    RoomQuantities {
        area,
        target: cellset_center(cells),
        ar_term,
        conv_term,
        conc_term: conc * conc,
        nar_term,
        ext_len,
        corners: corner_vertices(cells),
        walls_x,
        walls_y,
        stair_inter,
    }
}

/// Door waypoint for a realized graph edge: the center of the longest shared
/// wall segment.
pub fn door_center(a: &CellSet, b: &CellSet) -> Option<(f64, f64)> {
    a.shared_wall_segments(b)
        .into_iter()
        .max_by(|x, y| x.len().partial_cmp(&y.len()).unwrap())
        .map(|seg| seg.center())
}

/// Entrance waypoint for a floor: center of the longest exterior wall of the
/// entrance room on the ground floor (stepped half a cell inside), the
/// room's cell centroid upstairs.
pub fn entrance_point(plan: &FloorPlan, floor: &Floor) -> (f64, f64) {
    let room = floor
        .room(floor.entrance_room)
        .expect("entrance room exists");
    if floor.index == 0 {
        if let Some(seg) = room
            .cells
            .exterior_walls(&floor.contour)
            .into_iter()
            .max_by(|x, y| x.len().partial_cmp(&y.len()).unwrap())
        {
            let c = seg.center();
            return (
                c.0 + seg.inward.0 as f64 * GRID * 0.5,
                c.1 + seg.inward.1 as f64 * GRID * 0.5,
            );
        }
    }
    let _ = plan;
    cellset_center(&room.cells)
}

/// Fine occupancy grid (0.25 m) labeled by room index within the floor.
pub fn floor_room_grid(floor: &Floor) -> RoomGrid {
    let bbox = floor.contour.bbox().expect("non-empty contour");
    let step = GRID / 2.0;
    let nx = ((bbox.x1 - bbox.x0) * 2) as usize;
    let ny = ((bbox.y1 - bbox.y0) * 2) as usize;
    let mut label = vec![-1i32; nx * ny];
    for (ridx, room) in floor.rooms.iter().enumerate() {
        for (i, j) in room.cells.iter() {
            let fx = ((i - bbox.x0) * 2) as usize;
            let fy = ((j - bbox.y0) * 2) as usize;
            for dx in 0..2 {
                for dy in 0..2 {
                    label[(fy + dy) * nx + fx + dx] = ridx as i32;
                }
            }
        }
    }
    RoomGrid {
        origin: vec2(bbox.x0 as f64 * GRID, bbox.y0 as f64 * GRID),
        step,
        nx,
        ny,
        label,
    }
}

/// Raw (unweighted) terms for one floor, memoized through `cache`.
pub fn floor_terms_cached(
    plan: &FloorPlan,
    floor_index: usize,
    config: &PlanConfig,
    cache: &mut LossCache,
) -> [f64; TERM_COUNT] {
    let floor = &plan.floors[floor_index];
    let fg = &plan.graph.floors[floor_index];
    let mut t = [0.0; TERM_COUNT];

    let fstatic = cache
        .floors
        .entry(floor.index)
        .or_insert_with(|| FloorStatic {
            corners: corner_vertices(&floor.contour),
            area: floor.contour.area(),
        })
        .clone();

    for room in &floor.rooms {
        if !cache.rooms.contains_key(&room.id) {
            let q = room_quantities(
                room,
                &floor.contour,
                plan.stair_placeholder.as_ref(),
                config,
            );
            cache.rooms.insert(room.id, q);
        }
    }

    // 1. Shortest path to entrance: squared detours.
    let grid = floor_room_grid(floor);
    let mut doors = Vec::new();
    for &(a, b) in &fg.edges {
        let (Some(ra), Some(rb)) = (floor.room_of_node(a), floor.room_of_node(b)) else {
            continue;
        };
        let key = (ra.id.min(rb.id), ra.id.max(rb.id));
        let center = *cache
            .doors
            .entry(key)
            .or_insert_with(|| door_center(&ra.cells, &rb.cells));
        if let Some(center) = center {
            let ia = floor.rooms.iter().position(|r| r.id == ra.id).unwrap();
            let ib = floor.rooms.iter().position(|r| r.id == rb.id).unwrap();
            doors.push(Doorway {
                rooms: (ia, ib),
                center: vec2(center.0, center.1),
                width: config.door_width,
            });
        }
    }
    let entrance = entrance_point(plan, floor);
    let src = vec2(entrance.0, entrance.1);
    let dist = bfs_distances(&grid, &doors, src).ok();
    let src_cell = grid.cell_of(src);
    for room in &floor.rooms {
        let q = &cache.rooms[&room.id];
        let tv = vec2(q.target.0, q.target.1);
        let term = match (&dist, grid.cell_of(tv), src_cell) {
            (Some(d), Some((i, j)), Some((si, sj))) => {
                let steps = d[j * grid.nx + i];
                if steps == u32::MAX {
                    1.0 // unreachable: maximal detour
                } else {
                    let length = steps as f64 * grid.step;
                    let sc = grid.center(si, sj);
                    let tc = grid.center(i, j);
                    let direct = (sc.x - tc.x).abs() + (sc.y - tc.y).abs();
                    if length <= 0.0 || direct <= 0.0 {
                        0.0
                    } else {
                        let ratio = direct / length;
                        (ratio - 1.0) * (ratio - 1.0)
                    }
                }
            }
            _ => 1.0,
        };
        t[0] += term;
    }

    // 2. Typical room area: max area ratio either way (floor is 1 per room).
    let typical_sum: f64 = floor.rooms.iter().map(|r| r.kind.typical_area()).sum();
    for room in &floor.rooms {
        let q = &cache.rooms[&room.id];
        let ideal = room.kind.typical_area() / typical_sum * fstatic.area;
        let actual = q.area.max(GRID * GRID);
        t[1] += (ideal / actual).max(actual / ideal);
    }

    // 3-5, 8: per-room cached terms.
    let mut xs: BTreeSet<i64> = BTreeSet::new();
    let mut ys: BTreeSet<i64> = BTreeSet::new();
    let mut func_area = 0.0;
    let mut ext_total = 0.0;
    let mut ext_priv = 0.0;
    let mut all_corners = 0usize;
    let mut priv_corners = 0usize;
    let mut stair_occ = 0.0;
    let mut stair_iou = 0.0;
    let mut has_stairs = false;
    let sp_cells = plan
        .stair_placeholder
        .as_ref()
        .map(|r| ((r.x1 - r.x0) * (r.y1 - r.y0)) as usize)
        .unwrap_or(0);
    for room in &floor.rooms {
        let q = &cache.rooms[&room.id];
        t[2] += q.ar_term;
        t[3] += q.conv_term;
        t[4] += q.conc_term;
        t[7] += q.nar_term;
        xs.extend(q.walls_x.iter().copied());
        ys.extend(q.walls_y.iter().copied());
        if room.kind.is_functional() {
            func_area += q.area;
        }
        ext_total += q.ext_len;
        let corner_hits = q.corners.intersection(&fstatic.corners).count();
        all_corners += corner_hits;
        if room.kind.is_exterior_type() {
            ext_priv += q.ext_len;
            priv_corners += corner_hits;
        }
        if room.kind == RoomKind::Staircase && sp_cells > 0 {
            has_stairs = true;
            stair_occ += q.stair_inter as f64 / sp_cells as f64;
            let union = room.cells.len() + sp_cells - q.stair_inter;
            if union > 0 {
                stair_iou += q.stair_inter as f64 / union as f64;
            }
        }
    }

    // 6. Functional room area share.
    let fr = func_area / fstatic.area - 1.0;
    t[5] = fr * fr;

    // 7. Collinearity: distinct wall lines.
    t[6] = (xs.len() + ys.len()) as f64;

    // 9 & 10. Exterior length and corner shares of bedroom/balcony rooms.
    if ext_total > 0.0 {
        let r = ext_priv / ext_total - 1.0;
        t[8] = r * r;
    }
    if all_corners > 0 {
        let r = priv_corners as f64 / all_corners as f64 - 1.0;
        t[9] = r * r;
    }

    // 11 & 12. Staircase occupancy and IOU against the placeholder.
    if has_stairs {
        t[10] = (stair_occ - 1.0) * (stair_occ - 1.0);
        t[11] = (stair_iou - 1.0) * (stair_iou - 1.0);
    }

    t
}

/// Raw terms for one floor (fresh cache).
pub fn floor_terms(plan: &FloorPlan, floor_index: usize, config: &PlanConfig) -> [f64; TERM_COUNT] {
    let mut cache = LossCache::new();
    floor_terms_cached(plan, floor_index, config, &mut cache)
}

/// All twelve terms for the whole plan.
pub fn floor_loss(plan: &FloorPlan, weights: &LossWeights, config: &PlanConfig) -> FloorLoss {
    let mut cache = LossCache::new();
    let per_floor = (0..plan.floors.len())
        .map(|f| floor_terms_cached(plan, f, config, &mut cache))
        .collect();
    FloorLoss {
        per_floor,
        weights: weights.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::grid::CellRect;
    use crate::floorplan::pcfg::{FloorGraph, RoomGraph, RoomNode};
    use crate::floorplan::PlanRoom;

    fn rect_room(id: u32, node: usize, kind: RoomKind, r: CellRect) -> PlanRoom {
        PlanRoom {
            id,
            node,
            kind,
            name: format!("{}_{}", kind.name(), id),
            cells: CellSet::from_rect(r),
        }
    }

    /// Two-room plan: living room and bedroom side by side (10x10 cells
    /// each, i.e. 5x5 m).
    fn two_room_plan() -> (FloorPlan, PlanConfig) {
        let left = CellRect {
            x0: 0,
            y0: 0,
            x1: 10,
            y1: 10,
        };
        let right = CellRect {
            x0: 10,
            y0: 0,
            x1: 20,
            y1: 10,
        };
        let mut contour = CellSet::from_rect(left);
        contour.union_with(&CellSet::from_rect(right));
        let plan = FloorPlan {
            floors: vec![Floor {
                index: 0,
                contour,
                rooms: vec![
                    rect_room(0, 0, RoomKind::LivingRoom, left),
                    rect_room(1, 1, RoomKind::Bedroom, right),
                ],
                entrance_room: 0,
                openings: vec![],
            }],
            graph: RoomGraph {
                floors: vec![FloorGraph {
                    nodes: vec![
                        RoomNode {
                            kind: RoomKind::LivingRoom,
                            name: "living-room_0_0".into(),
                        },
                        RoomNode {
                            kind: RoomKind::Bedroom,
                            name: "bedroom_0_0".into(),
                        },
                    ],
                    edges: vec![(0, 1)],
                    entrance: 0,
                }],
            },
            stair_placeholder: None,
        };
        (plan, PlanConfig::default())
    }

    #[test]
    fn square_rooms_give_zero_shape_terms() {
        let (plan, config) = two_room_plan();
        let t = floor_terms(&plan, 0, &config);
        assert_eq!(t[2], 0.0, "aspect");
        assert_eq!(t[3], 0.0, "convexity");
        assert_eq!(t[4], 0.0, "conciseness: both rooms have 4 walls");
        assert_eq!(t[5], 0.0, "all rooms functional");
        assert_eq!(t[7], 0.0, "no narrow passages");
    }

    #[test]
    fn typical_area_term_reference_value() {
        let (plan, config) = two_room_plan();
        let t = floor_terms(&plan, 0, &config);
        // Both rooms are 25 m^2 of a 50 m^2 floor; ideals are 25/45 and
        // 20/45 of 50.
        let ideal_lr = 25.0 / 45.0 * 50.0;
        let ideal_bed = 20.0 / 45.0 * 50.0;
        let want = (ideal_lr / 25.0f64).max(25.0 / ideal_lr)
            + (ideal_bed / 25.0f64).max(25.0 / ideal_bed);
        assert!((t[1] - want).abs() < 1e-9, "{} vs {}", t[1], want);
        assert!(t[1] >= 2.0);
    }

    #[test]
    fn l_shaped_room_convexity_and_walls() {
        // Hull/area = 3.5/3 -> (1/6)^2; L-shape has 6 walls -> (6-4)^2 = 4.
        let mut cells = CellSet::from_rect(CellRect {
            x0: 0,
            y0: 0,
            x1: 4,
            y1: 4,
        });
        for c in (CellRect {
            x0: 2,
            y0: 2,
            x1: 4,
            y1: 4,
        })
        .cells()
        {
            cells.remove(c);
        }
        let mut plan = two_room_plan().0;
        plan.floors[0].rooms[0].cells = cells.clone();
        let mut contour = cells;
        contour.union_with(&plan.floors[0].rooms[1].cells);
        plan.floors[0].contour = contour;
        let t = floor_terms(&plan, 0, &PlanConfig::default());
        let ratio: f64 = 3.5 / 3.0;
        let want = (ratio - 1.0) * (ratio - 1.0);
        assert!((t[3] - want).abs() < 1e-9, "convexity {}", t[3]);
        assert!((t[4] - 4.0).abs() < 1e-9, "conciseness {}", t[4]);
    }

    #[test]
    fn narrow_corridor_term_equals_lost_area() {
        // Dumbbell: two 3x3 m lobes joined by a 2 m x 1 m corridor; the
        // 1 m neck is below 2 * 0.6 margin and vanishes under the opening.
        let mut cells = CellSet::from_rect(CellRect {
            x0: 0,
            y0: 0,
            x1: 6,
            y1: 6,
        });
        cells.union_with(&CellSet::from_rect(CellRect {
            x0: 10,
            y0: 0,
            x1: 16,
            y1: 6,
        }));
        cells.union_with(&CellSet::from_rect(CellRect {
            x0: 6,
            y0: 2,
            x1: 10,
            y1: 4,
        }));
        let lost = opening_lost_area(&cells, 0.6);
        // The 2 m^2 corridor disappears; the lobes are restored exactly.
        assert!((lost - 2.0).abs() < 1e-9, "lost {lost}");
    }

    #[test]
    fn opening_matches_region_engine() {
        // The fast subgrid path must agree with the exact region algebra.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut cells = CellSet::new();
            for _ in 0..rng.gen_range(1..4) {
                let x0 = rng.gen_range(0..6);
                let y0 = rng.gen_range(0..6);
                let w = rng.gen_range(2..7);
                let h = rng.gen_range(2..7);
                cells.union_with(&CellSet::from_rect(CellRect {
                    x0,
                    y0,
                    x1: x0 + w,
                    y1: y0 + h,
                }));
            }
            let margin = 0.6;
            let fast = opening_lost_area(&cells, margin);
            let region = cells.to_region();
            let opened = region
                .erode(margin)
                .dilate(margin)
                .intersect(&region);
            let slow = cells.area() - opened.area();
            assert!((fast - slow).abs() < 1e-9, "fast {fast} slow {slow}");
        }
    }

    #[test]
    fn shortest_path_small_for_adjacent_rooms() {
        let (plan, config) = two_room_plan();
        let t = floor_terms(&plan, 0, &config);
        assert!(t[0] < 0.5, "sp {}", t[0]);
    }

    #[test]
    fn collinearity_counts_distinct_lines() {
        let (plan, config) = two_room_plan();
        let t = floor_terms(&plan, 0, &config);
        // Wall x-lines: 0, 10, 20; y-lines: 0, 10.
        assert_eq!(t[6], 5.0);
    }

    #[test]
    fn cached_matches_fresh_after_invalidation() {
        let (mut plan, config) = two_room_plan();
        let mut cache = LossCache::new();
        let t0 = floor_terms_cached(&plan, 0, &config, &mut cache);
        assert_eq!(t0, floor_terms(&plan, 0, &config));
        // Move a cell from room 0 to room 1 and invalidate both.
        let cell = (9, 0);
        plan.floors[0].rooms[0].cells.remove(cell);
        plan.floors[0].rooms[1].cells.insert(cell);
        cache.invalidate_room(0);
        cache.invalidate_room(1);
        let t1 = floor_terms_cached(&plan, 0, &config, &mut cache);
        assert_eq!(t1, floor_terms(&plan, 0, &config));
    }

    #[test]
    fn weights_round_trip_serde() {
        let w = LossWeights::tuned();
        let text = serde_json::to_string(&w).unwrap();
        let back: LossWeights = serde_json::from_str(&text).unwrap();
        assert_eq!(w, back);
        assert!(serde_json::from_str::<LossWeights>("{\"bogus\": 1.0}").is_err());
    }

    #[test]
    fn total_is_weighted_sum() {
        let (plan, config) = two_room_plan();
        let loss = floor_loss(&plan, &LossWeights::ones(), &config);
        let total: f64 = loss.term_totals().iter().sum();
        assert!((loss.total() - total).abs() < 1e-12);
    }

    #[test]
    fn corner_vertices_of_rect() {
        let cells = CellSet::from_rect(CellRect {
            x0: 1,
            y0: 2,
            x1: 4,
            y1: 5,
        });
        let corners = corner_vertices(&cells);
        assert_eq!(corners.len(), 4);
        assert!(corners.contains(&(1, 2)));
        assert!(corners.contains(&(4, 5)));
    }
}
