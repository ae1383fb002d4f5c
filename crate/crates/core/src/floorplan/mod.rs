//! Multi-floor floorplan synthesis: PCFG room graphs, Mondrian
//! initialization with DFS room assignment, a twelve-term annealed
//! objective, grid moves, and door/window/staircase postprocessing.

pub mod anneal;
pub mod grid;
pub mod init;
pub mod loss;
pub mod moves;
pub mod pcfg;
pub mod post;
pub mod svg;

pub use anneal::anneal_plan;
pub use grid::{Cell, CellRect, CellSet, WallSeg, GRID};
pub use init::init_plan;
pub use loss::{floor_loss, FloorLoss, LossWeights, TERM_NAMES};
pub use pcfg::{sample_room_graph, FloorGraph, PcfgConfig, RoomGraph, RoomKind, RoomNode};
pub use post::postprocess;

use crate::semantics::Room;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("retry cap exceeded while sampling: {0}")]
    RetriesExceeded(&'static str),
    #[error("no valid room assignment found for the sampled subdivisions")]
    NoAssignment,
    #[error("no legal staircase placement found")]
    NoStairPlacement,
    #[error("invalid plan: {0}")]
    Invalid(String),
}

/// Global floorplan parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanConfig {
    /// Wall height per floor (m).
    pub wall_height: f64,
    /// Vertical floor-to-floor spacing (m).
    pub floor_spacing: f64,
    /// Minimum shared wall to realize a graph edge and host a door (m).
    pub door_width: f64,
    /// Maximum window width (m).
    pub window_max_width: f64,
    /// Narrow-passage opening margin (m).
    pub narrow_margin: f64,
    /// Mondrian split rejection threshold on child aspect ratios.
    pub aspect_limit: f64,
    /// Resampling budget for subdivision/assignment.
    pub retry_cap: u32,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            wall_height: 2.7,
            floor_spacing: 3.0,
            door_width: 0.9,
            window_max_width: 2.5,
            narrow_margin: 0.6,
            aspect_limit: 4.0,
            retry_cap: 40,
        }
    }
}

/// A room's slice of one floor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRoom {
    /// Globally unique across the plan.
    pub id: u32,
    /// Node index in the floor's graph.
    pub node: usize,
    pub kind: RoomKind,
    pub name: String,
    pub cells: CellSet,
}

/// Openings produced by postprocessing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Opening {
    Door {
        room: u32,
        /// None for the entrance door.
        other: Option<u32>,
        center: (f64, f64),
        width: f64,
        /// Unit direction the door opens toward.
        open_dir: (f64, f64),
    },
    OpenWall {
        rooms: (u32, u32),
        a: (f64, f64),
        b: (f64, f64),
    },
    Window {
        room: u32,
        center: (f64, f64),
        width: f64,
        /// Outward direction of the hosting wall.
        out_dir: (f64, f64),
    },
    Staircase {
        room: u32,
        rect: CellRect,
        /// Unit direction of ascent.
        up_dir: (i32, i32),
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Floor {
    pub index: u32,
    pub contour: CellSet,
    pub rooms: Vec<PlanRoom>,
    /// Room id hosting the floor's entrance.
    pub entrance_room: u32,
    #[serde(default)]
    pub openings: Vec<Opening>,
}

impl Floor {
    pub fn room(&self, id: u32) -> Option<&PlanRoom> {
        self.rooms.iter().find(|r| r.id == id)
    }

    pub fn room_of_node(&self, node: usize) -> Option<&PlanRoom> {
        self.rooms.iter().find(|r| r.node == node)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorPlan {
    pub floors: Vec<Floor>,
    pub graph: RoomGraph,
    /// Shared staircase placeholder, present on multi-story plans.
    pub stair_placeholder: Option<CellRect>,
}

impl FloorPlan {
    /// Hard validity: cells partition each contour, every graph edge is
    /// realized by a door-sized shared wall, exterior rooms touch the
    /// exterior, staircase rooms intersect the placeholder.
    pub fn check_valid(&self, config: &PlanConfig) -> Result<(), PlanError> {
        for (floor, fg) in self.floors.iter().zip(&self.graph.floors) {
            let mut all = CellSet::new();
            let mut total = 0usize;
            for room in &floor.rooms {
                if room.cells.is_empty() {
                    return Err(PlanError::Invalid(format!("{} is empty", room.name)));
                }
                if !room.cells.is_connected() {
                    return Err(PlanError::Invalid(format!(
                        "{} is disconnected",
                        room.name
                    )));
                }
                total += room.cells.len();
                all.union_with(&room.cells);
            }
            if total != all.len() || all != floor.contour {
                return Err(PlanError::Invalid(format!(
                    "floor {} cells do not partition the contour",
                    floor.index
                )));
            }
            for &(a, b) in &fg.edges {
                let ra = floor.room_of_node(a);
                let rb = floor.room_of_node(b);
                let (Some(ra), Some(rb)) = (ra, rb) else {
                    return Err(PlanError::Invalid("edge references missing room".into()));
                };
                let best = ra
                    .cells
                    .shared_wall_segments(&rb.cells)
                    .iter()
                    .map(|s| s.len())
                    .fold(0.0f64, f64::max);
                if best + 1e-9 < config.door_width {
                    return Err(PlanError::Invalid(format!(
                        "edge {}-{} lacks a door-sized shared wall",
                        ra.name, rb.name
                    )));
                }
            }
            for room in &floor.rooms {
                if room.kind.needs_exterior()
                    && room.cells.exterior_edge_count(&floor.contour) == 0
                {
                    return Err(PlanError::Invalid(format!(
                        "{} has no exterior access",
                        room.name
                    )));
                }
            }
            if floor.index == 0 {
                let er = floor
                    .room(floor.entrance_room)
                    .ok_or_else(|| PlanError::Invalid("missing entrance room".into()))?;
                if er.cells.exterior_edge_count(&floor.contour) == 0 {
                    return Err(PlanError::Invalid(
                        "entrance room has no exterior wall".into(),
                    ));
                }
            }
            if let Some(sp) = &self.stair_placeholder {
                for room in &floor.rooms {
                    if room.kind == RoomKind::Staircase
                        && room.cells.intersect_rect(sp).is_empty()
                    {
                        return Err(PlanError::Invalid(format!(
                            "{} misses the staircase placeholder",
                            room.name
                        )));
                    }
                }
            }
        }
        // Upper contours nest inside lower ones.
        for w in self.floors.windows(2) {
            if !w[1].contour.iter().all(|c| w[0].contour.contains(c)) {
                return Err(PlanError::Invalid(
                    "upper contour is not a subset of the one below".into(),
                ));
            }
        }
        Ok(())
    }

    /// Convert to scene rooms (world space, one per plan room).
    pub fn to_rooms(&self, config: &PlanConfig) -> Vec<Room> {
        let mut out = Vec::new();
        for floor in &self.floors {
            let z = floor.index as f64 * config.floor_spacing;
            for room in &floor.rooms {
                let polys = room.cells.to_polygons();
                let Some(poly) = polys
                    .into_iter()
                    .max_by(|a, b| a.area().partial_cmp(&b.area()).unwrap())
                else {
                    continue;
                };
                out.push(Room::new(
                    room.id,
                    room.name.clone(),
                    room.kind.name(),
                    floor.index,
                    poly,
                    z,
                    config.wall_height,
                ));
            }
        }
        out
    }
}
