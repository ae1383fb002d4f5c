//! Axis-aligned shortest paths over labeled occupancy grids.
//!
//! Rooms are rasterized onto a fine grid (0.25 m by default); movement is
//! 4-connected within a room, and between rooms only through doorway windows
//! on their shared wall.

use super::poly2::Vec2;
use super::GeomError;
use std::collections::VecDeque;

/// A labeled occupancy grid. Cell (i, j) covers
/// `origin + (i..i+1, j..j+1) * step`; label -1 means outside.
#[derive(Debug, Clone)]
pub struct RoomGrid {
    pub origin: Vec2,
    pub step: f64,
    pub nx: usize,
    pub ny: usize,
    pub label: Vec<i32>,
}

impl RoomGrid {
    pub fn cell_of(&self, p: Vec2) -> Option<(usize, usize)> {
        let fx = (p.x - self.origin.x) / self.step;
        let fy = (p.y - self.origin.y) / self.step;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (i, j) = (fx.floor() as usize, fy.floor() as usize);
        (i < self.nx && j < self.ny).then_some((i, j))
    }

    pub fn label_at(&self, i: usize, j: usize) -> i32 {
        self.label[j * self.nx + i]
    }

    /// World coordinates of a cell center.
    pub fn center(&self, i: usize, j: usize) -> Vec2 {
        Vec2 {
            x: self.origin.x + (i as f64 + 0.5) * self.step,
            y: self.origin.y + (j as f64 + 0.5) * self.step,
        }
    }
}

/// A traversable window between two rooms, centered on their shared wall.
#[derive(Debug, Clone)]
pub struct Doorway {
    pub rooms: (usize, usize),
    pub center: Vec2,
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathStats {
    /// L1 length of the shortest axis-aligned path.
    pub length_l1: f64,
    /// Direct L1 distance between the endpoints.
    pub direct_l1: f64,
}

impl PathStats {
    /// Fractional detour, clamped at zero for degenerate direct distances.
    pub fn detour(&self) -> f64 {
        if self.direct_l1 <= 0.0 || self.length_l1 <= 0.0 {
            0.0
        } else {
            (self.length_l1 / self.direct_l1 - 1.0).max(0.0)
        }
    }
}

fn crossing_allowed(doors: &[Doorway], a: i32, b: i32, crossing: Vec2) -> bool {
    if a == b {
        return true;
    }
    let (a, b) = (a as usize, b as usize);
    doors.iter().any(|d| {
        (d.rooms == (a, b) || d.rooms == (b, a))
            && (crossing - d.center).norm() <= d.width * 0.5 + 1e-9
    })
}

/// BFS step counts from a source point to every reachable cell
/// (`u32::MAX` = unreachable). Errors when the source lies outside the grid
/// or on an unlabeled cell.
pub fn bfs_distances(
    grid: &RoomGrid,
    doors: &[Doorway],
    src: Vec2,
) -> Result<Vec<u32>, GeomError> {
    let (si, sj) = grid
        .cell_of(src)
        .filter(|&(i, j)| grid.label_at(i, j) >= 0)
        .ok_or_else(|| GeomError::InvalidArgument("path source outside rooms".into()))?;
    let mut dist = vec![u32::MAX; grid.nx * grid.ny];
    let mut queue = VecDeque::new();
    dist[sj * grid.nx + si] = 0;
    queue.push_back((si, sj));
    while let Some((i, j)) = queue.pop_front() {
        let d = dist[j * grid.nx + i];
        let here = grid.label_at(i, j);
        let neighbors = [
            (i.wrapping_sub(1), j),
            (i + 1, j),
            (i, j.wrapping_sub(1)),
            (i, j + 1),
        ];
        for (ni, nj) in neighbors {
            if ni >= grid.nx || nj >= grid.ny {
                continue;
            }
            let there = grid.label_at(ni, nj);
            if there < 0 || dist[nj * grid.nx + ni] != u32::MAX {
                continue;
            }
            if here != there {
                let ca = grid.center(i, j);
                let cb = grid.center(ni, nj);
                let crossing = (ca + cb) * 0.5;
                if !crossing_allowed(doors, here, there, crossing) {
                    continue;
                }
            }
            dist[nj * grid.nx + ni] = d + 1;
            queue.push_back((ni, nj));
        }
    }
    Ok(dist)
}

/// Shortest axis-aligned path between two points, moving only through rooms
/// and doorways.
pub fn shortest_axis_path(
    grid: &RoomGrid,
    doors: &[Doorway],
    from: Vec2,
    to: Vec2,
) -> Result<PathStats, GeomError> {
    let direct_l1 = (from.x - to.x).abs() + (from.y - to.y).abs();
    let (ti, tj) = grid
        .cell_of(to)
        .filter(|&(i, j)| grid.label_at(i, j) >= 0)
        .ok_or_else(|| GeomError::InvalidArgument("path target outside rooms".into()))?;
    let (fi, fj) = grid
        .cell_of(from)
        .filter(|&(i, j)| grid.label_at(i, j) >= 0)
        .ok_or_else(|| GeomError::InvalidArgument("path source outside rooms".into()))?;
    if (fi, fj) == (ti, tj) {
        return Ok(PathStats {
            length_l1: 0.0,
            direct_l1,
        });
    }
    let dist = bfs_distances(grid, doors, from)?;
    let steps = dist[tj * grid.nx + ti];
    if steps == u32::MAX {
        return Err(GeomError::Disconnected);
    }
    Ok(PathStats {
        length_l1: steps as f64 * grid.step,
        direct_l1,
    })
}
