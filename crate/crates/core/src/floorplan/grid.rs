//! Cell-set geometry on the 0.5 m floorplan grid.
//!
//! Every room, contour, and placeholder is a set of grid cells; cell (i, j)
//! covers `[i, i+1] x [j, j+1]` times the grid pitch. Set representation
//! keeps partition invariants exact: rooms never overlap and never leave
//! gaps, because moves transfer cells.

use crate::geom::{Polygon2D, Region};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Grid pitch in meters.
pub const GRID: f64 = 0.5;

pub type Cell = (i32, i32);

pub const DIRS: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Axis-aligned rectangle in cell coordinates, exclusive upper corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRect {
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
}

impl CellRect {
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (self.x0..self.x1).flat_map(move |i| (self.y0..self.y1).map(move |j| (i, j)))
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.0 >= self.x0 && c.0 < self.x1 && c.1 >= self.y0 && c.1 < self.y1
    }

    pub fn shifted(&self, dx: i32, dy: i32) -> CellRect {
        CellRect {
            x0: self.x0 + dx,
            y0: self.y0 + dy,
            x1: self.x1 + dx,
            y1: self.y1 + dy,
        }
    }

    pub fn area(&self) -> f64 {
        ((self.x1 - self.x0).max(0) as f64) * ((self.y1 - self.y0).max(0) as f64) * GRID * GRID
    }

    pub fn intersect(&self, o: &CellRect) -> CellRect {
        CellRect {
            x0: self.x0.max(o.x0),
            y0: self.y0.max(o.y0),
            x1: self.x1.min(o.x1),
            y1: self.y1.min(o.y1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.x0 >= self.x1 || self.y0 >= self.y1
    }

    /// Meter-space bounds (x0, y0, x1, y1).
    pub fn meters(&self) -> (f64, f64, f64, f64) {
        (
            self.x0 as f64 * GRID,
            self.y0 as f64 * GRID,
            self.x1 as f64 * GRID,
            self.y1 as f64 * GRID,
        )
    }
}

/// A set of grid cells.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CellSet(pub BTreeSet<Cell>);

/// One maximal straight boundary run of a cell set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallSeg {
    /// Endpoints in meters, ordered by increasing coordinate.
    pub a: (f64, f64),
    pub b: (f64, f64),
    /// Unit inward direction (into the set), in cell steps.
    pub inward: (i32, i32),
}

impl WallSeg {
    pub fn len(&self) -> f64 {
        (self.b.0 - self.a.0).abs() + (self.b.1 - self.a.1).abs()
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.a.0 + self.b.0) * 0.5, (self.a.1 + self.b.1) * 0.5)
    }

    pub fn is_vertical(&self) -> bool {
        (self.a.0 - self.b.0).abs() < 1e-12
    }
}

impl CellSet {
    pub fn new() -> CellSet {
        CellSet(BTreeSet::new())
    }

    pub fn from_rect(r: CellRect) -> CellSet {
        CellSet(r.cells().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.0.contains(&c)
    }

    pub fn insert(&mut self, c: Cell) {
        self.0.insert(c);
    }

    pub fn remove(&mut self, c: Cell) {
        self.0.remove(&c);
    }

    pub fn iter(&self) -> impl Iterator<Item = Cell> + '_ {
        self.0.iter().copied()
    }

    pub fn area(&self) -> f64 {
        self.len() as f64 * GRID * GRID
    }

    pub fn bbox(&self) -> Option<CellRect> {
        if self.0.is_empty() {
            return None;
        }
        let (mut x0, mut y0, mut x1, mut y1) = (i32::MAX, i32::MAX, i32::MIN, i32::MIN);
        for &(i, j) in &self.0 {
            x0 = x0.min(i);
            y0 = y0.min(j);
            x1 = x1.max(i + 1);
            y1 = y1.max(j + 1);
        }
        Some(CellRect { x0, y0, x1, y1 })
    }

    /// 4-connectivity of the whole set.
    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.0.iter().next() else {
            return true;
        };
        let mut seen = BTreeSet::new();
        let mut stack = vec![start];
        seen.insert(start);
        while let Some((i, j)) = stack.pop() {
            for (di, dj) in DIRS {
                let n = (i + di, j + dj);
                if self.0.contains(&n) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.len() == self.0.len()
    }

    /// Split into 4-connected components (deterministic order).
    pub fn components(&self) -> Vec<CellSet> {
        let mut rest = self.0.clone();
        let mut out = Vec::new();
        while let Some(&start) = rest.iter().next() {
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            rest.remove(&start);
            comp.insert(start);
            while let Some((i, j)) = stack.pop() {
                for (di, dj) in DIRS {
                    let n = (i + di, j + dj);
                    if rest.remove(&n) {
                        comp.insert(n);
                        stack.push(n);
                    }
                }
            }
            out.push(CellSet(comp));
        }
        out
    }

    pub fn union_with(&mut self, other: &CellSet) {
        self.0.extend(other.0.iter().copied());
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        CellSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn intersect_rect(&self, r: &CellRect) -> CellSet {
        CellSet(self.0.iter().copied().filter(|&c| r.contains(c)).collect())
    }

    /// Boundary edges shared with `other` (adjacent across one step).
    pub fn shared_edge_count(&self, other: &CellSet) -> usize {
        let mut n = 0;
        for &(i, j) in &self.0 {
            for (di, dj) in DIRS {
                if other.contains((i + di, j + dj)) {
                    n += 1;
                }
            }
        }
        n
    }

    /// Length in meters of the wall shared with `other`, as the longest
    /// single maximal straight run (doors need contiguous walls).
    pub fn shared_wall_segments(&self, other: &CellSet) -> Vec<WallSeg> {
        // Directed boundary edges toward `other`.
        let mut vertical: BTreeSet<(i32, i32, i32)> = BTreeSet::new(); // (x, y, inward_x)
        let mut horizontal: BTreeSet<(i32, i32, i32)> = BTreeSet::new(); // (y, x, inward_y)
        for &(i, j) in &self.0 {
            if other.contains((i + 1, j)) {
                vertical.insert((i + 1, j, -1));
            }
            if other.contains((i - 1, j)) {
                vertical.insert((i, j, 1));
            }
            if other.contains((i, j + 1)) {
                horizontal.insert((j + 1, i, -1));
            }
            if other.contains((i, j - 1)) {
                horizontal.insert((j, i, 1));
            }
        }
        let mut out = Vec::new();
        collect_runs(&vertical, true, &mut out);
        collect_runs(&horizontal, false, &mut out);
        out
    }

    /// Maximal straight boundary runs against anything not in the set.
    pub fn boundary_walls(&self) -> Vec<WallSeg> {
        let mut vertical: BTreeSet<(i32, i32, i32)> = BTreeSet::new();
        let mut horizontal: BTreeSet<(i32, i32, i32)> = BTreeSet::new();
        for &(i, j) in &self.0 {
            if !self.contains((i + 1, j)) {
                vertical.insert((i + 1, j, -1));
            }
            if !self.contains((i - 1, j)) {
                vertical.insert((i, j, 1));
            }
            if !self.contains((i, j + 1)) {
                horizontal.insert((j + 1, i, -1));
            }
            if !self.contains((i, j - 1)) {
                horizontal.insert((j, i, 1));
            }
        }
        let mut out = Vec::new();
        collect_runs(&vertical, true, &mut out);
        collect_runs(&horizontal, false, &mut out);
        out
    }

    /// Exterior boundary edge count against the contour complement.
    pub fn exterior_edge_count(&self, contour: &CellSet) -> usize {
        let mut n = 0;
        for &(i, j) in &self.0 {
            for (di, dj) in DIRS {
                if !contour.contains((i + di, j + dj)) {
                    n += 1;
                }
            }
        }
        n
    }

    /// Exterior wall runs (boundary against the outside of the contour).
    pub fn exterior_walls(&self, contour: &CellSet) -> Vec<WallSeg> {
        let mut vertical: BTreeSet<(i32, i32, i32)> = BTreeSet::new();
        let mut horizontal: BTreeSet<(i32, i32, i32)> = BTreeSet::new();
        for &(i, j) in &self.0 {
            if !contour.contains((i + 1, j)) {
                vertical.insert((i + 1, j, -1));
            }
            if !contour.contains((i - 1, j)) {
                vertical.insert((i, j, 1));
            }
            if !contour.contains((i, j + 1)) {
                horizontal.insert((j + 1, i, -1));
            }
            if !contour.contains((i, j - 1)) {
                horizontal.insert((j, i, 1));
            }
        }
        let mut out = Vec::new();
        collect_runs(&vertical, true, &mut out);
        collect_runs(&horizontal, false, &mut out);
        out
    }

    pub fn to_region(&self) -> Region {
        let rects: Vec<(f64, f64, f64, f64)> = self
            .0
            .iter()
            .map(|&(i, j)| {
                (
                    i as f64 * GRID,
                    j as f64 * GRID,
                    (i + 1) as f64 * GRID,
                    (j + 1) as f64 * GRID,
                )
            })
            .collect();
        Region::from_rects(&rects)
    }

    /// Boundary polygons (one per connected component, holes attached).
    pub fn to_polygons(&self) -> Vec<Polygon2D> {
        self.to_region().to_polygons()
    }
}

/// Group sorted directed edges into maximal straight runs.
fn collect_runs(edges: &BTreeSet<(i32, i32, i32)>, vertical: bool, out: &mut Vec<WallSeg>) {
    let mut iter = edges.iter().peekable();
    while let Some(&(fixed, start, inward)) = iter.next() {
        let mut end = start;
        while let Some(&&(f2, s2, in2)) = iter.peek() {
            if f2 == fixed && in2 == inward && s2 == end + 1 {
                end = s2;
                iter.next();
            } else {
                break;
            }
        }
        let (a, b, inw) = if vertical {
            (
                (fixed as f64 * GRID, start as f64 * GRID),
                (fixed as f64 * GRID, (end + 1) as f64 * GRID),
                (inward, 0),
            )
        } else {
            (
                (start as f64 * GRID, fixed as f64 * GRID),
                ((end + 1) as f64 * GRID, fixed as f64 * GRID),
                (0, inward),
            )
        };
        out.push(WallSeg { a, b, inward: inw });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_set_walls() {
        let s = CellSet::from_rect(CellRect {
            x0: 0,
            y0: 0,
            x1: 4,
            y1: 2,
        });
        assert_eq!(s.len(), 8);
        assert_eq!(s.area(), 2.0);
        let walls = s.boundary_walls();
        assert_eq!(walls.len(), 4);
        let total: f64 = walls.iter().map(|w| w.len()).sum();
        assert!((total - 6.0).abs() < 1e-12);
        assert!(s.is_connected());
    }

    #[test]
    fn l_shape_has_six_walls() {
        let mut s = CellSet::from_rect(CellRect {
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
            s.remove(c);
        }
        assert_eq!(s.boundary_walls().len(), 6);
    }

    #[test]
    fn shared_wall_between_neighbors() {
        let a = CellSet::from_rect(CellRect {
            x0: 0,
            y0: 0,
            x1: 2,
            y1: 4,
        });
        let b = CellSet::from_rect(CellRect {
            x0: 2,
            y0: 1,
            x1: 4,
            y1: 3,
        });
        let segs = a.shared_wall_segments(&b);
        assert_eq!(segs.len(), 1);
        assert!((segs[0].len() - 1.0).abs() < 1e-12);
        assert!(segs[0].is_vertical());
        assert_eq!(segs[0].inward, (-1, 0)); // into a
    }

    #[test]
    fn components_split() {
        let mut s = CellSet::new();
        s.insert((0, 0));
        s.insert((0, 1));
        s.insert((5, 5));
        assert!(!s.is_connected());
        let comps = s.components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].len() + comps[1].len(), 3);
    }

    #[test]
    fn polygons_round_trip_area() {
        let mut s = CellSet::from_rect(CellRect {
            x0: 0,
            y0: 0,
            x1: 6,
            y1: 6,
        });
        for c in (CellRect {
            x0: 2,
            y0: 2,
            x1: 4,
            y1: 4,
        })
        .cells()
        {
            s.remove(c);
        }
        let polys = s.to_polygons();
        assert_eq!(polys.len(), 1);
        let area: f64 = polys.iter().map(|p| p.area()).sum();
        assert!((area - s.area()).abs() < 1e-9);
        assert_eq!(polys[0].holes().len(), 1);
    }
}
