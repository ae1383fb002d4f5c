//! Exact algebra on rectilinear regions.
//!
//! A region is a finite union of axis-aligned rectangles, stored as a
//! coordinate-compressed boolean grid. All set operations, areas, and
//! square-element morphology are exact (no rasterization error), which the
//! floorplan's partition invariants depend on.

use super::poly2::{vec2, Polygon2D, Vec2};
use super::GeomError;

#[derive(Debug, Clone)]
pub struct Region {
    /// Sorted distinct x coordinates (cell boundaries).
    xs: Vec<f64>,
    /// Sorted distinct y coordinates.
    ys: Vec<f64>,
    /// Row-major fill flags: cell (i, j) covers xs[i]..xs[i+1] x ys[j]..ys[j+1].
    fill: Vec<bool>,
}

fn dedup_sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    v
}

impl Region {
    pub fn empty() -> Region {
        Region {
            xs: vec![],
            ys: vec![],
            fill: vec![],
        }
    }

    fn nx(&self) -> usize {
        self.xs.len().saturating_sub(1)
    }

    fn ny(&self) -> usize {
        self.ys.len().saturating_sub(1)
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.fill[j * self.nx() + i]
    }

    /// Build from a union of (x0, y0, x1, y1) rectangles.
    pub fn from_rects(rects: &[(f64, f64, f64, f64)]) -> Region {
        let rects: Vec<_> = rects
            .iter()
            .copied()
            .filter(|r| r.2 > r.0 && r.3 > r.1)
            .collect();
        if rects.is_empty() {
            return Region::empty();
        }
        let xs = dedup_sorted(rects.iter().flat_map(|r| [r.0, r.2]).collect());
        let ys = dedup_sorted(rects.iter().flat_map(|r| [r.1, r.3]).collect());
        let (nx, ny) = (xs.len() - 1, ys.len() - 1);
        let mut fill = vec![false; nx * ny];
        for j in 0..ny {
            let cy = 0.5 * (ys[j] + ys[j + 1]);
            for i in 0..nx {
                let cx = 0.5 * (xs[i] + xs[i + 1]);
                if rects
                    .iter()
                    .any(|r| cx > r.0 && cx < r.2 && cy > r.1 && cy < r.3)
                {
                    fill[j * nx + i] = true;
                }
            }
        }
        Region { xs, ys, fill }.compact()
    }

    /// Build from a rectilinear polygon (even-odd fill over all rings).
    pub fn from_polygon(poly: &Polygon2D) -> Result<Region, GeomError> {
        if !poly.is_rectilinear() {
            return Err(GeomError::NotRectilinear);
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut collect = |ring: &[Vec2]| {
            for p in ring {
                xs.push(p.x);
                ys.push(p.y);
            }
        };
        collect(poly.exterior());
        for h in poly.holes() {
            collect(h);
        }
        let xs = dedup_sorted(xs);
        let ys = dedup_sorted(ys);
        if xs.len() < 2 || ys.len() < 2 {
            return Ok(Region::empty());
        }
        let (nx, ny) = (xs.len() - 1, ys.len() - 1);
        let mut fill = vec![false; nx * ny];
        for j in 0..ny {
            let cy = 0.5 * (ys[j] + ys[j + 1]);
            for i in 0..nx {
                let cx = 0.5 * (xs[i] + xs[i + 1]);
                fill[j * nx + i] = poly.contains_point(vec2(cx, cy));
            }
        }
        Ok(Region { xs, ys, fill }.compact())
    }

    /// Drop empty border rows/columns (keeps representations canonical-ish
    /// and operations cheap).
    fn compact(self) -> Region {
        if self.fill.iter().all(|&f| !f) {
            return Region::empty();
        }
        self
    }

    pub fn is_empty(&self) -> bool {
        self.fill.iter().all(|&f| !f)
    }

    pub fn area(&self) -> f64 {
        let nx = self.nx();
        let mut total = 0.0;
        for j in 0..self.ny() {
            let h = self.ys[j + 1] - self.ys[j];
            for i in 0..nx {
                if self.fill[j * nx + i] {
                    total += (self.xs[i + 1] - self.xs[i]) * h;
                }
            }
        }
        total
    }

    pub fn bbox(&self) -> Option<(Vec2, Vec2)> {
        let nx = self.nx();
        let mut min = vec2(f64::INFINITY, f64::INFINITY);
        let mut max = vec2(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut any = false;
        for j in 0..self.ny() {
            for i in 0..nx {
                if self.fill[j * nx + i] {
                    any = true;
                    min = vec2(min.x.min(self.xs[i]), min.y.min(self.ys[j]));
                    max = vec2(max.x.max(self.xs[i + 1]), max.y.max(self.ys[j + 1]));
                }
            }
        }
        any.then_some((min, max))
    }

    fn contains_cell_center(&self, cx: f64, cy: f64) -> bool {
        let nx = self.nx();
        if nx == 0 {
            return false;
        }
        let i = match self.xs.partition_point(|&v| v <= cx).checked_sub(1) {
            Some(i) if i < nx => i,
            _ => return false,
        };
        let j = match self.ys.partition_point(|&v| v <= cy).checked_sub(1) {
            Some(j) if j < self.ny() => j,
            _ => return false,
        };
        self.get(i, j)
    }

    fn combine(&self, other: &Region, op: impl Fn(bool, bool) -> bool) -> Region {
        let xs = dedup_sorted(self.xs.iter().chain(other.xs.iter()).copied().collect());
        let ys = dedup_sorted(self.ys.iter().chain(other.ys.iter()).copied().collect());
        if xs.len() < 2 || ys.len() < 2 {
            return Region::empty();
        }
        let (nx, ny) = (xs.len() - 1, ys.len() - 1);
        let mut fill = vec![false; nx * ny];
        for j in 0..ny {
            let cy = 0.5 * (ys[j] + ys[j + 1]);
            for i in 0..nx {
                let cx = 0.5 * (xs[i] + xs[i + 1]);
                fill[j * nx + i] = op(
                    self.contains_cell_center(cx, cy),
                    other.contains_cell_center(cx, cy),
                );
            }
        }
        Region { xs, ys, fill }.compact()
    }

    pub fn union(&self, other: &Region) -> Region {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Region) -> Region {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Region) -> Region {
        self.combine(other, |a, b| a && !b)
    }

    /// Filled cells merged into maximal horizontal runs, as rects. The runs
    /// tile the region exactly.
    pub fn rects(&self) -> Vec<(f64, f64, f64, f64)> {
        self.runs()
    }

    fn runs(&self) -> Vec<(f64, f64, f64, f64)> {
        let nx = self.nx();
        let mut out = Vec::new();
        for j in 0..self.ny() {
            let mut i = 0;
            while i < nx {
                if self.fill[j * nx + i] {
                    let start = i;
                    while i < nx && self.fill[j * nx + i] {
                        i += 1;
                    }
                    out.push((self.xs[start], self.ys[j], self.xs[i], self.ys[j + 1]));
                } else {
                    i += 1;
                }
            }
        }
        out
    }

    /// Minkowski dilation by an axis-aligned square of half-width `m`.
    pub fn dilate(&self, m: f64) -> Region {
        if self.is_empty() {
            return Region::empty();
        }
        let rects: Vec<_> = self
            .runs()
            .into_iter()
            .map(|(x0, y0, x1, y1)| (x0 - m, y0 - m, x1 + m, y1 + m))
            .collect();
        Region::from_rects(&rects)
    }

    /// Morphological erosion by an axis-aligned square of half-width `m`:
    /// the set of points whose square neighborhood lies entirely inside.
    pub fn erode(&self, m: f64) -> Region {
        let Some((min, max)) = self.bbox() else {
            return Region::empty();
        };
        // Complement within a frame wide enough that its dilation covers
        // everything within m of the true complement.
        let frame = Region::from_rects(&[(
            min.x - 2.0 * m - 1.0,
            min.y - 2.0 * m - 1.0,
            max.x + 2.0 * m + 1.0,
            max.y + 2.0 * m + 1.0,
        )]);
        let complement = frame.difference(self);
        self.difference(&complement.dilate(m))
    }

    /// Extract boundary polygons (exterior rings with holes attached).
    pub fn to_polygons(&self) -> Vec<Polygon2D> {
        let rings = self.boundary_rings();
        let mut exteriors: Vec<(Vec<Vec2>, f64)> = Vec::new();
        let mut holes: Vec<(Vec<Vec2>, Vec2)> = Vec::new();
        for (ring, interior_probe) in rings {
            let area = super::poly2::ring_signed_area(&ring);
            if area > 0.0 {
                exteriors.push((ring, area));
            } else {
                holes.push((ring, interior_probe));
            }
        }
        let mut polys: Vec<(Vec<Vec2>, Vec<Vec<Vec2>>, f64)> = exteriors
            .into_iter()
            .map(|(r, a)| (r, Vec::new(), a))
            .collect();
        for (hole, probe) in holes {
            // Attach to the smallest exterior containing the hole's probe.
            let mut best: Option<usize> = None;
            for (idx, (ext, _, area)) in polys.iter().enumerate() {
                if point_in_ring(ext, probe) {
                    if best.map_or(true, |b| polys[b].2 > *area) {
                        best = Some(idx);
                    }
                }
            }
            if let Some(idx) = best {
                polys[idx].1.push(hole);
            }
        }
        polys
            .into_iter()
            .filter_map(|(ext, holes, _)| Polygon2D::new(ext, holes).ok())
            .collect()
    }

    /// Directed boundary rings (region on the left). Returns each ring with
    /// a probe point just off its first edge on the unfilled side.
    fn boundary_rings(&self) -> Vec<(Vec<Vec2>, Vec2)> {
        use std::collections::BTreeMap;
        let nx = self.nx();
        let ny = self.ny();
        // Directed edges between grid corners; corner (i, j) = (xs[i], ys[j]).
        // Key: corner -> outgoing (direction, next corner).
        let mut edges: BTreeMap<(usize, usize), Vec<(u8, (usize, usize))>> = BTreeMap::new();
        let filled = |i: isize, j: isize| -> bool {
            if i < 0 || j < 0 || i as usize >= nx || j as usize >= ny {
                false
            } else {
                self.get(i as usize, j as usize)
            }
        };
        for j in 0..ny {
            for i in 0..nx {
                if !self.get(i, j) {
                    continue;
                }
                let (ii, jj) = (i as isize, j as isize);
                if !filled(ii, jj - 1) {
                    edges.entry((i, j)).or_default().push((0, (i + 1, j))); // E
                }
                if !filled(ii + 1, jj) {
                    edges.entry((i + 1, j)).or_default().push((1, (i + 1, j + 1))); // N
                }
                if !filled(ii, jj + 1) {
                    edges.entry((i + 1, j + 1)).or_default().push((2, (i, j + 1))); // W
                }
                if !filled(ii - 1, jj) {
                    edges.entry((i, j + 1)).or_default().push((3, (i, j))); // S
                }
            }
        }
        let mut rings = Vec::new();
        loop {
            // Take any remaining start edge (BTreeMap order: deterministic).
            let Some((&start, _)) = edges.iter().find(|(_, v)| !v.is_empty()) else {
                break;
            };
            let mut corner = start;
            let mut dir_in: Option<u8> = None;
            let mut path: Vec<(usize, usize)> = vec![start];
            let mut first_dir = None;
            loop {
                let outs = edges.get_mut(&corner).expect("boundary edge chain broken");
                // Choose the leftmost turn relative to the incoming direction
                // so pinch corners split into separate simple rings.
                let pick = match dir_in {
                    None => 0,
                    Some(d) => {
                        let mut best_idx = 0;
                        let mut best_rank = u8::MAX;
                        for (k, (od, _)) in outs.iter().enumerate() {
                            // rank 0 = left turn, 1 = straight, 2 = right.
                            let rank = (4 + *od as i8 - d as i8 - 1).rem_euclid(4) as u8;
                            if rank < best_rank {
                                best_rank = rank;
                                best_idx = k;
                            }
                        }
                        best_idx
                    }
                };
                let (od, next) = outs.remove(pick);
                if first_dir.is_none() {
                    first_dir = Some(od);
                }
                dir_in = Some(od);
                if next == start {
                    break;
                }
                path.push(next);
                corner = next;
            }
            let coords: Vec<Vec2> = path
                .iter()
                .map(|&(i, j)| vec2(self.xs[i], self.ys[j]))
                .collect();
            let coords = drop_collinear(coords);
            if coords.len() >= 3 {
                // Probe point on the unfilled side of the first edge.
                let a = vec2(self.xs[path[0].0], self.ys[path[0].1]);
                let b = vec2(self.xs[path[1].0], self.ys[path[1].1]);
                let mid = (a + b) * 0.5;
                let n = (b - a).perp().normalized(0.0).unwrap_or(vec2(0.0, 1.0));
                let off = nearest_gap(&self.xs).min(nearest_gap(&self.ys)) * 0.25;
                let probe = mid - n * off; // right side of travel = unfilled
                rings.push((coords, probe));
            }
        }
        rings
    }
}

fn nearest_gap(v: &[f64]) -> f64 {
    let mut g = f64::INFINITY;
    for w in v.windows(2) {
        let d = w[1] - w[0];
        if d > 0.0 {
            g = g.min(d);
        }
    }
    if g.is_finite() {
        g
    } else {
        1.0
    }
}

fn drop_collinear(ring: Vec<Vec2>) -> Vec<Vec2> {
    let n = ring.len();
    if n < 3 {
        return ring;
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = ring[(i + n - 1) % n];
        let cur = ring[i];
        let next = ring[(i + 1) % n];
        if (cur - prev).cross(next - cur).abs() > 1e-12 {
            out.push(cur);
        }
    }
    out
}

fn point_in_ring(ring: &[Vec2], p: Vec2) -> bool {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (b.x - a.x) * (p.y - a.y) / (b.y - a.y);
            if x > p.x {
                inside = !inside;
            }
        }
    }
    inside
}
