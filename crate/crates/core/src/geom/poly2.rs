//! 2D polygons and convex utilities.
//!
//! Polygons store an exterior ring plus holes. Boolean-style operations
//! (intersection-over-union, erosion-buffer) are exact and restricted to
//! rectilinear polygons — everything the floorplan produces lives on an
//! axis-aligned grid. Convex helpers (hulls, containment, clipping) work for
//! arbitrary polygons.

use super::region::Region;
use super::GeomError;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub const fn vec2(x: f64, y: f64) -> Vec2 {
    Vec2 { x, y }
}

impl Vec2 {
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self, eps: f64) -> Option<Vec2> {
        let n = self.norm();
        if n <= eps {
            None
        } else {
            Some(self / n)
        }
    }

    /// Rotate 90 degrees counter-clockwise.
    pub fn perp(self) -> Vec2 {
        vec2(-self.y, self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        vec2(self.x + o.x, self.y + o.y)
    }
}
impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        vec2(self.x - o.x, self.y - o.y)
    }
}
impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        vec2(-self.x, -self.y)
    }
}
impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        vec2(self.x * s, self.y * s)
    }
}
impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        vec2(self.x / s, self.y / s)
    }
}

/// Signed area of a ring (positive = counter-clockwise).
pub fn ring_signed_area(ring: &[Vec2]) -> f64 {
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        s += a.cross(b);
    }
    0.5 * s
}

fn segments_properly_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = (b - a).cross(c - a);
    let d2 = (b - a).cross(d - a);
    let d3 = (d - c).cross(a - c);
    let d4 = (d - c).cross(b - c);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != d2 && d3 != d4
}

fn ring_is_simple(ring: &[Vec2]) -> bool {
    let n = ring.len();
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        for j in i + 1..n {
            // Skip adjacent segments (they share an endpoint).
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (c, d) = (ring[j], ring[(j + 1) % n]);
            if segments_properly_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// A simple polygon with optional holes. The exterior winds CCW, holes CW;
/// construction normalizes orientations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon2D {
    exterior: Vec<Vec2>,
    holes: Vec<Vec<Vec2>>,
}

impl Polygon2D {
    pub fn new(mut exterior: Vec<Vec2>, mut holes: Vec<Vec<Vec2>>) -> Result<Polygon2D, GeomError> {
        dedup_ring(&mut exterior);
        if exterior.len() < 3 {
            return Err(GeomError::DegeneratePolygon(
                "exterior ring has fewer than 3 distinct vertices".into(),
            ));
        }
        let area = ring_signed_area(&exterior);
        if area.abs() < 1e-12 {
            return Err(GeomError::DegeneratePolygon("zero-area exterior".into()));
        }
        if area < 0.0 {
            exterior.reverse();
        }
        if !ring_is_simple(&exterior) {
            return Err(GeomError::DegeneratePolygon(
                "self-intersecting exterior".into(),
            ));
        }
        for h in holes.iter_mut() {
            dedup_ring(h);
            if h.len() < 3 || ring_signed_area(h).abs() < 1e-12 {
                return Err(GeomError::DegeneratePolygon("degenerate hole".into()));
            }
            if ring_signed_area(h) > 0.0 {
                h.reverse();
            }
            if !ring_is_simple(h) {
                return Err(GeomError::DegeneratePolygon("self-intersecting hole".into()));
            }
        }
        Ok(Polygon2D { exterior, holes })
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon2D {
        Polygon2D::new(
            vec![vec2(x0, y0), vec2(x1, y0), vec2(x1, y1), vec2(x0, y1)],
            vec![],
        )
        .expect("axis-aligned rectangle is well-formed")
    }

    pub fn exterior(&self) -> &[Vec2] {
        &self.exterior
    }

    pub fn holes(&self) -> &[Vec<Vec2>] {
        &self.holes
    }

    pub fn area(&self) -> f64 {
        let mut a = ring_signed_area(&self.exterior);
        for h in &self.holes {
            a += ring_signed_area(h); // holes are CW, negative
        }
        a
    }

    pub fn bbox(&self) -> (Vec2, Vec2) {
        let mut min = self.exterior[0];
        let mut max = self.exterior[0];
        for &p in &self.exterior {
            min = vec2(min.x.min(p.x), min.y.min(p.y));
            max = vec2(max.x.max(p.x), max.y.max(p.y));
        }
        (min, max)
    }

    pub fn is_rectilinear(&self) -> bool {
        let check = |ring: &[Vec2]| {
            let n = ring.len();
            (0..n).all(|i| {
                let a = ring[i];
                let b = ring[(i + 1) % n];
                (a.x - b.x).abs() < 1e-12 || (a.y - b.y).abs() < 1e-12
            })
        };
        check(&self.exterior) && self.holes.iter().all(|h| check(h))
    }

    /// Even-odd point containment (boundary points are implementation-
    /// defined; use [`Polygon2D::contains_point_eps`] when it matters).
    pub fn contains_point(&self, p: Vec2) -> bool {
        let mut crossings = 0u32;
        let mut count_ring = |ring: &[Vec2]| {
            let n = ring.len();
            for i in 0..n {
                let a = ring[i];
                let b = ring[(i + 1) % n];
                if (a.y > p.y) != (b.y > p.y) {
                    let x = a.x + (b.x - a.x) * (p.y - a.y) / (b.y - a.y);
                    if x > p.x {
                        crossings += 1;
                    }
                }
            }
        };
        count_ring(&self.exterior);
        for h in &self.holes {
            count_ring(h);
        }
        crossings % 2 == 1
    }

    /// True when `p` is inside or within `eps` of the boundary.
    pub fn contains_point_eps(&self, p: Vec2, eps: f64) -> bool {
        if self.contains_point(p) {
            return true;
        }
        self.boundary_distance(p) <= eps
    }

    /// Distance from `p` to the nearest boundary edge.
    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        let mut best = f64::INFINITY;
        let mut scan = |ring: &[Vec2]| {
            let n = ring.len();
            for i in 0..n {
                best = best.min(point_segment_distance(p, ring[i], ring[(i + 1) % n]));
            }
        };
        scan(&self.exterior);
        for h in &self.holes {
            scan(h);
        }
        best
    }

    /// All edges as (start, end) pairs, exterior then holes.
    pub fn edges(&self) -> Vec<(Vec2, Vec2)> {
        let mut out = Vec::new();
        let mut push = |ring: &[Vec2]| {
            let n = ring.len();
            for i in 0..n {
                out.push((ring[i], ring[(i + 1) % n]));
            }
        };
        push(&self.exterior);
        for h in &self.holes {
            push(h);
        }
        out
    }
}

fn dedup_ring(ring: &mut Vec<Vec2>) {
    ring.dedup_by(|a, b| (a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12);
    while ring.len() > 1 {
        let first = ring[0];
        let last = *ring.last().unwrap();
        if (first.x - last.x).abs() < 1e-12 && (first.y - last.y).abs() < 1e-12 {
            ring.pop();
        } else {
            break;
        }
    }
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let denom = ab.dot(ab);
    if denom <= 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / denom).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Total polygon area (exterior minus holes).
pub fn polygon_area(poly: &Polygon2D) -> f64 {
    poly.area()
}

/// Convex hull of a point set, CCW, no collinear points (monotone chain).
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    pts.dedup_by(|a, b| (a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Vec2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 {
            let b = lower[lower.len() - 1];
            let a = lower[lower.len() - 2];
            if (b - a).cross(p - a) <= 0.0 {
                lower.pop();
            } else {
                break;
            }
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 {
            let b = upper[upper.len() - 1];
            let a = upper[upper.len() - 2];
            if (b - a).cross(p - a) <= 0.0 {
                upper.pop();
            } else {
                break;
            }
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Area of the convex hull of the polygon's exterior.
pub fn convex_hull_area(poly: &Polygon2D) -> Result<f64, GeomError> {
    let hull = convex_hull(poly.exterior());
    if hull.len() < 3 {
        return Err(GeomError::DegeneratePolygon("hull degenerate".into()));
    }
    Ok(ring_signed_area(&hull))
}

/// Intersection-over-union of two rectilinear polygons.
pub fn iou_2d(a: &Polygon2D, b: &Polygon2D) -> Result<f64, GeomError> {
    let ra = Region::from_polygon(a)?;
    let rb = Region::from_polygon(b)?;
    let union = ra.union(&rb).area();
    if union <= 0.0 {
        return Err(GeomError::DegeneratePolygon("zero-area union".into()));
    }
    Ok(ra.intersect(&rb).area() / union)
}

/// Morphological opening (erode then dilate) of a rectilinear polygon with an
/// axis-aligned square structuring element of half-width `margin`.
///
/// Passages narrower than `2 * margin` vanish. The opening of a shape can be
/// disconnected, so the result is a list of polygons (empty when the whole
/// shape vanishes). The output is clipped against the input, so it is a
/// subset of the input exactly, not merely within tolerance.
pub fn erosion_buffer(poly: &Polygon2D, margin: f64) -> Result<Vec<Polygon2D>, GeomError> {
    if margin <= 0.0 {
        return Err(GeomError::InvalidArgument("margin must be positive".into()));
    }
    let region = Region::from_polygon(poly)?;
    let opened = region.erode(margin).dilate(margin).intersect(&region);
    Ok(opened.to_polygons())
}

/// Point containment in a convex CCW ring, inflated by `eps`.
pub fn point_in_convex_eps(hull: &[Vec2], p: Vec2, eps: f64) -> bool {
    if hull.len() < 3 {
        return match hull.len() {
            0 => false,
            1 => (p - hull[0]).norm() <= eps,
            _ => point_segment_distance(p, hull[0], hull[1]) <= eps,
        };
    }
    let n = hull.len();
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        let edge = b - a;
        let len = edge.norm();
        if len < 1e-12 {
            continue;
        }
        // Signed distance of p left of the edge; negative = outside.
        if edge.cross(p - a) / len < -eps {
            return false;
        }
    }
    true
}

/// Sutherland–Hodgman: clip an arbitrary subject polygon by a convex CCW
/// clip ring. Returns the clipped vertex cycle (possibly with degenerate
/// bridge edges for non-convex subjects, which is fine for hull extraction).
pub fn clip_polygon_convex(subject: &[Vec2], clip: &[Vec2]) -> Vec<Vec2> {
    let mut output: Vec<Vec2> = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % n];
        let dir = b - a;
        let inside = |p: Vec2| dir.cross(p - a) >= -1e-12;
        let input = std::mem::take(&mut output);
        let m = input.len();
        for j in 0..m {
            let cur = input[j];
            let prev = input[(j + m - 1) % m];
            let cur_in = inside(cur);
            let prev_in = inside(prev);
            if cur_in != prev_in {
                // Edge crosses the clip line.
                let denom = dir.cross(cur - prev);
                if denom.abs() > 1e-15 {
                    let t = dir.cross(a - prev) / denom;
                    output.push(prev + (cur - prev) * t.clamp(0.0, 1.0));
                }
            }
            if cur_in {
                output.push(cur);
            }
        }
    }
    output
}

/// Does the segment pass through the interior of a convex CCW ring (not just
/// touch its boundary)?
pub fn segment_crosses_convex_interior(a: Vec2, b: Vec2, hull: &[Vec2], eps: f64) -> bool {
    if hull.len() < 3 {
        return false;
    }
    // Clip the segment parameter interval against every half-plane.
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let d = b - a;
    let n = hull.len();
    for i in 0..n {
        let p = hull[i];
        let q = hull[(i + 1) % n];
        let edge = q - p;
        let normal = edge.perp(); // points inward for CCW
        let denom = normal.dot(d);
        let num = normal.dot(p - a);
        if denom.abs() < 1e-15 {
            if normal.dot(a - p) < 0.0 {
                return false; // parallel and outside
            }
        } else {
            let t = num / denom;
            if denom > 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
        if t0 > t1 {
            return false;
        }
    }
    if (t1 - t0) * d.norm() <= eps {
        return false; // grazing contact
    }
    // The midpoint of the clipped span must be strictly interior.
    let mid = a + d * (0.5 * (t0 + t1));
    let mut min_margin = f64::INFINITY;
    for i in 0..n {
        let p = hull[i];
        let q = hull[(i + 1) % n];
        let edge = q - p;
        let len = edge.norm();
        if len < 1e-12 {
            continue;
        }
        min_margin = min_margin.min(edge.cross(mid - p) / len);
    }
    min_margin > eps
}

/// Is the convex CCW ring `child` contained in `parent` (holes respected)?
/// Boundary contact within `eps` counts as contained.
pub fn convex_in_polygon(child: &[Vec2], parent: &Polygon2D, eps: f64) -> bool {
    if child.is_empty() {
        return true;
    }
    for &v in child {
        if !parent.contains_point_eps(v, eps) {
            return false;
        }
    }
    // No parent boundary edge may pass through the child's interior.
    for (a, b) in parent.edges() {
        if segment_crosses_convex_interior(a, b, child, eps) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_hull_equals_area() {
        let p = Polygon2D::rect(0.0, 0.0, 2.0, 2.0);
        assert!((polygon_area(&p) - 4.0).abs() < 1e-12);
        assert!((convex_hull_area(&p).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn l_shape_hull_area() {
        // Area-3 L inside a 2x2 bounding square: hull cuts the notch corner.
        let p = Polygon2D::new(
            vec![
                vec2(0.0, 0.0),
                vec2(2.0, 0.0),
                vec2(2.0, 1.0),
                vec2(1.0, 1.0),
                vec2(1.0, 2.0),
                vec2(0.0, 2.0),
            ],
            vec![],
        )
        .unwrap();
        assert!((polygon_area(&p) - 3.0).abs() < 1e-12);
        assert!((convex_hull_area(&p).unwrap() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn iou_identity() {
        let p = Polygon2D::rect(0.0, 0.0, 3.0, 1.5);
        assert!((iou_2d(&p, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn iou_half_overlap() {
        let a = Polygon2D::rect(0.0, 0.0, 2.0, 1.0);
        let b = Polygon2D::rect(1.0, 0.0, 3.0, 1.0);
        // Intersection 1, union 3.
        assert!((iou_2d(&a, &b).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn iou_bounds() {
        let a = Polygon2D::rect(0.0, 0.0, 1.0, 1.0);
        let b = Polygon2D::rect(5.0, 5.0, 6.0, 6.0);
        let v = iou_2d(&a, &b).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn opening_preserves_fat_square() {
        let p = Polygon2D::rect(0.0, 0.0, 4.0, 4.0);
        let out = erosion_buffer(&p, 0.5).unwrap();
        let area: f64 = out.iter().map(polygon_area).sum();
        assert!((area - 16.0).abs() < 1e-6);
    }

    #[test]
    fn opening_kills_thin_corridor() {
        let p = Polygon2D::rect(0.0, 0.0, 4.0, 0.8);
        let out = erosion_buffer(&p, 0.5).unwrap();
        let area: f64 = out.iter().map(polygon_area).sum();
        assert_eq!(area, 0.0);
    }

    #[test]
    fn opening_removes_dumbbell_corridor() {
        // Two 2x2 lobes joined by a 2x0.8 corridor.
        let p = Polygon2D::new(
            vec![
                vec2(0.0, 0.0),
                vec2(2.0, 0.0),
                vec2(2.0, 0.6),
                vec2(4.0, 0.6),
                vec2(4.0, 0.0),
                vec2(6.0, 0.0),
                vec2(6.0, 2.0),
                vec2(4.0, 2.0),
                vec2(4.0, 1.4),
                vec2(2.0, 1.4),
                vec2(2.0, 2.0),
                vec2(0.0, 2.0),
            ],
            vec![],
        )
        .unwrap();
        let out = erosion_buffer(&p, 0.5).unwrap();
        // Corridor (0.8 wide) vanishes, both 2x2 lobes survive.
        assert_eq!(out.len(), 2);
        let area: f64 = out.iter().map(polygon_area).sum();
        assert!((area - 8.0).abs() < 1e-6, "area {area}");
        // Strict subset of the input.
        for poly in &out {
            for &v in poly.exterior() {
                assert!(p.contains_point_eps(v, 1e-9));
            }
        }
    }

    #[test]
    fn opening_never_grows() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1);
        for _ in 0..50 {
            // Random union of grid rects, opened with a random margin.
            let mut rects = Vec::new();
            for _ in 0..rng.gen_range(1..4) {
                let x0 = rng.gen_range(0..8) as f64 * 0.5;
                let y0 = rng.gen_range(0..8) as f64 * 0.5;
                let w = rng.gen_range(1..6) as f64 * 0.5;
                let h = rng.gen_range(1..6) as f64 * 0.5;
                rects.push((x0, y0, x0 + w, y0 + h));
            }
            let region = Region::from_rects(&rects);
            let polys = region.to_polygons();
            let margin = rng.gen_range(1..4) as f64 * 0.25;
            for poly in &polys {
                let input_area = polygon_area(poly);
                let out = erosion_buffer(poly, margin).unwrap();
                let out_area: f64 = out.iter().map(polygon_area).sum();
                assert!(out_area <= input_area + 1e-9);
            }
        }
    }

    #[test]
    fn hole_subtracts_area() {
        let p = Polygon2D::new(
            vec![vec2(0.0, 0.0), vec2(4.0, 0.0), vec2(4.0, 4.0), vec2(0.0, 4.0)],
            vec![vec![
                vec2(1.0, 1.0),
                vec2(3.0, 1.0),
                vec2(3.0, 3.0),
                vec2(1.0, 3.0),
            ]],
        )
        .unwrap();
        assert!((p.area() - 12.0).abs() < 1e-12);
        assert!(!p.contains_point(vec2(2.0, 2.0)));
        assert!(p.contains_point(vec2(0.5, 2.0)));
    }

    #[test]
    fn self_intersecting_ring_rejected() {
        let bowtie = vec![vec2(0.0, 0.0), vec2(2.0, 2.0), vec2(2.0, 0.0), vec2(0.0, 2.0)];
        assert!(Polygon2D::new(bowtie, vec![]).is_err());
    }

    #[test]
    fn convex_containment_with_boundary_contact() {
        let parent = Polygon2D::rect(0.0, 0.0, 4.0, 4.0);
        let child = vec![vec2(0.0, 0.0), vec2(2.0, 0.0), vec2(2.0, 2.0), vec2(0.0, 2.0)];
        assert!(convex_in_polygon(&child, &parent, 1e-9));
        let poking = vec![
            vec2(-0.5, 0.0),
            vec2(2.0, 0.0),
            vec2(2.0, 2.0),
            vec2(-0.5, 2.0),
        ];
        assert!(!convex_in_polygon(&poking, &parent, 1e-9));
    }

    #[test]
    fn convex_containment_respects_notches() {
        // L-shaped parent; a child spanning the notch must fail even though
        // all four corners are inside.
        let parent = Polygon2D::new(
            vec![
                vec2(0.0, 0.0),
                vec2(4.0, 0.0),
                vec2(4.0, 1.0),
                vec2(2.5, 1.0),
                vec2(2.5, 4.0),
                vec2(0.0, 4.0),
            ],
            vec![],
        )
        .unwrap();
        let child = vec![
            vec2(0.5, 0.5),
            vec2(3.5, 0.5),
            vec2(3.5, 3.0),
            vec2(0.5, 3.0),
        ];
        assert!(!convex_in_polygon(&child, &parent, 1e-9));
        let inner = vec![
            vec2(0.5, 0.5),
            vec2(2.0, 0.5),
            vec2(2.0, 3.0),
            vec2(0.5, 3.0),
        ];
        assert!(convex_in_polygon(&inner, &parent, 1e-9));
    }

    #[test]
    fn clip_produces_intersection_vertices() {
        let subject = vec![vec2(0.0, 0.0), vec2(4.0, 0.0), vec2(4.0, 4.0), vec2(0.0, 4.0)];
        let clip = vec![vec2(2.0, -1.0), vec2(6.0, -1.0), vec2(6.0, 2.0), vec2(2.0, 2.0)];
        let out = clip_polygon_convex(&subject, &clip);
        let hull = convex_hull(&out);
        assert!((ring_signed_area(&hull) - 4.0).abs() < 1e-9);
    }
}
