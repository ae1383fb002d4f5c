//! Exact triangle-triangle distance and intersection primitives.
//!
//! Both the BVH traversal and the brute-force oracle call these functions,
//! so accelerated and exhaustive queries agree bit-for-bit.

use super::linalg::Vec3;

/// A triangle in world coordinates.
pub type Tri = [Vec3; 3];

/// Straddle tolerance: surfaces closer than this to coplanar contact are
/// treated as touching, not crossing. Flush margin-zero contacts (an object
/// resting on a plane) must not register as penetration.
const CONTACT_EPS: f64 = 1e-9;

/// Closest point on segment [a, b] to point p.
fn closest_point_on_segment(p: Vec3, a: Vec3, b: Vec3) -> Vec3 {
    let ab = b - a;
    let denom = ab.dot(ab);
    if denom <= 0.0 {
        return a;
    }
    let t = (p - a).dot(ab) / denom;
    a + ab * t.clamp(0.0, 1.0)
}

/// Closest point on triangle (a, b, c) to point p (Ericson, RTCD 5.1.5).
pub fn closest_point_on_triangle(p: Vec3, tri: &Tri) -> Vec3 {
    let [a, b, c] = *tri;
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;

    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }

    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }

    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }

    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

/// Squared distance between segments [p1, q1] and [p2, q2] (Ericson 5.1.9).
fn segment_segment_distance_sq(p1: Vec3, q1: Vec3, p2: Vec3, q2: Vec3) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.dot(d1);
    let e = d2.dot(d2);
    let f = d2.dot(r);

    let (s, t);
    if a <= 0.0 && e <= 0.0 {
        return r.dot(r);
    }
    if a <= 0.0 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(r);
        if e <= 0.0 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let mut s_tmp = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let t_tmp = b * s_tmp + f;
            if t_tmp < 0.0 {
                t = 0.0;
                s_tmp = (-c / a).clamp(0.0, 1.0);
            } else if t_tmp > e {
                t = 1.0;
                s_tmp = ((b - c) / a).clamp(0.0, 1.0);
            } else {
                t = t_tmp / e;
            }
            s = s_tmp;
        }
    }
    let c1 = p1 + d1 * s;
    let c2 = p2 + d2 * t;
    (c1 - c2).norm_sq()
}

fn tri_normal(tri: &Tri) -> Option<Vec3> {
    (tri[1] - tri[0]).cross(tri[2] - tri[0]).normalized(1e-12)
}

/// Crossing interval of `tri` against a plane, projected onto direction `d`.
///
/// Returns the min/max projection parameter of the points where the triangle
/// meets the plane, or `None` when it does not reach the plane.
fn crossing_interval(tri: &Tri, dists: [f64; 3], d: Vec3) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut push = |p: Vec3| {
        let t = p.dot(d);
        lo = lo.min(t);
        hi = hi.max(t);
    };
    for i in 0..3 {
        if dists[i].abs() <= CONTACT_EPS {
            push(tri[i]);
        }
        let j = (i + 1) % 3;
        if (dists[i] > CONTACT_EPS && dists[j] < -CONTACT_EPS)
            || (dists[i] < -CONTACT_EPS && dists[j] > CONTACT_EPS)
        {
            let t = dists[i] / (dists[i] - dists[j]);
            push(tri[i] + (tri[j] - tri[i]) * t);
        }
    }
    if lo.is_finite() {
        Some((lo, hi))
    } else {
        None
    }
}

/// True iff the triangles properly cross each other (interpenetration).
///
/// Touching configurations — shared edges, a vertex resting on a face,
/// coplanar overlap — return false; they are contacts, with distance zero.
pub fn tri_tri_intersect(t1: &Tri, t2: &Tri) -> bool {
    let (n1, n2) = match (tri_normal(t1), tri_normal(t2)) {
        (Some(a), Some(b)) => (a, b),
        _ => return false,
    };

    let d1 = [
        (t1[0] - t2[0]).dot(n2),
        (t1[1] - t2[0]).dot(n2),
        (t1[2] - t2[0]).dot(n2),
    ];
    // t1 must have vertices strictly on both sides of t2's plane.
    if !(d1.iter().any(|&d| d > CONTACT_EPS) && d1.iter().any(|&d| d < -CONTACT_EPS)) {
        return false;
    }
    let d2 = [
        (t2[0] - t1[0]).dot(n1),
        (t2[1] - t1[0]).dot(n1),
        (t2[2] - t1[0]).dot(n1),
    ];
    if !(d2.iter().any(|&d| d > CONTACT_EPS) && d2.iter().any(|&d| d < -CONTACT_EPS)) {
        return false;
    }

    let dir = match n1.cross(n2).normalized(1e-12) {
        Some(d) => d,
        None => return false, // near-parallel planes cannot properly cross
    };
    let (lo1, hi1) = match crossing_interval(t1, d1, dir) {
        Some(iv) => iv,
        None => return false,
    };
    let (lo2, hi2) = match crossing_interval(t2, d2, dir) {
        Some(iv) => iv,
        None => return false,
    };
    hi1.min(hi2) - lo1.max(lo2) > 0.0
}

/// Does a ray from `origin` along `dir` properly cross the triangle's
/// interior? (Möller–Trumbore with strict bounds; grazing hits don't count.)
pub fn ray_crosses_triangle(origin: Vec3, dir: Vec3, tri: &Tri) -> bool {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let p = dir.cross(e2);
    let det = e1.dot(p);
    if det.abs() < 1e-14 {
        return false;
    }
    let inv = 1.0 / det;
    let s = origin - tri[0];
    let u = s.dot(p) * inv;
    if u <= 1e-12 || u >= 1.0 - 1e-12 {
        return false;
    }
    let q = s.cross(e1);
    let v = dir.dot(q) * inv;
    if v <= 1e-12 || u + v >= 1.0 - 1e-12 {
        return false;
    }
    e2.dot(q) * inv > 1e-12
}

/// Parity-based containment of a point in a closed triangle set. Uses a
/// fixed irrational-ish ray direction to dodge axis-aligned degeneracies.
pub fn point_inside_soup(p: Vec3, tris: &[Tri]) -> bool {
    let dir = Vec3 {
        x: 0.537_231_9,
        y: 0.833_172_3,
        z: 0.129_771_7,
    };
    let mut crossings = 0usize;
    for t in tris {
        if ray_crosses_triangle(p, dir, t) {
            crossings += 1;
        }
    }
    crossings % 2 == 1
}

/// Squared distance between two triangles; zero when they properly cross.
pub fn tri_tri_distance_sq(t1: &Tri, t2: &Tri) -> f64 {
    if tri_tri_intersect(t1, t2) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for &v in t1.iter() {
        best = best.min((v - closest_point_on_triangle(v, t2)).norm_sq());
    }
    for &v in t2.iter() {
        best = best.min((v - closest_point_on_triangle(v, t1)).norm_sq());
    }
    for i in 0..3 {
        let (p1, q1) = (t1[i], t1[(i + 1) % 3]);
        for j in 0..3 {
            let (p2, q2) = (t2[j], t2[(j + 1) % 3]);
            best = best.min(segment_segment_distance_sq(p1, q1, p2, q2));
        }
    }
    best
}

/// Closest point pair between two (assumed non-crossing) triangles:
/// `(point on t1, point on t2, squared distance)`.
pub fn tri_tri_closest_points(t1: &Tri, t2: &Tri) -> (Vec3, Vec3, f64) {
    let mut best = (t1[0], t2[0], f64::INFINITY);
    for &v in t1.iter() {
        let c = closest_point_on_triangle(v, t2);
        let d = (v - c).norm_sq();
        if d < best.2 {
            best = (v, c, d);
        }
    }
    for &v in t2.iter() {
        let c = closest_point_on_triangle(v, t1);
        let d = (v - c).norm_sq();
        if d < best.2 {
            best = (c, v, d);
        }
    }
    for i in 0..3 {
        let (p1, q1) = (t1[i], t1[(i + 1) % 3]);
        for j in 0..3 {
            let (p2, q2) = (t2[j], t2[(j + 1) % 3]);
            let (s, t) = segment_segment_params(p1, q1, p2, q2);
            let c1 = p1 + (q1 - p1) * s;
            let c2 = p2 + (q2 - p2) * t;
            let d = (c1 - c2).norm_sq();
            if d < best.2 {
                best = (c1, c2, d);
            }
        }
    }
    best
}

/// Closest-approach parameters (s, t) on segments [p1,q1] and [p2,q2].
fn segment_segment_params(p1: Vec3, q1: Vec3, p2: Vec3, q2: Vec3) -> (f64, f64) {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.dot(d1);
    let e = d2.dot(d2);
    let f = d2.dot(r);
    if a <= 0.0 && e <= 0.0 {
        return (0.0, 0.0);
    }
    if a <= 0.0 {
        return (0.0, (f / e).clamp(0.0, 1.0));
    }
    let c = d1.dot(r);
    if e <= 0.0 {
        return ((-c / a).clamp(0.0, 1.0), 0.0);
    }
    let b = d1.dot(d2);
    let denom = a * e - b * b;
    let mut s = if denom > 0.0 {
        ((b * f - c * e) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let t_tmp = b * s + f;
    let t;
    if t_tmp < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t_tmp > e {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    } else {
        t = t_tmp / e;
    }
    (s, t)
}
