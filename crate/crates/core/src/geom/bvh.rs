//! Bounding-volume hierarchy over world-space triangles.
//!
//! Queries are exact: pruning uses a conservative slack factor so the
//! traversal can never discard a subtree containing the true minimum, and
//! every surviving pair is evaluated with the same triangle primitives the
//! brute-force path uses.

use super::linalg::Vec3;
use super::tri::{tri_tri_distance_sq, tri_tri_intersect, Tri};
use super::{GeomError, Pose, TriMesh};

/// Relative slack applied when pruning: subtrees are discarded only when
/// their lower bound exceeds the current best by more than fp rounding can
/// account for.
const PRUNE_SLACK: f64 = 1.0 + 1e-9;

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    fn empty() -> Aabb {
        Aabb {
            min: Vec3 {
                x: f64::INFINITY,
                y: f64::INFINITY,
                z: f64::INFINITY,
            },
            max: Vec3 {
                x: f64::NEG_INFINITY,
                y: f64::NEG_INFINITY,
                z: f64::NEG_INFINITY,
            },
        }
    }

    fn grow_tri(&mut self, t: &Tri) {
        for v in t {
            self.min = self.min.min_by_component(*v);
            self.max = self.max.max_by_component(*v);
        }
    }

    /// Squared distance between boxes; 0 when they overlap.
    pub fn distance_sq(&self, o: &Aabb) -> f64 {
        let axis = |amin: f64, amax: f64, bmin: f64, bmax: f64| -> f64 {
            let d = (bmin - amax).max(amin - bmax);
            if d > 0.0 {
                d
            } else {
                0.0
            }
        };
        let dx = axis(self.min.x, self.max.x, o.min.x, o.max.x);
        let dy = axis(self.min.y, self.max.y, o.min.y, o.max.y);
        let dz = axis(self.min.z, self.max.z, o.min.z, o.max.z);
        dx * dx + dy * dy + dz * dz
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: u32, count: u32 },
    Inner { left: u32, right: u32 },
}

/// A BVH over triangles already transformed into world space.
#[derive(Debug, Clone)]
pub struct WorldBvh {
    tris: Vec<Tri>,
    nodes: Vec<Node>,
    boxes: Vec<Aabb>,
    root: u32,
}

impl WorldBvh {
    pub fn build(tris: Vec<Tri>) -> Result<WorldBvh, GeomError> {
        if tris.is_empty() {
            return Err(GeomError::EmptyMesh);
        }
        let mut order: Vec<u32> = (0..tris.len() as u32).collect();
        let centroids: Vec<Vec3> = tris
            .iter()
            .map(|t| (t[0] + t[1] + t[2]) / 3.0)
            .collect();
        let mut nodes = Vec::new();
        let mut boxes = Vec::new();
        let root = Self::build_node(&tris, &centroids, &mut order, 0, &mut nodes, &mut boxes);
        // Reorder triangles into leaf order so leaves are contiguous ranges.
        let tris: Vec<Tri> = order.iter().map(|&i| tris[i as usize]).collect();
        Ok(WorldBvh {
            tris,
            nodes,
            boxes,
            root,
        })
    }

    /// Build a BVH for a mesh under a pose, optionally restricted to a
    /// triangle subset.
    pub fn from_mesh(
        mesh: &TriMesh,
        pose: &Pose,
        subset: Option<&[u32]>,
    ) -> Result<WorldBvh, GeomError> {
        Self::build(mesh.world_triangles_subset(pose, subset))
    }

    fn build_node(
        tris: &[Tri],
        centroids: &[Vec3],
        order: &mut [u32],
        offset: u32,
        nodes: &mut Vec<Node>,
        boxes: &mut Vec<Aabb>,
    ) -> u32 {
        let mut aabb = Aabb::empty();
        for &i in order.iter() {
            aabb.grow_tri(&tris[i as usize]);
        }
        let id = nodes.len() as u32;
        if order.len() <= LEAF_SIZE {
            nodes.push(Node::Leaf {
                start: offset,
                count: order.len() as u32,
            });
            boxes.push(aabb);
            return id;
        }
        // Split on the longest axis at the centroid median.
        let ext = aabb.max - aabb.min;
        let key = |i: u32| -> f64 {
            let c = centroids[i as usize];
            if ext.x >= ext.y && ext.x >= ext.z {
                c.x
            } else if ext.y >= ext.z {
                c.y
            } else {
                c.z
            }
        };
        let mid = order.len() / 2;
        order.select_nth_unstable_by(mid, |&a, &b| {
            key(a).partial_cmp(&key(b)).unwrap().then(a.cmp(&b))
        });
        nodes.push(Node::Inner { left: 0, right: 0 }); // patched below
        boxes.push(aabb);
        let (lo, hi) = order.split_at_mut(mid);
        let left = Self::build_node(tris, centroids, lo, offset, nodes, boxes);
        let right = Self::build_node(tris, centroids, hi, offset + mid as u32, nodes, boxes);
        nodes[id as usize] = Node::Inner { left, right };
        id
    }

    pub fn triangles(&self) -> &[Tri] {
        &self.tris
    }

    pub fn aabb(&self) -> &Aabb {
        &self.boxes[self.root as usize]
    }

    /// Minimum distance between the two triangle sets (0 when touching or
    /// crossing). `early_out`: stop as soon as a pair closer than this is
    /// found (pass 0.0 for the exact global minimum).
    fn distance_sq_impl(&self, other: &WorldBvh, early_out_sq: f64) -> f64 {
        let mut best = f64::INFINITY;
        let mut stack: Vec<(u32, u32, f64)> = Vec::with_capacity(64);
        let bound0 = self.boxes[self.root as usize].distance_sq(&other.boxes[other.root as usize]);
        stack.push((self.root, other.root, bound0));
        while let Some((a, b, bound)) = stack.pop() {
            if bound > best * PRUNE_SLACK {
                continue;
            }
            if best <= early_out_sq {
                return best;
            }
            match (&self.nodes[a as usize], &other.nodes[b as usize]) {
                (
                    Node::Leaf {
                        start: sa,
                        count: ca,
                    },
                    Node::Leaf {
                        start: sb,
                        count: cb,
                    },
                ) => {
                    for i in *sa..*sa + *ca {
                        for j in *sb..*sb + *cb {
                            let d =
                                tri_tri_distance_sq(&self.tris[i as usize], &other.tris[j as usize]);
                            if d < best {
                                best = d;
                            }
                        }
                    }
                }
                (Node::Inner { left, right }, _) => {
                    for &child in &[*left, *right] {
                        let bd = self.boxes[child as usize].distance_sq(&other.boxes[b as usize]);
                        stack.push((child, b, bd));
                    }
                    // Visit the closer child first.
                    let n = stack.len();
                    if n >= 2 && stack[n - 2].2 < stack[n - 1].2 {
                        stack.swap(n - 1, n - 2);
                    }
                }
                (_, Node::Inner { left, right }) => {
                    for &child in &[*left, *right] {
                        let bd = self.boxes[a as usize].distance_sq(&other.boxes[child as usize]);
                        stack.push((a, child, bd));
                    }
                    let n = stack.len();
                    if n >= 2 && stack[n - 2].2 < stack[n - 1].2 {
                        stack.swap(n - 1, n - 2);
                    }
                }
            }
        }
        best
    }

    pub fn distance(&self, other: &WorldBvh) -> f64 {
        self.distance_sq_impl(other, 0.0).sqrt()
    }

    /// Closest point pair `(on self, on other, distance)`.
    pub fn closest_points(&self, other: &WorldBvh) -> (Vec3, Vec3, f64) {
        use super::tri::tri_tri_closest_points;
        let mut best = (Vec3::ZERO, Vec3::ZERO, f64::INFINITY);
        let mut stack: Vec<(u32, u32, f64)> = Vec::with_capacity(64);
        let bound0 = self.boxes[self.root as usize].distance_sq(&other.boxes[other.root as usize]);
        stack.push((self.root, other.root, bound0));
        while let Some((a, b, bound)) = stack.pop() {
            if bound > best.2 * PRUNE_SLACK {
                continue;
            }
            match (&self.nodes[a as usize], &other.nodes[b as usize]) {
                (
                    Node::Leaf {
                        start: sa,
                        count: ca,
                    },
                    Node::Leaf {
                        start: sb,
                        count: cb,
                    },
                ) => {
                    for i in *sa..*sa + *ca {
                        for j in *sb..*sb + *cb {
                            let (p, q, d) = tri_tri_closest_points(
                                &self.tris[i as usize],
                                &other.tris[j as usize],
                            );
                            if d < best.2 {
                                best = (p, q, d);
                            }
                        }
                    }
                }
                (Node::Inner { left, right }, _) => {
                    for &child in &[*left, *right] {
                        let bd = self.boxes[child as usize].distance_sq(&other.boxes[b as usize]);
                        stack.push((child, b, bd));
                    }
                    let n = stack.len();
                    if n >= 2 && stack[n - 2].2 < stack[n - 1].2 {
                        stack.swap(n - 1, n - 2);
                    }
                }
                (_, Node::Inner { left, right }) => {
                    for &child in &[*left, *right] {
                        let bd = self.boxes[a as usize].distance_sq(&other.boxes[child as usize]);
                        stack.push((a, child, bd));
                    }
                    let n = stack.len();
                    if n >= 2 && stack[n - 2].2 < stack[n - 1].2 {
                        stack.swap(n - 1, n - 2);
                    }
                }
            }
        }
        (best.0, best.1, best.2.sqrt())
    }

    /// True iff any triangle pair properly crosses.
    pub fn intersects(&self, other: &WorldBvh) -> bool {
        let mut stack: Vec<(u32, u32)> = vec![(self.root, other.root)];
        while let Some((a, b)) = stack.pop() {
            // Crossing requires overlapping boxes.
            if self.boxes[a as usize].distance_sq(&other.boxes[b as usize]) > 0.0 {
                continue;
            }
            match (&self.nodes[a as usize], &other.nodes[b as usize]) {
                (
                    Node::Leaf {
                        start: sa,
                        count: ca,
                    },
                    Node::Leaf {
                        start: sb,
                        count: cb,
                    },
                ) => {
                    for i in *sa..*sa + *ca {
                        for j in *sb..*sb + *cb {
                            if tri_tri_intersect(&self.tris[i as usize], &other.tris[j as usize]) {
                                return true;
                            }
                        }
                    }
                }
                (Node::Inner { left, right }, _) => {
                    stack.push((*left, b));
                    stack.push((*right, b));
                }
                (_, Node::Inner { left, right }) => {
                    stack.push((a, *left));
                    stack.push((a, *right));
                }
            }
        }
        false
    }

    /// Flush penetration witness: surfaces that overlap in volume without
    /// any properly-crossing triangle pair (axis-aligned solids offset along
    /// one axis). Tests the center of the AABB overlap for containment in
    /// both triangle sets.
    pub fn overlap_witness(&self, other: &WorldBvh) -> bool {
        let a = self.aabb();
        let b = other.aabb();
        let lo = a.min.max_by_component(b.min);
        let hi = a.max.min_by_component(b.max);
        let ext = hi - lo;
        if ext.x <= 1e-9 || ext.y <= 1e-9 || ext.z <= 1e-9 {
            return false; // contact-thin overlap, not penetration
        }
        let center = (lo + hi) * 0.5;
        super::tri::point_inside_soup(center, &self.tris)
            && super::tri::point_inside_soup(center, &other.tris)
    }

    /// True iff the meshes penetrate or come closer than `clearance`.
    pub fn collide(&self, other: &WorldBvh, clearance: f64) -> bool {
        if self.intersects(other) || self.overlap_witness(other) {
            return true;
        }
        if clearance <= 0.0 {
            return false;
        }
        let c2 = clearance * clearance;
        // Early-out traversal: any pair strictly closer than the clearance
        // settles the query.
        let d = self.distance_sq_impl(other, c2 * (1.0 - 1e-12));
        d < c2
    }
}

/// Minimum distance between two posed meshes (exact over triangle pairs).
pub fn min_mesh_distance(
    a: &TriMesh,
    pa: &Pose,
    b: &TriMesh,
    pb: &Pose,
) -> Result<f64, GeomError> {
    let ba = WorldBvh::from_mesh(a, pa, None)?;
    let bb = WorldBvh::from_mesh(b, pb, None)?;
    Ok(ba.distance(&bb))
}

/// True iff the posed meshes cross or come closer than `clearance`.
pub fn collide(
    a: &TriMesh,
    pa: &Pose,
    b: &TriMesh,
    pb: &Pose,
    clearance: f64,
) -> Result<bool, GeomError> {
    let ba = WorldBvh::from_mesh(a, pa, None)?;
    let bb = WorldBvh::from_mesh(b, pb, None)?;
    Ok(ba.collide(&bb, clearance))
}
