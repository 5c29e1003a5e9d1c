//! Axis-aligned bounding volume hierarchy over finite primitives.

use super::Vec3;

const LEAF_SIZE: usize = 4;
/// Boxes are padded so zero-thickness facets keep a non-empty slab.
const BOX_PAD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn empty() -> Self {
        Self {
            min: Vec3::repeat(f64::INFINITY),
            max: Vec3::repeat(f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Self {
        let mut b = Self::empty();
        for p in points {
            b.grow_point(p);
        }
        b
    }

    pub fn grow_point(&mut self, p: &Vec3) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn contains(&self, other: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= other.min[i] && self.max[i] >= other.max[i])
    }

    pub fn centroid(&self) -> Vec3 {
        0.5 * (self.min + self.max)
    }

    fn padded(&self) -> Aabb {
        Aabb {
            min: self.min.add_scalar(-BOX_PAD),
            max: self.max.add_scalar(BOX_PAD),
        }
    }

    /// Slab test. NaN slabs (origin on a slab plane with zero direction
    /// component) are ignored, which only ever widens the accepted interval.
    #[inline]
    pub fn hit(&self, origin: &Vec3, inv_dir: &Vec3, t_min: f64, t_max: f64) -> bool {
        let mut lo = t_min;
        let mut hi = t_max;
        for i in 0..3 {
            let t1 = (self.min[i] - origin[i]) * inv_dir[i];
            let t2 = (self.max[i] - origin[i]) * inv_dir[i];
            lo = lo.max(t1.min(t2));
            hi = hi.min(t1.max(t2));
        }
        lo <= hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BvhNode {
    Leaf { bounds: Aabb, first: usize, count: usize },
    Inner { bounds: Aabb, left: usize, right: usize },
}

impl BvhNode {
    pub fn bounds(&self) -> &Aabb {
        match self {
            BvhNode::Leaf { bounds, .. } | BvhNode::Inner { bounds, .. } => bounds,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Bvh {
    nodes: Vec<BvhNode>,
    /// Primitive indices in leaf order.
    order: Vec<usize>,
    primitive_count: usize,
}

impl Bvh {
    pub fn build(boxes: &[Aabb]) -> Self {
        let mut bvh = Bvh {
            nodes: Vec::new(),
            order: (0..boxes.len()).collect(),
            primitive_count: boxes.len(),
        };
        if boxes.is_empty() {
            return bvh;
        }
        let padded: Vec<Aabb> = boxes.iter().map(Aabb::padded).collect();
        let centroids: Vec<Vec3> = boxes.iter().map(Aabb::centroid).collect();
        let mut order = std::mem::take(&mut bvh.order);
        bvh.build_node(&padded, &centroids, &mut order, 0);
        bvh.order = order;
        bvh
    }

    fn build_node(&mut self, boxes: &[Aabb], centroids: &[Vec3], order: &mut [usize], offset: usize) -> usize {
        let bounds = order.iter().fold(Aabb::empty(), |acc, &i| acc.union(&boxes[i]));
        let index = self.nodes.len();
        if order.len() <= LEAF_SIZE {
            self.nodes.push(BvhNode::Leaf {
                bounds,
                first: offset,
                count: order.len(),
            });
            return index;
        }
        let spread = Aabb::from_points(order.iter().map(|&i| &centroids[i]));
        let extent = spread.max - spread.min;
        let axis = extent.imax();
        let mid = order.len() / 2;
        order.select_nth_unstable_by(mid, |&a, &b| {
            centroids[a][axis].total_cmp(&centroids[b][axis]).then(a.cmp(&b))
        });
        // placeholder, patched once both children exist
        self.nodes.push(BvhNode::Leaf {
            bounds,
            first: 0,
            count: 0,
        });
        let (lo, hi) = order.split_at_mut(mid);
        let left = self.build_node(boxes, centroids, lo, offset);
        let right = self.build_node(boxes, centroids, hi, offset + mid);
        self.nodes[index] = BvhNode::Inner { bounds, left, right };
        index
    }

    pub fn nodes(&self) -> &[BvhNode] {
        &self.nodes
    }

    pub fn primitive_count(&self) -> usize {
        self.primitive_count
    }

    /// Checks the structural invariants: each primitive appears in exactly
    /// one leaf and every inner box encloses both children.
    pub fn validate(&self, boxes: &[Aabb]) -> bool {
        if boxes.len() != self.primitive_count {
            return false;
        }
        if self.nodes.is_empty() {
            return boxes.is_empty();
        }
        let mut seen = vec![0usize; boxes.len()];
        for node in &self.nodes {
            match *node {
                BvhNode::Leaf { bounds, first, count } => {
                    for &p in &self.order[first..first + count] {
                        seen[p] += 1;
                        if !bounds.contains(&boxes[p]) {
                            return false;
                        }
                    }
                }
                BvhNode::Inner { bounds, left, right } => {
                    if !bounds.contains(self.nodes[left].bounds()) || !bounds.contains(self.nodes[right].bounds()) {
                        return false;
                    }
                }
            }
        }
        seen.iter().all(|&c| c == 1)
    }

    /// Closest-hit traversal. `test(prim, t_max)` returns the hit distance of
    /// primitive `prim` if it lies in `(t_min, t_max]`. Ties on `t` resolve to
    /// the lower primitive index so the result matches a linear scan.
    pub fn closest<F>(&self, origin: &Vec3, dir: &Vec3, t_min: f64, t_max: f64, mut test: F) -> Option<(f64, usize)>
    where
        F: FnMut(usize, f64) -> Option<f64>,
    {
        if self.nodes.is_empty() {
            return None;
        }
        let inv = dir.map(|c| 1.0 / c);
        let mut best: Option<(f64, usize)> = None;
        let mut limit = t_max;
        let mut stack = Vec::with_capacity(64);
        stack.push(0usize);
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if !node.bounds().hit(origin, &inv, t_min, limit) {
                continue;
            }
            match *node {
                BvhNode::Leaf { first, count, .. } => {
                    for &p in &self.order[first..first + count] {
                        if let Some(t) = test(p, limit) {
                            let better = match best {
                                None => true,
                                Some((bt, bp)) => t < bt || (t == bt && p < bp),
                            };
                            if better {
                                best = Some((t, p));
                                limit = t;
                            }
                        }
                    }
                }
                BvhNode::Inner { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        best
    }

    /// Returns true as soon as any primitive accepted by `test` is hit.
    pub fn any<F>(&self, origin: &Vec3, dir: &Vec3, t_min: f64, t_max: f64, mut test: F) -> bool
    where
        F: FnMut(usize) -> bool,
    {
        if self.nodes.is_empty() {
            return false;
        }
        let inv = dir.map(|c| 1.0 / c);
        let mut stack = Vec::with_capacity(64);
        stack.push(0usize);
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if !node.bounds().hit(origin, &inv, t_min, t_max) {
                continue;
            }
            match *node {
                BvhNode::Leaf { first, count, .. } => {
                    if self.order[first..first + count].iter().any(|&p| test(p)) {
                        return true;
                    }
                }
                BvhNode::Inner { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_boxes_satisfy_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [0usize, 1, 3, 4, 5, 17, 200] {
            let boxes: Vec<Aabb> = (0..n)
                .map(|_| {
                    let a = Vec3::new(rng.random(), rng.random(), rng.random());
                    let b = a + Vec3::new(rng.random(), rng.random(), 0.0) * 0.1;
                    Aabb::from_points([&a, &b])
                })
                .collect();
            let bvh = Bvh::build(&boxes);
            assert!(bvh.validate(&boxes), "n = {n}");
        }
    }

    #[test]
    fn flat_box_is_hit_head_on() {
        let b = Aabb::from_points([&Vec3::new(-1.0, -1.0, 0.0), &Vec3::new(1.0, 1.0, 0.0)]).padded();
        let o = Vec3::new(0.0, 0.0, 1.0);
        let d = Vec3::new(0.0, 0.0, -1.0);
        assert!(b.hit(&o, &d.map(|c| 1.0 / c), 0.0, f64::INFINITY));
    }
}
