//! Bounding-volume hierarchy over obstruction polygons.
//!
//! Queries return exactly what a linear scan over all polygons returns: both paths
//! share the same primitive test and the same `(distance, index)` tie-break, and node
//! boxes are padded so culling never rejects a box containing a hit.

use super::polygon::{Aabb, Polygon};
use super::vector::Vec3;

const LEAF_SIZE: usize = 4;
const BOX_PAD: f64 = 1e-7;

#[derive(Debug, Clone)]
enum Node {
    Leaf { bounds: Aabb, start: usize, count: usize },
    Inner { bounds: Aabb, left: usize, right: usize },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<usize>,
}

impl Bvh {
    pub fn build(polygons: &[Polygon]) -> Self {
        if polygons.is_empty() {
            return Bvh::default();
        }
        let mut order: Vec<usize> = (0..polygons.len()).collect();
        let mut nodes = Vec::with_capacity(2 * polygons.len() / LEAF_SIZE + 1);
        build_node(polygons, &mut order, 0, polygons.len(), 0, &mut nodes);
        Bvh { nodes, order }
    }

    /// Nearest primitive hit accepted by `test`, which gets the current distance limit
    /// and returns the hit distance.
    pub fn nearest<F>(&self, origin: Vec3, dir: Vec3, t_max: f64, mut test: F) -> Option<(usize, f64)>
    where
        F: FnMut(usize, f64) -> Option<f64>,
    {
        if self.nodes.is_empty() {
            return None;
        }
        let inv = inverse(dir);
        let mut best: Option<(usize, f64)> = None;
        let mut limit = t_max;
        // Depth is capped at build time, so a fixed stack suffices.
        let mut stack = [0usize; 64];
        let mut top = 0;
        if self.nodes[0].bounds().ray_entry(origin, inv, limit).is_some() {
            top = 1;
        }
        let push = |stack: &mut [usize; 64], top: &mut usize, v: usize| {
            stack[*top] = v;
            *top += 1;
        };
        while top > 0 {
            top -= 1;
            let ni = stack[top];
            match &self.nodes[ni] {
                Node::Leaf { bounds, start, count } => {
                    if bounds.ray_entry(origin, inv, limit).is_none() {
                        continue;
                    }
                    for &idx in &self.order[*start..*start + *count] {
                        if let Some(t) = test(idx, limit) {
                            if t > limit {
                                continue;
                            }
                            let better = match best {
                                None => true,
                                Some((bi, bt)) => t < bt || (t == bt && idx < bi),
                            };
                            if better {
                                best = Some((idx, t));
                                limit = t;
                            }
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    let tl = self.nodes[*left].bounds().ray_entry(origin, inv, limit);
                    let tr = self.nodes[*right].bounds().ray_entry(origin, inv, limit);
                    match (tl, tr) {
                        (Some(a), Some(b)) => {
                            // Visit the nearer child first.
                            if a <= b {
                                push(&mut stack, &mut top, *right);
                                push(&mut stack, &mut top, *left);
                            } else {
                                push(&mut stack, &mut top, *left);
                                push(&mut stack, &mut top, *right);
                            }
                        }
                        (Some(_), None) => push(&mut stack, &mut top, *left),
                        (None, Some(_)) => push(&mut stack, &mut top, *right),
                        (None, None) => {}
                    }
                }
            }
        }
        best
    }

    /// Every primitive whose box the ray enters within `t_max`; candidates for `test`.
    pub fn for_each_candidate<F>(&self, origin: Vec3, dir: Vec3, t_max: f64, mut visit: F)
    where
        F: FnMut(usize),
    {
        if self.nodes.is_empty() {
            return;
        }
        let inv = inverse(dir);
        let mut stack = vec![0usize];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni];
            if node.bounds().ray_entry(origin, inv, t_max).is_none() {
                continue;
            }
            match node {
                Node::Leaf { start, count, .. } => {
                    for &idx in &self.order[*start..*start + *count] {
                        visit(idx);
                    }
                }
                Node::Inner { left, right, .. } => {
                    stack.push(*left);
                    stack.push(*right);
                }
            }
        }
    }
}

fn inverse(d: Vec3) -> Vec3 {
    Vec3::new(1.0 / d.x, 1.0 / d.y, 1.0 / d.z)
}

fn surface_area(b: &Aabb) -> f64 {
    let e = b.extent();
    2.0 * (e.x * e.y + e.y * e.z + e.z * e.x)
}

/// Beyond this depth splits fall back to the median, which bounds the traversal stack.
const MAX_SAH_DEPTH: usize = 40;

fn build_node(
    polygons: &[Polygon],
    order: &mut [usize],
    start: usize,
    end: usize,
    depth: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let bounds = order[start..end]
        .iter()
        .fold(Aabb::empty(), |b, &i| b.union(polygons[i].bounds()))
        .padded(BOX_PAD);
    let id = nodes.len();
    let count = end - start;
    if count <= LEAF_SIZE {
        nodes.push(Node::Leaf { bounds, start, count });
        return id;
    }

    // Surface-area heuristic over centroid-sorted sweeps on each axis, so large
    // planes end up in tight boxes of their own instead of inflating every node.
    let sorted_on = |axis: usize, order: &mut [usize]| {
        order.sort_by(|&a, &b| {
            let ca = polygons[a].bounds().center().component(axis);
            let cb = polygons[b].bounds().center().component(axis);
            ca.total_cmp(&cb).then(a.cmp(&b))
        });
    };
    let mut best = (f64::INFINITY, 0usize, count / 2);
    if depth < MAX_SAH_DEPTH {
        for axis in 0..3 {
            sorted_on(axis, &mut order[start..end]);
            let slice = &order[start..end];
            let mut right_area = vec![0.0; count];
            let mut acc = Aabb::empty();
            for k in (1..count).rev() {
                acc = acc.union(polygons[slice[k]].bounds());
                right_area[k] = surface_area(&acc);
            }
            let mut left = Aabb::empty();
            for k in 1..count {
                left = left.union(polygons[slice[k - 1]].bounds());
                let cost = surface_area(&left) * k as f64 + right_area[k] * (count - k) as f64;
                if cost < best.0 {
                    best = (cost, axis, k);
                }
            }
        }
    } else {
        let ext = bounds.extent();
        best.1 = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
    }
    sorted_on(best.1, &mut order[start..end]);
    let mid = start + best.2;
    // Reserve this slot; children are appended after it.
    nodes.push(Node::Leaf { bounds, start, count });
    let left = build_node(polygons, order, start, mid, depth + 1, nodes);
    let right = build_node(polygons, order, mid, end, depth + 1, nodes);
    nodes[id] = Node::Inner { bounds, left, right };
    id
}
