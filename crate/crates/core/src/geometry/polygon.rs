use serde::{Deserialize, Serialize};

use super::vector::Vec3;
use crate::error::{Error, Result};

/// Coplanarity tolerance for obstruction vertices, meters.
pub const COPLANAR_TOLERANCE: f64 = 1e-6;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            min: Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            max: Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Self {
        points
            .into_iter()
            .fold(Aabb::empty(), |b, p| b.grow_point(*p))
    }

    pub fn grow_point(self, p: Vec3) -> Self {
        Aabb {
            min: self.min.min(p),
            max: self.max.max(p),
        }
    }

    pub fn union(self, o: Aabb) -> Self {
        Aabb {
            min: self.min.min(o.min),
            max: self.max.max(o.max),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y || self.min.z > self.max.z
    }

    pub fn contains(&self, p: Vec3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    pub fn contains_with_tolerance(&self, p: Vec3, tol: f64) -> bool {
        p.x >= self.min.x - tol
            && p.x <= self.max.x + tol
            && p.y >= self.min.y - tol
            && p.y <= self.max.y + tol
            && p.z >= self.min.z - tol
            && p.z <= self.max.z + tol
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    /// Grows the box by `pad` on every side.
    pub fn padded(self, pad: f64) -> Self {
        let p = Vec3::new(pad, pad, pad);
        Aabb {
            min: self.min - p,
            max: self.max + p,
        }
    }

    /// Slab test. Returns the entry distance if the ray meets the box within `[0, t_max]`.
    #[inline]
    pub fn ray_entry(&self, origin: Vec3, inv_dir: Vec3, t_max: f64) -> Option<f64> {
        let mut t0 = 0.0_f64;
        let mut t1 = t_max;
        let slabs = [
            (origin.x, inv_dir.x, self.min.x, self.max.x),
            (origin.y, inv_dir.y, self.min.y, self.max.y),
            (origin.z, inv_dir.z, self.min.z, self.max.z),
        ];
        for (o, inv, lo, hi) in slabs {
            if inv.is_infinite() {
                // Ray parallel to this slab.
                if o < lo || o > hi {
                    return None;
                }
                continue;
            }
            let (mut ta, mut tb) = ((lo - o) * inv, (hi - o) * inv);
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            if ta > t0 {
                t0 = ta;
            }
            if tb < t1 {
                t1 = tb;
            }
            if t0 > t1 {
                return None;
            }
        }
        Some(t0)
    }
}

/// Planar polygon with its precomputed plane and 2D projection.
#[derive(Debug, Clone)]
pub struct Polygon {
    vertices: Vec<Vec3>,
    normal: Vec3,
    offset: f64,
    // Axes kept after dropping the dominant normal component.
    axes: (usize, usize),
    projected: Vec<(f64, f64)>,
    bounds: Aabb,
}

impl Polygon {
    /// Builds a polygon from ordered vertices; the normal follows the right-hand rule
    /// (counterclockwise when viewed from the side the normal points to).
    pub fn new(vertices: Vec<Vec3>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::invalid(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("polygon vertex is not finite"));
        }
        // Newell's method.
        let mut n = Vec3::ZERO;
        for (i, a) in vertices.iter().enumerate() {
            let b = vertices[(i + 1) % vertices.len()];
            n.x += (a.y - b.y) * (a.z + b.z);
            n.y += (a.z - b.z) * (a.x + b.x);
            n.z += (a.x - b.x) * (a.y + b.y);
        }
        let normal = n
            .normalized()
            .filter(|_| n.norm() > 1e-12)
            .ok_or_else(|| Error::invalid("polygon has zero area"))?;
        let centroid = vertices.iter().fold(Vec3::ZERO, |acc, v| acc + *v) / vertices.len() as f64;
        let offset = normal.dot(centroid);
        for v in &vertices {
            let dev = (normal.dot(*v) - offset).abs();
            if dev > COPLANAR_TOLERANCE {
                return Err(Error::invalid(format!(
                    "polygon vertices are not coplanar (deviation {dev:.3e} m)"
                )));
            }
        }
        let abs = Vec3::new(normal.x.abs(), normal.y.abs(), normal.z.abs());
        let axes = if abs.x >= abs.y && abs.x >= abs.z {
            (1, 2)
        } else if abs.y >= abs.z {
            (2, 0)
        } else {
            (0, 1)
        };
        let projected: Vec<(f64, f64)> = vertices
            .iter()
            .map(|v| (v.component(axes.0), v.component(axes.1)))
            .collect();
        if !is_simple(&projected) {
            return Err(Error::invalid("polygon is self-intersecting"));
        }
        let bounds = Aabb::from_points(&vertices);
        Ok(Polygon {
            vertices,
            normal,
            offset,
            axes,
            projected,
            bounds,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn bounds(&self) -> Aabb {
        self.bounds
    }

    /// Signed distance from the supporting plane.
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    /// Mirror image of a point across the supporting plane.
    pub fn mirror_point(&self, p: Vec3) -> Vec3 {
        p - self.normal * (2.0 * self.signed_distance(p))
    }

    /// Distance along the ray to the supporting plane, if the ray is not parallel to it.
    #[inline]
    pub fn plane_distance(&self, origin: Vec3, dir: Vec3) -> Option<f64> {
        let denom = self.normal.dot(dir);
        if denom.abs() < 1e-12 {
            return None;
        }
        Some((self.offset - self.normal.dot(origin)) / denom)
    }

    /// Even-odd containment test for a point assumed to lie on the plane.
    #[inline]
    pub fn contains_coplanar(&self, p: Vec3) -> bool {
        if !self.bounds.contains_with_tolerance(p, 1e-9) {
            return false;
        }
        let (u, v) = (p.component(self.axes.0), p.component(self.axes.1));
        let mut inside = false;
        let n = self.projected.len();
        let mut j = n - 1;
        for i in 0..n {
            let (ui, vi) = self.projected[i];
            let (uj, vj) = self.projected[j];
            if (vi > v) != (vj > v) {
                let cross_u = ui + (v - vi) / (vj - vi) * (uj - ui);
                if u < cross_u {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Shortest in-plane distance from `p` (on the plane) to the polygon boundary.
    pub fn distance_to_boundary(&self, p: Vec3) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| point_segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }
}

fn point_segment_distance(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.distance(a + ab * t)
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn segments_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn is_simple(pts: &[(f64, f64)]) -> bool {
    let n = pts.len();
    for i in 0..n {
        for j in (i + 1)..n {
            // Skip adjacent edges, which share a vertex.
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_x5() -> Polygon {
        Polygon::new(vec![
            Vec3::new(5.0, -1.0, -1.0),
            Vec3::new(5.0, 1.0, -1.0),
            Vec3::new(5.0, 1.0, 1.0),
            Vec3::new(5.0, -1.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn normal_follows_winding() {
        let p = square_x5();
        assert!((p.normal() - Vec3::X).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_coplanar() {
        let r = Polygon::new(vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(0.0, 1.0, 0.01),
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn rejects_bow_tie() {
        let r = Polygon::new(vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Polygon::new(vec![Vec3::ZERO, Vec3::X, Vec3::X * 2.0]).is_err());
        assert!(Polygon::new(vec![Vec3::ZERO, Vec3::X]).is_err());
    }

    #[test]
    fn containment_and_mirror() {
        let p = square_x5();
        assert!(p.contains_coplanar(Vec3::new(5.0, 0.5, 0.5)));
        assert!(!p.contains_coplanar(Vec3::new(5.0, 1.5, 0.5)));
        let m = p.mirror_point(Vec3::new(0.0, 2.0, 0.0));
        assert!((m - Vec3::new(10.0, 2.0, 0.0)).norm() < 1e-12);
        assert!((p.distance_to_boundary(Vec3::new(5.0, 0.5, 0.0)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn slab_test() {
        let b = Aabb {
            min: Vec3::new(1.0, -1.0, -1.0),
            max: Vec3::new(2.0, 1.0, 1.0),
        };
        let d = Vec3::X;
        let inv = Vec3::new(1.0 / d.x, 1.0 / d.y, 1.0 / d.z);
        assert_eq!(b.ray_entry(Vec3::ZERO, inv, 10.0), Some(1.0));
        assert_eq!(b.ray_entry(Vec3::ZERO, inv, 0.5), None);
        assert_eq!(b.ray_entry(Vec3::new(0.0, 3.0, 0.0), inv, 10.0), None);
    }
}
