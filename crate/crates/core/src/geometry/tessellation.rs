//! Launch directions from a geodesically subdivided icosahedron.
//!
//! The base icosahedron has vertices on the ±z axis, an upper ring at azimuths
//! 0°, 72°, … and a lower ring offset by 36°. Each face is split into `N²` triangles
//! and the grid points are projected onto the unit sphere. Shared corner and edge
//! points are emitted once by construction, giving `10·N² + 2` directions.

use super::vector::Vec3;
use crate::error::{Error, Result};

/// Nominal angular spacing of an order-1 tessellation, degrees.
pub const BASE_SPACING_DEG: f64 = 69.0;

/// Unit launch directions and their nominal angular spacing.
#[derive(Debug, Clone)]
pub struct Tessellation {
    pub frequency: u32,
    /// Nominal spacing `69°/N`, radians.
    pub angular_spacing: f64,
    /// Longest edge of the projected triangulation, radians.
    pub max_edge: f64,
    pub directions: Vec<Vec3>,
}

impl Tessellation {
    /// Spacing that guarantees every direction lies within `α/√3` of a launch ray:
    /// the larger of the nominal spacing and the longest triangle edge.
    pub fn coverage_spacing(&self) -> f64 {
        self.angular_spacing.max(self.max_edge)
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// `10·N² + 2`.
pub fn direction_count(frequency: u32) -> usize {
    10 * (frequency as usize).pow(2) + 2
}

/// Nominal spacing `69°/N` in radians.
pub fn nominal_spacing(frequency: u32) -> f64 {
    (BASE_SPACING_DEG / frequency as f64).to_radians()
}

fn icosahedron() -> ([Vec3; 12], Vec<[usize; 3]>) {
    let z = 1.0 / 5f64.sqrt();
    let r = 2.0 / 5f64.sqrt();
    let mut v = [Vec3::ZERO; 12];
    v[0] = Vec3::Z;
    v[11] = -Vec3::Z;
    for k in 0..5 {
        let up = (72.0 * k as f64).to_radians();
        let lo = (36.0 + 72.0 * k as f64).to_radians();
        v[1 + k] = Vec3::new(r * up.cos(), r * up.sin(), z);
        v[6 + k] = Vec3::new(r * lo.cos(), r * lo.sin(), -z);
    }
    let mut faces = Vec::with_capacity(20);
    for k in 0..5 {
        let (u0, u1) = (1 + k, 1 + (k + 1) % 5);
        let (l0, l1) = (6 + k, 6 + (k + 1) % 5);
        faces.push([0, u0, u1]);
        faces.push([u0, l0, u1]);
        faces.push([u1, l0, l1]);
        faces.push([11, l1, l0]);
    }
    (v, faces)
}

/// Full-sphere launch set of order `frequency`.
pub fn tessellate_icosahedron(frequency: u32) -> Result<Tessellation> {
    if frequency == 0 {
        return Err(Error::invalid("tessellation frequency must be at least 1"));
    }
    let n = frequency as usize;
    let nf = frequency as f64;
    let (corners, faces) = icosahedron();

    let mut edges: Vec<(usize, usize)> = faces
        .iter()
        .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    debug_assert_eq!(edges.len(), 30);

    let mut dirs = Vec::with_capacity(direction_count(frequency));
    dirs.extend_from_slice(&corners);
    for &(a, b) in &edges {
        for i in 1..n {
            let t = i as f64 / nf;
            let p = corners[a] * (1.0 - t) + corners[b] * t;
            dirs.push(p.normalized().expect("edge point off origin"));
        }
    }
    for f in &faces {
        for i in 1..n {
            for j in 1..(n - i) {
                let k = n - i - j;
                let p = (corners[f[0]] * i as f64 + corners[f[1]] * j as f64 + corners[f[2]] * k as f64) / nf;
                dirs.push(p.normalized().expect("face point off origin"));
            }
        }
    }
    debug_assert_eq!(dirs.len(), direction_count(frequency));

    let mut max_edge = 0.0f64;
    for f in &faces {
        let point = |i: usize, j: usize| {
            let k = n - i - j;
            ((corners[f[0]] * i as f64 + corners[f[1]] * j as f64 + corners[f[2]] * k as f64) / nf)
                .normalized()
                .expect("grid point off origin")
        };
        for i in 0..n {
            for j in 0..(n - i) {
                let (a, b, c) = (point(i, j), point(i + 1, j), point(i, j + 1));
                max_edge = max_edge.max(a.angle_to(b)).max(a.angle_to(c)).max(b.angle_to(c));
            }
        }
    }
    Ok(Tessellation {
        frequency,
        angular_spacing: nominal_spacing(frequency),
        max_edge,
        directions: dirs,
    })
}

/// Directions of the full tessellation lying in the closed hemisphere around
/// `plane_normal` (dot product ≥ 0, with 1e-12 slack for points on the rim).
pub fn tessellate_half_icosahedron(frequency: u32, plane_normal: Vec3) -> Result<Tessellation> {
    let normal = plane_normal
        .normalized()
        .ok_or_else(|| Error::invalid("half-icosahedron needs a nonzero plane normal"))?;
    let mut t = tessellate_icosahedron(frequency)?;
    t.directions.retain(|d| d.dot(normal) >= -1e-12);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_icosahedron_has_twelve_unit_vertices() {
        let t = tessellate_icosahedron(1).unwrap();
        assert_eq!(t.len(), 12);
        for d in &t.directions {
            assert!((d.norm() - 1.0).abs() < 1e-12);
        }
        // Every vertex has five neighbours at the icosahedron edge angle.
        let edge = (1.0 / 5f64.sqrt()).acos();
        for a in &t.directions {
            let near = t
                .directions
                .iter()
                .filter(|b| (a.angle_to(**b) - edge).abs() < 1e-9)
                .count();
            assert_eq!(near, 5);
        }
    }

    #[test]
    fn counts_follow_closed_form() {
        assert_eq!(tessellate_icosahedron(5).unwrap().len(), 252);
        let t50 = tessellate_icosahedron(50).unwrap();
        assert_eq!(t50.len(), 25002);
        assert!((t50.angular_spacing.to_degrees() - 1.38).abs() < 1e-12);
    }

    #[test]
    fn max_edge_of_base_is_icosahedron_edge() {
        let t = tessellate_icosahedron(1).unwrap();
        assert!((t.max_edge - (1.0 / 5f64.sqrt()).acos()).abs() < 1e-12);
        assert_eq!(t.coverage_spacing(), t.angular_spacing);
        let t10 = tessellate_icosahedron(10).unwrap();
        assert!(t10.max_edge > t10.angular_spacing);
    }

    #[test]
    fn coverage_radius_reaches_every_direction() {
        // Deterministic quasi-random probes.
        for n in [2, 3, 7, 10] {
            let t = tessellate_icosahedron(n).unwrap();
            let cover = t.coverage_spacing() / 3f64.sqrt();
            for k in 0..2000 {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / 2000.0;
                let phi = k as f64 * 2.399_963_229_728_653;
                let r = (1.0 - z * z).sqrt();
                let d = Vec3::new(r * phi.cos(), r * phi.sin(), z);
                let nearest = t.directions.iter().map(|o| d.angle_to(*o)).fold(f64::INFINITY, f64::min);
                assert!(nearest <= cover, "N={n} probe {k}");
            }
        }
    }

    #[test]
    fn zero_frequency_rejected() {
        assert!(tessellate_icosahedron(0).is_err());
        assert!(tessellate_half_icosahedron(0, Vec3::Z).is_err());
        assert!(tessellate_half_icosahedron(2, Vec3::ZERO).is_err());
    }

    #[test]
    fn half_icosahedron_upper_cap() {
        let up = tessellate_half_icosahedron(1, Vec3::Z).unwrap();
        assert!((6..=9).contains(&up.len()));
        assert_eq!(up.len(), 6);
        assert!(up.directions.iter().all(|d| d.z >= 0.0));
        let up2 = tessellate_half_icosahedron(2, Vec3::Z).unwrap();
        assert!(up2.directions.iter().all(|d| d.z >= -1e-12));
    }

    #[test]
    fn half_icosahedron_is_point_symmetric() {
        for n in 1..=4 {
            let up = tessellate_half_icosahedron(n, Vec3::Z).unwrap();
            let down = tessellate_half_icosahedron(n, -Vec3::Z).unwrap();
            assert_eq!(up.len(), down.len());
            for d in &up.directions {
                assert!(down.directions.iter().any(|e| (*e + *d).norm() < 1e-12));
            }
        }
    }
}
