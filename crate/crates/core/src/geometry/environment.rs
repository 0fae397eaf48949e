use std::collections::{BTreeMap, HashMap};

use super::bvh::Bvh;
use super::polygon::{Aabb, Polygon};
use super::vector::Vec3;
use crate::error::{Error, Result};
use crate::propagation::MaterialProfile;

/// Hits closer than this to the ray origin are ignored (self-intersection guard).
pub const MIN_HIT_DISTANCE: f64 = 1e-9;

/// A finite planar surface that reflects, transmits or scatters rays.
#[derive(Debug, Clone)]
pub struct Obstruction {
    pub id: String,
    pub material_id: String,
    polygon: Polygon,
}

impl Obstruction {
    pub fn new(id: impl Into<String>, material_id: impl Into<String>, vertices: Vec<Vec3>) -> Result<Self> {
        let id = id.into();
        let polygon = Polygon::new(vertices)
            .map_err(|e| Error::invalid(format!("obstruction `{id}`: {e}")))?;
        Ok(Obstruction {
            id,
            material_id: material_id.into(),
            polygon,
        })
    }

    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn normal(&self) -> Vec3 {
        self.polygon.normal()
    }

    pub fn vertices(&self) -> &[Vec3] {
        self.polygon.vertices()
    }

    /// Distance to the hit along a unit direction, or `None`.
    #[inline]
    pub fn hit_distance(&self, origin: Vec3, dir: Vec3) -> Option<f64> {
        self.hit_distance_within(origin, dir, f64::INFINITY)
    }

    /// As [`Self::hit_distance`], skipping the containment test past `limit`.
    #[inline]
    pub fn hit_distance_within(&self, origin: Vec3, dir: Vec3, limit: f64) -> Option<f64> {
        let t = self.polygon.plane_distance(origin, dir)?;
        if t <= MIN_HIT_DISTANCE || !t.is_finite() || t > limit {
            return None;
        }
        let p = origin + dir * t;
        self.polygon.contains_coplanar(p).then_some(t)
    }
}

/// Ray/obstruction intersection record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub point: Vec3,
    /// Index into [`EnvironmentMap::obstructions`].
    pub obstruction: usize,
    pub distance: f64,
    /// Angle from the surface normal, folded into `[0, π/2]`.
    pub incidence_angle: f64,
}

/// Incidence angle of `dir` on a surface with unit normal `n`, in `[0, π/2]`.
pub fn incidence_angle(dir: Vec3, n: Vec3) -> f64 {
    dir.cross(n).norm().atan2(dir.dot(n).abs())
}

/// Immutable polygonal scene with its material table and search structure.
#[derive(Debug, Clone)]
pub struct EnvironmentMap {
    obstructions: Vec<Obstruction>,
    materials: BTreeMap<String, MaterialProfile>,
    bounds: Option<Aabb>,
    index: HashMap<String, usize>,
    bvh: Bvh,
}

impl EnvironmentMap {
    /// Validates material references and builds the search structure.
    ///
    /// `bounds`, when given, must contain every vertex; it is what transmitter and
    /// receiver positions are validated against.
    pub fn new(
        obstructions: Vec<Obstruction>,
        materials: BTreeMap<String, MaterialProfile>,
        bounds: Option<Aabb>,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(obstructions.len());
        for (i, o) in obstructions.iter().enumerate() {
            if !materials.contains_key(&o.material_id) {
                return Err(Error::UnknownMaterial {
                    material: o.material_id.clone(),
                    obstruction: o.id.clone(),
                });
            }
            if index.insert(o.id.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate obstruction id `{}`", o.id)));
            }
            if let Some(b) = &bounds {
                if o.vertices().iter().any(|v| !b.contains_with_tolerance(*v, 1e-9)) {
                    return Err(Error::invalid(format!(
                        "obstruction `{}` extends outside the environment bounds",
                        o.id
                    )));
                }
            }
        }
        for m in materials.values() {
            m.validate()?;
        }
        let polys: Vec<Polygon> = obstructions.iter().map(|o| o.polygon.clone()).collect();
        let bvh = Bvh::build(&polys);
        Ok(EnvironmentMap {
            obstructions,
            materials,
            bounds,
            index,
            bvh,
        })
    }

    pub fn empty() -> Self {
        EnvironmentMap::new(Vec::new(), BTreeMap::new(), None).expect("empty map is valid")
    }

    pub fn obstructions(&self) -> &[Obstruction] {
        &self.obstructions
    }

    pub fn obstruction(&self, i: usize) -> &Obstruction {
        &self.obstructions[i]
    }

    pub fn obstruction_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn materials(&self) -> &BTreeMap<String, MaterialProfile> {
        &self.materials
    }

    pub fn material_of(&self, i: usize) -> &MaterialProfile {
        &self.materials[&self.obstructions[i].material_id]
    }

    pub fn bounds(&self) -> Option<Aabb> {
        self.bounds
    }

    /// Copy of this map with a replaced material table (same geometry).
    pub fn with_materials(&self, materials: BTreeMap<String, MaterialProfile>) -> Result<Self> {
        EnvironmentMap::new(self.obstructions.clone(), materials, self.bounds)
    }

    fn make_hit(&self, origin: Vec3, dir: Vec3, idx: usize, t: f64) -> Hit {
        Hit {
            point: origin + dir * t,
            obstruction: idx,
            distance: t,
            incidence_angle: incidence_angle(dir, self.obstructions[idx].normal()),
        }
    }

    /// Nearest hit strictly ahead of `origin`, skipping `exclude`.
    pub fn intersect_ray(&self, origin: Vec3, dir: Vec3, exclude: Option<usize>) -> Option<Hit> {
        self.intersect_ray_within(origin, dir, exclude, f64::INFINITY)
    }

    /// As [`Self::intersect_ray`], limited to hits no farther than `max_distance`.
    pub fn intersect_ray_within(
        &self,
        origin: Vec3,
        dir: Vec3,
        exclude: Option<usize>,
        max_distance: f64,
    ) -> Option<Hit> {
        self.bvh
            .nearest(origin, dir, max_distance, |i, limit| {
                if Some(i) == exclude {
                    None
                } else {
                    self.obstructions[i].hit_distance_within(origin, dir, limit)
                }
            })
            .map(|(i, t)| self.make_hit(origin, dir, i, t))
    }

    /// Index and distance of the first obstruction along the ray, without the hit record.
    pub fn first_obstruction(&self, origin: Vec3, dir: Vec3, exclude: Option<usize>) -> Option<(usize, f64)> {
        self.bvh.nearest(origin, dir, f64::INFINITY, |i, limit| {
            if Some(i) == exclude {
                None
            } else {
                self.obstructions[i].hit_distance_within(origin, dir, limit)
            }
        })
    }

    /// Linear scan over every obstruction; reference for [`Self::intersect_ray`].
    pub fn intersect_ray_brute(&self, origin: Vec3, dir: Vec3, exclude: Option<usize>) -> Option<Hit> {
        let mut best: Option<(usize, f64)> = None;
        for (i, o) in self.obstructions.iter().enumerate() {
            if Some(i) == exclude {
                continue;
            }
            if let Some(t) = o.hit_distance(origin, dir) {
                let better = match best {
                    None => true,
                    Some((bi, bt)) => t < bt || (t == bt && i < bi),
                };
                if better {
                    best = Some((i, t));
                }
            }
        }
        best.map(|(i, t)| self.make_hit(origin, dir, i, t))
    }

    /// All hits on the open segment `(0, length)` from `origin` along `dir`, ordered by
    /// distance. Obstructions listed in `skip` are ignored.
    pub fn crossings(&self, origin: Vec3, dir: Vec3, length: f64, skip: &[usize]) -> Vec<Hit> {
        let mut out = Vec::new();
        self.bvh.for_each_candidate(origin, dir, length, |i| {
            if skip.contains(&i) {
                return;
            }
            if let Some(t) = self.obstructions[i].hit_distance(origin, dir) {
                if t < length - MIN_HIT_DISTANCE {
                    out.push(self.make_hit(origin, dir, i, t));
                }
            }
        });
        out.sort_by(|a, b| {
            a.distance
                .total_cmp(&b.distance)
                .then(a.obstruction.cmp(&b.obstruction))
        });
        out
    }

    /// Whether `p` lies inside the declared bounds (always true when unbounded).
    pub fn contains(&self, p: Vec3) -> bool {
        self.bounds.is_none_or(|b| b.contains(p))
    }
}

/// Radius of the reception sphere for a ray family with angular spacing
/// `angular_spacing` (radians) after `path_length` meters: `α·d/√3`.
pub fn reception_sphere_radius(angular_spacing: f64, path_length: f64) -> Result<f64> {
    if !(angular_spacing > 0.0) || !(path_length > 0.0) {
        return Err(Error::invalid(format!(
            "reception sphere needs positive spacing and length, got {angular_spacing}, {path_length}"
        )));
    }
    Ok(angular_spacing * path_length / 3f64.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn wall_x5(material: &str) -> Obstruction {
        Obstruction::new(
            "wall",
            material,
            vec![
                Vec3::new(5.0, -10.0, -10.0),
                Vec3::new(5.0, 10.0, -10.0),
                Vec3::new(5.0, 10.0, 10.0),
                Vec3::new(5.0, -10.0, 10.0),
            ],
        )
        .unwrap()
    }

    fn env_one_wall() -> EnvironmentMap {
        let mut mats = BTreeMap::new();
        mats.insert("drywall".to_string(), MaterialProfile::new("drywall", 6.1, Some(4.0)));
        EnvironmentMap::new(vec![wall_x5("drywall")], mats, None).unwrap()
    }

    #[test]
    fn normal_incidence_hit() {
        let env = env_one_wall();
        let h = env.intersect_ray(Vec3::ZERO, Vec3::X, None).unwrap();
        assert!((h.point - Vec3::new(5.0, 0.0, 0.0)).norm() < 1e-12);
        assert_eq!(h.distance, 5.0);
        assert_eq!(h.incidence_angle, 0.0);
    }

    #[test]
    fn parallel_ray_misses() {
        let env = env_one_wall();
        assert!(env.intersect_ray(Vec3::ZERO, Vec3::Y, None).is_none());
        assert!(env.intersect_ray(Vec3::new(5.0, 0.0, 0.0), Vec3::Y, None).is_none());
    }

    #[test]
    fn oblique_incidence_is_quarter_pi() {
        let env = env_one_wall();
        let d = Vec3::new(1.0, 1.0, 0.0).normalized().unwrap();
        let h = env.intersect_ray(Vec3::ZERO, d, None).unwrap();
        assert!((h.incidence_angle - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert!((h.point - Vec3::new(5.0, 5.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn backside_and_exclusion() {
        let env = env_one_wall();
        let h = env.intersect_ray(Vec3::new(9.0, 0.0, 0.0), -Vec3::X, None).unwrap();
        assert!((h.distance - 4.0).abs() < 1e-12);
        assert!(env.intersect_ray(Vec3::new(9.0, 0.0, 0.0), -Vec3::X, Some(0)).is_none());
        assert!(env.intersect_ray(Vec3::new(9.0, 0.0, 0.0), Vec3::X, None).is_none());
    }

    #[test]
    fn unknown_material_rejected() {
        let err = EnvironmentMap::new(vec![wall_x5("steel")], BTreeMap::new(), None).unwrap_err();
        assert!(err.to_string().contains("steel"));
    }

    #[test]
    fn reception_radius_cases() {
        let alpha = (69.0f64 / 50.0).to_radians();
        let r = reception_sphere_radius(alpha, 100.0).unwrap();
        assert!((r - alpha * 100.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((r - 1.3906).abs() < 1e-3);
        assert!((reception_sphere_radius(3f64.sqrt(), 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(reception_sphere_radius(1e-12, 1.0).unwrap() < 1e-12);
        assert!(reception_sphere_radius(0.0, 1.0).is_err());
        assert!(reception_sphere_radius(0.1, -1.0).is_err());
    }
}
