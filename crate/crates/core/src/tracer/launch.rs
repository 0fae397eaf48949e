//! Shooting-and-bouncing-rays phase: follows every launch direction through
//! reflections and penetrations and records which surface sequences pass through the
//! receiver's reception sphere.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::geometry::{EnvironmentMap, Hit, Tessellation, Vec3};
use crate::propagation::fspl_db_unchecked;

use super::image::SurfaceRef;
use super::types::{InteractionKind, TraceConfig};

/// First surface met by a launched ray.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FirstHit {
    pub launch: u32,
    pub dir: Vec3,
    pub hit: Hit,
}

#[derive(Debug, Default)]
pub(crate) struct LaunchOutcome {
    pub candidates: BTreeSet<Vec<SurfaceRef>>,
    pub first_hits: Vec<FirstHit>,
    pub hits_tested: usize,
    pub segments: usize,
}

impl LaunchOutcome {
    fn merge(mut self, other: LaunchOutcome) -> LaunchOutcome {
        if self.candidates.len() < other.candidates.len() {
            let mut c = other.candidates;
            c.extend(self.candidates);
            self.candidates = c;
        } else {
            self.candidates.extend(other.candidates);
        }
        self.first_hits.extend(other.first_hits);
        self.hits_tested += other.hits_tested;
        self.segments += other.segments;
        self
    }
}

#[derive(Clone)]
struct Ray {
    origin: Vec3,
    dir: Vec3,
    travelled: f64,
    loss_db: f64,
    surfaces: Vec<SurfaceRef>,
    reflections: u32,
    penetrations: u32,
    departed: Option<usize>,
    /// Length of the previous segment. The reception test reaches back over it, since
    /// in unfolded space it is the mirror image of the incoming leg.
    back: f64,
    /// Half-angle of the ray tube seen from the image source.
    half_angle: f64,
    splits: u8,
    /// Set on split siblings until their first hit.
    sibling: bool,
}

/// A tube is split at most this many times along one lineage.
const MAX_SPLITS: u8 = 2;
const RING_PROBES: usize = 8;

/// Power gate used to drop rays: the best power a ray could still deliver.
pub(crate) struct PowerGate {
    /// TX power + RX peak gain, dBm.
    pub base_dbm: f64,
    pub sensitivity_dbm: f64,
    pub enabled: bool,
}

/// Whether the segment `origin + t·dir, t ∈ [-t_back, t_end]` passes through the
/// reception sphere around `rx`. The sphere radius is `half_angle` times the unfolded
/// path length at the point of closest approach; `α/√3` gives the usual `α·d/√3`
/// sphere.
#[inline]
pub(crate) fn passes_reception_sphere(
    origin: Vec3,
    dir: Vec3,
    t_back: f64,
    t_end: f64,
    travelled: f64,
    rx: Vec3,
    half_angle: f64,
) -> bool {
    let v = rx - origin;
    let t = v.dot(dir).clamp(-t_back, t_end);
    let d = travelled + t;
    if d <= 0.0 {
        return false;
    }
    let miss = (v - dir * t).norm();
    miss <= half_angle * d
}

fn perpendicular_basis(d: Vec3) -> (Vec3, Vec3) {
    let helper = if d.x.abs() < 0.9 { Vec3::X } else { Vec3::Y };
    let u = d.cross(helper).normalized().expect("helper not parallel");
    (u, d.cross(u))
}

/// Whether some polygon edge passes within the tube radius of the ray line.
fn tube_reaches_edge(vertices: &[Vec3], ray: &Ray) -> bool {
    let across = |p: Vec3| {
        let v = p - ray.origin;
        v - ray.dir * v.dot(ray.dir)
    };
    (0..vertices.len()).any(|i| {
        let (a, b) = (vertices[i], vertices[(i + 1) % vertices.len()]);
        let (pa, pb) = (across(a), across(b));
        let e = pb - pa;
        let s = if e.norm_squared() > 0.0 { (-pa.dot(e) / e.norm_squared()).clamp(0.0, 1.0) } else { 0.0 };
        let q = a + (b - a) * s;
        let along = (q - ray.origin).dot(ray.dir).max(0.0);
        (pa + e * s).norm() <= ray.half_angle * (ray.travelled + along)
    })
}

/// Siblings for a tube whose footprint crosses the edge of the surface it hit: probe
/// rays on a ring at the tube boundary, one sibling per other surface they reach. A
/// sibling at offset `δ` from the parent gets half-angle `H + δ`, so any direction the
/// parent tube contained is still inside it.
fn split_tube(env: &EnvironmentMap, ray: &Ray, hit: &Hit) -> Vec<Ray> {
    if !tube_reaches_edge(env.obstruction(hit.obstruction).vertices(), ray) {
        return Vec::new();
    }
    let source = ray.origin - ray.dir * ray.travelled;
    let (u, w) = perpendicular_basis(ray.dir);
    let mut seen = vec![hit.obstruction];
    let mut out = Vec::new();
    let offset = ray.half_angle;
    for k in 0..RING_PROBES {
        let phi = std::f64::consts::TAU * k as f64 / RING_PROBES as f64;
        let side = u * phi.cos() + w * phi.sin();
        let Some(dir) = (ray.dir * offset.cos() + side * offset.sin()).normalized() else {
            continue;
        };
        let origin = source + dir * ray.travelled;
        let Some((idx, _)) = env.first_obstruction(origin, dir, ray.departed) else { continue };
        if seen.contains(&idx) {
            continue;
        }
        seen.push(idx);
        out.push(Ray {
            origin,
            dir,
            half_angle: ray.half_angle + offset,
            splits: ray.splits + 1,
            sibling: true,
            ..ray.clone()
        });
    }
    out
}

pub(crate) fn launch_rays<G>(
    env: &EnvironmentMap,
    tess: &Tessellation,
    tx: Vec3,
    rx: Vec3,
    cfg: &TraceConfig,
    gate: &PowerGate,
    tx_gain: G,
    record_first_hits: bool,
) -> LaunchOutcome
where
    G: Fn(Vec3) -> f64 + Sync,
{
    let half_angle = tess.coverage_spacing() / 3f64.sqrt();
    tess.directions
        .par_iter()
        .enumerate()
        .fold(LaunchOutcome::default, |mut out, (launch, &dir)| {
            let g_t = tx_gain(dir);
            let mut stack = vec![Ray {
                origin: tx,
                dir,
                travelled: 0.0,
                loss_db: 0.0,
                surfaces: Vec::new(),
                reflections: 0,
                penetrations: 0,
                departed: None,
                back: 0.0,
                half_angle,
                splits: 0,
                sibling: false,
            }];
            while let Some(ray) = stack.pop() {
                out.segments += 1;
                out.hits_tested += 1;
                let hit = env.intersect_ray(ray.origin, ray.dir, ray.departed);
                let t_end = hit.map_or(f64::INFINITY, |h| h.distance);
                if passes_reception_sphere(ray.origin, ray.dir, ray.back, t_end, ray.travelled, rx, ray.half_angle)
                    && !out.candidates.contains(&ray.surfaces)
                {
                    out.candidates.insert(ray.surfaces.clone());
                }
                let Some(h) = hit else { continue };
                let travelled = ray.travelled + h.distance;
                if record_first_hits && ray.surfaces.is_empty() && !ray.sibling {
                    out.first_hits.push(FirstHit {
                        launch: launch as u32,
                        dir: ray.dir,
                        hit: h,
                    });
                }
                if gate.enabled {
                    let best = gate.base_dbm + g_t - fspl_db_unchecked(travelled, cfg.frequency_ghz) - ray.loss_db;
                    if best < gate.sensitivity_dbm {
                        continue;
                    }
                }
                if !ray.sibling && ray.splits < MAX_SPLITS && ray.surfaces.len() < 3 {
                    let siblings = split_tube(env, &ray, &h);
                    out.segments += siblings.len();
                    stack.extend(siblings);
                }
                let material = env.material_of(h.obstruction);
                if !material.is_opaque() && ray.penetrations < cfg.max_penetrations {
                    let mut surfaces = ray.surfaces.clone();
                    surfaces.push((h.obstruction, InteractionKind::Penetration));
                    stack.push(Ray {
                        origin: h.point,
                        dir: ray.dir,
                        travelled,
                        loss_db: ray.loss_db + material.effective_penetration_loss_db().unwrap_or(0.0),
                        surfaces,
                        reflections: ray.reflections,
                        penetrations: ray.penetrations + 1,
                        departed: Some(h.obstruction),
                        back: h.distance,
                        half_angle: ray.half_angle,
                        splits: ray.splits,
                        sibling: false,
                    });
                }
                if ray.reflections < cfg.max_reflections {
                    let n = env.obstruction(h.obstruction).normal();
                    let mut surfaces = ray.surfaces;
                    surfaces.push((h.obstruction, InteractionKind::Reflection));
                    stack.push(Ray {
                        origin: h.point,
                        dir: ray.dir.reflect(n).normalized().unwrap_or(ray.dir),
                        travelled,
                        loss_db: ray.loss_db + material.effective_reflection_loss_db(),
                        surfaces,
                        reflections: ray.reflections + 1,
                        penetrations: ray.penetrations,
                        departed: Some(h.obstruction),
                        back: h.distance,
                        half_angle: ray.half_angle,
                        splits: ray.splits,
                        sibling: false,
                    });
                }
            }
            out
        })
        .reduce(LaunchOutcome::default, LaunchOutcome::merge)
}
