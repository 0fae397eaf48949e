//! Shared fixtures: random box rooms and an exhaustive image-method reference.
#![allow(dead_code)]

use std::collections::BTreeMap;

use mmray::geometry::{EnvironmentMap, Obstruction, Vec3};
use mmray::propagation::MaterialProfile;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const C: f64 = 299_792_458.0;

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Free-space loss written out from the Friis formula.
pub fn friis_db(d: f64, f_ghz: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * d * f_ghz * 1e9 / C).log10()
}

pub struct BoxRoom {
    pub env: EnvironmentMap,
    pub tx: Vec3,
    pub rx: Vec3,
}

/// Axis box `size`, yawed by `yaw` about its floor centre, then shifted by `origin`.
pub fn box_walls(size: Vec3, yaw: f64, origin: Vec3, with_ceiling: bool) -> Vec<(String, Vec<Vec3>)> {
    let (c, s) = (yaw.cos(), yaw.sin());
    let place = |p: Vec3| {
        let q = Vec3::new(p.x - size.x / 2.0, p.y - size.y / 2.0, p.z);
        origin + Vec3::new(c * q.x - s * q.y, s * q.x + c * q.y, q.z)
    };
    let (x, y, z) = (size.x, size.y, size.z);
    let v = |a: f64, b: f64, h: f64| Vec3::new(a, b, h);
    let mut walls = vec![
        ("floor", vec![v(0.0, 0.0, 0.0), v(x, 0.0, 0.0), v(x, y, 0.0), v(0.0, y, 0.0)]),
        ("south", vec![v(0.0, 0.0, 0.0), v(x, 0.0, 0.0), v(x, 0.0, z), v(0.0, 0.0, z)]),
        ("east", vec![v(x, 0.0, 0.0), v(x, y, 0.0), v(x, y, z), v(x, 0.0, z)]),
        ("north", vec![v(x, y, 0.0), v(0.0, y, 0.0), v(0.0, y, z), v(x, y, z)]),
        ("west", vec![v(0.0, y, 0.0), v(0.0, 0.0, 0.0), v(0.0, 0.0, z), v(0.0, y, z)]),
    ];
    if with_ceiling {
        walls.push(("ceiling", vec![v(0.0, 0.0, z), v(x, 0.0, z), v(x, y, z), v(0.0, y, z)]));
    }
    walls
        .into_iter()
        .map(|(id, vs)| (id.to_string(), vs.into_iter().map(place).collect()))
        .collect()
}

/// Opaque box room (five or six walls) with one material per wall and TX/RX inside.
pub fn random_box_room(rng: &mut ChaCha8Rng) -> BoxRoom {
    let size = Vec3::new(rng.random_range(4.0..15.0), rng.random_range(4.0..15.0), rng.random_range(2.5..4.0));
    let yaw = if rng.random_bool(0.5) { rng.random_range(0.0..std::f64::consts::TAU) } else { 0.0 };
    let origin = Vec3::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0), 0.0);
    let walls = box_walls(size, yaw, origin, rng.random_bool(0.7));
    let mut materials = BTreeMap::new();
    let mut obstructions = Vec::new();
    for (id, vs) in walls {
        let m = format!("m_{id}");
        materials.insert(m.clone(), MaterialProfile::opaque(m.clone(), rng.random_range(2.0..15.0)));
        obstructions.push(Obstruction::new(id, m, vs).unwrap());
    }
    let env = EnvironmentMap::new(obstructions, materials, None).unwrap();
    let (c, s) = (yaw.cos(), yaw.sin());
    let inside = |rng: &mut ChaCha8Rng| {
        let q = Vec3::new(
            rng.random_range(0.3..size.x - 0.3) - size.x / 2.0,
            rng.random_range(0.3..size.y - 0.3) - size.y / 2.0,
            rng.random_range(0.3..size.z - 0.3),
        );
        origin + Vec3::new(c * q.x - s * q.y, s * q.x + c * q.y, q.z)
    };
    let tx = inside(rng);
    let mut rx = inside(rng);
    while rx.distance(tx) < 1.0 {
        rx = inside(rng);
    }
    BoxRoom { env, tx, rx }
}

#[derive(Debug, Clone)]
pub struct ReferencePath {
    pub walls: Vec<String>,
    pub points: Vec<Vec3>,
    pub length: f64,
    pub power_dbm: f64,
}

fn plane(vs: &[Vec3]) -> (Vec3, Vec3) {
    let n = (vs[1] - vs[0]).cross(vs[2] - vs[0]);
    (vs[0], n / n.norm())
}

fn inside_convex(vs: &[Vec3], n: Vec3, p: Vec3) -> bool {
    let tol = 1e-9;
    (0..vs.len()).all(|i| {
        let a = vs[i];
        let b = vs[(i + 1) % vs.len()];
        (b - a).cross(p - a).dot(n) >= -tol
    })
}

/// Parameter along `a -> b` where the segment meets the wall, if it does inside it.
fn segment_hit(vs: &[Vec3], a: Vec3, b: Vec3) -> Option<f64> {
    let (o, n) = plane(vs);
    let da = (a - o).dot(n);
    let db = (b - o).dot(n);
    if da * db >= 0.0 {
        return None;
    }
    let t = da / (da - db);
    inside_convex(vs, n, a + (b - a) * t).then_some(t)
}

/// Every specular path with at most `max_bounces` reflections, found by mirroring the
/// transmitter forward through each wall sequence and walking back from the receiver.
pub fn image_method(env: &EnvironmentMap, tx: Vec3, rx: Vec3, max_bounces: usize, tx_power_dbm: f64, f_ghz: f64) -> Vec<ReferencePath> {
    let walls: Vec<&Obstruction> = env.obstructions().iter().collect();
    let mut sequences: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_bounces {
        let mut next = Vec::new();
        for s in &frontier {
            for w in 0..walls.len() {
                if s.last() != Some(&w) {
                    let mut t = s.clone();
                    t.push(w);
                    next.push(t);
                }
            }
        }
        sequences.extend(next.iter().cloned());
        frontier = next;
    }

    let mut out = Vec::new();
    'seq: for seq in sequences {
        let mut images = vec![tx];
        for &w in &seq {
            let (o, n) = plane(walls[w].vertices());
            let p = *images.last().unwrap();
            images.push(p - n * (2.0 * (p - o).dot(n)));
        }
        let mut points = vec![rx];
        let mut target = rx;
        for k in (0..seq.len()).rev() {
            let vs = walls[seq[k]].vertices();
            let Some(t) = segment_hit(vs, target, images[k + 1]) else { continue 'seq };
            target = target + (images[k + 1] - target) * t;
            points.push(target);
        }
        points.push(tx);
        points.reverse();
        for (i, pair) in points.windows(2).enumerate() {
            for (w, wall) in walls.iter().enumerate() {
                let endpoint_wall = (i > 0 && seq[i - 1] == w) || (i < seq.len() && seq[i] == w);
                if endpoint_wall {
                    continue;
                }
                if let Some(t) = segment_hit(wall.vertices(), pair[0], pair[1]) {
                    if t > 1e-9 && t < 1.0 - 1e-9 {
                        continue 'seq;
                    }
                }
            }
        }
        let length: f64 = points.windows(2).map(|p| p[0].distance(p[1])).sum();
        let loss: f64 = seq.iter().map(|&w| env.materials()[&walls[w].material_id].reflection_loss_db).sum();
        out.push(ReferencePath {
            walls: seq.iter().map(|&w| walls[w].id.clone()).collect(),
            points,
            length,
            power_dbm: tx_power_dbm - friis_db(length, f_ghz) - loss,
        });
    }
    out.sort_by(|a, b| a.walls.cmp(&b.walls));
    out
}

/// 30×20×3 m office: six walls plus 44 random partitions, desks and cabinets.
pub fn office_50(seed: u64) -> (EnvironmentMap, Vec3, Vec3) {
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut materials = BTreeMap::new();
    materials.insert("concrete".to_string(), MaterialProfile::opaque("concrete", 8.1));
    materials.insert("drywall".to_string(), MaterialProfile::new("drywall", 6.1, Some(4.0)));
    materials.insert("glass".to_string(), MaterialProfile::new("glass", 3.5, Some(3.2)));
    materials.insert("wood".to_string(), MaterialProfile::new("wood", 3.5, Some(2.4)));
    let mut obstructions: Vec<Obstruction> = box_walls(Vec3::new(30.0, 20.0, 3.0), 0.0, Vec3::new(15.0, 10.0, 0.0), true)
        .into_iter()
        .map(|(id, vs)| Obstruction::new(id, "concrete", vs).unwrap())
        .collect();
    let kinds = ["drywall", "glass", "wood"];
    while obstructions.len() < 50 {
        let i = obstructions.len();
        let (x, y) = (rng.random_range(2.0..28.0), rng.random_range(2.0..18.0));
        let w = rng.random_range(1.0..4.0);
        let h = rng.random_range(1.0..2.5);
        let yaw: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let d = Vec3::new(yaw.cos(), yaw.sin(), 0.0) * (w / 2.0);
        let (a, b) = (Vec3::new(x, y, 0.0) - d, Vec3::new(x, y, 0.0) + d);
        let up = Vec3::new(0.0, 0.0, h);
        let m = kinds[rng.random_range(0..kinds.len())];
        obstructions.push(Obstruction::new(format!("panel{i}"), m, vec![a, b, b + up, a + up]).unwrap());
    }
    let env = EnvironmentMap::new(obstructions, materials, None).unwrap();
    (env, Vec3::new(3.0, 3.0, 2.5), Vec3::new(25.0, 15.0, 1.5))
}
