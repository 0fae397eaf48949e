mod common;

use common::{image_method, random_box_room, C};
use mmray::antenna::{AntennaPattern, AntennaPose};
use mmray::geometry::{tessellate_icosahedron, Vec3};
use mmray::io::read_environment;
use mmray::tracer::{trace, InteractionKind, MultipathComponent, TraceConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn box_config() -> TraceConfig {
    TraceConfig {
        tessellation_frequency: 10,
        max_reflections: 2,
        max_penetrations: 0,
        rx_sensitivity_dbm: -400.0,
        ..TraceConfig::default()
    }
}

fn walls_of(c: &MultipathComponent) -> Vec<String> {
    c.surface_signature.0.iter().map(|e| e.obstruction.clone()).collect()
}

#[test]
fn box_rooms_match_image_method() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let iso = AntennaPattern::isotropic(0.0);
    for _ in 0..5 {
        let room = random_box_room(&mut rng);
        let tx = AntennaPose::new(room.tx, Vec3::X).unwrap();
        let rx = AntennaPose::new(room.rx, Vec3::X).unwrap();
        let got = trace(&room.env, &tx, &rx, &iso, &iso, &box_config()).unwrap();
        let reference = image_method(&room.env, room.tx, room.rx, 2, 0.0, 28.0);
        let mut comps = got.components.clone();
        comps.sort_by_key(walls_of);
        let names: Vec<_> = comps.iter().map(walls_of).collect();
        let expect: Vec<_> = reference.iter().map(|r| r.walls.clone()).collect();
        assert_eq!(names, expect);
        for (c, r) in comps.iter().zip(&reference) {
            assert!((c.path_length_m - r.length).abs() < 1e-6);
            assert!((c.power_dbm - r.power_dbm).abs() < 1e-6);
        }
    }
}

#[test]
fn reflections_obey_snell_and_tof() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let iso = AntennaPattern::isotropic(0.0);
    let room = random_box_room(&mut rng);
    let tx = AntennaPose::new(room.tx, Vec3::X).unwrap();
    let rx = AntennaPose::new(room.rx, Vec3::X).unwrap();
    let got = trace(&room.env, &tx, &rx, &iso, &iso, &box_config()).unwrap();
    assert!(got.components.len() > 10);
    for c in &got.components {
        let length: f64 = c.points.windows(2).map(|p| p[0].distance(p[1])).sum();
        assert!((c.tof_ns - length / C * 1e9).abs() < 1e-6);
        for (k, i) in c.interactions.iter().enumerate() {
            assert_eq!(i.kind, InteractionKind::Reflection);
            let n = room.env.obstruction(room.env.obstruction_index(&i.obstruction).unwrap()).normal();
            let d_in = (c.points[k + 1] - c.points[k]).normalized().unwrap();
            let d_out = (c.points[k + 2] - c.points[k + 1]).normalized().unwrap();
            let mirrored = d_in - n * (2.0 * d_in.dot(n));
            assert!(mirrored.angle_to(d_out) < 1e-9);
        }
    }
}

#[test]
fn bvh_agrees_with_brute_force() {
    let env = read_environment(&common::fixture("box_room.json")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut hits = 0;
    for _ in 0..10_000 {
        let o = Vec3::new(rng.random_range(0.1..19.9), rng.random_range(0.1..9.9), rng.random_range(0.1..2.9));
        let d = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let Some(d) = d.normalized() else { continue };
        let fast = env.intersect_ray(o, d, None);
        let slow = env.intersect_ray_brute(o, d, None);
        match (fast, slow) {
            (Some(a), Some(b)) => {
                hits += 1;
                assert_eq!(a.obstruction, b.obstruction);
                assert!((a.distance - b.distance).abs() < 1e-12);
            }
            (None, None) => {}
            (a, b) => panic!("bvh {a:?} vs brute {b:?}"),
        }
    }
    assert!(hits > 9_000);
}

#[test]
fn tessellation_spacing_tracks_nominal() {
    for n in 1..=10u32 {
        let t = tessellate_icosahedron(n).unwrap();
        assert_eq!(t.len(), 10 * (n as usize).pow(2) + 2);
        let mean: f64 = t
            .directions
            .iter()
            .map(|d| {
                t.directions
                    .iter()
                    .filter(|o| *o != d)
                    .map(|o| d.angle_to(*o))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum::<f64>()
            / t.len() as f64;
        let nominal = (69.0 / n as f64).to_radians();
        assert!((mean - nominal).abs() / nominal < 0.15, "N={n}");
    }
}

#[test]
fn office_fixture_has_glass_penetration() {
    let env = read_environment(&common::fixture("box_room.json")).unwrap();
    let iso = AntennaPattern::isotropic(0.0);
    let tx = AntennaPose::new(Vec3::new(1.5, 5.0, 2.5), Vec3::X).unwrap();
    let rx = AntennaPose::new(Vec3::new(16.0, 3.0, 1.5), -Vec3::X).unwrap();
    let r = trace(&env, &tx, &rx, &iso, &iso, &TraceConfig { tx_power_dbm: 30.0, ..TraceConfig::default() }).unwrap();
    assert!(r.los_blocked);
    let best = &r.components[0];
    assert_eq!(best.surface_signature.to_string(), "glass_partition:P");
    let d = tx.position.distance(rx.position);
    let glass = env.materials()["glass"].penetration_loss_db.unwrap();
    assert!((best.power_dbm - (30.0 - common::friis_db(d, 28.0) - glass)).abs() < 1e-9);
}
