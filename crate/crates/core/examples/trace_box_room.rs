//! Trace one link through the office fixture and list the strongest paths.

use std::path::Path;

use mmray::antenna::{AntennaPattern, AntennaPose};
use mmray::geometry::Vec3;
use mmray::io::read_environment;
use mmray::tracer::{trace, TraceConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let env = read_environment(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/box_room.json"))?;
    let tx = AntennaPose::new(Vec3::new(1.5, 5.0, 2.5), Vec3::X)?;
    let rx = AntennaPose::new(Vec3::new(16.0, 3.0, 1.5), -Vec3::X)?;
    let iso = AntennaPattern::isotropic(0.0);
    let config = TraceConfig {
        tessellation_frequency: 30,
        max_reflections: 3,
        tx_power_dbm: 30.0,
        ..TraceConfig::default()
    };
    let start = std::time::Instant::now();
    let result = trace(&env, &tx, &rx, &iso, &iso, &config)?;
    println!(
        "{} components in {:.1} ms ({} rays, {} candidates), direct path {}",
        result.components.len(),
        start.elapsed().as_secs_f64() * 1e3,
        result.stats.rays_launched,
        result.stats.candidates,
        if result.los_blocked { "obstructed" } else { "clear" }
    );
    for c in result.components.iter().take(8) {
        let (az, el) = c.aoa.to_az_el_deg();
        println!(
            "{:>8.2} dBm {:>7.2} ns  AoA {:>7.1}° {:>5.1}°  {}",
            c.power_dbm, c.tof_ns, az, el, c.surface_signature
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
