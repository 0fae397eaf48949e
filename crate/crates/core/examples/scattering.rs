//! Diffuse scattering from a rough wall next to its specular reflection.

use std::collections::BTreeMap;

use mmray::antenna::{AntennaPattern, AntennaPose};
use mmray::geometry::{EnvironmentMap, Obstruction, Vec3};
use mmray::propagation::{is_rough, rayleigh_critical_height, scatter_gain, wavelength_m, MaterialProfile, ScatteringParameters};
use mmray::tracer::{trace, TraceConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let lambda = wavelength_m(142.0);
    let mut brick = MaterialProfile::opaque("brick", 18.9);
    brick.roughness_height_m = 1.5e-3;
    for deg in [0.0f64, 30.0, 60.0] {
        let th = deg.to_radians();
        println!(
            "142 GHz, incidence {deg:>4.0}°: critical height {:.3} mm, rough: {}",
            rayleigh_critical_height(lambda, th)? * 1e3,
            is_rough(&brick, lambda, th)
        );
    }
    let params = ScatteringParameters::default();
    println!(
        "lobe gain: forward peak {:.2}, backward peak {:.2}",
        scatter_gain(0.0, std::f64::consts::PI, &params)?,
        scatter_gain(std::f64::consts::PI, 0.0, &params)?
    );

    let wall = Obstruction::new(
        "facade",
        "brick",
        vec![
            Vec3::new(-10.0, 6.0, -5.0),
            Vec3::new(30.0, 6.0, -5.0),
            Vec3::new(30.0, 6.0, 10.0),
            Vec3::new(-10.0, 6.0, 10.0),
        ],
    )?;
    let env = EnvironmentMap::new(vec![wall], BTreeMap::from([("brick".to_string(), brick)]), None)?;
    let tx = AntennaPose::new(Vec3::new(0.0, 0.0, 1.5), Vec3::X)?;
    let rx = AntennaPose::new(Vec3::new(20.0, 0.0, 1.5), -Vec3::X)?;
    let iso = AntennaPattern::isotropic(0.0);
    for on in [false, true] {
        let config = TraceConfig {
            frequency_ghz: 142.0,
            tx_power_dbm: 30.0,
            tessellation_frequency: 20,
            scattering_enabled: on,
            ..TraceConfig::default()
        };
        let r = trace(&env, &tx, &rx, &iso, &iso, &config)?;
        let scattered: Vec<_> = r.components.iter().filter(|c| c.n_scatterings() > 0).collect();
        let strongest = scattered.iter().map(|c| c.power_dbm).fold(f64::NEG_INFINITY, f64::max);
        println!(
            "scattering {}: {} components, {} scattered{}",
            if on { "on " } else { "off" },
            r.components.len(),
            scattered.len(),
            if scattered.is_empty() { String::new() } else { format!(", strongest {strongest:.1} dBm") }
        );
        if let Some(spec) = r.components.iter().find(|c| c.n_reflections() == 1) {
            println!("  specular reflection {:.1} dBm", spec.power_dbm);
        }
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
