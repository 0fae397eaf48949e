//! Power delay profile and spreads at a few receiver positions.

use std::path::Path;

use mmray::antenna::{AntennaPattern, AntennaPose};
use mmray::channel_stats::{compare_statistics, spread_report, synthesize_pdp};
use mmray::geometry::Vec3;
use mmray::io::read_environment;
use mmray::tracer::{trace, TraceConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let env = read_environment(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/box_room.json"))?;
    let iso = AntennaPattern::isotropic(0.0);
    let tx = AntennaPose::new(Vec3::new(1.5, 5.0, 2.5), Vec3::X)?;
    let fine = TraceConfig {
        tessellation_frequency: 20,
        max_reflections: 3,
        ..TraceConfig::default()
    };
    let coarse = TraceConfig {
        max_reflections: 1,
        ..fine.clone()
    };
    let mut full = Vec::new();
    let mut first_order = Vec::new();
    for p in [Vec3::new(6.0, 4.0, 1.5), Vec3::new(16.0, 3.0, 1.5), Vec3::new(18.0, 9.0, 1.5)] {
        let rx = AntennaPose::new(p, -Vec3::X)?;
        let a = trace(&env, &tx, &rx, &iso, &iso, &fine)?;
        let b = trace(&env, &tx, &rx, &iso, &iso, &coarse)?;
        let pdp = synthesize_pdp(&a.components, 2.5)?;
        let rep = spread_report(&a.components);
        println!(
            "rx ({:.0}, {:.0}): {} paths in {} delay bins, delay spread {:.2} ns, angular spread {:.1}°",
            p.x,
            p.y,
            rep.n_components,
            pdp.bins.len(),
            rep.rms_delay_spread_ns,
            rep.rms_angular_spread_deg
        );
        full.push(rep);
        first_order.push(spread_report(&b.components));
    }
    println!("up to 3 bounces vs single bounce:");
    for row in compare_statistics(&full, &first_order)? {
        println!(
            "  {:<20} {:>7.2} {:>7.2}  Δ {:>6.2}",
            row.statistic, row.mean_measured, row.mean_predicted, row.mean_delta
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
