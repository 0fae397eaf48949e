//! Plant material losses, simulate noisy directional measurements, fit them back.

use std::path::Path;

use mmray::antenna::synthetic_pattern;
use mmray::calibration::{
    assemble_system, error_statistics, objective_linear, simulate_measurements, solve_linear_domain,
    solve_log_domain, SyntheticCampaign,
};
use mmray::geometry::Vec3;
use mmray::io::read_environment;
use mmray::tracer::TraceConfig;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let env = read_environment(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/box_room.json"))?;
    let horn = synthetic_pattern(30.0, 15.0)?;
    let config = TraceConfig {
        tessellation_frequency: 12,
        max_reflections: 2,
        ..TraceConfig::default()
    };
    let mut placements = Vec::new();
    for x in [3.0, 5.5, 8.0, 11.0, 14.0, 17.0] {
        for y in [2.0, 5.0, 7.0, 9.0] {
            placements.push((format!("rx_{x}_{y}"), Vec3::new(1.5, 5.0, 2.5), Vec3::new(x, y, 1.5)));
        }
    }
    let campaign = SyntheticCampaign {
        noise_std_db: 1.0,
        paths_per_placement: 5,
        ..SyntheticCampaign::default()
    };
    let records = simulate_measurements(&env, &placements, &horn, &horn, &config, &campaign)?;
    let system = assemble_system(&records, &env, &horn, &horn, &config, 60.0)?;
    let log = solve_log_domain(&system)?;
    let lin = solve_linear_domain(&system, 42)?;

    println!("{} records, rank {} of {}", system.rows(), log.rank, log.retained_columns.len());
    println!("{:<16} {:>6} {:>8} {:>8}", "material", "truth", "log fit", "lin fit");
    let show = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
    for (name, m) in env.materials() {
        println!(
            "{:<16} {:>6.1} {:>8} {:>8}  reflection",
            name,
            m.reflection_loss_db,
            show(log.losses.reflection_db(name)),
            show(lin.losses.reflection_db(name))
        );
        if let Some(p) = m.penetration_loss_db {
            println!(
                "{:<16} {:>6.1} {:>8} {:>8}  penetration",
                "",
                p,
                show(log.losses.penetration_db(name)),
                show(lin.losses.penetration_db(name))
            );
        }
    }
    println!(
        "OF_dB  log {:.3}  lin {:.3}\nOF_lin log {:.4} lin {:.4}",
        log.of_db_rms,
        lin.of_db_rms,
        objective_linear(&system, &log.losses),
        lin.of_lin
    );
    let stats = error_statistics(&log.record_residuals)?;
    println!(
        "error σ {:.2} dB, |error| σ {:.2} dB, AIC picks {:?}",
        stats.std_db, stats.abs_std_db, stats.best_fit
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
