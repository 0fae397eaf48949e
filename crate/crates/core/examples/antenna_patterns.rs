//! Horn gains off boresight for the sounder antennas, and the free-space budget.

use mmray::antenna::{synthetic_pattern, AntennaPose};
use mmray::geometry::Vec3;
use mmray::propagation::fspl_db;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let horns = [(28.0, 30.0, 15.0), (28.0, 10.9, 24.5), (73.0, 7.0, 27.0), (142.0, 8.0, 27.0)];
    let pose = AntennaPose::new(Vec3::ZERO, Vec3::X)?;
    for (f, hpbw, gain) in horns {
        let p = synthetic_pattern(hpbw, gain)?;
        let off: Vec<String> = [0.0f64, hpbw / 2.0, hpbw, 45.0]
            .iter()
            .map(|deg| {
                // Same gain whichever way the offset is taken around boresight.
                let d = Vec3::new(deg.to_radians().cos(), 0.0, deg.to_radians().sin());
                format!("{:>6.1}", p.gain_toward(&pose, d))
            })
            .collect();
        println!(
            "{f:>5} GHz horn {hpbw:>4.1}° {gain:>4.1} dBi  gain at 0/½HPBW/HPBW/45°: {}  FSPL(1 m) {:.2} dB",
            off.join(" "),
            fspl_db(1.0, f)?
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
